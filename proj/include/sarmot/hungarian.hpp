#pragma once

#include <limits>
#include <utility>
#include <vector>

namespace sarmot {

/// Dense row-major real matrix.
class CostMatrix {
 public:
  CostMatrix() = default;
  CostMatrix(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {}
  CostMatrix(int rows, int cols, std::vector<double> values);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }
  double& operator()(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  double operator()(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  const std::vector<double>& values() const { return data_; }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

struct AssociationResult {
  std::vector<std::pair<int, int>> matches;  // (row, col), rows ascending
  std::vector<int> unmatched_rows;
  std::vector<int> unmatched_cols;
};

/// Minimum-cost one-to-one assignment of a rectangular matrix.
///
/// Entries that are +inf, NaN or above `max_cost` are inadmissible: the
/// solver first maximizes the number of admissible pairs, then minimizes their
/// total cost, and never reports an inadmissible pair as a match. With
/// max_cost = +inf and finite costs this is the plain optimal assignment.
AssociationResult hungarian(const CostMatrix& cost,
                            double max_cost = std::numeric_limits<double>::infinity());

/// Sum of costs over the matched pairs.
double assignment_cost(const CostMatrix& cost, const AssociationResult& r);

}  // namespace sarmot
