#include "sarmot/hungarian.hpp"

#include <algorithm>
#include <cmath>

#include "sarmot/core.hpp"

namespace sarmot {

CostMatrix::CostMatrix(int rows, int cols, std::vector<double> values)
    : rows_(rows), cols_(cols), data_(std::move(values)) {
  if (data_.size() != static_cast<std::size_t>(rows) * cols) {
    throw DataError("cost matrix value count does not match its shape");
  }
}

namespace {

// Shortest augmenting path with row/column potentials, n <= m.
// a is 1-based (n+1) x (m+1); returns col_of_row (1-based cols, 0 = none).
std::vector<int> solve_rows_le_cols(const std::vector<std::vector<double>>& a, int n, int m) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<int> p(m + 1, 0), way(m + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = a[i0][j] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> col_of_row(n + 1, 0);
  for (int j = 1; j <= m; ++j) {
    if (p[j] != 0) col_of_row[p[j]] = j;
  }
  return col_of_row;
}

}  // namespace

AssociationResult hungarian(const CostMatrix& cost, double max_cost) {
  AssociationResult result;
  const int rows = cost.rows();
  const int cols = cost.cols();
  const auto admissible = [&](double c) { return !std::isnan(c) && c != INFINITY && c <= max_cost; };

  if (!cost.empty()) {
    double lo = INFINITY;
    double hi = -INFINITY;
    for (double c : cost.values()) {
      if (!admissible(c)) continue;
      lo = std::min(lo, c);
      hi = std::max(hi, c);
    }
    if (lo <= hi) {
      // Any assignment using fewer forbidden cells is strictly cheaper.
      const int k = std::min(rows, cols);
      const double forbidden = hi + (hi - lo + 1.0) * (k + 1);
      const bool transpose = rows > cols;
      const int n = transpose ? cols : rows;
      const int m = transpose ? rows : cols;
      std::vector<std::vector<double>> a(n + 1, std::vector<double>(m + 1, 0.0));
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) {
          const double c = transpose ? cost(j, i) : cost(i, j);
          a[i + 1][j + 1] = admissible(c) ? c : forbidden;
        }
      }
      const std::vector<int> col_of_row = solve_rows_le_cols(a, n, m);
      for (int i = 1; i <= n; ++i) {
        const int j = col_of_row[i];
        if (j == 0) continue;
        const int r = transpose ? j - 1 : i - 1;
        const int c = transpose ? i - 1 : j - 1;
        if (admissible(cost(r, c))) result.matches.emplace_back(r, c);
      }
      std::sort(result.matches.begin(), result.matches.end());
    }
  }

  std::vector<char> row_used(static_cast<std::size_t>(rows), 0);
  std::vector<char> col_used(static_cast<std::size_t>(cols), 0);
  for (const auto& [r, c] : result.matches) {
    row_used[r] = 1;
    col_used[c] = 1;
  }
  for (int r = 0; r < rows; ++r) {
    if (!row_used[r]) result.unmatched_rows.push_back(r);
  }
  for (int c = 0; c < cols; ++c) {
    if (!col_used[c]) result.unmatched_cols.push_back(c);
  }
  return result;
}

double assignment_cost(const CostMatrix& cost, const AssociationResult& r) {
  double total = 0.0;
  for (const auto& [i, j] : r.matches) total += cost(i, j);
  return total;
}

}  // namespace sarmot
