#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sarmot {

/// Malformed or inconsistent input data (files, shapes, values).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Axis-aligned box in pixel units, top-left origin, y grows downward.
struct BBox {
  double x = 0.0;
  double y = 0.0;
  double w = 1.0;
  double h = 1.0;

  BBox() = default;
  BBox(double x_, double y_, double w_, double h_);

  double cx() const { return x + 0.5 * w; }
  double cy() const { return y + 0.5 * h; }
  double area() const { return w * h; }

  friend bool operator==(const BBox&, const BBox&) = default;
};

/// Kalman measurement parameterization: center, aspect (w/h), height.
struct CxCyAH {
  double cx = 0.0;
  double cy = 0.0;
  double a = 1.0;
  double h = 1.0;

  friend bool operator==(const CxCyAH&, const CxCyAH&) = default;
};

CxCyAH to_cxcyah(const BBox& b);
BBox from_cxcyah(const CxCyAH& m);

/// Intersection over union. Symmetric, in [0,1].
double iou(const BBox& a, const BBox& b);

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// One observed target in one frame. Frames are 1-based.
///
/// class_id -1 marks "unspecified" (MOTChallenge files use it); any other
/// value must be non-negative.
struct Detection {
  int frame = 1;
  BBox bbox;
  double score = 1.0;
  int class_id = -1;
  std::optional<double> motion_awareness;
  std::optional<std::vector<double>> embedding;

  /// Throws DataError when a field violates its range.
  void validate() const;
};

using FrameDetections = std::vector<Detection>;

struct TrackPoint {
  int frame = 1;
  BBox bbox;
};

struct Trajectory {
  int id = 0;
  int class_id = -1;
  std::vector<TrackPoint> points;  // frames strictly increasing
};

/// Finalized per-sequence tracking output (or ground truth).
class TrajectorySet {
 public:
  TrajectorySet() = default;

  /// Appends one box; creates the trajectory on first sight of `id`.
  /// Throws DataError if `frame` does not exceed the trajectory's last frame.
  void add(int id, int frame, const BBox& box, int class_id = -1);

  const std::vector<Trajectory>& tracks() const { return tracks_; }
  bool empty() const { return tracks_.empty(); }
  std::size_t box_count() const;

  /// Smallest and largest frame index over all boxes; nullopt when empty.
  std::optional<std::pair<int, int>> frame_range() const;

  /// Per-frame view: frame -> list of (track id, box), ids ascending.
  std::map<int, std::vector<std::pair<int, BBox>>> by_frame() const;

  /// Keeps only trajectories whose class matches.
  TrajectorySet filter_class(int class_id) const;

 private:
  std::vector<Trajectory> tracks_;
  std::map<int, std::size_t> index_;
};

/// W consecutive frame indices starting at `first_frame`.
class FrameWindow {
 public:
  FrameWindow(int window_size, int first_frame);

  int size() const { return static_cast<int>(frames_.size()); }
  const std::vector<int>& frames() const { return frames_; }

 private:
  std::vector<int> frames_;
};

}  // namespace sarmot
