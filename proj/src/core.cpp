#include "sarmot/core.hpp"

#include <algorithm>
#include <cmath>

namespace sarmot {

BBox::BBox(double x_, double y_, double w_, double h_) : x(x_), y(y_), w(w_), h(h_) {
  if (!(w > 0.0) || !(h > 0.0)) {
    throw DataError("BBox requires positive width and height");
  }
}

CxCyAH to_cxcyah(const BBox& b) { return {b.cx(), b.cy(), b.w / b.h, b.h}; }

BBox from_cxcyah(const CxCyAH& m) {
  const double w = m.a * m.h;
  return BBox(m.cx - 0.5 * w, m.cy - 0.5 * m.h, w, m.h);
}

double iou(const BBox& a, const BBox& b) {
  // corner form throughout, so identical boxes give exactly 1
  const double ax2 = a.x + a.w, ay2 = a.y + a.h, bx2 = b.x + b.w, by2 = b.y + b.h;
  const double ix = std::min(ax2, bx2) - std::max(a.x, b.x);
  const double iy = std::min(ay2, by2) - std::max(a.y, b.y);
  if (ix <= 0.0 || iy <= 0.0) return 0.0;
  const double inter = ix * iy;
  const double area_a = (ax2 - a.x) * (ay2 - a.y);
  const double area_b = (bx2 - b.x) * (by2 - b.y);
  return std::min(1.0, inter / (area_a + area_b - inter));
}

void Detection::validate() const {
  if (frame < 1) throw DataError("detection frame must be >= 1");
  if (!(score >= 0.0 && score <= 1.0)) throw DataError("detection score outside [0,1]");
  if (class_id < -1) throw DataError("detection class_id must be >= -1");
  if (motion_awareness && !(*motion_awareness >= 0.0 && *motion_awareness <= 1.0)) {
    throw DataError("motion awareness outside [0,1]");
  }
  if (embedding) {
    double n2 = 0.0;
    for (double v : *embedding) n2 += v * v;
    if (std::abs(std::sqrt(n2) - 1.0) > 1e-6) throw DataError("embedding is not unit norm");
  }
}

void TrajectorySet::add(int id, int frame, const BBox& box, int class_id) {
  auto it = index_.find(id);
  if (it == index_.end()) {
    it = index_.emplace(id, tracks_.size()).first;
    tracks_.push_back(Trajectory{id, class_id, {}});
  }
  auto& t = tracks_[it->second];
  if (!t.points.empty() && t.points.back().frame >= frame) {
    throw DataError("track " + std::to_string(id) + ": frame " + std::to_string(frame) +
                    " does not follow frame " + std::to_string(t.points.back().frame));
  }
  t.points.push_back({frame, box});
}

std::size_t TrajectorySet::box_count() const {
  std::size_t n = 0;
  for (const auto& t : tracks_) n += t.points.size();
  return n;
}

std::optional<std::pair<int, int>> TrajectorySet::frame_range() const {
  std::optional<std::pair<int, int>> r;
  for (const auto& t : tracks_) {
    for (const auto& p : t.points) {
      if (!r) {
        r = {p.frame, p.frame};
      } else {
        r->first = std::min(r->first, p.frame);
        r->second = std::max(r->second, p.frame);
      }
    }
  }
  return r;
}

std::map<int, std::vector<std::pair<int, BBox>>> TrajectorySet::by_frame() const {
  std::map<int, std::vector<std::pair<int, BBox>>> out;
  for (const auto& [id, idx] : index_) {
    for (const auto& p : tracks_[idx].points) out[p.frame].emplace_back(id, p.bbox);
  }
  return out;
}

TrajectorySet TrajectorySet::filter_class(int class_id) const {
  TrajectorySet out;
  for (const auto& t : tracks_) {
    if (t.class_id != class_id) continue;
    for (const auto& p : t.points) out.add(t.id, p.frame, p.bbox, t.class_id);
  }
  return out;
}

FrameWindow::FrameWindow(int window_size, int first_frame) {
  if (window_size < 1) throw DataError("window size must be >= 1");
  if (first_frame < 1) throw DataError("frames are 1-based");
  frames_.resize(static_cast<std::size_t>(window_size));
  for (int i = 0; i < window_size; ++i) frames_[static_cast<std::size_t>(i)] = first_frame + i;
}

}  // namespace sarmot
