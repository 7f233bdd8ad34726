#include "sarmot/assoc.hpp"

#include <algorithm>
#include <limits>

namespace sarmot {

CostMatrix iou_cost(std::span<const BBox> tracks, std::span<const BBox> detections) {
  const int n = static_cast<int>(tracks.size());
  const int m = static_cast<int>(detections.size());
  CostMatrix out(n, m);
#pragma omp parallel for schedule(static) if (n * m > 1024)
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) out(i, j) = 1.0 - iou(tracks[i], detections[j]);
  }
  return out;
}

CostMatrix appearance_cost(std::span<const Embedding> tracks, std::span<const Embedding> detections) {
  const int n = static_cast<int>(tracks.size());
  const int m = static_cast<int>(detections.size());
  CostMatrix out(n, m, std::numeric_limits<double>::quiet_NaN());
#pragma omp parallel for schedule(static) if (n * m > 256)
  for (int i = 0; i < n; ++i) {
    if (!tracks[i]) continue;
    const auto& a = *tracks[i];
    for (int j = 0; j < m; ++j) {
      if (!detections[j] || detections[j]->size() != a.size()) continue;
      const auto& b = *detections[j];
      double dot = 0.0;
      for (std::size_t k = 0; k < a.size(); ++k) dot += a[k] * b[k];
      out(i, j) = std::clamp((1.0 - dot) * 0.5, 0.0, 1.0);
    }
  }
  return out;
}

CostMatrix maa_fuse(const CostMatrix& iou_c, const CostMatrix& app_c,
                    std::span<const double> v_track, std::span<const double> v_det,
                    const MaaParams& params) {
  if (iou_c.rows() != app_c.rows() || iou_c.cols() != app_c.cols() ||
      v_track.size() != static_cast<std::size_t>(iou_c.rows()) ||
      v_det.size() != static_cast<std::size_t>(iou_c.cols())) {
    throw DataError("maa_fuse: shape mismatch");
  }
  CostMatrix out = iou_c;
  if (params.mode == AppearanceMode::Off) return out;
  const double lam = params.lambda_app;
  for (int i = 0; i < out.rows(); ++i) {
    for (int j = 0; j < out.cols(); ++j) {
      const double app = app_c(i, j);
      if (is_absent(app)) continue;
      if (params.mode == AppearanceMode::MotionGated &&
          maa_gate_active(v_track[i], v_det[j], params.tau_v)) {
        continue;
      }
      out(i, j) = lam * app + (1.0 - lam) * iou_c(i, j);
    }
  }
  return out;
}

void apply_class_gate(CostMatrix& cost, std::span<const int> track_classes,
                      std::span<const int> det_classes) {
  for (int i = 0; i < cost.rows(); ++i) {
    for (int j = 0; j < cost.cols(); ++j) {
      const int a = track_classes[i];
      const int b = det_classes[j];
      if (a >= 0 && b >= 0 && a != b) cost(i, j) = std::numeric_limits<double>::infinity();
    }
  }
}

}  // namespace sarmot
