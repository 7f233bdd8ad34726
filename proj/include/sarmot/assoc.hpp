#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "sarmot/core.hpp"
#include "sarmot/hungarian.hpp"

namespace sarmot {

using Embedding = std::optional<std::vector<double>>;

/// Appearance cost entries are NaN where either side has no embedding.
inline bool is_absent(double cost) { return std::isnan(cost); }

/// 1 - IoU for every (track box, detection box) pair.
CostMatrix iou_cost(std::span<const BBox> tracks, std::span<const BBox> detections);

/// (1 - cosine) / 2 for unit embeddings; NaN when either is missing or the
/// dimensions disagree.
CostMatrix appearance_cost(std::span<const Embedding> tracks, std::span<const Embedding> detections);

enum class AppearanceMode {
  Off,           // IoU only
  MotionGated,   // appearance discarded for fast pairs, blended otherwise
  Always,        // appearance blended regardless of motion
};

struct MaaParams {
  double tau_v = 0.5;
  double lambda_app = 0.3;
  AppearanceMode mode = AppearanceMode::MotionGated;
};

/// Motion-aware fusion. Per pair, g = max(v_track, v_det); when g >= tau_v or
/// the appearance entry is absent the IoU cost is copied unchanged, otherwise
/// lambda_app * app + (1 - lambda_app) * iou.
CostMatrix maa_fuse(const CostMatrix& iou_c, const CostMatrix& app_c,
                    std::span<const double> v_track, std::span<const double> v_det,
                    const MaaParams& params);

/// True when the appearance clue is discarded for this pair.
inline bool maa_gate_active(double v_track, double v_det, double tau_v) {
  return std::max(v_track, v_det) >= tau_v;
}

/// Sets +inf where both classes are specified (>= 0) and differ.
void apply_class_gate(CostMatrix& cost, std::span<const int> track_classes,
                      std::span<const int> det_classes);

}  // namespace sarmot
