#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "sarmot/grid.hpp"
#include "sarmot/metrics.hpp"
#include "sarmot/synthsim.hpp"
#include "sarmot/tracker.hpp"

namespace sarmot {

struct PipelineRun {
  Scene scene;
  std::map<int, FrameDetections> detections;
  TrajectorySet tracks;
  MetricsReport metrics;
};

/// Synthetic scene, perturbed detections, tracking over frames 1..T, metrics.
PipelineRun run_pipeline(const SynthConfig& synth, const TrackerConfig& tracker);

/// Tracks `dets` over frames 1..T of `scene` and evaluates against its GT.
MetricsReport track_and_evaluate(const Scene& scene, const std::map<int, FrameDetections>& dets,
                                 const TrackerConfig& tracker, TrajectorySet* tracks_out = nullptr);

/// Scenario used by the appearance-gating ablation: dense, slow, stop-and-go
/// targets whose embedding flips while they move.
SynthConfig ablation_scenario(std::uint64_t seed);

struct AblationRow {
  std::uint64_t seed = 0;
  MetricsReport gated;   // appearance gated by motion
  MetricsReport iou_only;
};

struct AblationSummary {
  std::vector<AblationRow> rows;
  double mean_idsw_gated = 0.0;
  double mean_idsw_iou_only = 0.0;
  /// 1 - gated / iou_only; 0 when the IoU-only mean is 0.
  double idsw_reduction() const;
};

/// Runs each scenario twice, with the tracker's appearance mode set to
/// MotionGated and to Off.
AblationSummary maa_ablation(const std::vector<SynthConfig>& scenarios, const TrackerConfig& tracker);

struct LambdaSweepRow {
  double lambda_max = 0.0;
  MetricsReport metrics;
};

/// Line-intensity map of every rendered frame (zero fusion weights).
std::vector<LineIntensityMap> line_maps(const Scene& scene, int angle_bins = 60);

/// Replaces each detection embedding by its line-feature enhanced version
/// (LFFM on the frame, then adaptive-radius pooling) and renormalizes.
std::map<int, FrameDetections> enhance_detections(const Scene& scene,
                                                  const std::map<int, FrameDetections>& dets,
                                                  std::span<const LineIntensityMap> maps,
                                                  double lambda_max);

/// Tracking metrics per lambda_max value on one rendered scenario.
std::vector<LambdaSweepRow> lambda_sweep(const SynthConfig& synth, const TrackerConfig& tracker,
                                         const std::vector<double>& lambdas);

}  // namespace sarmot
