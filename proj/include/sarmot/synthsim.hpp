#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "sarmot/core.hpp"
#include "sarmot/grid.hpp"
#include "sarmot/io.hpp"

namespace sarmot {

enum class TargetClass { Car = 0, Ship = 1, Airplane = 2 };

struct ScenarioConfig {
  std::uint64_t seed = 1;
  int frames = 50;
  int width = 256;
  int height = 256;
  int n_moving = 10;
  int n_static_occluders = 3;
  double speed_min = 1.0;   // px / frame
  double speed_max = 4.0;
  double size_min = 8.0;    // px, per side
  double size_max = 16.0;
  double streak_gain = 2.0;  // px of azimuth offset per px/frame of speed
  double streak_amplitude = 1.0;
  double noise_amplitude = 0.2;
  double background_level = 0.4;
  double appearance_flip_speed = 2.0;
  int embedding_dim = 8;
  /// Moving and stopped phases alternate every `stop_go_period` frames;
  /// 0 keeps every target at constant speed.
  int stop_go_period = 0;
  /// When false, generate_scene skips rasterization (frames stay empty).
  bool render = true;

  void validate() const;
};

struct PerturbConfig {
  std::uint64_t seed = 2;
  double jitter_sigma = 1.0;
  double p_fn = 0.05;
  double lambda_fp = 1.0;

  void validate() const;
};

/// Per (frame, track id) values.
template <class T>
using FrameIdMap = std::map<std::pair<int, int>, T>;

struct Scene {
  int width = 0;
  int height = 0;
  int embedding_dim = 0;
  int frame_count = 0;
  std::vector<FeatureMap> frames;            // frame t at index t - 1
  TrajectorySet gt;
  FrameIdMap<std::vector<double>> embeddings;  // unit vectors
  FrameIdMap<double> speeds;                   // nominal px / frame
  FrameIdMap<double> azimuth_sign;             // sign of horizontal motion
  FrameIdMap<double> gt_velocities;            // normalized into [0, 1]
};

Scene generate_scene(const ScenarioConfig& cfg);

/// Detector surrogate. Every frame in [1, T] gets an entry, possibly empty.
std::map<int, FrameDetections> perturb_detections(const Scene& scene, const PerturbConfig& cfg);

/// GT as MOT records whose 10th column carries the normalized velocity.
std::vector<MotRecord> gt_records(const Scene& scene);

/// Detections in file order with their embedding table (index within frame).
std::pair<std::vector<MotRecord>, EmbeddingTable> detection_records(
    const std::map<int, FrameDetections>& dets);

struct SynthConfig {
  ScenarioConfig scenario;
  PerturbConfig perturb;
};

/// Reads both configs from one key = value file; unknown keys are errors.
SynthConfig synth_config_from(const KeyValueFile& kv);

}  // namespace sarmot
