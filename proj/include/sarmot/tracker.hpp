#pragma once

#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "sarmot/assoc.hpp"
#include "sarmot/core.hpp"
#include "sarmot/motion.hpp"

namespace sarmot {

struct TrackerConfig {
  double tau_high = 0.6;
  double tau_low = 0.1;
  double match_thresh_stage1 = 0.8;
  double match_thresh_stage2 = 0.5;
  int n_init = 2;
  int max_age = 30;
  double lambda_app = 0.3;
  double tau_v = 0.5;
  double ema_alpha = 0.9;
  double v_ema_alpha = 0.7;

  // Not part of the key = value file; set by callers (e.g. `--maa`).
  AppearanceMode appearance = AppearanceMode::MotionGated;
  KalmanNoise noise;

  void validate() const;
};

enum class Lifecycle { Tentative, Confirmed, Lost, Removed };

struct Track {
  int id = 0;
  KalmanState kstate;
  Lifecycle lifecycle = Lifecycle::Tentative;
  int hits = 0;
  int age_since_update = 0;
  Embedding ema_embedding;
  double v_ema = 0.0;
  int class_id = -1;

  BBox box() const { return from_cxcyah(kstate.position()); }
};

struct EmittedBox {
  int track_id = 0;
  int class_id = -1;
  BBox bbox;
};

/// Two-stage score-split association with motion-aware appearance gating.
/// One instance tracks one sequence; it is not thread-safe.
class ByteTracker {
 public:
  explicit ByteTracker(TrackerConfig cfg);

  /// Processes one frame. All detections must carry `frame`; frames must be
  /// fed in increasing order. Returns the boxes of confirmed tracks that were
  /// updated in this frame.
  std::vector<EmittedBox> step(int frame, std::span<const Detection> detections,
                               const Affine2x3& cmc = Affine2x3::identity());

  /// Live (not removed) tracks.
  const std::vector<Track>& tracks() const { return tracks_; }
  const TrackerConfig& config() const { return cfg_; }

 private:
  AssociationResult match(std::span<const int> track_idx, std::span<const Detection> dets,
                          std::span<const int> det_idx, bool use_appearance, double thresh) const;
  void apply_update(Track& t, const Detection& d);
  void spawn(const Detection& d);

  TrackerConfig cfg_;
  KalmanFilter kf_;
  std::vector<Track> tracks_;
  int next_id_ = 1;
  int last_frame_ = 0;
  bool first_frame_ = true;
  double speed_max_ = 0.0;
};

using CmcSequence = std::map<int, Affine2x3>;

/// Folds ByteTracker::step over every frame from the first to the last
/// detection frame (or over `frames` when given); empty frames still age tracks.
TrajectorySet track_sequence(const std::map<int, FrameDetections>& detections,
                             const CmcSequence& cmc, const TrackerConfig& cfg,
                             std::optional<std::pair<int, int>> frames = std::nullopt);

}  // namespace sarmot
