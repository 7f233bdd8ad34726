#include "sarmot/tracker.hpp"

#include <algorithm>
#include <cmath>

namespace sarmot {

void TrackerConfig::validate() const {
  const auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!(unit(tau_low) && unit(tau_high) && tau_low < tau_high)) {
    throw DataError("tracker config: need 0 <= tau_low < tau_high <= 1");
  }
  if (!unit(match_thresh_stage1) || !unit(match_thresh_stage2) || !unit(lambda_app) ||
      !unit(tau_v) || !unit(ema_alpha) || !unit(v_ema_alpha)) {
    throw DataError("tracker config: thresholds and weights must lie in [0,1]");
  }
  if (n_init < 1) throw DataError("tracker config: n_init must be >= 1");
  if (max_age < 0) throw DataError("tracker config: max_age must be >= 0");
}

ByteTracker::ByteTracker(TrackerConfig cfg) : cfg_(cfg), kf_(cfg.noise) { cfg_.validate(); }

namespace {

double det_motion(const Detection& d) { return d.motion_awareness.value_or(0.0); }

// Coasting tracks can extrapolate aspect or height through zero; pin the
// shape at a small floor and stop its drift.
void keep_shape_positive(KalmanState& s) {
  constexpr double kFloor = 1e-3;
  for (int k : {2, 3}) {
    if (!(s.mean[k] >= kFloor)) {
      s.mean[k] = kFloor;
      s.mean[k + 4] = 0.0;
    }
  }
}

void normalize(std::vector<double>& v) {
  double n2 = 0.0;
  for (double x : v) n2 += x * x;
  const double n = std::sqrt(n2);
  if (n > 0.0) {
    for (double& x : v) x /= n;
  }
}

}  // namespace

AssociationResult ByteTracker::match(std::span<const int> track_idx,
                                     std::span<const Detection> dets,
                                     std::span<const int> det_idx, bool use_appearance,
                                     double thresh) const {
  std::vector<BBox> tboxes, dboxes;
  std::vector<int> tcls, dcls;
  std::vector<Embedding> temb, demb;
  std::vector<double> tv, dv;
  for (int i : track_idx) {
    const Track& t = tracks_[i];
    tboxes.push_back(t.box());
    tcls.push_back(t.class_id);
    temb.push_back(t.ema_embedding);
    tv.push_back(t.v_ema);
  }
  for (int j : det_idx) {
    const Detection& d = dets[j];
    dboxes.push_back(d.bbox);
    dcls.push_back(d.class_id);
    demb.push_back(d.embedding);
    dv.push_back(det_motion(d));
  }
  CostMatrix cost = iou_cost(tboxes, dboxes);
  if (use_appearance && cfg_.appearance != AppearanceMode::Off) {
    const MaaParams params{cfg_.tau_v, cfg_.lambda_app, cfg_.appearance};
    cost = maa_fuse(cost, appearance_cost(temb, demb), tv, dv, params);
  }
  apply_class_gate(cost, tcls, dcls);
  return hungarian(cost, thresh);
}

void ByteTracker::apply_update(Track& t, const Detection& d) {
  const double v_det = det_motion(d);
  const bool gate = cfg_.appearance == AppearanceMode::MotionGated &&
                    maa_gate_active(t.v_ema, v_det, cfg_.tau_v);

  t.kstate = kf_.update(t.kstate, to_cxcyah(d.bbox));
  keep_shape_positive(t.kstate);
  t.hits += 1;
  t.age_since_update = 0;
  if (t.lifecycle == Lifecycle::Lost) {
    t.lifecycle = Lifecycle::Confirmed;
  } else if (t.lifecycle == Lifecycle::Tentative && t.hits >= cfg_.n_init) {
    t.lifecycle = Lifecycle::Confirmed;
  }

  // Appearance is frozen while the motion gate discards it.
  if (d.embedding && !gate) {
    if (t.ema_embedding && t.ema_embedding->size() == d.embedding->size()) {
      auto& e = *t.ema_embedding;
      for (std::size_t k = 0; k < e.size(); ++k) {
        e[k] = cfg_.ema_alpha * e[k] + (1.0 - cfg_.ema_alpha) * (*d.embedding)[k];
      }
      normalize(e);
    } else {
      t.ema_embedding = d.embedding;
    }
  }

  double v_obs;
  if (d.motion_awareness) {
    v_obs = *d.motion_awareness;
  } else {
    const double speed = std::hypot(t.kstate.mean[4], t.kstate.mean[5]);
    speed_max_ = std::max(speed_max_, speed);
    v_obs = speed_max_ > 0.0 ? speed / speed_max_ : 0.0;
  }
  t.v_ema = cfg_.v_ema_alpha * t.v_ema + (1.0 - cfg_.v_ema_alpha) * v_obs;
}

void ByteTracker::spawn(const Detection& d) {
  Track t;
  t.id = next_id_++;
  t.kstate = kf_.initiate(to_cxcyah(d.bbox));
  t.hits = 1;
  t.class_id = d.class_id;
  t.v_ema = det_motion(d);
  const bool gate = cfg_.appearance == AppearanceMode::MotionGated &&
                    maa_gate_active(0.0, t.v_ema, cfg_.tau_v);
  if (d.embedding && !gate) t.ema_embedding = d.embedding;
  t.lifecycle = (first_frame_ || t.hits >= cfg_.n_init) ? Lifecycle::Confirmed : Lifecycle::Tentative;
  tracks_.push_back(std::move(t));
}

std::vector<EmittedBox> ByteTracker::step(int frame, std::span<const Detection> detections,
                                          const Affine2x3& cmc) {
  for (const auto& d : detections) {
    if (d.frame != frame) throw DataError("byte_step: detections from mixed frames");
  }
  if (!first_frame_ && frame <= last_frame_) {
    throw DataError("byte_step: frames must be processed in increasing order");
  }
  if (!cmc.is_finite()) throw DataError("byte_step: non-finite camera motion");

  // (1) compensate and predict
  for (auto& t : tracks_) {
    t.kstate = kf_.predict(apply_cmc(t.kstate, cmc));
    keep_shape_positive(t.kstate);
  }

  // (2) score split
  std::vector<int> high, low;
  for (int j = 0; j < static_cast<int>(detections.size()); ++j) {
    const double s = detections[j].score;
    if (s >= cfg_.tau_high) {
      high.push_back(j);
    } else if (s >= cfg_.tau_low) {
      low.push_back(j);
    }
  }

  std::vector<char> matched(tracks_.size(), 0);
  std::vector<int> pool, tentative;
  for (int i = 0; i < static_cast<int>(tracks_.size()); ++i) {
    if (tracks_[i].lifecycle == Lifecycle::Tentative) {
      tentative.push_back(i);
    } else {
      pool.push_back(i);
    }
  }

  // (3) confirmed + lost against high-score detections
  const AssociationResult first = match(pool, detections, high, true, cfg_.match_thresh_stage1);
  for (const auto& [r, c] : first.matches) {
    apply_update(tracks_[pool[r]], detections[high[c]]);
    matched[pool[r]] = 1;
  }
  std::vector<int> remaining_high;
  for (int c : first.unmatched_cols) remaining_high.push_back(high[c]);

  // (4) still-confirmed leftovers against low-score detections, IoU only
  std::vector<int> second_pool;
  for (int r : first.unmatched_rows) {
    if (tracks_[pool[r]].lifecycle == Lifecycle::Confirmed) second_pool.push_back(pool[r]);
  }
  const AssociationResult second =
      match(second_pool, detections, low, false, cfg_.match_thresh_stage2);
  for (const auto& [r, c] : second.matches) {
    apply_update(tracks_[second_pool[r]], detections[low[c]]);
    matched[second_pool[r]] = 1;
  }

  // tentative tracks against the high-score detections nobody claimed
  const AssociationResult third =
      match(tentative, detections, remaining_high, true, cfg_.match_thresh_stage1);
  for (const auto& [r, c] : third.matches) {
    apply_update(tracks_[tentative[r]], detections[remaining_high[c]]);
    matched[tentative[r]] = 1;
  }

  // (7) lifecycle of unmatched tracks
  for (std::size_t i = 0; i < matched.size(); ++i) {
    if (matched[i]) continue;
    Track& t = tracks_[i];
    t.age_since_update += 1;
    switch (t.lifecycle) {
      case Lifecycle::Tentative:
        t.lifecycle = Lifecycle::Removed;
        break;
      case Lifecycle::Confirmed:
        t.lifecycle = Lifecycle::Lost;
        [[fallthrough]];
      case Lifecycle::Lost:
        if (t.age_since_update > cfg_.max_age) t.lifecycle = Lifecycle::Removed;
        break;
      case Lifecycle::Removed:
        break;
    }
  }

  // (8) emit, before newborn tracks are appended
  std::vector<EmittedBox> out;
  for (std::size_t i = 0; i < matched.size(); ++i) {
    const Track& t = tracks_[i];
    if (matched[i] && t.lifecycle == Lifecycle::Confirmed) out.push_back({t.id, t.class_id, t.box()});
  }

  std::erase_if(tracks_, [](const Track& t) { return t.lifecycle == Lifecycle::Removed; });

  // (6) births from unclaimed high-score detections
  std::vector<char> claimed(remaining_high.size(), 0);
  for (const auto& [r, c] : third.matches) claimed[c] = 1;
  for (std::size_t k = 0; k < remaining_high.size(); ++k) {
    if (claimed[k]) continue;
    spawn(detections[remaining_high[k]]);
    const Track& t = tracks_.back();
    if (t.lifecycle == Lifecycle::Confirmed) out.push_back({t.id, t.class_id, t.box()});
  }

  std::sort(out.begin(), out.end(),
            [](const EmittedBox& a, const EmittedBox& b) { return a.track_id < b.track_id; });
  first_frame_ = false;
  last_frame_ = frame;
  return out;
}

TrajectorySet track_sequence(const std::map<int, FrameDetections>& detections,
                             const CmcSequence& cmc, const TrackerConfig& cfg,
                             std::optional<std::pair<int, int>> frames) {
  TrajectorySet out;
  if (!frames) {
    if (detections.empty()) return out;
    frames = std::make_pair(detections.begin()->first, detections.rbegin()->first);
  }
  ByteTracker tracker(cfg);
  static const FrameDetections kNone;
  for (int f = frames->first; f <= frames->second; ++f) {
    const auto dit = detections.find(f);
    const auto cit = cmc.find(f);
    const auto boxes = tracker.step(f, dit == detections.end() ? kNone : dit->second,
                                    cit == cmc.end() ? Affine2x3::identity() : cit->second);
    for (const auto& b : boxes) out.add(b.track_id, f, b.bbox, b.class_id);
  }
  return out;
}

}  // namespace sarmot
