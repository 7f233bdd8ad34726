#include "sarmot/pipeline.hpp"

#include <cmath>

#include "sarmot/lfa.hpp"
#include "sarmot/lineops.hpp"

namespace sarmot {

MetricsReport track_and_evaluate(const Scene& scene, const std::map<int, FrameDetections>& dets,
                                 const TrackerConfig& tracker, TrajectorySet* tracks_out) {
  int last = std::max(1, scene.frame_count);
  if (const auto r = scene.gt.frame_range()) last = std::max(last, r->second);
  if (!dets.empty()) last = std::max(last, dets.rbegin()->first);
  TrajectorySet tracks = track_sequence(dets, {}, tracker, std::pair{1, last});
  MetricsReport m = evaluate(scene.gt, tracks);
  if (tracks_out) *tracks_out = std::move(tracks);
  return m;
}

PipelineRun run_pipeline(const SynthConfig& synth, const TrackerConfig& tracker) {
  PipelineRun run;
  run.scene = generate_scene(synth.scenario);
  run.detections = perturb_detections(run.scene, synth.perturb);
  run.metrics = track_and_evaluate(run.scene, run.detections, tracker, &run.tracks);
  return run;
}

SynthConfig ablation_scenario(std::uint64_t seed) {
  SynthConfig c;
  ScenarioConfig& s = c.scenario;
  s.seed = seed;
  s.frames = 50;
  s.width = 128;
  s.height = 128;
  s.n_moving = 10;
  s.n_static_occluders = 0;
  s.speed_min = 0.2;
  s.speed_max = 1.5;
  s.size_min = 8.0;
  s.size_max = 12.0;
  s.stop_go_period = 12;
  s.appearance_flip_speed = 0.75;
  s.embedding_dim = 8;
  s.render = false;
  PerturbConfig& p = c.perturb;
  p.seed = seed ^ 0x9e3779b97f4a7c15ULL;
  p.jitter_sigma = 2.5;
  p.p_fn = 0.05;
  p.lambda_fp = 0.5;
  return c;
}

double AblationSummary::idsw_reduction() const {
  if (mean_idsw_iou_only <= 0.0) return 0.0;
  return 1.0 - mean_idsw_gated / mean_idsw_iou_only;
}

AblationSummary maa_ablation(const std::vector<SynthConfig>& scenarios, const TrackerConfig& tracker) {
  AblationSummary out;
  TrackerConfig on = tracker, off = tracker;
  on.appearance = AppearanceMode::MotionGated;
  off.appearance = AppearanceMode::Off;
  for (const auto& sc : scenarios) {
    const Scene scene = generate_scene(sc.scenario);
    const auto dets = perturb_detections(scene, sc.perturb);
    AblationRow row;
    row.seed = sc.scenario.seed;
    row.gated = track_and_evaluate(scene, dets, on);
    row.iou_only = track_and_evaluate(scene, dets, off);
    out.mean_idsw_gated += row.gated.clear.idsw;
    out.mean_idsw_iou_only += row.iou_only.clear.idsw;
    out.rows.push_back(row);
  }
  if (!out.rows.empty()) {
    out.mean_idsw_gated /= static_cast<double>(out.rows.size());
    out.mean_idsw_iou_only /= static_cast<double>(out.rows.size());
  }
  return out;
}

std::vector<LineIntensityMap> line_maps(const Scene& scene, int angle_bins) {
  const FusionParams params = FusionParams::zeros(1);
  LffmOptions opt;
  opt.angle_bins = angle_bins;
  std::vector<LineIntensityMap> out;
  out.reserve(scene.frames.size());
  for (const auto& f : scene.frames) out.push_back(lffm(f, opt, params).line_intensity);
  return out;
}

std::map<int, FrameDetections> enhance_detections(const Scene& scene,
                                                  const std::map<int, FrameDetections>& dets,
                                                  std::span<const LineIntensityMap> maps,
                                                  double lambda_max) {
  if (maps.empty()) throw DataError("line-feature enhancement needs rendered frames");
  std::map<int, FrameDetections> out = dets;
  LfaConfig cfg;
  cfg.lambda_max = lambda_max;
  cfg.image_width = scene.width;
  cfg.image_height = scene.height;
  cfg.mlp = Mlp::pass_through(1, scene.embedding_dim);
  for (auto& [frame, list] : out) {
    if (frame < 1 || frame > static_cast<int>(maps.size())) continue;
    const LineIntensityMap& a_soft = maps[frame - 1];
    std::vector<Proposal> props;
    std::vector<std::size_t> which;
    for (std::size_t k = 0; k < list.size(); ++k) {
      const Detection& d = list[k];
      if (!d.embedding) continue;
      const BBox& b = d.bbox;
      if (b.cx() < 0 || b.cy() < 0 || b.cx() >= scene.width || b.cy() >= scene.height) continue;
      props.push_back({b, *d.embedding, d.motion_awareness.value_or(0.0)});
      which.push_back(k);
    }
    const auto enhanced = enhance_proposals(props, a_soft, cfg);
    for (std::size_t j = 0; j < enhanced.size(); ++j) {
      std::vector<double> f = enhanced[j].feature;
      double n2 = 0.0;
      for (double x : f) n2 += x * x;
      if (!(n2 > 0.0)) continue;
      const double n = std::sqrt(n2);
      for (double& x : f) x /= n;
      list[which[j]].embedding = std::move(f);
    }
  }
  return out;
}

std::vector<LambdaSweepRow> lambda_sweep(const SynthConfig& synth, const TrackerConfig& tracker,
                                         const std::vector<double>& lambdas) {
  SynthConfig sc = synth;
  sc.scenario.render = true;
  const Scene scene = generate_scene(sc.scenario);
  const auto dets = perturb_detections(scene, sc.perturb);
  const auto maps = line_maps(scene);
  std::vector<LambdaSweepRow> rows;
  for (double lm : lambdas) {
    const auto enhanced = enhance_detections(scene, dets, maps, lm);
    rows.push_back({lm, track_and_evaluate(scene, enhanced, tracker)});
  }
  return rows;
}

}  // namespace sarmot
