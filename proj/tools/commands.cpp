#include "commands.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "sarmot/image.hpp"
#include "sarmot/io.hpp"
#include "sarmot/lfa.hpp"
#include "sarmot/lineops.hpp"
#include "sarmot/metrics.hpp"
#include "sarmot/synthsim.hpp"
#include "sarmot/tracker.hpp"

namespace fs = std::filesystem;

namespace sarmot::cli {
namespace {

std::string frame_name(int frame, const char* ext) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%06d.%s", frame, ext);
  return buf;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw DataError("cannot create directory " + dir.string());
}

struct TrackArgs {
  std::string det, out, emb, cmc, config;
  std::string maa = "on";
};

void cmd_track(const TrackArgs& a, std::ostream& out) {
  auto dets = read_detections(a.det);
  if (!a.emb.empty()) attach_embeddings(dets, read_embeddings(a.emb));
  CmcSequence cmc;
  if (!a.cmc.empty()) cmc = read_cmc(a.cmc);
  TrackerConfig cfg;
  if (!a.config.empty()) cfg = tracker_config_from(read_key_values(a.config));
  if (a.maa == "off") cfg.appearance = AppearanceMode::Off;
  const TrajectorySet t = track_sequence(dets, cmc, cfg);
  write_mot_file(t, a.out);
  out << "tracks " << t.tracks().size() << " boxes " << t.box_count() << '\n';
}

struct EvalArgs {
  std::string gt, res;
  double iou = 0.5;
  bool tsv = false;
  std::optional<int> class_id;
};

void cmd_eval(const EvalArgs& a, std::ostream& out) {
  TrajectorySet gt = read_trajectories(a.gt);
  TrajectorySet res = read_trajectories(a.res);
  if (a.class_id) {
    gt = gt.filter_class(*a.class_id);
    res = res.filter_class(*a.class_id);
  }
  if (gt.empty()) throw DataError(a.gt + ": ground truth has no boxes");
  const auto gr = gt.frame_range();
  if (const auto rr = res.frame_range(); rr && (rr->first < gr->first || rr->second > gr->second)) {
    throw DataError("result frames " + std::to_string(rr->first) + ".." + std::to_string(rr->second) +
                    " fall outside ground-truth frames " + std::to_string(gr->first) + ".." +
                    std::to_string(gr->second));
  }
  const MetricsReport m = evaluate(gt, res, a.iou);
  const char* names[] = {"MOTA", "IDSW", "MT", "ML", "IDF1", "IDR", "IDP", "HOTA", "DetA", "AssA"};
  const double reals[] = {m.clear.mota, 0, 0, 0, m.id.idf1, m.id.idr, m.id.idp,
                          m.hota.hota, m.hota.deta, m.hota.assa};
  const int counts[] = {0, m.clear.idsw, m.clear.mt, m.clear.ml, 0, 0, 0, 0, 0, 0};
  const auto is_count = [](int k) { return k >= 1 && k <= 3; };
  if (a.tsv) {
    for (int k = 0; k < 10; ++k) out << names[k] << (k < 9 ? '\t' : '\n');
    for (int k = 0; k < 10; ++k) {
      out << (is_count(k) ? std::to_string(counts[k]) : format_real(reals[k])) << (k < 9 ? '\t' : '\n');
    }
    return;
  }
  std::ostringstream head, row;
  for (int k = 0; k < 10; ++k) {
    head << std::setw(8) << names[k];
    if (is_count(k)) {
      row << std::setw(8) << counts[k];
    } else {
      row << std::setw(8) << std::fixed << std::setprecision(3) << reals[k];
    }
  }
  out << head.str() << '\n' << row.str() << '\n';
}

struct SynthArgs {
  std::string config, out_dir;
  std::optional<long long> seed;
};

void cmd_synth(const SynthArgs& a, std::ostream& out) {
  SynthConfig sc;
  if (!a.config.empty()) sc = synth_config_from(read_key_values(a.config));
  if (a.seed) {
    if (*a.seed < 0) throw DataError("--seed must be >= 0");
    sc.scenario.seed = static_cast<std::uint64_t>(*a.seed);
    sc.perturb.seed = sc.scenario.seed ^ 0x9e3779b97f4a7c15ULL;
  }
  sc.scenario.render = true;
  const Scene scene = generate_scene(sc.scenario);
  const auto dets = perturb_detections(scene, sc.perturb);

  const fs::path dir = a.out_dir;
  ensure_dir(dir / "frames");
  for (std::size_t t = 0; t < scene.frames.size(); ++t) {
    write_pgm(dir / "frames" / frame_name(static_cast<int>(t) + 1, "pgm"), to_gray_unit(scene.frames[t]));
  }
  write_mot_records(dir / "gt.txt", gt_records(scene));
  const auto [recs, emb] = detection_records(dets);
  write_mot_records(dir / "det.txt", recs);
  write_embeddings(dir / "emb.txt", emb);
  CmcSequence cmc;
  for (int t = 1; t <= sc.scenario.frames; ++t) cmc[t] = Affine2x3::identity();
  write_cmc(dir / "cmc.txt", cmc);
  out << "frames " << scene.frame_count << " targets " << scene.gt.tracks().size() << " detections "
      << recs.size() << '\n';
}

struct LineopsArgs {
  std::string in, out, params;
  int theta = 0;
  int rho = 0;
  std::optional<double> tau;
};

void cmd_lineops(const LineopsArgs& a, std::ostream& out) {
  const FeatureMap x = has_tensor_magic(a.in) ? read_tensor(a.in) : to_feature_map(read_pgm(a.in));
  const FusionParams p = a.params.empty() ? FusionParams::zeros(x.channels()) : read_fusion_params(a.params);
  if (p.channels != x.channels()) {
    throw DataError(a.params + ": weights are for " + std::to_string(p.channels) +
                    " channels, input has " + std::to_string(x.channels()));
  }
  LffmOptions opt;
  opt.angle_bins = a.theta;
  opt.rho_bins = a.rho;
  opt.tau = a.tau;
  const LffmResult r = lffm(x, opt, p);
  const fs::path dir = a.out;
  ensure_dir(dir);
  write_tensor(dir / "asoft.vsfm", r.line_intensity);
  write_tensor(dir / "z.vsfm", r.fused);
  write_pgm(dir / "asoft.pgm", to_gray_minmax(r.line_intensity));
  const auto plane = r.line_intensity.plane(0);
  const auto best = std::max_element(plane.begin(), plane.end()) - plane.begin();
  out << "argmax " << best % x.width() << ' ' << best / x.width() << '\n';
}

struct LfaArgs {
  std::string asoft, proposals, out, mlp;
  double lambda_max = 0.4;
};

void cmd_lfa(const LfaArgs& a, std::ostream& out) {
  const LineIntensityMap a_soft(read_tensor(a.asoft));
  const auto props = read_proposals(a.proposals);
  LfaConfig cfg;
  cfg.lambda_max = a.lambda_max;
  cfg.image_width = a_soft.width();
  cfg.image_height = a_soft.height();
  const int d = props.empty() ? a_soft.channels() : static_cast<int>(props.front().feature.size());
  cfg.mlp = a.mlp.empty() ? Mlp::pass_through(a_soft.channels(), d) : read_mlp(a.mlp);
  if (cfg.mlp.in_dim != a_soft.channels() || cfg.mlp.out_dim != d) {
    throw DataError("mlp shape does not match the map channels and proposal feature length");
  }
  write_proposals(a.out, enhance_proposals(props, a_soft, cfg));
  out << "proposals " << props.size() << '\n';
}

struct RenderArgs {
  std::string frames_dir, tracks, out_dir;
};

void cmd_render(const RenderArgs& a, std::ostream& out) {
  const TrajectorySet t = read_trajectories(a.tracks);
  const auto by_frame = t.by_frame();
  if (!fs::is_directory(a.frames_dir)) throw DataError(a.frames_dir + " is not a directory");
  std::map<int, fs::path> frames;
  for (const auto& e : fs::directory_iterator(a.frames_dir)) {
    if (e.path().extension() != ".pgm") continue;
    const std::string stem = e.path().stem().string();
    if (stem.empty() || stem.find_first_not_of("0123456789") != std::string::npos) continue;
    frames[std::stoi(stem)] = e.path();
  }
  ensure_dir(a.out_dir);
  for (const auto& [frame, path] : frames) {
    std::vector<LabeledBox> boxes;
    if (const auto it = by_frame.find(frame); it != by_frame.end()) {
      for (const auto& [id, b] : it->second) boxes.push_back({id, b});
    }
    render_frame(read_pgm(path), boxes, fs::path(a.out_dir) / frame_name(frame, "ppm"));
  }
  out << "rendered " << frames.size() << '\n';
}

}  // namespace

void register_commands(CLI::App& app, std::ostream& out) {
  std::ostream* os = &out;

  auto track = std::make_shared<TrackArgs>();
  auto* t = app.add_subcommand("track", "Track detections into trajectories");
  t->add_option("--det", track->det, "Detections (MOT CSV, 9 or 10 columns)")->required();
  t->add_option("--out", track->out, "Output trajectories (MOT CSV)")->required();
  t->add_option("--emb", track->emb, "Embedding sidecar: frame det_index v1 .. vd");
  t->add_option("--cmc", track->cmc, "Camera motion sidecar: frame r11 r12 tx r21 r22 ty");
  t->add_option("--config", track->config, "Tracker config (key = value)");
  t->add_option("--maa", track->maa, "Motion-aware appearance fusion")
      ->check(CLI::IsMember({"on", "off"}))
      ->capture_default_str();
  t->callback([track, os] { cmd_track(*track, *os); });

  auto eval = std::make_shared<EvalArgs>();
  auto* e = app.add_subcommand("eval", "Score trajectories against ground truth");
  e->add_option("--gt", eval->gt, "Ground-truth trajectories (MOT CSV)")->required();
  e->add_option("--res", eval->res, "Tracker output (MOT CSV)")->required();
  e->add_option("--iou", eval->iou, "IoU threshold for CLEAR and identity metrics")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  e->add_flag("--tsv", eval->tsv, "Tab-separated header and value rows");
  e->add_option("--class", eval->class_id, "Evaluate a single class id");
  e->callback([eval, os] { cmd_eval(*eval, *os); });

  auto synth = std::make_shared<SynthArgs>();
  auto* s = app.add_subcommand("synth", "Generate a synthetic scenario");
  s->add_option("--config", synth->config, "Scenario config (key = value)");
  s->add_option("--out-dir", synth->out_dir, "Output directory")->required();
  s->add_option("--seed", synth->seed, "Override the scenario seed");
  s->callback([synth, os] { cmd_synth(*synth, *os); });

  auto lo = std::make_shared<LineopsArgs>();
  auto* l = app.add_subcommand("lineops", "Line-feature focusing on one image or tensor");
  l->add_option("--in", lo->in, "Input PGM (P5) or VSFM tensor")->required();
  l->add_option("--out", lo->out, "Output directory (asoft.vsfm, z.vsfm, asoft.pgm)")->required();
  l->add_option("--theta", lo->theta, "Angle bins (0: 180)")->check(CLI::NonNegativeNumber);
  l->add_option("--rho", lo->rho, "Rho bins (0: ceil of the diagonal)")->check(CLI::NonNegativeNumber);
  l->add_option("--tau", lo->tau, "Back-projection threshold (default: mean + std per channel)")
      ->check(CLI::NonNegativeNumber);
  l->add_option("--params", lo->params, "Fusion weights, (2C x 2C x 1) VSFM tensor");
  l->callback([lo, os] { cmd_lineops(*lo, *os); });

  auto lfa = std::make_shared<LfaArgs>();
  auto* f = app.add_subcommand("lfa-demo", "Enhance proposal features from a line-intensity map");
  f->add_option("--asoft", lfa->asoft, "Line-intensity map (VSFM tensor)")->required();
  f->add_option("--proposals", lfa->proposals, "Proposals: x y w h v_hat f1 .. fd")->required();
  f->add_option("--out", lfa->out, "Enhanced proposals, same format")->required();
  f->add_option("--lambda-max", lfa->lambda_max, "Radius scale")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  f->add_option("--mlp", lfa->mlp, "MLP weights: in hidden out, W1, b1, W2, b2");
  f->callback([lfa, os] { cmd_lfa(*lfa, *os); });

  auto render = std::make_shared<RenderArgs>();
  auto* r = app.add_subcommand("render", "Draw trajectories onto frames");
  r->add_option("--frames-dir", render->frames_dir, "Directory of NNNNNN.pgm frames")->required();
  r->add_option("--tracks", render->tracks, "Trajectories (MOT CSV)")->required();
  r->add_option("--out-dir", render->out_dir, "Output directory for NNNNNN.ppm")->required();
  r->callback([render, os] { cmd_render(*render, *os); });
}

}  // namespace sarmot::cli
