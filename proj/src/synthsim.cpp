#include "sarmot/synthsim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sarmot/lfa.hpp"
#include "sarmot/rng.hpp"

namespace sarmot {

void ScenarioConfig::validate() const {
  if (frames < 1) throw DataError("scenario: frames must be >= 1");
  if (width < 1 || height < 1) throw DataError("scenario: canvas must be at least 1x1");
  if (n_moving < 0 || n_static_occluders < 0) throw DataError("scenario: counts must be >= 0");
  if (!(speed_min >= 0.0 && speed_min <= speed_max)) throw DataError("scenario: bad speed range");
  if (!(size_min > 0.0 && size_min <= size_max)) throw DataError("scenario: bad size range");
  if (!(size_max < std::min(width, height))) throw DataError("scenario: targets larger than canvas");
  if (!(speed_max < std::min(width, height) - size_max)) {
    throw DataError("scenario: speed_max too large for the canvas");
  }
  if (!(streak_gain >= 0.0) || !std::isfinite(streak_gain)) throw DataError("scenario: bad streak_gain");
  if (!(noise_amplitude >= 0.0) || !std::isfinite(noise_amplitude)) {
    throw DataError("scenario: bad noise_amplitude");
  }
  if (!std::isfinite(background_level) || !std::isfinite(streak_amplitude)) {
    throw DataError("scenario: non-finite intensity levels");
  }
  if (!(appearance_flip_speed >= 0.0)) throw DataError("scenario: bad appearance_flip_speed");
  if (embedding_dim < 2) throw DataError("scenario: embedding_dim must be >= 2");
  if (stop_go_period < 0) throw DataError("scenario: stop_go_period must be >= 0");
}

void PerturbConfig::validate() const {
  if (!(jitter_sigma >= 0.0) || !std::isfinite(jitter_sigma)) throw DataError("perturb: bad jitter_sigma");
  if (!(p_fn >= 0.0 && p_fn <= 1.0)) throw DataError("perturb: p_fn outside [0,1]");
  if (!(lambda_fp >= 0.0) || !(lambda_fp < 100.0)) throw DataError("perturb: bad lambda_fp");
}

namespace {

struct Segment {
  Point2 a, b;
};

std::vector<double> random_unit(Rng& rng, int dim) {
  std::vector<double> v(dim);
  double n2 = 0.0;
  do {
    n2 = 0.0;
    for (double& x : v) {
      x = rng.normal();
      n2 += x * x;
    }
  } while (n2 < 1e-12);
  const double n = std::sqrt(n2);
  for (double& x : v) x /= n;
  return v;
}

// Unit vector orthogonal to `a`.
std::vector<double> orthogonal_unit(Rng& rng, const std::vector<double>& a) {
  while (true) {
    auto b = random_unit(rng, static_cast<int>(a.size()));
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d += a[i] * b[i];
    double n2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      b[i] -= d * a[i];
      n2 += b[i] * b[i];
    }
    if (n2 > 1e-6) {
      const double n = std::sqrt(n2);
      for (double& x : b) x /= n;
      return b;
    }
  }
}

double reflect(double x, double lo, double hi, double& vel) {
  if (x < lo) {
    x = 2 * lo - x;
    vel = -vel;
  } else if (x > hi) {
    x = 2 * hi - x;
    vel = -vel;
  }
  return std::clamp(x, lo, hi);
}

// Area-weighted blend of a rectangle into channel 0.
void paint_rect(FeatureMap& m, double x0, double y0, double x1, double y1, double level) {
  const int c0 = std::max(0, static_cast<int>(std::floor(x0)));
  const int c1 = std::min(m.width(), static_cast<int>(std::ceil(x1)));
  const int r0 = std::max(0, static_cast<int>(std::floor(y0)));
  const int r1 = std::min(m.height(), static_cast<int>(std::ceil(y1)));
  for (int r = r0; r < r1; ++r) {
    const double oy = std::min(r + 1.0, y1) - std::max(static_cast<double>(r), y0);
    if (oy <= 0.0) continue;
    for (int c = c0; c < c1; ++c) {
      const double ox = std::min(c + 1.0, x1) - std::max(static_cast<double>(c), x0);
      if (ox <= 0.0) continue;
      const double cov = ox * oy;
      double& p = m(0, r, c);
      p = p * (1.0 - cov) + level * cov;
    }
  }
}

void paint_segment(FeatureMap& m, const Segment& s, double level) {
  const double len = std::hypot(s.b.x - s.a.x, s.b.y - s.a.y);
  const int steps = std::max(1, static_cast<int>(std::ceil(len * 4)));
  for (int k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) / steps;
    const int c = static_cast<int>(std::floor(s.a.x + t * (s.b.x - s.a.x)));
    const int r = static_cast<int>(std::floor(s.a.y + t * (s.b.y - s.a.y)));
    if (c >= 0 && r >= 0 && c < m.width() && r < m.height()) m(0, r, c) = level;
  }
}

}  // namespace

Scene generate_scene(const ScenarioConfig& cfg) {
  cfg.validate();
  const Rng base(cfg.seed);
  Scene scene;
  scene.width = cfg.width;
  scene.height = cfg.height;
  scene.embedding_dim = cfg.embedding_dim;
  scene.frame_count = cfg.frames;

  struct Box {
    double x, y;
  };
  std::vector<std::vector<Box>> positions(cfg.n_moving);
  std::vector<double> widths(cfg.n_moving), heights(cfg.n_moving);

  for (int i = 0; i < cfg.n_moving; ++i) {
    Rng rng = base.derive("target", static_cast<std::uint64_t>(i));
    const int id = i + 1;
    const double w = rng.uniform(cfg.size_min, cfg.size_max);
    const double h = rng.uniform(cfg.size_min, cfg.size_max);
    const int cls = static_cast<int>(rng.below(3));
    double x = rng.uniform(0.0, cfg.width - w);
    double y = rng.uniform(0.0, cfg.height - h);
    const double heading = rng.uniform(0.0, 2 * std::numbers::pi);
    double dx = std::cos(heading);
    double dy = std::sin(heading);
    const double s0 = rng.uniform(cfg.speed_min, cfg.speed_max);
    const int phase = cfg.stop_go_period > 0
                          ? static_cast<int>(rng.below(2 * static_cast<std::uint64_t>(cfg.stop_go_period)))
                          : 0;
    const auto rest = random_unit(rng, cfg.embedding_dim);
    const auto moving = orthogonal_unit(rng, rest);
    widths[i] = w;
    heights[i] = h;

    for (int t = 1; t <= cfg.frames; ++t) {
      const bool go = cfg.stop_go_period == 0 || ((t - 1 + phase) / cfg.stop_go_period) % 2 == 0;
      const double speed = go ? s0 : 0.0;
      if (t > 1) {
        double vx = dx * speed, vy = dy * speed;
        x = reflect(x + vx, 0.0, cfg.width - w, vx);
        y = reflect(y + vy, 0.0, cfg.height - h, vy);
        if (speed > 0.0) {
          dx = vx / speed;
          dy = vy / speed;
        }
      }
      positions[i].push_back({x, y});
      scene.gt.add(id, t, BBox(x, y, w, h), cls);
      scene.speeds[{t, id}] = speed;
      scene.azimuth_sign[{t, id}] = dx < 0.0 ? -1.0 : 1.0;
      scene.embeddings[{t, id}] = speed > cfg.appearance_flip_speed ? moving : rest;
    }
  }

  // Raw center displacement per frame; the first frame looks forward.
  std::vector<std::pair<int, int>> keys;
  std::vector<double> raw;
  for (int i = 0; i < cfg.n_moving; ++i) {
    const auto center = [&](int t) {
      const Box& b = positions[i][t - 1];
      return Point2{b.x + 0.5 * widths[i], b.y + 0.5 * heights[i]};
    };
    for (int t = 1; t <= cfg.frames; ++t) {
      double v = 0.0;
      if (t > 1) v = velocity_target(center(t), center(t - 1), Affine2x3::identity(), 1.0);
      else if (cfg.frames > 1) v = velocity_target(center(2), center(1), Affine2x3::identity(), 1.0);
      keys.push_back({t, i + 1});
      raw.push_back(v);
    }
  }
  if (!raw.empty()) {
    const auto norm = normalize_velocities(raw);
    for (std::size_t k = 0; k < keys.size(); ++k) scene.gt_velocities[keys[k]] = norm[k];
  }

  if (!cfg.render) return scene;

  std::vector<Segment> occluders;
  for (int k = 0; k < cfg.n_static_occluders; ++k) {
    Rng rng = base.derive("occluder", static_cast<std::uint64_t>(k));
    const Point2 c{rng.uniform(0.0, cfg.width), rng.uniform(0.0, cfg.height)};
    const double len = rng.uniform(2 * cfg.size_min, 4 * cfg.size_max);
    const double ang = rng.uniform(0.0, std::numbers::pi);
    const Point2 d{0.5 * len * std::cos(ang), 0.5 * len * std::sin(ang)};
    occluders.push_back({{c.x - d.x, c.y - d.y}, {c.x + d.x, c.y + d.y}});
  }

  scene.frames.resize(cfg.frames);
#pragma omp parallel for schedule(dynamic)
  for (int t = 1; t <= cfg.frames; ++t) {
    Rng noise = base.derive("noise", static_cast<std::uint64_t>(t));
    FeatureMap m(cfg.height, cfg.width, 1);
    for (double& v : m.values()) v = cfg.background_level + noise.uniform(0.0, cfg.noise_amplitude);
    for (const auto& s : occluders) paint_segment(m, s, 0.0);
    for (int i = 0; i < cfg.n_moving; ++i) {
      const Box& b = positions[i][t - 1];
      paint_rect(m, b.x, b.y, b.x + widths[i], b.y + heights[i], 0.0);
    }
    for (int i = 0; i < cfg.n_moving; ++i) {
      const Box& b = positions[i][t - 1];
      const double speed = scene.speeds.at({t, i + 1});
      const double shift = scene.azimuth_sign.at({t, i + 1}) * cfg.streak_gain * speed;
      const double thick = std::max(1.0, heights[i] / 3.0);
      const double cy = b.y + 0.5 * heights[i];
      paint_rect(m, b.x + shift, cy - 0.5 * thick, b.x + shift + widths[i], cy + 0.5 * thick,
                 cfg.streak_amplitude);
    }
    scene.frames[t - 1] = std::move(m);
  }
  return scene;
}

std::map<int, FrameDetections> perturb_detections(const Scene& scene, const PerturbConfig& cfg) {
  cfg.validate();
  const Rng base(cfg.seed);
  std::map<int, int> cls;
  double smin = 8.0, smax = 16.0;
  bool first = true;
  for (const auto& tr : scene.gt.tracks()) {
    cls[tr.id] = tr.class_id;
    for (const auto& p : tr.points) {
      const double lo = std::min(p.bbox.w, p.bbox.h), hi = std::max(p.bbox.w, p.bbox.h);
      smin = first ? lo : std::min(smin, lo);
      smax = first ? hi : std::max(smax, hi);
      first = false;
    }
  }
  int last_frame = scene.frame_count;
  for (const auto& [key, v] : scene.gt_velocities) last_frame = std::max(last_frame, key.first);
  if (const auto r = scene.gt.frame_range()) last_frame = std::max(last_frame, r->second);
  if (!scene.frames.empty()) last_frame = std::max(last_frame, static_cast<int>(scene.frames.size()));

  const auto by_frame = scene.gt.by_frame();
  std::map<int, FrameDetections> out;
  for (int t = 1; t <= last_frame; ++t) {
    Rng rng = base.derive("frame", static_cast<std::uint64_t>(t));
    FrameDetections& dets = out[t];
    if (const auto it = by_frame.find(t); it != by_frame.end()) {
      for (const auto& [id, b] : it->second) {
        const bool drop = rng.uniform() < cfg.p_fn;
        const double ex = rng.normal(), ey = rng.normal(), ew = rng.normal(), eh = rng.normal();
        const double score = rng.uniform(0.6, 1.0);
        if (drop) continue;
        const double s = cfg.jitter_sigma;
        const double w = b.w * std::exp(ew * s / b.w);
        const double h = b.h * std::exp(eh * s / b.h);
        const double cx = b.cx() + ex * s, cy = b.cy() + ey * s;
        Detection d;
        d.frame = t;
        d.bbox = BBox(cx - 0.5 * w, cy - 0.5 * h, w, h);
        d.score = score;
        d.class_id = cls[id];
        if (const auto v = scene.gt_velocities.find({t, id}); v != scene.gt_velocities.end()) {
          d.motion_awareness = v->second;
        }
        if (const auto e = scene.embeddings.find({t, id}); e != scene.embeddings.end()) {
          d.embedding = e->second;
        }
        dets.push_back(std::move(d));
      }
    }
    const int n_fp = rng.poisson(cfg.lambda_fp);
    for (int k = 0; k < n_fp; ++k) {
      const double w = rng.uniform(smin, smax), h = rng.uniform(smin, smax);
      Detection d;
      d.frame = t;
      d.bbox = BBox(rng.uniform(0.0, std::max(1.0, scene.width - w)),
                    rng.uniform(0.0, std::max(1.0, scene.height - h)), w, h);
      d.score = rng.uniform(0.1, 0.7);
      d.class_id = static_cast<int>(rng.below(3));
      d.motion_awareness = 0.0;
      if (scene.embedding_dim > 0) d.embedding = random_unit(rng, scene.embedding_dim);
      dets.push_back(std::move(d));
    }
  }
  return out;
}

std::vector<MotRecord> gt_records(const Scene& scene) {
  auto recs = trajectories_to_records(scene.gt);
  for (auto& r : recs) {
    if (const auto v = scene.gt_velocities.find({r.frame, r.id}); v != scene.gt_velocities.end()) {
      r.motion_awareness = v->second;
    }
  }
  return recs;
}

std::pair<std::vector<MotRecord>, EmbeddingTable> detection_records(
    const std::map<int, FrameDetections>& dets) {
  std::vector<MotRecord> recs;
  EmbeddingTable emb;
  for (const auto& [frame, list] : dets) {
    for (std::size_t k = 0; k < list.size(); ++k) {
      const Detection& d = list[k];
      MotRecord r;
      r.frame = frame;
      r.id = -1;
      r.x = d.bbox.x;
      r.y = d.bbox.y;
      r.w = d.bbox.w;
      r.h = d.bbox.h;
      r.conf = d.score;
      r.class_id = d.class_id;
      r.visibility = -1.0;
      r.motion_awareness = d.motion_awareness;
      recs.push_back(r);
      if (d.embedding) emb[{frame, static_cast<int>(k)}] = *d.embedding;
    }
  }
  return {std::move(recs), std::move(emb)};
}

SynthConfig synth_config_from(const KeyValueFile& kv) {
  SynthConfig c;
  ScenarioConfig& s = c.scenario;
  PerturbConfig& p = c.perturb;
  bool perturb_seed_set = false;
  for (const auto& [key, entry] : kv.entries) {
    const auto integer = [&] { return static_cast<int>(kv_integer(kv, key)); };
    const auto real = [&] { return kv_real(kv, key); };
    if (key == "seed") {
      const auto v = kv_integer(kv, key);
      if (v < 0) throw ParseError(kv.source, entry.second, "seed must be >= 0");
      s.seed = static_cast<std::uint64_t>(v);
    } else if (key == "frames") s.frames = integer();
    else if (key == "width") s.width = integer();
    else if (key == "height") s.height = integer();
    else if (key == "n_moving") s.n_moving = integer();
    else if (key == "n_static_occluders") s.n_static_occluders = integer();
    else if (key == "speed_min") s.speed_min = real();
    else if (key == "speed_max") s.speed_max = real();
    else if (key == "size_min") s.size_min = real();
    else if (key == "size_max") s.size_max = real();
    else if (key == "streak_gain") s.streak_gain = real();
    else if (key == "streak_amplitude") s.streak_amplitude = real();
    else if (key == "noise_amplitude") s.noise_amplitude = real();
    else if (key == "background_level") s.background_level = real();
    else if (key == "appearance_flip_speed") s.appearance_flip_speed = real();
    else if (key == "embedding_dim") s.embedding_dim = integer();
    else if (key == "stop_go_period") s.stop_go_period = integer();
    else if (key == "perturb_seed") {
      const auto v = kv_integer(kv, key);
      if (v < 0) throw ParseError(kv.source, entry.second, "perturb_seed must be >= 0");
      p.seed = static_cast<std::uint64_t>(v);
      perturb_seed_set = true;
    } else if (key == "jitter_sigma") p.jitter_sigma = real();
    else if (key == "p_fn") p.p_fn = real();
    else if (key == "lambda_fp") p.lambda_fp = real();
    else throw ParseError(kv.source, entry.second, "unknown key `" + key + "`");
  }
  if (!perturb_seed_set) p.seed = s.seed ^ 0x9e3779b97f4a7c15ULL;
  s.validate();
  p.validate();
  return c;
}

}  // namespace sarmot
