#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "sarmot/pipeline.hpp"
#include "sarmot/synthsim.hpp"

using namespace sarmot;

namespace {

ScenarioConfig quiet(int targets) {
  ScenarioConfig c;
  c.seed = 7;
  c.frames = 20;
  c.n_moving = targets;
  c.n_static_occluders = 0;
  c.noise_amplitude = 0.0;
  c.background_level = 0.5;
  return c;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

struct Centroid {
  double x = 0.0, y = 0.0, mass = 0.0;
};

}  // namespace

TEST(Scenario, Validation) {
  ScenarioConfig c;
  EXPECT_NO_THROW(c.validate());
  c.frames = 0;
  EXPECT_THROW(generate_scene(c), DataError);
  c = {};
  c.speed_min = 5;
  EXPECT_THROW(c.validate(), DataError);
  c = {};
  c.size_max = 300;
  EXPECT_THROW(c.validate(), DataError);
  PerturbConfig p;
  p.p_fn = 1.5;
  EXPECT_THROW(p.validate(), DataError);
}

TEST(Scenario, NoTargetsOnlyOccluders) {
  ScenarioConfig c = quiet(0);
  c.n_static_occluders = 2;
  c.background_level = 0.4;
  const Scene s = generate_scene(c);
  EXPECT_TRUE(s.gt.empty());
  ASSERT_EQ(s.frames.size(), 20u);
  int dark = 0;
  for (double v : s.frames[0].values()) {
    EXPECT_TRUE(v == 0.4 || v == 0.0);
    dark += v == 0.0;
  }
  EXPECT_GT(dark, 0);
  for (const auto& f : s.frames) {
    for (std::size_t i = 0; i < f.size(); ++i) EXPECT_EQ(f.values()[i], s.frames[0].values()[i]);
  }
}

TEST(Scenario, StationaryTargetHasNoOffsetAndNoFlip) {
  ScenarioConfig c = quiet(1);
  c.speed_min = c.speed_max = 0.0;
  const Scene s = generate_scene(c);
  const auto& pts = s.gt.tracks().at(0).points;
  for (int t = 1; t <= c.frames; ++t) {
    EXPECT_EQ(pts[t - 1].bbox, pts[0].bbox);
    EXPECT_EQ(s.embeddings.at({t, 1}), s.embeddings.at({1, 1}));
    EXPECT_EQ(s.gt_velocities.at({t, 1}), 0.0);
  }
  // Streak lands on the shadow: nothing brighter than the background outside the box.
  const BBox b = pts[0].bbox;
  const FeatureMap& f = s.frames[0];
  for (int r = 0; r < f.height(); ++r) {
    for (int q = 0; q < f.width(); ++q) {
      if (f(0, r, q) > 0.5) {
        EXPECT_GE(q + 1, b.x);
        EXPECT_LE(q, b.x + b.w);
      }
    }
  }
}

TEST(Scenario, StreakOffsetIsGainTimesSpeed) {
  for (double speed : {2.0, 5.0}) {
    ScenarioConfig c = quiet(1);
    c.speed_min = c.speed_max = speed;
    c.size_min = c.size_max = 8.0;
    c.streak_gain = 2.0;
    const Scene s = generate_scene(c);
    int checked = 0;
    for (int t = 1; t <= c.frames; ++t) {
      const BBox b = s.gt.tracks()[0].points[t - 1].bbox;
      const double shift = s.azimuth_sign.at({t, 1}) * c.streak_gain * speed;
      if (b.x + shift < 0 || b.x + shift + b.w > c.width) continue;
      Centroid dark, bright;
      const FeatureMap& f = s.frames[t - 1];
      for (int r = 0; r < f.height(); ++r) {
        for (int q = 0; q < f.width(); ++q) {
          const double d = f(0, r, q) - 0.5;
          Centroid& acc = d < 0 ? dark : bright;
          acc.x += std::abs(d) * (q + 0.5);
          acc.y += std::abs(d) * (r + 0.5);
          acc.mass += std::abs(d);
        }
      }
      // streak may cover part of the shadow, so measure against the shadow rectangle
      const double offset = bright.x / bright.mass - b.cx();
      EXPECT_NEAR(offset, shift, 0.5) << t;
      EXPECT_NEAR(bright.y / bright.mass, b.cy(), 0.5) << t;
      if (std::abs(shift) >= b.w) EXPECT_NEAR(dark.x / dark.mass, b.cx(), 0.5) << t;
      ++checked;
    }
    EXPECT_GT(checked, 10);
  }
}

TEST(Scenario, EmbeddingFlipsExactlyAboveThreshold) {
  ScenarioConfig c = quiet(6);
  c.frames = 40;
  c.stop_go_period = 5;
  c.speed_min = 1.0;
  c.speed_max = 4.0;
  c.appearance_flip_speed = 2.0;
  c.render = false;
  const Scene s = generate_scene(c);
  for (int id = 1; id <= 6; ++id) {
    std::optional<std::vector<double>> slow, fast;
    for (int t = 1; t <= c.frames; ++t) {
      const auto& e = s.embeddings.at({t, id});
      EXPECT_NEAR(dot(e, e), 1.0, 1e-12);
      auto& ref = s.speeds.at({t, id}) > c.appearance_flip_speed ? fast : slow;
      if (!ref) ref = e;
      EXPECT_EQ(e, *ref);
    }
    ASSERT_TRUE(slow);
    if (fast) EXPECT_NEAR(dot(*slow, *fast), 0.0, 1e-12);
  }
}

TEST(Scenario, DisplacementMatchesSpeedAwayFromBorders) {
  ScenarioConfig c = quiet(8);
  c.frames = 60;
  c.render = false;
  const Scene s = generate_scene(c);
  int interior = 0;
  for (const auto& tr : s.gt.tracks()) {
    for (std::size_t k = 1; k < tr.points.size(); ++k) {
      const BBox& a = tr.points[k - 1].bbox;
      const BBox& b = tr.points[k].bbox;
      const double speed = s.speeds.at({tr.points[k].frame, tr.id});
      const double moved = std::hypot(b.x - a.x, b.y - a.y);
      EXPECT_LE(moved, speed + 1e-9);
      const double margin = speed + 1.0;
      if (a.x > margin && a.y > margin && a.x + a.w < c.width - margin && a.y + a.h < c.height - margin) {
        EXPECT_NEAR(moved, speed, 1e-9);
        ++interior;
      }
      EXPECT_GE(b.x, 0.0);
      EXPECT_LE(b.x + b.w, c.width + 1e-9);
    }
  }
  EXPECT_GT(interior, 100);
}

TEST(Scenario, VelocitiesNormalized) {
  const Scene s = generate_scene(quiet(5));
  double peak = 0.0;
  for (const auto& [k, v] : s.gt_velocities) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
    peak = std::max(peak, v);
  }
  EXPECT_EQ(peak, 1.0);
}

TEST(Scenario, Deterministic) {
  ScenarioConfig c;
  c.frames = 8;
  const Scene a = generate_scene(c), b = generate_scene(c);
  ASSERT_EQ(a.frames.size(), b.frames.size());
  for (std::size_t t = 0; t < a.frames.size(); ++t) {
    for (std::size_t i = 0; i < a.frames[t].size(); ++i) ASSERT_EQ(a.frames[t].values()[i], b.frames[t].values()[i]);
  }
  EXPECT_EQ(gt_records(a), gt_records(b));
  const PerturbConfig p;
  EXPECT_EQ(detection_records(perturb_detections(a, p)), detection_records(perturb_detections(b, p)));
  c.seed = 2;
  EXPECT_NE(gt_records(generate_scene(c)), gt_records(a));
}

TEST(Perturb, IdentityPerturbation) {
  ScenarioConfig c = quiet(5);
  c.render = false;
  const Scene s = generate_scene(c);
  PerturbConfig p;
  p.jitter_sigma = 0;
  p.p_fn = 0;
  p.lambda_fp = 0;
  const auto dets = perturb_detections(s, p);
  const auto gt = s.gt.by_frame();
  ASSERT_EQ(dets.size(), 20u);
  for (const auto& [f, ds] : dets) {
    ASSERT_EQ(ds.size(), gt.at(f).size());
    for (std::size_t k = 0; k < ds.size(); ++k) {
      const BBox& want = gt.at(f)[k].second;
      EXPECT_NEAR(ds[k].bbox.x, want.x, 1e-9);
      EXPECT_NEAR(ds[k].bbox.y, want.y, 1e-9);
      EXPECT_NEAR(ds[k].bbox.w, want.w, 1e-9);
      EXPECT_NEAR(ds[k].bbox.h, want.h, 1e-9);
      EXPECT_GE(ds[k].score, 0.6);
      EXPECT_LE(ds[k].score, 1.0);
      EXPECT_EQ(*ds[k].motion_awareness, s.gt_velocities.at({f, gt.at(f)[k].first}));
      EXPECT_EQ(*ds[k].embedding, s.embeddings.at({f, gt.at(f)[k].first}));
    }
  }
}

TEST(Perturb, AllDropped) {
  ScenarioConfig c = quiet(5);
  c.render = false;
  PerturbConfig p;
  p.p_fn = 1;
  p.lambda_fp = 0;
  const auto dets = perturb_detections(generate_scene(c), p);
  EXPECT_EQ(dets.size(), 20u);
  for (const auto& [f, ds] : dets) EXPECT_TRUE(ds.empty());
}

TEST(Perturb, ClutterCountPoisson) {
  ScenarioConfig c = quiet(0);
  c.frames = 100;
  c.render = false;
  PerturbConfig p;
  p.lambda_fp = 3;
  const auto dets = perturb_detections(generate_scene(c), p);
  int total = 0;
  for (const auto& [f, ds] : dets) {
    total += static_cast<int>(ds.size());
    for (const auto& d : ds) {
      EXPECT_GE(d.score, 0.1);
      EXPECT_LE(d.score, 0.7);
      EXPECT_EQ(*d.motion_awareness, 0.0);
      EXPECT_NO_THROW(d.validate());
    }
  }
  EXPECT_NEAR(total, 300, 3 * std::sqrt(300.0));
}

TEST(SynthConfig, ParsesBothSections) {
  std::istringstream in("seed = 9\nframes = 12\nperturb_seed = 4\nlambda_fp = 0.5\n");
  const SynthConfig s = synth_config_from(parse_key_values(in));
  EXPECT_EQ(s.scenario.seed, 9u);
  EXPECT_EQ(s.scenario.frames, 12);
  EXPECT_EQ(s.perturb.seed, 4u);
  EXPECT_EQ(s.perturb.lambda_fp, 0.5);
  std::istringstream bad("speed = 3\n");
  EXPECT_THROW(synth_config_from(parse_key_values(bad)), ParseError);
}

TEST(Records, GtCarriesVelocityColumn) {
  ScenarioConfig c = quiet(2);
  c.render = false;
  const Scene s = generate_scene(c);
  const auto recs = gt_records(s);
  EXPECT_EQ(recs.size(), 40u);
  for (const auto& r : recs) EXPECT_EQ(*r.motion_awareness, s.gt_velocities.at({r.frame, r.id}));
  const auto [drecs, emb] = detection_records(perturb_detections(s, PerturbConfig{}));
  for (const auto& [key, v] : emb) EXPECT_NEAR(dot(v, v), 1.0, 1e-12);
}

TEST(Pipeline, PerfectDetectionsTrackPerfectly) {
  ScenarioConfig c = quiet(6);
  c.render = false;
  const Scene s = generate_scene(c);
  PerturbConfig p;
  p.jitter_sigma = 0;
  p.p_fn = 0;
  p.lambda_fp = 0;
  TrackerConfig t;
  t.n_init = 1;
  const MetricsReport m = track_and_evaluate(s, perturb_detections(s, p), t);
  EXPECT_EQ(m.clear.idsw, 0);
  EXPECT_GT(m.clear.mota, 0.99);
}

TEST(Pipeline, EnhanceKeepsUnitEmbeddings) {
  ScenarioConfig c = quiet(3);
  c.width = c.height = 64;
  c.frames = 3;
  const SynthConfig sc{c, PerturbConfig{}};
  const Scene s = generate_scene(c);
  const auto dets = perturb_detections(s, sc.perturb);
  const auto maps = line_maps(s, 30);
  ASSERT_EQ(maps.size(), 3u);
  const auto en = enhance_detections(s, dets, maps, 0.4);
  ASSERT_EQ(en.size(), dets.size());
  bool changed = false;
  for (const auto& [f, ds] : en) {
    ASSERT_EQ(ds.size(), dets.at(f).size());
    for (std::size_t k = 0; k < ds.size(); ++k) {
      ASSERT_TRUE(ds[k].embedding);
      EXPECT_NEAR(dot(*ds[k].embedding, *ds[k].embedding), 1.0, 1e-12);
      changed |= *ds[k].embedding != *dets.at(f)[k].embedding;
      EXPECT_EQ(ds[k].bbox, dets.at(f)[k].bbox);
    }
  }
  EXPECT_TRUE(changed);
}
