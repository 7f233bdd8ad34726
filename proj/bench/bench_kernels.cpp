#include <benchmark/benchmark.h>

#include "sarmot/lineops.hpp"
#include "sarmot/reference.hpp"
#include "sarmot/rng.hpp"
#include "sarmot/tracker.hpp"

using namespace sarmot;

namespace {

FeatureMap input(int side, int channels) {
  Rng rng(1);
  FeatureMap m(side, side, channels);
  for (double& v : m.values()) v = rng.uniform();
  return m;
}

template <class F>
void forward(benchmark::State& state, F f) {
  const int side = static_cast<int>(state.range(0));
  const FeatureMap x = input(side, 2);
  const RadonGeometry g = RadonGeometry::with_defaults(side, side);
  for (auto _ : state) benchmark::DoNotOptimize(f(x, g));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(x.size()) * g.angle_bins());
}

template <class F>
void backproject(benchmark::State& state, F f) {
  const int side = static_cast<int>(state.range(0));
  const FeatureMap x = input(side, 2);
  const RadonMap y = radon_forward(x, RadonGeometry::with_defaults(side, side));
  const auto tau = default_threshold(y);
  for (auto _ : state) benchmark::DoNotOptimize(f(y, tau));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(x.size()) * y.geometry().angle_bins());
}

template <class F>
void softmax(benchmark::State& state, F f) {
  const FeatureMap a = input(static_cast<int>(state.range(0)), 4);
  for (auto _ : state) benchmark::DoNotOptimize(f(a));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(a.size()));
}

template <class F>
void fuse(benchmark::State& state, F f) {
  const int side = static_cast<int>(state.range(0));
  const FeatureMap x = input(side, 4);
  const LineIntensityMap a = soft_normalize(x);
  Rng rng(2);
  FusionParams p = FusionParams::zeros(4);
  for (double& w : p.weights) w = rng.uniform(-1, 1);
  for (auto _ : state) benchmark::DoNotOptimize(f(x, a, p));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(x.size()));
}

void BM_ForwardParallel(benchmark::State& s) {
  forward(s, [](const FeatureMap& x, const RadonGeometry& g) { return radon_forward(x, g); });
}
void BM_ForwardSerial(benchmark::State& s) {
  forward(s, [](const FeatureMap& x, const RadonGeometry& g) { return reference::radon_forward(x, g); });
}
void BM_BackprojectParallel(benchmark::State& s) {
  backproject(s, [](const RadonMap& y, const std::vector<double>& t) { return radon_backproject(y, t); });
}
void BM_BackprojectSerial(benchmark::State& s) {
  backproject(s, [](const RadonMap& y, const std::vector<double>& t) { return reference::radon_backproject(y, t); });
}
void BM_SoftmaxParallel(benchmark::State& s) {
  softmax(s, [](const FeatureMap& a) { return soft_normalize(a); });
}
void BM_SoftmaxSerial(benchmark::State& s) {
  softmax(s, [](const FeatureMap& a) { return reference::soft_normalize(a); });
}
void BM_FuseParallel(benchmark::State& s) {
  fuse(s, [](const FeatureMap& x, const LineIntensityMap& a, const FusionParams& p) { return gated_fuse(x, a, p); });
}
void BM_FuseSerial(benchmark::State& s) {
  fuse(s, [](const FeatureMap& x, const LineIntensityMap& a, const FusionParams& p) {
    return reference::gated_fuse(x, a, p);
  });
}

void BM_TrackFrame(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(3);
  std::vector<std::array<double, 2>> pos(n);
  for (auto& p : pos) p = {rng.uniform(0, 2000), rng.uniform(0, 2000)};
  for (auto _ : state) {
    ByteTracker t{TrackerConfig{}};
    for (int f = 1; f <= 20; ++f) {
      std::vector<Detection> ds;
      for (int i = 0; i < n; ++i) {
        Detection d;
        d.frame = f;
        d.bbox = BBox(pos[i][0] + f, pos[i][1], 20, 20);
        d.score = 0.9;
        ds.push_back(d);
      }
      benchmark::DoNotOptimize(t.step(f, ds));
    }
  }
  state.SetItemsProcessed(state.iterations() * 20L * n);
}

}  // namespace

BENCHMARK(BM_ForwardParallel)->Arg(32)->Arg(128);
BENCHMARK(BM_ForwardSerial)->Arg(32)->Arg(128);
BENCHMARK(BM_BackprojectParallel)->Arg(32)->Arg(128);
BENCHMARK(BM_BackprojectSerial)->Arg(32)->Arg(128);
BENCHMARK(BM_SoftmaxParallel)->Arg(128)->Arg(512);
BENCHMARK(BM_SoftmaxSerial)->Arg(128)->Arg(512);
BENCHMARK(BM_FuseParallel)->Arg(128)->Arg(512);
BENCHMARK(BM_FuseSerial)->Arg(128)->Arg(512);
BENCHMARK(BM_TrackFrame)->Arg(50)->Arg(200);

BENCHMARK_MAIN();
