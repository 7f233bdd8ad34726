#pragma once

// Single-threaded versions of the line-feature kernels. They follow the
// defining sums literally (scatter-style back-projection over every bin and
// pixel) and exist to check the OpenMP kernels and to baseline the benchmark.

#include <span>

#include "sarmot/lineops.hpp"

namespace sarmot::reference {

RadonMap radon_forward(const FeatureMap& x, const RadonGeometry& g);
FeatureMap radon_backproject(const RadonMap& y, std::span<const double> tau);
LineIntensityMap soft_normalize(const FeatureMap& a);
FeatureMap gated_fuse(const FeatureMap& x, const LineIntensityMap& a_soft, const FusionParams& p);

}  // namespace sarmot::reference
