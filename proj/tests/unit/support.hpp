#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "microlocal/grid.hpp"

namespace testing_support {

using microlocal::cplx;
using microlocal::GridField;
using microlocal::GridSpec;

// Smooth random field: random complex amplitudes in a Gaussian envelope that
// sits inside the central half of the box.
inline GridField random_field(const GridSpec& spec, std::uint64_t seed, int channels = 1) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<cplx> data(spec.size() * channels);
  const double width = spec.extent / 10.0;
  for (int c = 0; c < channels; ++c) {
    for (std::size_t i = 0; i < spec.size(); ++i) {
      double x[3];
      spec.point(i, std::span<double>(x, spec.dim));
      double r2 = 0.0;
      for (int a = 0; a < spec.dim; ++a) r2 += x[a] * x[a];
      data[c * spec.size() + i] = cplx(g(rng), g(rng)) * std::exp(-r2 / (2.0 * width * width));
    }
  }
  return GridField(spec, channels, std::move(data));
}

inline double max_diff(const GridField& a, const GridField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.samples().size(); ++i)
    m = std::max(m, std::abs(a.samples()[i] - b.samples()[i]));
  return m;
}

}  // namespace testing_support
