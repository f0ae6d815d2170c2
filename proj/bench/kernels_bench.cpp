// Serial reference kernels against their OpenMP counterparts.
#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "microlocal/grid.hpp"
#include "microlocal/kernels.hpp"

using namespace microlocal;

namespace {

SpectralField spectrum(int n) {
  const auto s = GridSpec::make(2, n, 20.0);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  return forward_transform(GridField::sample(s, [&](std::span<const double> x) {
    return cplx(g(rng), g(rng)) * std::exp(-(x[0] * x[0] + x[1] * x[1]) / 8.0);
  }));
}

kernels::RadialCapQuery cap_query() {
  kernels::RadialCapQuery q;
  for (int k = 0; k < 8; ++k) {
    const double t = k * std::acos(-1.0) / 4.0;
    q.caps.push_back(kernels::CapTest{{std::cos(t), std::sin(t), 0.0}, std::cos(0.42), false});
  }
  for (double e = 1.0; e <= 512.0; e *= 2.0) q.edges.push_back(e);
  q.weight_order = 0.5;
  return q;
}

template <bool Parallel>
void radial_cap_bins(benchmark::State& state) {
  const auto U = spectrum(static_cast<int>(state.range(0)));
  const auto q = cap_query();
  for (auto _ : state) {
    auto r = Parallel ? kernels::parallel::radial_cap_bins(U.spec(), U.coefficients(), 1, q)
                      : kernels::serial::radial_cap_bins(U.spec(), U.coefficients(), 1, q);
    benchmark::DoNotOptimize(r.data());
  }
}

template <bool Parallel>
void masked_sup(benchmark::State& state) {
  const auto U = spectrum(static_cast<int>(state.range(0)));
  const kernels::SupQuery q{cap_query().caps[1], 1.5, 200.0};
  for (auto _ : state) {
    const double v = Parallel ? kernels::parallel::masked_sup(U.spec(), U.coefficients(), 1, q)
                              : kernels::serial::masked_sup(U.spec(), U.coefficients(), 1, q);
    benchmark::DoNotOptimize(v);
  }
}

template <bool Parallel>
void trig_interpolate(benchmark::State& state) {
  const auto U = spectrum(static_cast<int>(state.range(0)));
  std::vector<double> pts;
  for (int i = 0; i < 64; ++i) {
    pts.push_back(0.13 * i - 4.0);
    pts.push_back(3.0 - 0.07 * i);
  }
  const kernels::TrigQuery q{U.coefficients(), pts};
  for (auto _ : state) {
    auto r = Parallel ? kernels::parallel::trig_interpolate(U.spec(), q)
                      : kernels::serial::trig_interpolate(U.spec(), q);
    benchmark::DoNotOptimize(r.data());
  }
}

template <bool Parallel>
void general_quantize(benchmark::State& state) {
  const auto U = spectrum(static_cast<int>(state.range(0)));
  const kernels::GeneralSymbolFn a = [](std::span<const double> x, std::span<const double> xi,
                                        std::span<cplx> out) {
    out[0] = std::exp(-0.1 * (x[0] * x[0] + x[1] * x[1])) * std::sqrt(1.0 + xi[0] * xi[0] + xi[1] * xi[1]);
  };
  for (auto _ : state) {
    auto r = Parallel ? kernels::parallel::general_quantize(U.spec(), U.coefficients(), 1, 1, a)
                      : kernels::serial::general_quantize(U.spec(), U.coefficients(), 1, 1, a);
    benchmark::DoNotOptimize(r.data());
  }
}

}  // namespace

BENCHMARK(radial_cap_bins<false>)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(radial_cap_bins<true>)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(masked_sup<false>)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(masked_sup<true>)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(trig_interpolate<false>)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(trig_interpolate<true>)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(general_quantize<false>)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(general_quantize<true>)->Arg(32)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
