#pragma once

// Data-parallel inner loops of the toolkit. Every kernel has a plain serial
// reference in `kernels::serial` and an OpenMP version in
// `kernels::parallel`. Parallel reductions split the index range into
// fixed-size blocks and combine block results in index order, so their
// output is bitwise identical for every thread count. The unqualified
// entry points dispatch on the process-wide execution policy.

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "microlocal/grid.hpp"

namespace microlocal::kernels {

enum class Policy { serial, parallel };

void set_policy(Policy policy);
Policy policy();
/// Thread count for the parallel policy; 0 keeps the OpenMP default.
void set_threads(int threads);
int threads();

/// Block size of the deterministic parallel reductions.
inline constexpr std::size_t kReductionBlock = 4096;

/// Directional membership test used on the frequency lattice. A lattice
/// vector xi belongs to the cap when omega . xi > |xi| cos_half, or to any
/// nonzero xi (and to xi = 0) when `full` is set.
struct CapTest {
  std::array<double, 3> omega{1.0, 0.0, 0.0};
  double cos_half = 0.0;
  bool full = false;
};

/// Accumulates sum <xi>^{2 weight_order} |U(xi)|^2 over all channels into
/// bins indexed [cap][radial bin]. Radial bin b holds lattice points with
/// edges[b] <= |xi| < edges[b+1]; points outside [edges.front(),
/// edges.back()) are skipped. Result length caps.size() * (edges.size()-1).
struct RadialCapQuery {
  std::vector<CapTest> caps;
  std::vector<double> edges;
  double weight_order = 0.0;
};

/// Largest <xi>^nu |U(xi)| over lattice points inside the cap with
/// |xi| <= ceiling (all channels).
struct SupQuery {
  CapTest cap;
  double nu = 0.0;
  double ceiling = 0.0;
};

/// Evaluation of a band-limited trigonometric interpolant at arbitrary
/// points. `coefficients` is a single-channel centered lattice spectrum and
/// `points` is row-major (count x dim). The unpaired Nyquist mode is
/// evaluated as a cosine so real fields interpolate to real values.
struct TrigQuery {
  std::span<const cplx> coefficients;
  std::span<const double> points;
};

/// Slow exact Kohn-Nirenberg sum for a general symbol:
/// out(x) = (2 pi)^{-n} sum_xi e^{i x xi} a(x, xi) U(xi) dxi.
/// `symbol(x, xi, out)` writes a rows x cols matrix (row-major).
using GeneralSymbolFn =
    std::function<void(std::span<const double>, std::span<const double>, std::span<cplx>)>;

namespace serial {
std::vector<double> radial_cap_bins(const GridSpec& spec, std::span<const cplx> coefficients,
                                    int channels, const RadialCapQuery& query);
double masked_sup(const GridSpec& spec, std::span<const cplx> coefficients, int channels,
                  const SupQuery& query);
std::vector<cplx> trig_interpolate(const GridSpec& spec, const TrigQuery& query);
std::vector<cplx> general_quantize(const GridSpec& spec, std::span<const cplx> coefficients,
                                   int rows, int cols, const GeneralSymbolFn& symbol);
}  // namespace serial

namespace parallel {
std::vector<double> radial_cap_bins(const GridSpec& spec, std::span<const cplx> coefficients,
                                    int channels, const RadialCapQuery& query);
double masked_sup(const GridSpec& spec, std::span<const cplx> coefficients, int channels,
                  const SupQuery& query);
std::vector<cplx> trig_interpolate(const GridSpec& spec, const TrigQuery& query);
std::vector<cplx> general_quantize(const GridSpec& spec, std::span<const cplx> coefficients,
                                   int rows, int cols, const GeneralSymbolFn& symbol);
}  // namespace parallel

std::vector<double> radial_cap_bins(const GridSpec& spec, std::span<const cplx> coefficients,
                                    int channels, const RadialCapQuery& query);
double masked_sup(const GridSpec& spec, std::span<const cplx> coefficients, int channels,
                  const SupQuery& query);
std::vector<cplx> trig_interpolate(const GridSpec& spec, const TrigQuery& query);
std::vector<cplx> general_quantize(const GridSpec& spec, std::span<const cplx> coefficients,
                                   int rows, int cols, const GeneralSymbolFn& symbol);

/// Runs `body(i)` for i in [0, count), in parallel under the parallel
/// policy. Bodies must write disjoint outputs.
void for_each_index(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace microlocal::kernels
