#include "microlocal/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>

#include "microlocal/error.hpp"

namespace microlocal::kernels {
namespace {

std::atomic<Policy> g_policy{Policy::parallel};
std::atomic<int> g_threads{0};

struct Lattice {
  int dim;
  int n;
  double step;

  explicit Lattice(const GridSpec& spec)
      : dim(spec.dim), n(spec.samples), step(spec.freq_step()) {}

  void wavevector(std::size_t flat, double* xi) const {
    for (int a = dim - 1; a >= 0; --a) {
      xi[a] = (static_cast<int>(flat % n) - n / 2) * step;
      flat /= n;
    }
  }
};

bool in_cap(const CapTest& cap, const double* xi, double norm, int dim) {
  if (cap.full) return true;
  if (norm == 0.0) return false;
  double dot = 0.0;
  for (int a = 0; a < dim; ++a) dot += cap.omega[a] * xi[a];
  return dot > norm * cap.cos_half;
}

double channel_energy(std::span<const cplx> coefficients, int channels, std::size_t size,
                      std::size_t flat) {
  double e = 0.0;
  for (int c = 0; c < channels; ++c) e += std::norm(coefficients[c * size + flat]);
  return e;
}

void check_query(const GridSpec& spec, std::span<const cplx> coefficients, int channels) {
  require(channels >= 1 && coefficients.size() == spec.size() * channels,
          errors::kInvalidArgument, "coefficient array does not match grid and channels");
}

// (1 + |xi|^2)^r; small integer orders, the common case, avoid pow.
double bracket_weight(double n2, double r) {
  const double t = 1.0 + n2;
  if (r == 0.0) return 1.0;
  if (r == 1.0) return t;
  if (r == 2.0) return t * t;
  if (r == -1.0) return 1.0 / t;
  if (r == -2.0) return 1.0 / (t * t);
  return std::pow(t, r);
}

// Accumulates the radial/cap bins over [begin, end) into `bins`.
void bin_range(const GridSpec& spec, std::span<const cplx> coefficients, int channels,
               const RadialCapQuery& q, std::size_t begin, std::size_t end, double* bins) {
  const Lattice lat(spec);
  const std::size_t size = spec.size();
  const std::size_t nbins = q.edges.size() - 1;
  const double lo = q.edges.front();
  const double hi = q.edges.back();
  double xi[3];
  for (std::size_t f = begin; f < end; ++f) {
    lat.wavevector(f, xi);
    double n2 = 0.0;
    for (int a = 0; a < spec.dim; ++a) n2 += xi[a] * xi[a];
    const double norm = std::sqrt(n2);
    if (norm < lo || norm >= hi) continue;
    const auto b = static_cast<std::size_t>(
        std::upper_bound(q.edges.begin(), q.edges.end(), norm) - q.edges.begin() - 1);
    double e = channel_energy(coefficients, channels, size, f);
    if (e == 0.0) continue;
    e *= bracket_weight(n2, q.weight_order);
    for (std::size_t c = 0; c < q.caps.size(); ++c) {
      if (in_cap(q.caps[c], xi, norm, spec.dim)) bins[c * nbins + b] += e;
    }
  }
}

double sup_range(const GridSpec& spec, std::span<const cplx> coefficients, int channels,
                 const SupQuery& q, std::size_t begin, std::size_t end) {
  const Lattice lat(spec);
  const std::size_t size = spec.size();
  double best = 0.0;
  double xi[3];
  for (std::size_t f = begin; f < end; ++f) {
    lat.wavevector(f, xi);
    double n2 = 0.0;
    for (int a = 0; a < spec.dim; ++a) n2 += xi[a] * xi[a];
    const double norm = std::sqrt(n2);
    if (norm > q.ceiling || !in_cap(q.cap, xi, norm, spec.dim)) continue;
    const double v = std::pow(1.0 + n2, 0.5 * q.nu) *
                     std::sqrt(channel_energy(coefficients, channels, size, f));
    best = std::max(best, v);
  }
  return best;
}

// Per-axis factors e^{i x xi_k}, with the unpaired Nyquist mode as a cosine.
void axis_phases(const GridSpec& spec, double x, std::vector<cplx>& out) {
  const int n = spec.samples;
  out.resize(n);
  const double step = spec.freq_step();
  out[0] = cplx(std::cos(x * (-n / 2) * step), 0.0);
  for (int k = 1; k < n; ++k) {
    const double arg = x * (k - n / 2) * step;
    out[k] = cplx(std::cos(arg), std::sin(arg));
  }
}

cplx trig_point(const GridSpec& spec, std::span<const cplx> coef, const double* x,
                std::vector<cplx> (&phase)[3]) {
  const int n = spec.samples;
  for (int a = 0; a < spec.dim; ++a) axis_phases(spec, x[a], phase[a]);
  cplx total = 0.0;
  if (spec.dim == 1) {
    for (int k = 0; k < n; ++k) total += phase[0][k] * coef[k];
  } else if (spec.dim == 2) {
    for (int k0 = 0; k0 < n; ++k0) {
      cplx row = 0.0;
      const cplx* c = coef.data() + static_cast<std::size_t>(k0) * n;
      for (int k1 = 0; k1 < n; ++k1) row += phase[1][k1] * c[k1];
      total += phase[0][k0] * row;
    }
  } else {
    for (int k0 = 0; k0 < n; ++k0) {
      cplx plane = 0.0;
      for (int k1 = 0; k1 < n; ++k1) {
        cplx row = 0.0;
        const cplx* c = coef.data() + (static_cast<std::size_t>(k0) * n + k1) * n;
        for (int k2 = 0; k2 < n; ++k2) row += phase[2][k2] * c[k2];
        plane += phase[1][k1] * row;
      }
      total += phase[0][k0] * plane;
    }
  }
  return total / std::pow(spec.extent, spec.dim);
}

void quantize_point(const GridSpec& spec, std::span<const cplx> coefficients, int rows,
                    int cols, const GeneralSymbolFn& symbol, std::size_t xf,
                    std::vector<cplx>& out) {
  const Lattice lat(spec);
  const std::size_t size = spec.size();
  double x[3];
  spec.point(xf, std::span<double>(x, spec.dim));
  double xi[3];
  std::vector<cplx> a(static_cast<std::size_t>(rows) * cols);
  std::vector<cplx> acc(rows, cplx(0.0));
  for (std::size_t f = 0; f < size; ++f) {
    lat.wavevector(f, xi);
    double phase = 0.0;
    for (int d = 0; d < spec.dim; ++d) phase += x[d] * xi[d];
    const cplx e(std::cos(phase), std::sin(phase));
    symbol(std::span<const double>(x, spec.dim), std::span<const double>(xi, spec.dim), a);
    for (int r = 0; r < rows; ++r) {
      cplx s = 0.0;
      for (int c = 0; c < cols; ++c) s += a[r * cols + c] * coefficients[c * size + f];
      acc[r] += e * s;
    }
  }
  const double scale = 1.0 / std::pow(spec.extent, spec.dim);
  for (int r = 0; r < rows; ++r) out[r * size + xf] = acc[r] * scale;
}

std::size_t block_count(std::size_t n) { return (n + kReductionBlock - 1) / kReductionBlock; }

void validate_bins(const RadialCapQuery& q) {
  require(q.edges.size() >= 2, errors::kInvalidArgument, "radial bins need two edges");
  require(std::is_sorted(q.edges.begin(), q.edges.end()), errors::kInvalidArgument,
          "radial edges must be sorted");
}

}  // namespace

void set_policy(Policy p) { g_policy = p; }
Policy policy() { return g_policy; }

void set_threads(int t) {
  require(t >= 0, errors::kInvalidArgument, "thread count must be nonnegative");
  g_threads = t;
  if (t > 0) omp_set_num_threads(t);
}
int threads() { return g_threads > 0 ? g_threads.load() : omp_get_max_threads(); }

namespace serial {

std::vector<double> radial_cap_bins(const GridSpec& spec, std::span<const cplx> coefficients,
                                    int channels, const RadialCapQuery& query) {
  check_query(spec, coefficients, channels);
  validate_bins(query);
  std::vector<double> bins(query.caps.size() * (query.edges.size() - 1), 0.0);
  bin_range(spec, coefficients, channels, query, 0, spec.size(), bins.data());
  return bins;
}

double masked_sup(const GridSpec& spec, std::span<const cplx> coefficients, int channels,
                  const SupQuery& query) {
  check_query(spec, coefficients, channels);
  return sup_range(spec, coefficients, channels, query, 0, spec.size());
}

std::vector<cplx> trig_interpolate(const GridSpec& spec, const TrigQuery& query) {
  check_query(spec, query.coefficients, 1);
  const std::size_t count = query.points.size() / spec.dim;
  std::vector<cplx> out(count);
  std::vector<cplx> phase[3];
  for (std::size_t p = 0; p < count; ++p)
    out[p] = trig_point(spec, query.coefficients, query.points.data() + p * spec.dim, phase);
  return out;
}

std::vector<cplx> general_quantize(const GridSpec& spec, std::span<const cplx> coefficients,
                                   int rows, int cols, const GeneralSymbolFn& symbol) {
  check_query(spec, coefficients, cols);
  std::vector<cplx> out(static_cast<std::size_t>(rows) * spec.size());
  for (std::size_t xf = 0; xf < spec.size(); ++xf)
    quantize_point(spec, coefficients, rows, cols, symbol, xf, out);
  return out;
}

}  // namespace serial

namespace parallel {

std::vector<double> radial_cap_bins(const GridSpec& spec, std::span<const cplx> coefficients,
                                    int channels, const RadialCapQuery& query) {
  check_query(spec, coefficients, channels);
  validate_bins(query);
  const std::size_t width = query.caps.size() * (query.edges.size() - 1);
  const std::size_t blocks = block_count(spec.size());
  std::vector<double> partial(blocks * width, 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(blocks); ++b) {
    const std::size_t begin = b * kReductionBlock;
    const std::size_t end = std::min(spec.size(), begin + kReductionBlock);
    bin_range(spec, coefficients, channels, query, begin, end, partial.data() + b * width);
  }
  std::vector<double> bins(width, 0.0);
  for (std::size_t b = 0; b < blocks; ++b)
    for (std::size_t i = 0; i < width; ++i) bins[i] += partial[b * width + i];
  return bins;
}

double masked_sup(const GridSpec& spec, std::span<const cplx> coefficients, int channels,
                  const SupQuery& query) {
  check_query(spec, coefficients, channels);
  const std::size_t blocks = block_count(spec.size());
  std::vector<double> partial(blocks, 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(blocks); ++b) {
    const std::size_t begin = b * kReductionBlock;
    const std::size_t end = std::min(spec.size(), begin + kReductionBlock);
    partial[b] = sup_range(spec, coefficients, channels, query, begin, end);
  }
  return partial.empty() ? 0.0 : *std::max_element(partial.begin(), partial.end());
}

std::vector<cplx> trig_interpolate(const GridSpec& spec, const TrigQuery& query) {
  check_query(spec, query.coefficients, 1);
  const std::size_t count = query.points.size() / spec.dim;
  std::vector<cplx> out(count);
#pragma omp parallel
  {
    std::vector<cplx> phase[3];
#pragma omp for schedule(static)
    for (std::ptrdiff_t p = 0; p < static_cast<std::ptrdiff_t>(count); ++p)
      out[p] = trig_point(spec, query.coefficients, query.points.data() + p * spec.dim, phase);
  }
  return out;
}

std::vector<cplx> general_quantize(const GridSpec& spec, std::span<const cplx> coefficients,
                                   int rows, int cols, const GeneralSymbolFn& symbol) {
  check_query(spec, coefficients, cols);
  std::vector<cplx> out(static_cast<std::size_t>(rows) * spec.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t xf = 0; xf < static_cast<std::ptrdiff_t>(spec.size()); ++xf)
    quantize_point(spec, coefficients, rows, cols, symbol, xf, out);
  return out;
}

}  // namespace parallel

std::vector<double> radial_cap_bins(const GridSpec& spec, std::span<const cplx> coefficients,
                                    int channels, const RadialCapQuery& query) {
  return policy() == Policy::parallel
             ? parallel::radial_cap_bins(spec, coefficients, channels, query)
             : serial::radial_cap_bins(spec, coefficients, channels, query);
}

double masked_sup(const GridSpec& spec, std::span<const cplx> coefficients, int channels,
                  const SupQuery& query) {
  return policy() == Policy::parallel ? parallel::masked_sup(spec, coefficients, channels, query)
                                      : serial::masked_sup(spec, coefficients, channels, query);
}

std::vector<cplx> trig_interpolate(const GridSpec& spec, const TrigQuery& query) {
  return policy() == Policy::parallel ? parallel::trig_interpolate(spec, query)
                                      : serial::trig_interpolate(spec, query);
}

std::vector<cplx> general_quantize(const GridSpec& spec, std::span<const cplx> coefficients,
                                   int rows, int cols, const GeneralSymbolFn& symbol) {
  return policy() == Policy::parallel
             ? parallel::general_quantize(spec, coefficients, rows, cols, symbol)
             : serial::general_quantize(spec, coefficients, rows, cols, symbol);
}

void for_each_index(std::size_t count, const std::function<void(std::size_t)>& body) {
  if (policy() == Policy::serial) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  // Exceptions may not cross the OpenMP region; the first one is rethrown.
  std::exception_ptr first;
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(count); ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(microlocal_for_each)
      if (!first) first = std::current_exception();
    }
  }
  if (first) std::rethrow_exception(first);
}

}  // namespace microlocal::kernels
