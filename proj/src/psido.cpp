#include "microlocal/psido.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "microlocal/error.hpp"
#include "microlocal/kernels.hpp"

namespace microlocal {
namespace {

using Gauss = boost::math::quadrature::gauss<double, 20>;

void for_blocks(std::size_t size, const std::function<void(std::size_t, std::size_t)>& body) {
  const std::size_t blocks = (size + kernels::kReductionBlock - 1) / kernels::kReductionBlock;
  kernels::for_each_index(blocks, [&](std::size_t b) {
    const std::size_t begin = b * kernels::kReductionBlock;
    body(begin, std::min(size, begin + kernels::kReductionBlock));
  });
}

// m(xi) applied on the lattice: out_r = sum_c m_rc V_c.
SpectralField apply_matrix(const SpectralField& V, const MatrixFn& m, int rows, int cols) {
  const GridSpec& spec = V.spec();
  const std::size_t size = spec.size();
  std::vector<cplx> out(size * rows);
  for_blocks(size, [&](std::size_t begin, std::size_t end) {
    std::vector<cplx> mat(static_cast<std::size_t>(rows) * cols);
    double xi[3];
    for (std::size_t f = begin; f < end; ++f) {
      spec.wavevector(f, std::span<double>(xi, spec.dim));
      m(std::span<const double>(xi, spec.dim), mat);
      for (int r = 0; r < rows; ++r) {
        cplx s = 0.0;
        for (int c = 0; c < cols; ++c) s += mat[r * cols + c] * V.at(c, f);
        out[r * size + f] = s;
      }
    }
  });
  return SpectralField(spec, rows, std::move(out));
}

std::vector<cplx> sample_spatial(const GridSpec& spec, const PointFunction& f) {
  std::vector<cplx> w(spec.size());
  double x[3];
  for (std::size_t i = 0; i < w.size(); ++i) {
    spec.point(i, std::span<double>(x, spec.dim));
    w[i] = f(std::span<const double>(x, spec.dim));
  }
  return w;
}

double beta_raw(double t, double a) { return smooth_step(std::abs(t) / a); }

double half_width(int dim) { return 1.0 / std::sqrt(static_cast<double>(dim)); }

// int_0^a beta_raw(t) cos(k t) dt over equal panels.
double beta_cosine_integral(double k, double a) {
  const int panels = std::max(64, static_cast<int>(std::ceil(std::abs(k) * a / 2.0)) + 64);
  const double w = a / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = p * w;
    total += Gauss::integrate([&](double t) { return beta_raw(t, a) * std::cos(k * t); }, lo,
                              lo + w);
  }
  return total;
}

double beta_mass(int dim) {
  static std::mutex mutex;
  static std::map<int, double> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(dim);
  if (it != cache.end()) return it->second;
  const double m = 2.0 * beta_cosine_integral(0.0, half_width(dim));
  cache.emplace(dim, m);
  return m;
}

}  // namespace

GridField quantize(const Symbol& a, const GridField& u, const QuantizeOptions& options) {
  require(u.channels() == a.cols(), errors::kChannelMismatch,
          "symbol expects " + std::to_string(a.cols()) + " channels, field has " +
              std::to_string(u.channels()));
  const GridSpec& spec = u.spec();
  if (a.form() == Symbol::Form::general) {
    const double work = std::pow(static_cast<double>(spec.size()), 2.0) * a.rows() * a.cols();
    require(work <= options.general_budget, errors::kSizeLimit,
            "general quantization needs " + std::to_string(work) + " operations, budget " +
                std::to_string(options.general_budget));
    const auto U = forward_transform(u);
    auto data = kernels::general_quantize(spec, U.coefficients(), a.rows(), a.cols(),
                                          a.amplitude());
    return GridField(spec, a.rows(), std::move(data));
  }
  std::vector<cplx> acc(spec.size() * a.rows(), cplx(0.0));
  for (const auto& term : a.terms()) {
    GridField v = u;
    if (term.right) {
      const auto w = sample_spatial(spec, term.right);
      v = multiply(u, std::span<const cplx>(w));
    }
    const auto W = apply_matrix(forward_transform(v), term.freq, a.rows(), a.cols());
    GridField out = inverse_transform(W);
    if (term.left) {
      const auto w = sample_spatial(spec, term.left);
      out = multiply(out, std::span<const cplx>(w));
    }
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += out.samples()[i];
  }
  return GridField(spec, a.rows(), std::move(acc));
}

GridField apply_multiplier(const GridField& u,
                           const std::function<cplx(std::span<const double>)>& m) {
  const auto U = forward_transform(u);
  const GridSpec& spec = u.spec();
  const std::size_t size = spec.size();
  std::vector<cplx> data(U.coefficients().begin(), U.coefficients().end());
  for_blocks(size, [&](std::size_t begin, std::size_t end) {
    double xi[3];
    for (std::size_t f = begin; f < end; ++f) {
      spec.wavevector(f, std::span<double>(xi, spec.dim));
      const cplx v = m(std::span<const double>(xi, spec.dim));
      for (int c = 0; c < u.channels(); ++c) data[c * size + f] *= v;
    }
  });
  return inverse_transform(SpectralField(spec, u.channels(), std::move(data)));
}

double mollifier_profile(double t, int dim) {
  return beta_raw(t, half_width(dim)) / beta_mass(dim);
}

double mollifier_axis_transform(double k, int dim) {
  return 2.0 * beta_cosine_integral(k, half_width(dim)) / beta_mass(dim);
}

SmoothingSpec SmoothingSpec::standard(int j, int dim, double R) {
  require(j >= 1, errors::kInvalidArgument, "smoothing index j must be positive");
  require(R > 0.0, errors::kInvalidArgument, "window radius must be positive");
  return SmoothingSpec{j, BumpCutoff::make(std::vector<double>(dim, 0.0), 0.5 * R, R)};
}

GridField smoothing_apply(const SmoothingSpec& s, const GridField& u) {
  const GridSpec& spec = u.spec();
  require(s.j >= 1, errors::kInvalidArgument, "smoothing index j must be positive");
  require(static_cast<int>(s.window.center.size()) == spec.dim, errors::kInvalidArgument,
          "window dimension does not match grid");
  for (double c : s.window.center)
    require(std::abs(c) + s.window.r_outer <= 0.5 * spec.extent, errors::kInvalidArgument,
            "smoothing window must lie inside the box");
  const auto w = sample_cutoff(spec, s.window);
  const auto V = forward_transform(multiply(u, std::span<const double>(w)));
  // F chi_j(xi) = F chi(xi / j) = prod_a F beta(xi_a / j).
  const int n = spec.samples;
  std::vector<double> axis(n);
  // Even in xi: evaluate index n/2 .. n-1 and mirror; index 0 has no partner.
  kernels::for_each_index(static_cast<std::size_t>(n / 2), [&](std::size_t d) {
    axis[n / 2 + d] =
        mollifier_axis_transform(spec.frequency(n / 2 + static_cast<int>(d)) / s.j, spec.dim);
  });
  for (int d = 1; d < n / 2; ++d) axis[n / 2 - d] = axis[n / 2 + d];
  axis[0] = mollifier_axis_transform(spec.frequency(0) / s.j, spec.dim);
  const std::size_t size = spec.size();
  std::vector<cplx> data(V.coefficients().begin(), V.coefficients().end());
  // Separable multiplier: leading-axis factor per row, inner axis along it.
  for (std::size_t r = 0; r < size / n; ++r) {
    std::size_t rest = r;
    double lead = 1.0;
    for (int a = 1; a < spec.dim; ++a) {
      lead *= axis[rest % n];
      rest /= n;
    }
    for (int c = 0; c < u.channels(); ++c) {
      cplx* row = data.data() + c * size + r * n;
      for (int k = 0; k < n; ++k) row[k] *= lead * axis[k];
    }
  }
  return inverse_transform(SpectralField(spec, u.channels(), std::move(data)));
}

OrderShift order_shift_probe(const Symbol& a, const GridField& u, const Cutoff& window,
                             const DirectionCap& cap, const ProfileOptions& options) {
  OrderShift out;
  out.r_star_before = shell_profile(u, window, cap, options).r_star;
  out.r_star_after = shell_profile(quantize(a, u), window, cap, options).r_star;
  return out;
}

}  // namespace microlocal
