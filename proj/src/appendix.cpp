#include "microlocal/appendix.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_map>

#include "microlocal/error.hpp"
#include "microlocal/kernels.hpp"

namespace microlocal {
namespace {

constexpr double kTauMax = 40.0;
constexpr int kStartIntervals = 512;
constexpr int kMaxIntervals = 1 << 20;
constexpr double kRelTol = 1e-10;

// Trapezoid in tau over [-kTauMax, kTauMax], halving until converged. The
// integrand vanishes to double precision at both ends for y != 0; `tail`
// adds an analytic left-tail contribution when it does not.
template <typename F>
double tau_trapezoid(F&& g, double tail) {
  int n = kStartIntervals;
  double h = 2.0 * kTauMax / n;
  double sum = 0.5 * (g(-kTauMax) + g(kTauMax));
  for (int i = 1; i < n; ++i) sum += g(-kTauMax + i * h);
  double prev = sum * h + tail;
  while (n < kMaxIntervals) {
    // Midpoints of the current intervals are the new nodes.
    double mid = 0.0;
    for (int i = 0; i < n; ++i) mid += g(-kTauMax + (i + 0.5) * h);
    sum += mid;
    n *= 2;
    h *= 0.5;
    const double cur = sum * h + tail;
    if (std::abs(cur - prev) <= kRelTol * std::abs(cur)) return cur;
    prev = cur;
  }
  fail(errors::kQuadratureFailure, "trapezoid did not converge within 2^20 intervals");
}

void check_params(int q, double s) {
  require(q >= 1 && q <= 3, errors::kInvalidArgument, "q must be 1, 2 or 3");
  require(s > 0.0 && std::isfinite(s), errors::kInvalidArgument, "s must be positive");
}

}  // namespace

double appendix_prefactor(int q, double s) {
  return 1.0 / (std::tgamma(0.5 * s) * std::pow(2.0, q) * std::pow(std::numbers::pi, 0.5 * q));
}

double appendix_value(int q, double s, double y_abs) {
  check_params(q, s);
  require(y_abs >= 0.0, errors::kInvalidArgument, "|y| must be nonnegative");
  const double nu = 0.5 * (s - q);
  if (y_abs == 0.0) {
    require(s > q, errors::kInvalidArgument, "the kernel is singular at y = 0 when s <= q");
    const double tail = std::exp(-kTauMax * nu) / nu;
    return appendix_prefactor(q, s) *
           tau_trapezoid([&](double tau) { return std::exp(tau * nu - std::exp(tau)); }, tail);
  }
  const double y2 = y_abs * y_abs;
  return appendix_prefactor(q, s) *
         tau_trapezoid(
             [&](double tau) {
               return std::exp(tau * nu - std::exp(tau) - 0.25 * y2 * std::exp(-tau));
             },
             0.0);
}

double appendix_cell_average(int q, double s, double h) {
  check_params(q, s);
  require(h > 0.0, errors::kInvalidArgument, "cell size must be positive");
  const double nu = 0.5 * (s - q);
  const double root4pi = std::sqrt(4.0 * std::numbers::pi);
  auto g = [&](double tau) {
    const double t = std::exp(tau);
    const double factor = root4pi * std::sqrt(t) * std::erf(h / (4.0 * std::sqrt(t))) / h;
    return std::exp(tau * nu - t) * std::pow(factor, q);
  };
  // For t -> 0 the cell factor behaves like sqrt(4 pi t) / h.
  const double lead = 0.5 * s;
  const double tail = std::pow(root4pi / h, q) * std::exp(-kTauMax * lead) / lead;
  return appendix_prefactor(q, s) * tau_trapezoid(g, tail);
}

double appendix_closed_form(int q, double s, double y_abs) {
  check_params(q, s);
  require(y_abs > 0.0, errors::kInvalidArgument, "closed form needs y != 0");
  const double nu = 0.5 * (s - q);
  return appendix_prefactor(q, s) * 2.0 * std::pow(0.5 * y_abs, nu) *
         std::cyl_bessel_k(std::abs(nu), y_abs);
}

GridField appendix_family(int q, double s, const GridSpec& grid) {
  check_params(q, s);
  require(grid.dim == q, errors::kInvalidArgument, "grid dimension must equal q");
  const double h = grid.spacing();
  const std::size_t size = grid.size();
  // Distinct integer radii^2 in index units.
  std::vector<long long> key(size);
  for (std::size_t i = 0; i < size; ++i) {
    const auto idx = grid.multi_index(i);
    long long r2 = 0;
    for (int a = 0; a < q; ++a) {
      const long long d = idx[a] - grid.samples / 2;
      r2 += d * d;
    }
    key[i] = r2;
  }
  std::vector<long long> distinct(key);
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  std::vector<double> values(distinct.size());
  kernels::for_each_index(distinct.size(), [&](std::size_t i) {
    const long long r2 = distinct[i];
    if (r2 == 0) {
      values[i] = s > q ? appendix_value(q, s, 0.0) : appendix_cell_average(q, s, h);
    } else {
      values[i] = appendix_value(q, s, h * std::sqrt(static_cast<double>(r2)));
    }
  });
  std::unordered_map<long long, double> lookup;
  lookup.reserve(distinct.size());
  for (std::size_t i = 0; i < distinct.size(); ++i) lookup.emplace(distinct[i], values[i]);
  std::vector<cplx> data(size);
  for (std::size_t i = 0; i < size; ++i) data[i] = lookup.at(key[i]);
  return GridField(grid, 1, std::move(data));
}

GridField bracket_inverse(double s, const GridSpec& grid) {
  const auto U =
      spectral_from_function(grid, [s](std::span<const double> xi) { return std::pow(japanese(xi), -s); });
  const auto u = inverse_transform(U);
  std::vector<cplx> data(u.samples().begin(), u.samples().end());
  for (auto& v : data) v = v.real();
  return GridField(grid, 1, std::move(data));
}

std::vector<DualRouteRow> appendix_dual_route(int q, double s, const GridSpec& grid, double y_min,
                                              double y_max) {
  check_params(q, s);
  require(grid.dim == q, errors::kInvalidArgument, "grid dimension must equal q");
  const auto fft = bracket_inverse(s, grid);
  std::vector<DualRouteRow> rows;
  std::vector<std::size_t> picked;
  double x[3];
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid.point(i, std::span<double>(x, q));
    double r = 0.0;
    for (int a = 0; a < q; ++a) r += x[a] * x[a];
    r = std::sqrt(r);
    if (r < y_min || r > y_max) continue;
    DualRouteRow row;
    row.y.assign(x, x + q);
    row.route_fft = fft.samples()[i].real();
    rows.push_back(std::move(row));
    picked.push_back(i);
  }
  kernels::for_each_index(rows.size(), [&](std::size_t k) {
    double r = 0.0;
    for (double v : rows[k].y) r += v * v;
    rows[k].route_integral = appendix_value(q, s, std::sqrt(r));
    rows[k].rel_err =
        std::abs(rows[k].route_fft - rows[k].route_integral) / std::abs(rows[k].route_integral);
  });
  return rows;
}

}  // namespace microlocal
