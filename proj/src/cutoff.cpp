#include "microlocal/cutoff.hpp"

#include <cmath>
#include <numbers>

#include "microlocal/error.hpp"

namespace microlocal {
namespace {

double expm(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

// Rising step: 0 for t <= 0, 1 for t >= 1.
double rise(double t) { return 1.0 - smooth_step(t); }

}  // namespace

double smooth_step(double t) {
  if (t <= 0.0) return 1.0;
  if (t >= 1.0) return 0.0;
  const double a = expm(1.0 - t);
  const double b = expm(t);
  return a / (a + b);
}

BumpCutoff BumpCutoff::make(std::vector<double> center, double r_inner, double r_outer) {
  require(!center.empty() && center.size() <= 3, errors::kInvalidArgument,
          "cutoff center must have 1 to 3 coordinates");
  require(r_inner > 0.0 && r_outer > r_inner, errors::kInvalidArgument,
          "cutoff radii need 0 < r_inner < r_outer");
  return BumpCutoff{std::move(center), r_inner, r_outer};
}

double BumpCutoff::value(std::span<const double> x) const {
  double d2 = 0.0;
  for (std::size_t a = 0; a < center.size(); ++a) d2 += (x[a] - center[a]) * (x[a] - center[a]);
  return smooth_step((std::sqrt(d2) - r_inner) / (r_outer - r_inner));
}

CellCutoff CellCutoff::make(std::vector<double> lo, std::vector<double> hi, double delta) {
  require(!lo.empty() && lo.size() <= 3 && lo.size() == hi.size(), errors::kInvalidArgument,
          "cell bounds must have matching dimension 1 to 3");
  require(delta > 0.0, errors::kInvalidArgument, "cell transition width must be positive");
  for (std::size_t a = 0; a < lo.size(); ++a)
    require(hi[a] - lo[a] >= 2.0 * delta, errors::kInvalidArgument,
            "cell narrower than its transitions");
  return CellCutoff{std::move(lo), std::move(hi), delta};
}

double CellCutoff::value(std::span<const double> x) const {
  constexpr double kHalfPi = 0.5 * std::numbers::pi;
  double v = 1.0;
  for (std::size_t a = 0; a < lo.size() && v != 0.0; ++a) {
    const double up = rise((x[a] - lo[a] + delta) / (2.0 * delta));
    const double down = rise((x[a] - hi[a] + delta) / (2.0 * delta));
    v *= std::sin(kHalfPi * up) * std::cos(kHalfPi * down);
  }
  return v;
}

double cutoff_value(const Cutoff& c, std::span<const double> x) {
  return std::visit([&](const auto& v) { return v.value(x); }, c);
}

std::vector<double> cutoff_center(const Cutoff& c) {
  if (const auto* b = std::get_if<BumpCutoff>(&c)) return b->center;
  const auto& cell = std::get<CellCutoff>(c);
  std::vector<double> mid(cell.lo.size());
  for (std::size_t a = 0; a < mid.size(); ++a) mid[a] = 0.5 * (cell.lo[a] + cell.hi[a]);
  return mid;
}

int cutoff_dim(const Cutoff& c) {
  return static_cast<int>(cutoff_center(c).size());
}

void cutoff_bounds(const Cutoff& c, std::vector<double>& lo, std::vector<double>& hi) {
  if (const auto* b = std::get_if<BumpCutoff>(&c)) {
    lo = b->center;
    hi = b->center;
    for (std::size_t a = 0; a < lo.size(); ++a) {
      lo[a] -= b->r_outer;
      hi[a] += b->r_outer;
    }
    return;
  }
  const auto& cell = std::get<CellCutoff>(c);
  lo = cell.lo;
  hi = cell.hi;
  for (std::size_t a = 0; a < lo.size(); ++a) {
    lo[a] -= cell.delta;
    hi[a] += cell.delta;
  }
}

std::vector<double> sample_cutoff(const GridSpec& spec, const Cutoff& c) {
  require(cutoff_dim(c) == spec.dim, errors::kInvalidArgument,
          "cutoff dimension does not match grid");
  // Both cutoff kinds vanish outside their bounding box; visit only the
  // index box that can be nonzero.
  std::vector<double> lo, hi;
  cutoff_bounds(c, lo, hi);
  const int n = spec.samples;
  const double h = spec.spacing();
  int first[3] = {0, 0, 0}, last[3] = {0, 0, 0};
  for (int a = 0; a < spec.dim; ++a) {
    first[a] = std::max(0, static_cast<int>(std::floor(lo[a] / h)) + n / 2);
    last[a] = std::min(n - 1, static_cast<int>(std::ceil(hi[a] / h)) + n / 2);
    if (first[a] > last[a]) return std::vector<double>(spec.size(), 0.0);
  }
  std::vector<double> w(spec.size(), 0.0);
  int idx[3] = {0, 0, 0};
  double x[3];
  const std::span<const double> xs(x, spec.dim);
  for (idx[0] = first[0]; idx[0] <= last[0]; ++idx[0]) {
    x[0] = spec.position(idx[0]);
    for (idx[1] = first[1]; idx[1] <= last[1]; ++idx[1]) {
      if (spec.dim > 1) x[1] = spec.position(idx[1]);
      for (idx[2] = first[2]; idx[2] <= last[2]; ++idx[2]) {
        if (spec.dim > 2) x[2] = spec.position(idx[2]);
        w[spec.flat_index(std::span<const int>(idx, spec.dim))] = cutoff_value(c, xs);
      }
    }
  }
  return w;
}

std::vector<CellCutoff> cell_partition(int dim, double lo, double hi, int cells, double delta) {
  require(dim >= 1 && dim <= 3 && cells >= 1 && hi > lo, errors::kInvalidArgument,
          "invalid cell partition");
  const double w = (hi - lo) / cells;
  std::size_t total = 1;
  for (int a = 0; a < dim; ++a) total *= static_cast<std::size_t>(cells);
  std::vector<CellCutoff> out;
  out.reserve(total);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::vector<double> a_lo(dim), a_hi(dim);
    std::size_t rest = flat;
    for (int a = dim - 1; a >= 0; --a) {
      const int k = static_cast<int>(rest % cells);
      rest /= cells;
      a_lo[a] = lo + k * w;
      a_hi[a] = lo + (k + 1) * w;
    }
    out.push_back(CellCutoff::make(std::move(a_lo), std::move(a_hi), delta));
  }
  return out;
}

}  // namespace microlocal
