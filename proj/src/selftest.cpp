#include "microlocal/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "microlocal/cones.hpp"
#include "microlocal/fixtures.hpp"
#include "microlocal/psido.hpp"
#include "microlocal/seminorm.hpp"
#include "microlocal/wavefront.hpp"

namespace microlocal {
namespace {

constexpr double kPi = std::numbers::pi;

GridField random_field(const GridSpec& spec, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<cplx> data(spec.size());
  for (auto& v : data) {
    const double re = normal(rng);
    v = cplx(re, normal(rng));
  }
  return GridField(spec, 1, std::move(data));
}

bool same_point(const std::vector<double>& a, const std::vector<double>& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - b[i]) > 1e-9) return false;
  return true;
}

}  // namespace

double parseval_error(std::uint64_t seed) {
  const GridSpec spec = GridSpec::make(2, 64, 3.0);
  const GridField u = random_field(spec, seed);
  const auto U = forward_transform(u);
  double spectral = 0.0;
  for (const auto& c : U.coefficients()) spectral += std::norm(c);
  spectral *= spec.freq_cell_volume() / std::pow(2.0 * kPi, spec.dim);
  const double direct = std::pow(l2_norm(u), 2);
  return std::abs(spectral - direct) / direct;
}

double round_trip_error(std::uint64_t seed) {
  const GridSpec spec = GridSpec::make(3, 32, 5.0);
  const GridField u = random_field(spec, seed);
  const GridField back = inverse_transform(forward_transform(u));
  return (back - u).max_abs() / u.max_abs();
}

double cone_additivity_error(std::uint64_t seed) {
  const GridSpec spec = GridSpec::make(2, 64, 6.0);
  const GridField u = random_field(spec, seed);
  const Cutoff phi = BumpCutoff::make({0.3, -0.2}, 0.5, 2.0);
  const DirectionCap cap = DirectionCap::make({1.0, 2.0}, 0.7);
  const auto inside = freq_mask(spec, cap, 0.0);
  std::vector<unsigned char> outside(inside.size());
  for (std::size_t i = 0; i < inside.size(); ++i) outside[i] = inside[i] ? 0 : 1;
  const double r = 1.5;
  const double a = masked_seminorm(u, r, phi, inside);
  const double b = masked_seminorm(u, r, phi, outside);
  const double full = cone_seminorm(u, r, phi, DirectionCap::make({1.0, 0.0}, kPi), 0.0);
  return std::abs(a * a + b * b - full * full) / (full * full);
}

double multiplier_composition_error(std::uint64_t seed) {
  const GridSpec spec = GridSpec::make(2, 64, 6.0);
  const GridField u = random_field(spec, seed);
  auto bessel = [](double p) {
    return [p](std::span<const double> xi) { return cplx(std::pow(japanese(xi), p)); };
  };
  const GridField twice = apply_multiplier(apply_multiplier(u, bessel(-1.0)), bessel(-1.0));
  const GridField once = apply_multiplier(u, [](std::span<const double> xi) {
    const double j = japanese(xi);
    return cplx(1.0 / (j * j));
  });
  const GridField quantized = quantize(Symbol::japanese_bracket(-1.0),
                                       quantize(Symbol::japanese_bracket(-1.0), u));
  return std::max((twice - once).max_abs(), (quantized - once).max_abs()) / u.max_abs();
}

long long rotation_mismatches() {
  const GridSpec spec = GridSpec::make(2, 512, 8.0 * kPi);
  const GridField u = fixtures::jump_field(spec);
  const ScanLattice lattice = fixtures::jump_lattice();
  Eigen::MatrixXd R(2, 2);
  R << 0.0, -1.0, 1.0, 0.0;
  // v(x) = u(R^T x): the field rotated by R.
  const auto rotated = pullback_field(SmoothMap::from_linear(LinearMap::linear(R.transpose())), u,
                                      spec, PullbackOptions{true});
  if (!rotated.lattice_exact) return -1;
  const auto a = wf_scan(u, 0.4, lattice);
  const auto b = wf_scan(rotated.field, 0.4, lattice);
  long long mismatches = 0;
  for (const auto& rec : a.records) {
    const std::vector<double> x = {-rec.x[1], rec.x[0]};
    const std::vector<double> w = {-rec.omega[1], rec.omega[0]};
    const auto it = std::find_if(b.records.begin(), b.records.end(), [&](const auto& other) {
      return same_point(other.x, x) && same_point(other.omega, w);
    });
    if (it == b.records.end()) return -1;
    if (it->singular != rec.singular) ++mismatches;
  }
  return mismatches;
}

long long pullback_composition_mismatches() {
  ConicRegion region;
  region.patches.emplace_back(SpatialBall::make({0.5, -1.0}, 1.5),
                              DirectionCap::make({1.0, 0.0}, 0.5));
  region.patches.emplace_back(SpatialBall::make({-2.0, 0.25}, 0.75),
                              DirectionCap::make({0.0, -1.0}, 1.0));
  Eigen::MatrixXd Af(2, 2), Ag(2, 2);
  Af << 2.0, 1.0, 0.5, 1.0;
  Ag << 1.0, -1.0, 0.0, 0.25;
  Eigen::VectorXd bf(2), bg(2);
  bf << 0.5, -0.25;
  bg << 1.0, 2.0;
  const LinearMap f = LinearMap::affine(Af, bf);
  const LinearMap g = LinearMap::affine(Ag, bg);
  const ConicRegion stepwise = pullback_region(g, pullback_region(f, region));
  const ConicRegion direct = pullback_region(f.compose(g), region);
  if (stepwise.patches.size() != direct.patches.size()) return -1;
  long long mismatches = 0;
  for (std::size_t i = 0; i < direct.patches.size(); ++i)
    if (!(stepwise.patches[i] == direct.patches[i])) ++mismatches;
  return mismatches;
}

std::vector<AdmissibleCase> admissible_reference() {
  using M = MapClass;
  using V = Verdict;
  return {
      // r2 - r1 > n/2 and r2 > n/2.
      {M::general, 2, 0, 0.4, 1.5, V::admissible},
      {M::general, 2, 0, 0.5, 1.5, V::not_admissible},
      {M::general, 2, 0, -1.0, 1.0, V::not_admissible},
      {M::general, 2, 0, -1.0, 1.01, V::admissible},
      {M::general, 3, 0, 0.0, 1.6, V::admissible},
      {M::general, 1, 0, 0.2, 0.6, V::not_admissible},
      // r2 - r1 >= (n - k)/2 and r2 > (n - k)/2, open at r2 = (n - k)/2, r1 <= 0.
      {M::constant_rank, 2, 1, 0.0, 0.4, V::not_admissible},
      {M::constant_rank, 2, 1, 0.0, 0.6, V::admissible},
      {M::constant_rank, 2, 1, 0.5, 1.0, V::admissible},
      {M::constant_rank, 2, 1, 0.6, 1.0, V::not_admissible},
      {M::constant_rank, 3, 1, 0.0, 1.0, V::open_in_paper},
      {M::constant_rank, 3, 1, -0.5, 1.0, V::open_in_paper},
      {M::constant_rank, 3, 1, 0.25, 1.0, V::not_admissible},
      {M::constant_rank, 3, 2, -1.0, 0.75, V::admissible},
      {M::constant_rank, 3, 3, 0.2, 0.2, V::admissible},
      {M::constant_rank, 3, 3, 0.3, 0.2, V::not_admissible},
      // Submersions: r2 >= r1.
      {M::submersion, 2, 0, 0.0, 0.0, V::admissible},
      {M::submersion, 3, 0, 1.0, 0.9, V::not_admissible},
      {M::submersion, 1, 0, -2.0, 3.0, V::admissible},
      {M::submersion, 2, 0, 4.0, 4.0, V::admissible},
      // Diffeomorphisms: isomorphism for every r.
      {M::diffeo, 2, 0, 1.0, 1.0, V::admissible},
      {M::diffeo, 3, 0, -3.5, -3.5, V::admissible},
      {M::diffeo, 2, 0, 2.0, 1.0, V::not_admissible},
      {M::diffeo, 1, 0, 0.3, 0.7, V::admissible},
  };
}

long long admissible_mismatches() {
  long long bad = 0;
  for (const auto& c : admissible_reference())
    if (admissible(c.kind, c.n, c.r1, c.r2, c.k).verdict != c.expected) ++bad;
  return bad;
}

std::vector<CheckResult> run_selftest(std::uint64_t seed) {
  std::vector<CheckResult> out;
  auto add = [&](std::string name, double value, double tol) {
    out.push_back({std::move(name), value <= tol, value, tol});
  };
  add("parseval", parseval_error(seed), 1e-10);
  add("fft_round_trip", round_trip_error(seed), 1e-12);
  add("cone_additivity", cone_additivity_error(seed), 1e-10);
  add("multiplier_composition", multiplier_composition_error(seed), 1e-12);
  const long long rot = rotation_mismatches();
  out.push_back({"rotation_equivariance", rot == 0, static_cast<double>(rot), 0.0});
  const long long comp = pullback_composition_mismatches();
  out.push_back({"pullback_composition", comp == 0, static_cast<double>(comp), 0.0});
  const long long adm = admissible_mismatches();
  out.push_back({"admissible_table", adm == 0, static_cast<double>(adm), 0.0});
  return out;
}

}  // namespace microlocal
