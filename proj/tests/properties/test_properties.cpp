#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "microlocal/appendix.hpp"
#include "microlocal/defect.hpp"
#include "microlocal/fixtures.hpp"
#include "microlocal/psido.hpp"
#include "microlocal/pullback.hpp"
#include "microlocal/seminorm.hpp"
#include "microlocal/wavefront.hpp"
#include "../unit/support.hpp"

using namespace microlocal;
using testing_support::max_diff;
using testing_support::random_field;

namespace {
constexpr double kPi = std::numbers::pi;
constexpr int kTrials = 8;

GridSpec plane() { return GridSpec::make(2, 64, 10.0); }

DirectionCap random_cap(std::mt19937_64& rng, double lo = 0.2, double hi = 1.4) {
  std::uniform_real_distribution<double> t(0.0, 2.0 * kPi), a(lo, hi);
  const double th = t(rng);
  return DirectionCap::make({std::cos(th), std::sin(th)}, a(rng));
}

BumpCutoff window() { return BumpCutoff::make({0.3, -0.2}, 1.0, 2.5); }

SequenceSpec oscillation(double amplitude, std::vector<int> omega0) {
  const auto s = GridSpec::make(2, 128, 2.0 * kPi);
  const auto prof = GridField::sample(s, [&](std::span<const double> x) {
    return cplx(amplitude * std::exp(-(x[0] * x[0] + 2.0 * x[1] * x[1]) / 0.18));
  });
  return oscillation_sequence(prof, std::move(omega0), {4, 6, 8, 10});
}
}  // namespace

TEST_CASE("seminorms grow with the order and the cap") {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> r(-1.0, 3.0), d(0.05, 1.0);
  for (int t = 0; t < kTrials; ++t) {
    const auto u = random_field(plane(), rng());
    const auto cap = random_cap(rng, 0.2, 1.0);
    const auto wider = DirectionCap::make(cap.omega, cap.half_angle + 0.4);
    const double r0 = r(rng), dr = d(rng);
    const double a = cone_seminorm(u, r0, window(), cap, 1.0);
    CHECK(a <= cone_seminorm(u, r0 + dr, window(), cap, 1.0) * (1.0 + 1e-12));
    CHECK(a <= cone_seminorm(u, r0, window(), wider, 1.0) * (1.0 + 1e-12));
  }
}

TEST_CASE("seminorms add over a cap and its complement") {
  std::mt19937_64 rng(202);
  for (int t = 0; t < kTrials; ++t) {
    const auto u = random_field(plane(), rng());
    const auto cap = random_cap(rng);
    const auto in = freq_mask(plane(), cap, 0.0);
    std::vector<unsigned char> out(in.size()), all(in.size(), 1);
    for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[i] ? 0 : 1;
    const double r = 1.3;
    const double a = masked_seminorm(u, r, window(), in), b = masked_seminorm(u, r, window(), out);
    const double c = masked_seminorm(u, r, window(), all);
    CHECK(a * a + b * b == doctest::Approx(c * c).epsilon(1e-12));
  }
}

TEST_CASE("seminorms are homogeneous and subadditive") {
  std::mt19937_64 rng(303);
  std::normal_distribution<double> g;
  for (int t = 0; t < kTrials; ++t) {
    const auto u = random_field(plane(), rng()), v = random_field(plane(), rng());
    const auto cap = random_cap(rng);
    const cplx c(g(rng), g(rng));
    const double su = cone_seminorm(u, 0.8, window(), cap, 1.0);
    const double sv = cone_seminorm(v, 0.8, window(), cap, 1.0);
    CHECK(cone_seminorm(c * u, 0.8, window(), cap, 1.0) == doctest::Approx(std::abs(c) * su).epsilon(1e-12));
    CHECK(cone_seminorm(u + v, 0.8, window(), cap, 1.0) <= (su + sv) * (1.0 + 1e-12));
  }
}

TEST_CASE("modulation by a lattice frequency preserves the localized L2 norm") {
  std::mt19937_64 rng(404);
  std::uniform_int_distribution<int> k(-12, 12);
  const auto s = plane();
  const auto full = DirectionCap::make({1.0, 0.0}, kPi);
  const double step = 2.0 * kPi / s.extent;
  for (int t = 0; t < kTrials; ++t) {
    const auto u = random_field(s, rng());
    const double xi0[2] = {k(rng) * step, k(rng) * step};
    const double a = cone_seminorm(u, 0.0, window(), full, 0.0);
    CHECK(cone_seminorm(modulate(u, xi0), 0.0, window(), full, 0.0) == doctest::Approx(a).epsilon(1e-10));
  }
}

TEST_CASE("quantization is linear and exact on multipliers") {
  std::mt19937_64 rng(505);
  std::normal_distribution<double> g;
  const auto s = plane();
  const auto a = Symbol::separable(
      [](std::span<const double> x) { return cplx(std::exp(-0.1 * (x[0] * x[0] + x[1] * x[1]))); },
      Symbol::japanese_bracket(1.5));
  for (int t = 0; t < kTrials; ++t) {
    const auto u = random_field(s, rng()), v = random_field(s, rng());
    const cplx p(g(rng), g(rng)), q(g(rng), g(rng));
    const auto lhs = quantize(a, p * u + q * v);
    const auto rhs = p * quantize(a, u) + q * quantize(a, v);
    CHECK(max_diff(lhs, rhs) <= 1e-10 * l2_norm(lhs));
    const auto m = quantize(Symbol::japanese_bracket(2.0), u);
    const auto e = apply_multiplier(u, [](std::span<const double> xi) {
      return cplx(1.0 + xi[0] * xi[0] + xi[1] * xi[1]);
    });
    CHECK(max_diff(m, e) <= 1e-12 * l2_norm(e));
  }
}

TEST_CASE("bin quadratic forms are nonnegative") {
  std::mt19937_64 rng(606);
  const auto s = GridSpec::make(2, 64, 2.0 * kPi);
  const auto bins = DefectBins::make(2, -1.8, 1.8, 3, 0.2, 8);
  std::uniform_int_distribution<std::size_t> pick(0, bins.size() - 1);
  for (int t = 0; t < kTrials; ++t) {
    const auto v = random_field(s, rng());
    const auto k = pick(rng);
    const cplx q = quadratic_form(bin_symbol(bins, k, 1), v);
    CHECK(q.real() >= -1e-12 * std::pow(l2_norm(v), 2));
    CHECK(std::abs(q.imag()) <= 1e-10 * std::pow(l2_norm(v), 2));
  }
}

TEST_CASE("admissibility is monotone in the orders") {
  std::mt19937_64 rng(707);
  std::uniform_real_distribution<double> r(-3.0, 4.0), d(0.0, 2.0);
  std::uniform_int_distribution<int> n(1, 3), cls(0, 3);
  int admitted = 0;
  for (int t = 0; t < 400; ++t) {
    const auto kind = static_cast<MapClass>(cls(rng));
    const int dim = n(rng);
    const int k = kind == MapClass::constant_rank ? 1 + static_cast<int>(rng() % dim) : 0;
    const double r1 = r(rng), r2 = r(rng), delta = d(rng);
    if (admissible(kind, dim, r1, r2, k).verdict != Verdict::admissible) continue;
    ++admitted;
    CHECK(admissible(kind, dim, r1 - delta, r2, k).verdict == Verdict::admissible);
    CHECK(admissible(kind, dim, r1 + delta, r2 + delta, k).verdict == Verdict::admissible);
  }
  CHECK(admitted > 50);
}

TEST_CASE("kernel family is positive with exponential decay") {
  std::mt19937_64 rng(808);
  std::uniform_real_distribution<double> s(0.6, 4.0), y(3.0, 20.0);
  for (int t = 0; t < 50; ++t) {
    const int q = 1 + static_cast<int>(rng() % 3);
    const double sv = s(rng) + 0.5 * q, yv = y(rng);
    const double a = appendix_closed_form(q, sv, yv), b = appendix_closed_form(q, sv, yv + 1.0);
    CHECK(a > 0.0);
    CHECK(b <= std::exp(-0.5) * a);
  }
}

TEST_CASE("wfc tails: subsets and sums") {
  std::mt19937_64 rng(909);
  const auto s = plane();
  const auto limit = GridField::zeros(s);
  const auto lattice = regular_lattice(2, LatticeOptions{2.0, 2.0, 1.0, 2.0, 8, 0.42});
  const auto radii = default_radii(s);
  for (int t = 0; t < 3; ++t) {
    std::vector<GridField> a, b, sum;
    for (int i = 0; i < 6; ++i) {
      a.push_back(random_field(s, rng()));
      b.push_back(random_field(s, rng()));
      sum.push_back(a.back() + b.back());
    }
    const auto ra = wfc_scan(a, limit, 0.5, lattice, radii);
    const auto rb = wfc_scan(b, limit, 0.5, lattice, radii);
    const auto rs = wfc_scan(sum, limit, 0.5, lattice, radii);
    const auto rsub = wfc_scan({a[0], a[2], a[3], a[5]}, limit, 0.5, lattice, radii);
    for (std::size_t p = 0; p < ra.records.size(); ++p)
      for (std::size_t i = 0; i < radii.size(); ++i) {
        const double ta = ra.records[p].tail[i], tb = rb.records[p].tail[i];
        CHECK(rsub.records[p].tail[i] <= ta * (1.0 + 1e-12));
        CHECK(std::sqrt(rs.records[p].tail[i]) <= (std::sqrt(ta) + std::sqrt(tb)) * (1.0 + 1e-12));
      }
  }
}

// (u o R)(x) = u(Rx) is singular at (x, omega) exactly when u is at (Rx, R omega).
TEST_CASE("scan verdicts rotate with the field") {
  Eigen::MatrixXd R(2, 2);
  R << 0, -1, 1, 0;
  const auto u = fixtures::jump_field();
  const auto ru = pullback_field(SmoothMap::from_linear(LinearMap::linear(R)), u, u.spec());
  REQUIRE(ru.lattice_exact);
  const auto lattice = fixtures::jump_lattice();
  const auto a = wf_scan(u, 0.4, lattice), b = wf_scan(ru.field, 0.4, lattice);
  std::size_t matched = 0;
  for (const auto& rb : b.records) {
    const double x[2] = {-rb.x[1], rb.x[0]}, w[2] = {-rb.omega[1], rb.omega[0]};
    for (const auto& ra : a.records)
      if (std::hypot(ra.x[0] - x[0], ra.x[1] - x[1]) < 1e-9 &&
          std::hypot(ra.omega[0] - w[0], ra.omega[1] - w[1]) < 1e-9) {
        ++matched;
        CHECK(ra.singular == rb.singular);
        CHECK(ra.r_star == doctest::Approx(rb.r_star).epsilon(1e-6));
      }
  }
  CHECK(matched == a.records.size());
  CHECK(a.singular_count() > 0);
}

TEST_CASE("defect measures scale like |c|^2") {
  const auto bins = DefectBins::make(2, -1.8, 1.8, 3, 0.2, 8);
  const auto base = defect_estimate(oscillation(1.0, {1, 1}), bins, 2);
  for (double c : {0.25, 3.0}) {
    const auto scaled = defect_estimate(oscillation(c, {1, 1}), bins, 2);
    for (std::size_t k = 0; k < base.values.size(); ++k)
      CHECK(std::abs(scaled.values[k].value - c * c * base.values[k].value) <= 1e-10 * c * c * base.total);
    CHECK(scaled.positivity_residual() <= 1e-12 * scaled.total);
  }
}

TEST_CASE("sector refinement splits bins additively") {
  const auto coarse = DefectBins::make(2, -1.8, 1.8, 3, 0.2, 8);
  const auto fine = DefectBins::make(2, -1.8, 1.8, 3, 0.2, 16, kPi / 16.0);
  for (const auto& omega0 : std::vector<std::vector<int>>{{1, 0}, {1, 1}, {-1, 1}, {0, -1}}) {
    const auto seq = oscillation(1.0, omega0);
    const auto a = defect_estimate(seq, coarse, 2), b = defect_estimate(seq, fine, 2);
    std::vector<cplx> merged(a.values.size(), 0.0);
    for (std::size_t k = 0; k < b.values.size(); ++k) {
      const int sector = ((fine.sector_of(k) + 1) / 2) % 8;
      merged[fine.cell_of(k) * 8 + sector] += b.values[k].value;
    }
    for (std::size_t k = 0; k < merged.size(); ++k)
      CHECK(std::abs(merged[k] - a.values[k].value) <= 1e-10 * a.total);
  }
}
