#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "microlocal/compcomp.hpp"
#include "microlocal/error.hpp"
#include "support.hpp"

using namespace microlocal;

namespace {
constexpr double kPi = std::numbers::pi;

ConstraintSymbol curl(double c = 1.0) {
  return ConstraintSymbol::make(
      Symbol::polyhomogeneous(1.0, 1, 2,
                              [c](std::span<const double> w, std::span<cplx> out) {
                                out[0] = cplx(0.0, -c * w[1]);
                                out[1] = cplx(0.0, c * w[0]);
                              }),
      2);
}

QuadSymbol omega_dyad() {
  return QuadSymbol::make(
      2, 2,
      [](std::span<const double>, std::span<const double> w, std::span<cplx> out) {
        out[0] = w[0] * w[0];
        out[1] = w[0] * w[1];
        out[2] = w[1] * w[0];
        out[3] = w[1] * w[1];
      },
      true);
}

QuadSymbol tangential() {
  return QuadSymbol::make(
      2, 2,
      [](std::span<const double>, std::span<const double> w, std::span<cplx> out) {
        out[0] = 1.0 - w[0] * w[0];
        out[1] = -w[0] * w[1];
        out[2] = -w[1] * w[0];
        out[3] = 1.0 - w[1] * w[1];
      },
      true);
}

struct Samples {
  std::vector<double> points = {0.0, 0.0, 0.4, -0.3};
  std::vector<double> dirs;
  Samples() {
    for (int i = 0; i < 16; ++i) {
      dirs.push_back(std::cos(0.3 + i * kPi / 8.0));
      dirs.push_back(std::sin(0.3 + i * kPi / 8.0));
    }
  }
};
}  // namespace

TEST_CASE("kernel condition examples") {
  const Samples s;
  const auto pass = kernel_condition(curl(), tangential(), s.points, s.dirs, ConditionMode::zero, 7);
  CHECK(pass.pass);
  CHECK(pass.worst_residual <= 1e-12);
  CHECK(pass.kernel_samples == pass.samples);
  const auto fail = kernel_condition(curl(), omega_dyad(), s.points, s.dirs, ConditionMode::zero, 7);
  CHECK_FALSE(fail.pass);
  CHECK(fail.worst_residual == doctest::Approx(1.0));
  const auto elliptic = ConstraintSymbol::make(
      Symbol::polyhomogeneous(0.0, 2, 2,
                              [](std::span<const double>, std::span<cplx> out) {
                                out[0] = 1.0;
                                out[1] = 0.0;
                                out[2] = 0.0;
                                out[3] = 1.0;
                              }),
      2);
  const auto vac = kernel_condition(elliptic, omega_dyad(), s.points, s.dirs, ConditionMode::zero, 7);
  CHECK(vac.pass);
  CHECK(vac.kernel_samples == 0);
  const auto nonneg = kernel_condition(curl(), omega_dyad(), s.points, s.dirs, ConditionMode::nonneg, 7);
  CHECK(nonneg.pass);
}

TEST_CASE("kernel condition is invariant under scaling the constraint") {
  const Samples s;
  for (double c : {-3.0, 0.01, 250.0}) {
    const auto a = kernel_condition(curl(), omega_dyad(), s.points, s.dirs, ConditionMode::zero, 3);
    const auto b = kernel_condition(curl(c), omega_dyad(), s.points, s.dirs, ConditionMode::zero, 3);
    CHECK(a.pass == b.pass);
    CHECK(a.kernel_samples == b.kernel_samples);
    CHECK(a.worst_residual == doctest::Approx(b.worst_residual).epsilon(1e-10));
  }
}

TEST_CASE("symbol validation") {
  CHECK_THROWS_AS(ConstraintSymbol::make(
                      Symbol::general(1.0, 1, 2,
                                      [](std::span<const double>, std::span<const double> xi,
                                         std::span<cplx> out) {
                                        out[0] = xi[0] * xi[0];
                                        out[1] = xi[1];
                                      }),
                      2),
                  Error);
  CHECK_THROWS_AS(QuadSymbol::constant(2, {1.0, cplx(0.0, 1.0), cplx(0.0, 1.0), 1.0}, true), Error);
  CHECK_NOTHROW(QuadSymbol::constant(2, {1.0, cplx(0.0, 1.0), cplx(0.0, -1.0), 1.0}, true));
  CHECK(parse_condition_mode("nonneg") == ConditionMode::nonneg);
  CHECK_THROWS_AS(parse_condition_mode("positive"), Error);
}

TEST_CASE("quadratic densities") {
  const auto s = GridSpec::make(2, 128, 2.0 * kPi);
  const auto chi = BumpCutoff::make({0.0, 0.0}, 1.0, 2.0);
  const auto u = testing_support::random_field(s, 6, 2);
  const auto zero = QuadSymbol::constant(2, {0.0, 0.0, 0.0, 0.0}, true);
  CHECK(quadratic_density(zero, u, chi) == cplx(0.0));
  const auto id = QuadSymbol::constant(2, {1.0, 0.0, 0.0, 1.0}, true);
  const cplx d = quadratic_density(id, u, chi);
  CHECK(d.real() > 0.0);
  CHECK(std::abs(d.imag()) <= 1e-12 * d.real());
  const cplx c(0.6, -1.7);
  const cplx scaled = quadratic_density(tangential(), c * u, chi);
  const cplx base = quadratic_density(tangential(), u, chi);
  CHECK(std::abs(scaled - std::norm(c) * base) <= 1e-12 * std::abs(scaled));
  CHECK_THROWS_AS(quadratic_density(id, testing_support::random_field(s, 6, 1), chi), Error);
}

// Leakage comes from the spectral spread of the envelope and falls like 1/m^2.
TEST_CASE("tangential projector removes a longitudinal plane wave") {
  const auto s = GridSpec::make(2, 256, 2.0 * kPi);
  const auto beta = BumpCutoff::make({0.0, 0.0}, 0.5, 1.5);
  const auto chi = BumpCutoff::make({0.0, 0.0}, 2.0, 2.9);
  auto leak = [&](int m) {
    const auto u = GridField::sample_channels(s, 2, [&](std::span<const double> x, std::span<cplx> out) {
      out[0] = std::exp(cplx(0.0, m * x[0])) * beta.value(x);
      out[1] = 0.0;
    });
    return std::abs(quadratic_density(tangential(), u, chi)) / std::pow(l2_norm(u), 2);
  };
  const double a = leak(24), b = leak(48);
  CHECK(b <= 1e-3);
  CHECK(b <= 0.35 * a);
}

TEST_CASE("div-curl preset fields") {
  const auto p = div_curl_preset({8, 16, 32, 64});
  double lo = 1e300, hi = 0.0;
  for (const auto& u : p.sequence.members) {
    const auto c = spectral_derivative(u.channel_field(1), 0) - spectral_derivative(u.channel_field(0), 1);
    CHECK(l2_norm(c) <= 1e-8 * l2_norm(u));
    lo = std::min(lo, l2_norm(u));
    hi = std::max(hi, l2_norm(u));
  }
  CHECK(hi <= 1.1 * lo);
}

TEST_CASE("constant sequences have zero gap") {
  const auto p = div_curl_preset({8, 16, 32, 64});
  const auto& u = p.sequence.members.front();
  const auto seq = explicit_sequence({u, u, u, u}, u);
  const auto rep = compcomp_run(seq, p.a, p.b, p.chi, 1.0);
  CHECK(rep.gap <= 1e-10);
}

TEST_CASE("reports are reproducible bit for bit") {
  const auto p = div_curl_preset({8, 16, 32, 64}, false);
  std::ostringstream a, b;
  write_compcomp_csv(a, compcomp_run(p.sequence, p.a, p.b, p.chi, 1.0));
  write_compcomp_csv(b, compcomp_run(p.sequence, p.a, p.b, p.chi, 1.0));
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind("n,density_re,density_im,gap\n", 0) == 0);
}
