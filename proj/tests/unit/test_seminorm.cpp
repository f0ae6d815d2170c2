#include <doctest.h>

#include <cmath>
#include <numbers>

#include "microlocal/appendix.hpp"
#include "microlocal/error.hpp"
#include "microlocal/fixtures.hpp"
#include "microlocal/seminorm.hpp"
#include "support.hpp"

using namespace microlocal;
using testing_support::random_field;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("cutoffs") {
  const auto b = BumpCutoff::make({0.0, 0.0}, 1.0, 2.0);
  const double in[2] = {0.5, 0.5}, out[2] = {2.0, 0.1}, mid[2] = {1.5, 0.0};
  CHECK(b.value(in) == 1.0);
  CHECK(b.value(out) == 0.0);
  CHECK(b.value(mid) > 0.0);
  CHECK(b.value(mid) < 1.0);
  CHECK(smooth_step(0.0) == 1.0);
  CHECK(smooth_step(1.0) == 0.0);
  CHECK_THROWS_AS(BumpCutoff::make({0.0}, 2.0, 1.0), Error);
}

TEST_CASE("zero field has zero seminorms") {
  const auto s = GridSpec::make(2, 64, 10.0);
  const auto z = GridField::zeros(s);
  const auto phi = BumpCutoff::make({0.0, 0.0}, 1.0, 2.0);
  const auto cap = DirectionCap::make({1.0, 0.0}, 0.5);
  CHECK(cone_seminorm(z, 1.0, phi, cap, 1.0) == 0.0);
  CHECK(sup_seminorm(z, 2.0, phi, cap) == 0.0);
}

TEST_CASE("full cone equals the localized L2 norm") {
  const auto s = GridSpec::make(2, 128, 10.0);
  const auto u = random_field(s, 2);
  const auto phi = BumpCutoff::make({0.3, 0.0}, 1.0, 2.5);
  const auto w = sample_cutoff(s, phi);
  const double ref = sobolev_norm(multiply(u, std::span<const double>(w)), 0.0);
  CHECK(cone_seminorm(u, 0.0, phi, DirectionCap::make({1.0, 0.0}, kPi), 0.0) ==
        doctest::Approx(ref).epsilon(1e-10));
}

TEST_CASE("seminorm against a refined reference") {
  const auto coarse = GridSpec::make(1, 512, 40.0);
  const auto fine = GridSpec::make(1, 2048, 40.0);
  const auto phi = BumpCutoff::make({0.0}, 5.0, 10.0);
  const auto cap = DirectionCap::make({1.0}, kPi);
  const double a = cone_seminorm(bracket_inverse(3.0, coarse), 1.0, phi, cap, 0.0);
  const double b = cone_seminorm(bracket_inverse(3.0, fine), 1.0, phi, cap, 0.0);
  CHECK(std::abs(a - b) <= 0.01 * b);
}

TEST_CASE("critical order formula") {
  CHECK(critical_order_from_slope(-1.0) == 0.5);
  CHECK(critical_order_from_slope(-4.0) == 2.0);
  CHECK(critical_order_from_slope(-40.0) == 8.0);
  CHECK(critical_order_from_slope(40.0) == -8.0);
}

TEST_CASE("fit on synthetic energies recovers the slope") {
  std::vector<int> j;
  std::vector<double> e;
  for (int k = 0; k <= 9; ++k) {
    j.push_back(k);
    e.push_back(std::ldexp(1.0, -3 * k));
  }
  const auto p = fit_profile(j, e, 9);
  CHECK(p.window_min == 2);
  CHECK(p.window_max == 8);
  CHECK(p.fit_slope == doctest::Approx(-3.0));
  CHECK(p.r_star == doctest::Approx(1.5));
  CHECK(p.residual <= 1e-12);
  CHECK_FALSE(p.in_window[9]);
  CHECK_THROWS_AS(fit_profile({0, 1, 2, 3}, {1, 1, 1, 1}, 3), Error);
}

TEST_CASE("energies under the noise floor end the fit window") {
  std::vector<int> j;
  std::vector<double> e;
  for (int k = 0; k <= 9; ++k) {
    j.push_back(k);
    e.push_back(k < 4 ? 1.0 : 1e-40);
  }
  const auto p = fit_profile(j, e, 9, ProfileOptions{}, 1.0);
  CHECK(p.below_noise);
  CHECK(p.r_star == 8.0);
}

TEST_CASE("shell profile orders") {
  const auto full = DirectionCap::make({1.0}, kPi);
  const auto p = shell_profile(bracket_inverse(2.5, fixtures::line_grid()), fixtures::wide_window(1), full);
  CHECK(p.fit_slope == doctest::Approx(-4.0).epsilon(0.075));
  CHECK(std::abs(p.r_star - 2.0) <= 0.15);

  const auto bump = GridField::sample(fixtures::line_grid(), [](std::span<const double> x) {
    return cplx(std::exp(-x[0] * x[0]));
  });
  const auto q = shell_profile(bump, fixtures::wide_window(1), full);
  // resolved octaves only see finite decay; well past any order tested
  CHECK(q.r_star >= 5.0);

  const auto tiny = GridSpec::make(1, 32, 4.0);
  CHECK_THROWS_AS(shell_profile(GridField::zeros(tiny), BumpCutoff::make({0.0}, 0.5, 1.0), full), Error);
}

TEST_CASE("sup seminorm is stable under refinement for smooth data") {
  const auto phi = BumpCutoff::make({0.0}, 2.0, 4.0);
  const auto cap = DirectionCap::make({1.0}, kPi);
  auto gauss = [](std::span<const double> x) { return cplx(std::exp(-x[0] * x[0])); };
  const double a = sup_seminorm(GridField::sample(GridSpec::make(1, 256, 20.0), gauss), 4.0, phi, cap);
  const double b = sup_seminorm(GridField::sample(GridSpec::make(1, 512, 20.0), gauss), 4.0, phi, cap);
  CHECK(std::abs(a - b) <= 0.05 * b);
}
