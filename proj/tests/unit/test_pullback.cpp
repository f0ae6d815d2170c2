#include <doctest.h>

#include <cmath>
#include <numbers>

#include "microlocal/appendix.hpp"
#include "microlocal/error.hpp"
#include "microlocal/fixtures.hpp"
#include "microlocal/pullback.hpp"
#include "support.hpp"

using namespace microlocal;
using testing_support::max_diff;

namespace {
constexpr double kPi = std::numbers::pi;

GridField gaussian2(const GridSpec& s) {
  return GridField::sample(s, [](std::span<const double> y) {
    return cplx(std::exp(-(y[0] * y[0] + 2.0 * y[1] * y[1])));
  });
}
}  // namespace

TEST_CASE("admissibility examples") {
  CHECK(admissible(MapClass::general, 2, 0.4, 1.5).verdict == Verdict::admissible);
  CHECK(admissible(MapClass::constant_rank, 2, 0.0, 0.4, 1).verdict == Verdict::not_admissible);
  CHECK(admissible(MapClass::submersion, 2, 0.0, 0.0).verdict == Verdict::admissible);
  for (double r : {-2.0, 0.0, 3.5}) {
    const auto row = admissible(MapClass::diffeo, 3, r, r);
    CHECK(row.verdict == Verdict::admissible);
    CHECK(row.isomorphism);
  }
  CHECK(admissible(MapClass::constant_rank, 3, 0.0, 1.0, 1).verdict == Verdict::open_in_paper);
  CHECK_THROWS_AS(admissible(MapClass::constant_rank, 2, 0.0, 1.0, 0), Error);
  CHECK_THROWS_AS(admissible(MapClass::constant_rank, 2, 0.0, 1.0, 3), Error);
  CHECK(std::string(to_string(Verdict::open_in_paper)) == "open_in_paper");
  CHECK(parse_map_class("constant_rank") == MapClass::constant_rank);
  CHECK_THROWS_AS(parse_map_class("smooth"), Error);
}

TEST_CASE("declared rank must match the matrix") {
  Eigen::MatrixXd A(2, 2);
  A << 1, 2, 2, 4;
  CHECK_NOTHROW(SmoothMap::from_linear(LinearMap::linear(A), 1));
  CHECK_THROWS_AS(SmoothMap::from_linear(LinearMap::linear(A), 2), Error);
}

TEST_CASE("pullback by identity and rotation") {
  const auto s = GridSpec::make(2, 128, 12.0);
  const auto u = gaussian2(s);
  const auto id = pullback_field(SmoothMap::from_linear(LinearMap::linear(Eigen::MatrixXd::Identity(2, 2))), u, s);
  CHECK(max_diff(id.field, u) <= 1e-10);

  Eigen::MatrixXd R(2, 2);
  R << 0, -1, 1, 0;
  const auto rot = pullback_field(SmoothMap::from_linear(LinearMap::linear(R)), u, s);
  CHECK(rot.lattice_exact);
  // (u o R)(x1, x2) = u(-x2, x1): exact sample permutation
  std::size_t bad = 0;
  for (int i = 1; i < 128; ++i)
    for (int j = 1; j < 128; ++j) {
      const int dst[2] = {i, j}, src[2] = {128 - j, i};
      if (rot.field.at(0, s.flat_index(dst)) != u.at(0, s.flat_index(src))) ++bad;
    }
  CHECK(bad == 0);
}

TEST_CASE("restriction of a gaussian to a line") {
  const auto s = GridSpec::make(2, 128, 12.0);
  const auto line = GridSpec::make(1, 128, 12.0);
  Eigen::MatrixXd A(2, 1);
  A << 1, 0;
  const auto r = pullback_field(SmoothMap::from_linear(LinearMap::linear(A)), gaussian2(s), line);
  double worst = 0.0;
  for (int k = 0; k < line.samples; ++k) {
    const double x = line.position(k);
    worst = std::max(worst, std::abs(r.field.at(0, k) - std::exp(-x * x)));
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("interpolated pullback matches the closed form") {
  const auto s = GridSpec::make(2, 64, 12.0);
  Eigen::MatrixXd A(2, 2);
  A << 0.8, 0.3, -0.2, 0.9;
  const auto r = pullback_field(SmoothMap::from_linear(LinearMap::linear(A)), gaussian2(s), s);
  CHECK_FALSE(r.lattice_exact);
  double worst = 0.0, x[2];
  for (std::size_t i = 0; i < s.size(); ++i) {
    s.point(i, x);
    const double y0 = 0.8 * x[0] + 0.3 * x[1], y1 = -0.2 * x[0] + 0.9 * x[1];
    if (std::abs(y0) > 5.0 || std::abs(y1) > 5.0) continue;
    worst = std::max(worst, std::abs(r.field.at(0, i) - std::exp(-(y0 * y0 + 2.0 * y1 * y1))));
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("continuity proxy warns on rough fields") {
  Eigen::MatrixXd A(2, 2);
  A << 0, -1, 1, 0;
  const auto jump = fixtures::jump_field(GridSpec::make(2, 256, 8.0 * kPi));
  const auto r = pullback_field(SmoothMap::from_linear(LinearMap::linear(A)), jump, jump.spec());
  CHECK(r.continuity_warning);
  CHECK_FALSE(r.warning.empty());
}

TEST_CASE("kernel family") {
  const double c0 = appendix_prefactor(2, 3.0) * std::tgamma(0.5);
  CHECK(appendix_value(2, 3.0, 0.0) == doctest::Approx(c0).epsilon(1e-8));
  CHECK(c0 == doctest::Approx(std::tgamma(0.5) / (std::tgamma(1.5) * 4.0 * kPi)));
  CHECK_THROWS_AS(appendix_value(1, 1.0, 0.0), Error);
  for (double y : {0.1, 0.7, 2.0, 6.0})
    CHECK(appendix_value(1, 2.0, y) == doctest::Approx(appendix_closed_form(1, 2.0, y)).epsilon(1e-8));
  // grid independence: doubling L and N
  const auto a = appendix_family(1, 2.0, GridSpec::make(1, 512, 20.0));
  const auto b = appendix_family(1, 2.0, GridSpec::make(1, 1024, 40.0));
  double worst = 0.0;
  for (int k = 1; k < 512; ++k) worst = std::max(worst, std::abs(a.at(0, k) - b.at(0, k + 256)));
  CHECK(worst <= 1e-4);
}

TEST_CASE("restriction constants") {
  CHECK(restriction_constant(2, 1, 2.0) == doctest::Approx(1.0 / kPi).epsilon(1e-14));
  CHECK(restriction_constant(2, 1, 3.0) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(restriction_constant(3, 3, 1.7) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("a continuous family converges under mollification") {
  DivergenceOptions o;
  o.s = 3.0;
  o.psi_radius = 1.0;
  const auto v = divergence_experiment(2, 1, {4, 8, 16, 32, 64}, o);
  CHECK(std::abs(v[4] - v[3]) <= 1e-3);
  for (double x : v) CHECK(std::isfinite(x));
}
