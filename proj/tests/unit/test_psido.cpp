#include <doctest.h>

#include <cmath>
#include <numbers>

#include "microlocal/error.hpp"
#include "microlocal/fixtures.hpp"
#include "microlocal/psido.hpp"
#include "support.hpp"

using namespace microlocal;
using testing_support::max_diff;
using testing_support::random_field;

namespace {
constexpr double kPi = std::numbers::pi;

cplx gauss_psi(std::span<const double> x) { return cplx(std::exp(-0.5 * (x[0] * x[0] + x[1] * x[1]))); }

Symbol m_xi() {
  return Symbol::multiplier(
      1.0, [](std::span<const double> xi) { return cplx(std::sqrt(1.0 + xi[0] * xi[0] + xi[1] * xi[1])); },
      [](std::span<const double> w) { return cplx(std::hypot(w[0], w[1])); });
}
}  // namespace

TEST_CASE("identity, spatial and separable symbols") {
  const auto s = GridSpec::make(2, 64, 8.0);
  const auto u = random_field(s, 1);
  CHECK(max_diff(quantize(Symbol::identity(), u), u) <= 1e-12 * u.max_abs());

  const auto psi = sample_weight(s, [](std::span<const double> x) { return gauss_psi(x).real(); });
  const auto pu = multiply(u, std::span<const double>(psi));
  CHECK(max_diff(quantize(Symbol::spatial(gauss_psi), u), pu) <= 1e-14 * u.max_abs());

  const auto m = m_xi();
  const auto mu = quantize(m, u);
  const auto expected = multiply(mu, std::span<const double>(psi));
  CHECK(max_diff(quantize(Symbol::separable(gauss_psi, m), u), expected) <= 1e-12 * mu.max_abs());
}

TEST_CASE("general path matches the fast path and respects its budget") {
  const auto s = GridSpec::make(1, 64, 8.0);
  const auto u = random_field(s, 2);
  const auto g = Symbol::general(
      1.0, 1, 1, [](std::span<const double> x, std::span<const double> xi, std::span<cplx> out) {
        out[0] = std::exp(-x[0] * x[0]) * std::sqrt(1.0 + xi[0] * xi[0]);
      });
  const auto sep = Symbol::separable(
      [](std::span<const double> x) { return cplx(std::exp(-x[0] * x[0])); },
      Symbol::japanese_bracket(1.0));
  const auto a = quantize(g, u);
  CHECK(max_diff(a, quantize(sep, u)) <= 1e-10 * a.max_abs());
  CHECK_THROWS_AS(quantize(g, random_field(GridSpec::make(2, 128, 8.0), 3)), Error);
}

TEST_CASE("channel mismatch is rejected") {
  const auto s = GridSpec::make(1, 32, 4.0);
  CHECK_THROWS_AS(quantize(Symbol::identity(2), random_field(s, 1)), Error);
}

TEST_CASE("principal composition and adjoints") {
  auto a = Symbol::polyhomogeneous(1.0, 2, 2, [](std::span<const double> w, std::span<cplx> out) {
    out[0] = w[0];
    out[1] = cplx(0.0, w[1]);
    out[2] = 2.0;
    out[3] = cplx(w[0], w[1]);
  });
  auto b = Symbol::polyhomogeneous(-1.0, 2, 2, [](std::span<const double> w, std::span<cplx> out) {
    out[0] = 1.0;
    out[1] = w[1];
    out[2] = cplx(0.0, -w[0]);
    out[3] = 3.0;
  });
  const auto ab = principal_compose(a, b);
  CHECK(ab.order() == 0.0);
  const double x[2] = {0.1, 0.2};
  const double w[2] = {0.6, 0.8};
  const auto A = a.principal(x, w), B = b.principal(x, w), C = ab.principal(x, w);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const cplx e = A[i * 2] * B[j] + A[i * 2 + 1] * B[2 + j];
      CHECK(std::abs(C[i * 2 + j] - e) <= 1e-12);
    }
  const auto id = principal_compose(a, Symbol::identity(2));
  const auto I = id.principal(x, w);
  for (int i = 0; i < 4; ++i) CHECK(std::abs(I[i] - A[i]) <= 1e-12);
  const auto adj = adjoint_symbol(a).principal(x, w);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK(std::abs(adj[i * 2 + j] - std::conj(A[j * 2 + i])) <= 1e-12);
  const auto real = Symbol::japanese_bracket(2.0);
  CHECK(adjoint_symbol(real).principal(x, w)[0] == real.principal(x, w)[0]);
  CHECK_THROWS_AS(principal_compose(a, Symbol::identity(3)), Error);
}

TEST_CASE("smoothing: constants are reproduced inside the window") {
  const auto s = GridSpec::make(1, 512, 20.0);
  const auto one = GridField::sample(s, [](std::span<const double>) { return cplx(1.0); });
  const auto p = smoothing_apply(SmoothingSpec::standard(64, 1, 8.0), one);
  double worst = 0.0;
  for (int k = 0; k < s.samples; ++k)
    if (std::abs(s.position(k)) <= 3.0) worst = std::max(worst, std::abs(p.at(0, k) - 1.0));
  CHECK(worst <= 1e-8);
}

TEST_CASE("smoothing error decreases in j") {
  const auto s = GridSpec::make(1, 512, 20.0);
  const auto u = GridField::sample(s, [](std::span<const double> x) { return cplx(std::exp(-x[0] * x[0])); });
  double prev = 1e300;
  for (int j : {4, 8, 16, 32, 64}) {
    const auto p = smoothing_apply(SmoothingSpec::standard(j, 1, 8.0), u);
    double err = 0.0;
    for (int k = 0; k < s.samples; ++k)
      if (std::abs(s.position(k)) <= 4.0) err = std::max(err, std::abs(p.at(0, k) - u.at(0, k)));
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev <= 1e-3);
}

TEST_CASE("mollifier is normalized") {
  // F chi(0) = int chi = 1
  for (int dim = 1; dim <= 3; ++dim) CHECK(std::pow(mollifier_axis_transform(0.0, dim), dim) == doctest::Approx(1.0));
  CHECK(mollifier_profile(1.0, 1) == 0.0);
}

TEST_CASE("order zero shift is zero") {
  const auto sh = order_shift_probe(Symbol::japanese_bracket(0.0), fixtures::jump_field(),
                                    fixtures::wide_window(2), DirectionCap::make({1.0, 0.0}, 0.42));
  CHECK(std::abs(sh.shift()) <= 1e-12);
}
