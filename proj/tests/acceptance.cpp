// One PASS/FAIL line per acceptance criterion. Runtime budgets are part of
// each verdict. Exit status is the number of failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "microlocal/appendix.hpp"
#include "microlocal/compcomp.hpp"
#include "microlocal/defect.hpp"
#include "microlocal/fixtures.hpp"
#include "microlocal/psido.hpp"
#include "microlocal/pullback.hpp"
#include "microlocal/selftest.hpp"
#include "microlocal/wavefront.hpp"

using namespace microlocal;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double angle_to(std::span<const double> w, std::span<const double> v) {
  double d = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) d += w[i] * v[i];
  return std::acos(std::clamp(d, -1.0, 1.0));
}

bool is_origin(const std::vector<double>& x) {
  return std::all_of(x.begin(), x.end(), [](double v) { return std::abs(v) < 1e-9; });
}

Outcome appendix_dual_route_check() {
  const auto rows = appendix_dual_route(1, 2.0, GridSpec::make(1, 1024, 40.0), 0.5, 5.0);
  double worst = 0.0;
  for (const auto& r : rows) worst = std::max(worst, r.rel_err);
  return {!rows.empty() && worst <= 1e-3, fmt("max rel err %.3e over %zu points", worst, rows.size())};
}

Outcome restriction_check() {
  bool ok = true;
  std::string detail;
  for (auto [r2p, c0] : {std::pair{2.0, 1.0 / kPi}, std::pair{3.0, 0.25}}) {
    const auto rep = restriction_identity_check(2, 1, r2p, 1024, 20.0, 0.25, 3.0);
    const bool c_ok = std::abs(rep.c0 - c0) <= 1e-12 * c0;
    ok = ok && c_ok && !rep.rows.empty() && rep.max_rel_err <= 2e-2;
    detail += fmt("r2'=%g c0=%.6f rel err %.2e; ", r2p, rep.c0, rep.max_rel_err);
  }
  return {ok, detail};
}

Outcome divergence_check() {
  const auto v = divergence_experiment(2, 1, {4, 8, 16, 32, 64});
  bool inc = true;
  for (std::size_t i = 1; i < v.size(); ++i) inc = inc && v[i] > v[i - 1];
  const double ratio = v.back() / v.front();
  return {inc && ratio >= 3.0, fmt("values %.4f .. %.4f, ratio %.3f, increasing %s", v.front(),
                                   v.back(), ratio, inc ? "yes" : "no")};
}

Outcome critical_order_check() {
  bool ok = true;
  std::string detail;
  const auto full = DirectionCap::make({1.0}, kPi);
  for (double s : {1.5, 2.5}) {
    const auto p = shell_profile(bracket_inverse(s, fixtures::line_grid()), fixtures::wide_window(1), full);
    ok = ok && std::abs(p.r_star - (s - 0.5)) <= 0.15;
    detail += fmt("s=%g r*=%.4f; ", s, p.r_star);
  }
  const auto p = shell_profile(fixtures::jump_field(), fixtures::wide_window(2),
                               DirectionCap::make({1.0, 0.0}, 0.42));
  ok = ok && std::abs(p.r_star - 0.5) <= 0.15;
  detail += fmt("jump r*=%.4f", p.r_star);
  return {ok, detail};
}

Outcome wf_detection_check() {
  const auto lattice = fixtures::jump_lattice();
  const auto rep = wf_scan(fixtures::jump_field(), 0.4, lattice);
  const double tol = 15.0 * kPi / 180.0;
  const double e1[2] = {1.0, 0.0}, m1[2] = {-1.0, 0.0};
  std::size_t wrong = 0, missed = 0, expected = 0;
  double min_smooth = 1e300;
  for (const auto& r : rep.records) {
    const bool on_line = std::abs(r.x[0]) < 1e-9;
    const bool transversal = std::min(angle_to(r.omega, e1), angle_to(r.omega, m1)) <= tol;
    if (on_line && transversal) {
      ++expected;
      if (!r.singular) ++missed;
    } else if (r.singular) {
      ++wrong;
    }
    if (!r.singular) min_smooth = std::min(min_smooth, r.r_star);
  }
  const auto ctrl = wf_scan(fixtures::smooth_control(), 0.4, lattice);
  const bool ok = expected > 0 && wrong == 0 && missed == 0 && min_smooth >= 2.0 &&
                  ctrl.singular_count() == 0;
  return {ok, fmt("%zu expected, %zu missed, %zu spurious; min smooth r*=%.3f; control singular %zu",
                  expected, missed, wrong, min_smooth, ctrl.singular_count())};
}

Outcome wfc_check() {
  const auto seq = fixtures::oscillation_fixture({8, 16, 32, 64});
  const auto lattice = fixtures::oscillation_lattice();
  const auto radii = default_radii(seq.spec());
  const auto rep = wfc_scan(seq.members, seq.limit, 0.0, lattice, radii);
  const double e1[2] = {1.0, 0.0};
  std::size_t noncompact = 0, wrong = 0;
  double worst_compact = 0.0, min_nc = 1e300;
  for (const auto& r : rep.records) {
    // supp b is the disc of radius 0.35 at the origin: only the central window meets it.
    const bool target = is_origin(r.x) && angle_to(r.omega, e1) < 1e-9;
    if (target) {
      if (r.verdict != TailVerdict::noncompact || r.rho < 0.8) ++wrong;
      else ++noncompact;
      min_nc = std::min(min_nc, r.rho);
    } else {
      if (r.verdict != TailVerdict::compact || (!r.negligible && r.rho > 0.1)) ++wrong;
      if (!r.negligible) worst_compact = std::max(worst_compact, r.rho);
    }
  }
  const GridField b = fixtures::oscillation_profile();
  const std::vector<GridField> constant(4, b);
  const auto flat = wfc_scan(constant, b, 0.0, lattice, radii);
  const bool ok = noncompact > 0 && wrong == 0 && flat.count(TailVerdict::compact) == flat.records.size();
  return {ok, fmt("noncompact %zu (rho %.3f), misclassified %zu, max non-negligible compact rho %.3e; constant "
                  "sequence compact %zu/%zu",
                  noncompact, min_nc, wrong, worst_compact, flat.count(TailVerdict::compact),
                  flat.records.size())};
}

Outcome order_shift_check() {
  const auto u = fixtures::jump_field();
  const auto window = fixtures::wide_window(2);
  const auto cap = DirectionCap::make({1.0, 0.0}, 0.42);
  bool ok = true;
  std::string detail;
  for (double p : {-1.0, -2.0}) {
    const auto sh = order_shift_probe(Symbol::japanese_bracket(p), u, window, cap);
    ok = ok && std::abs(sh.shift() - (-p)) <= 0.2;
    detail += fmt("<xi>^%g shift %.4f; ", p, sh.shift());
  }
  return {ok, detail};
}

Outcome smoothing_check() {
  const auto u = fixtures::smooth_control();
  const auto lattice = fixtures::jump_lattice();
  const double R = 12.0;
  const double r = 1.0;
  const std::vector<int> js = {4, 8, 16, 32, 64};
  std::vector<double> sup(lattice.size(), 0.0), last(lattice.size(), 0.0);
  double err64 = 0.0;
  for (int j : js) {
    const auto p = smoothing_apply(SmoothingSpec::standard(j, 2, R), u);
    if (j == 64) {
      // error over the window core, where psi_j = 1
      const GridSpec& spec = u.spec();
      double x[2];
      for (std::size_t i = 0; i < spec.size(); ++i) {
        spec.point(i, x);
        if (std::hypot(x[0], x[1]) <= 0.5 * R) err64 = std::max(err64, std::abs(p.at(0, i) - u.at(0, i)));
      }
    }
    for (std::size_t w = 0; w < lattice.windows.size(); ++w) {
      const auto v = cone_seminorms(p, r, lattice.windows[w], lattice.caps, 1.0);
      for (std::size_t c = 0; c < v.size(); ++c) {
        const std::size_t q = w * lattice.caps.size() + c;
        sup[q] = std::max(sup[q], v[c]);
        if (j == 64) last[q] = v[c];
      }
    }
  }
  double worst = 0.0;
  for (std::size_t q = 0; q < lattice.size(); ++q) worst = std::max(worst, sup[q] / last[q]);
  return {err64 <= 1e-3 && worst <= 1.1,
          fmt("|P_64 u - u|_inf %.3e; worst sup_j / stabilized %.4f", err64, worst)};
}

Outcome defect_check() {
  const auto seq = fixtures::oscillation_fixture({8, 16, 32, 64});
  const auto bins = fixtures::oscillation_bins();
  const auto est = defect_estimate(seq, bins, 2);
  const GridField b = fixtures::oscillation_profile();
  const GridSpec& spec = b.spec();
  const double e1[2] = {1.0, 0.0};
  double worst_on = 0.0, worst_off = 0.0;
  bool on_ok = true;
  for (std::size_t k = 0; k < est.values.size(); ++k) {
    const auto& bin = est.values[k];
    if (angle_to(bin.omega, e1) < 1e-9) {
      const auto& cell = bins.cells[bins.cell_of(k)];
      double expected = 0.0, x[2];
      for (std::size_t i = 0; i < spec.size(); ++i) {
        spec.point(i, x);
        const double phi = cell.value(x);
        expected += phi * phi * std::norm(b.at(0, i));
      }
      expected *= spec.cell_volume();
      const double dev = std::abs(bin.value - cplx(expected));
      if (expected >= 1e-3 * est.total) {
        worst_on = std::max(worst_on, dev / expected);
        on_ok = on_ok && dev <= 0.05 * expected;
      } else {
        on_ok = on_ok && dev <= 1e-3 * est.total;
      }
    } else {
      worst_off = std::max(worst_off, std::abs(bin.value));
    }
  }
  const double pos = est.positivity_residual();
  const double herm = hermitian_check(est);
  const auto report = wfc_scan(seq.members, seq.limit, 0.0, fixtures::oscillation_lattice(),
                               default_radii(spec));
  const auto cmp = support_vs_wfc(est, report, 0.05);
  const bool ok = on_ok && worst_off <= 0.02 * est.total && pos <= 1e-3 * est.total &&
                  herm <= 1e-3 * est.total && cmp.measure_outside_wfc == 0 &&
                  cmp.wfc_outside_measure == 0;
  return {ok, fmt("e1 bins rel dev %.3e; max off-direction %.3e of total; positivity %.2e; "
                  "hermitian %.2e; containment violations %zu/%zu",
                  worst_on, worst_off / est.total, pos / est.total, herm / est.total,
                  cmp.measure_outside_wfc, cmp.wfc_outside_measure)};
}

// Curl kernel is span(omega); divergence kernel is span(omega_perp).
Outcome classification_check() {
  const int n = 2;
  auto curl = ConstraintSymbol::make(
      Symbol::polyhomogeneous(1.0, 1, 2,
                              [](std::span<const double> w, std::span<cplx> out) {
                                out[0] = cplx(0.0, -w[1]);
                                out[1] = cplx(0.0, w[0]);
                              }),
      n);
  auto div = ConstraintSymbol::make(
      Symbol::polyhomogeneous(1.0, 1, 2,
                              [](std::span<const double> w, std::span<cplx> out) {
                                out[0] = cplx(0.0, w[0]);
                                out[1] = cplx(0.0, w[1]);
                              }),
      n);
  auto dyad = [](bool perp) {
    return QuadSymbol::make(
        2, 2,
        [perp](std::span<const double>, std::span<const double> w, std::span<cplx> out) {
          const double a = perp ? -w[1] : w[0], c = perp ? w[0] : w[1];
          out[0] = a * a;
          out[1] = a * c;
          out[2] = c * a;
          out[3] = c * c;
        },
        true);
  };
  const auto e1 = QuadSymbol::constant(2, {1.0, 0.0, 0.0, 0.0}, true);
  const auto e2 = QuadSymbol::constant(2, {0.0, 0.0, 0.0, 1.0}, true);
  const auto zero = QuadSymbol::constant(2, {0.0, 0.0, 0.0, 0.0}, true);
  const auto skew = QuadSymbol::constant(2, {0.0, cplx(0.0, 1.0), cplx(0.0, -1.0), 0.0}, true);
  struct Case {
    const char* name;
    const ConstraintSymbol* a;
    QuadSymbol b;
    bool expected;
  };
  const std::vector<Case> cases = {
      {"curl, I - ww", &curl, dyad(true), true},   {"curl, e1e1", &curl, e1, false},
      {"curl, e2e2", &curl, e2, false},            {"curl, 0", &curl, zero, true},
      {"curl, ww", &curl, dyad(false), false},     {"div, ww", &div, dyad(false), true},
      {"div, w_perp w_perp", &div, dyad(true), false}, {"div, skew", &div, skew, true},
  };
  std::vector<double> points = {0.0, 0.0, 0.3, -0.2, -0.5, 0.4};
  std::vector<double> dirs;
  for (int i = 0; i < 32; ++i) {
    const double t = 2.0 * kPi * (i + 0.37) / 32.0;
    dirs.push_back(std::cos(t));
    dirs.push_back(std::sin(t));
  }
  std::size_t mismatches = 0;
  for (const auto& c : cases) {
    const auto v = kernel_condition(*c.a, c.b, points, dirs, ConditionMode::zero, 1);
    if (v.pass != c.expected) ++mismatches;
  }
  return {mismatches == 0, fmt("%zu/%zu analytic cases mismatched", mismatches, cases.size())};
}

Outcome compcomp_check() {
  const std::vector<int> freqs = {8, 16, 32, 64};
  const auto pass = div_curl_preset(freqs, true);
  const auto fail = div_curl_preset(freqs, false);
  const auto rp = compcomp_run(pass.sequence, pass.a, pass.b, pass.chi, 1.0);
  const auto rf = compcomp_run(fail.sequence, fail.a, fail.b, fail.chi, 1.0);
  double min_fail_gap = 1e300;
  for (double g : rf.gaps) min_fail_gap = std::min(min_fail_gap, g);
  const auto cls = classification_check();
  const bool ok = rp.gaps.back() <= 0.05 * rp.scale && min_fail_gap >= 0.2 * rf.scale &&
                  rp.condition.pass && !rf.condition.pass && cls.pass;
  return {ok, fmt("pass gap %.2e (scale %.3f), condition %s; fail min gap %.3f (scale %.3f), "
                  "condition %s; %s",
                  rp.gaps.back(), rp.scale, rp.condition.pass ? "pass" : "fail", min_fail_gap,
                  rf.scale, rf.condition.pass ? "pass" : "fail", cls.detail.c_str())};
}

Outcome invariant_suite_check() {
  std::size_t failed = 0;
  std::string names;
  for (const auto& r : run_selftest(1)) {
    if (!r.pass) {
      ++failed;
      names += " " + r.name;
    }
  }
  return {failed == 0, failed == 0 ? std::string("all checks pass") : "failed:" + names};
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "kernel dual-route agreement", 10.0, appendix_dual_route_check},
      {2, "restriction identity", 120.0, restriction_check},
      {3, "divergence experiment", 5.0, divergence_check},
      {4, "critical-order estimator", 10.0, critical_order_check},
      {5, "wave front direction detection", 30.0, wf_detection_check},
      {6, "compactness wave front scan", 30.0, wfc_check},
      {7, "order shift", 15.0, order_shift_check},
      {8, "smoothing operators", 10.0, smoothing_check},
      {9, "defect measure (oscillation)", 60.0, defect_check},
      {10, "compensated compactness (div-curl)", 60.0, compcomp_check},
      {11, "exact invariant suite", 10.0, invariant_suite_check},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool pass = o.pass && dt <= c.budget_seconds;
    if (!pass) ++failures;
    while (!o.detail.empty() && (o.detail.back() == ' ' || o.detail.back() == ';')) o.detail.pop_back();
    std::printf("%s [%2d] %s: %s (%.2f s, budget %.0f s)\n", pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), dt, c.budget_seconds);
    std::fflush(stdout);
  }
  return failures;
}
