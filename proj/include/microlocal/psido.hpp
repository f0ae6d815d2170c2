#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "microlocal/cones.hpp"
#include "microlocal/cutoff.hpp"
#include "microlocal/grid.hpp"
#include "microlocal/seminorm.hpp"
#include "microlocal/symbol.hpp"

namespace microlocal {

struct QuantizeOptions {
  /// Work budget for the general path, counted as N^{2n} rows cols.
  double general_budget = 6.0e7;
};

/// Op(a) u = (2 pi)^{-n} sum e^{i x xi} a(x, xi) u^(xi) dxi. Separable forms
/// go through transforms and pointwise products; the general form is summed
/// directly and raises SizeLimit above the budget.
GridField quantize(const Symbol& a, const GridField& u, const QuantizeOptions& options = {});

/// Fourier multiplier m(D) applied to every channel of u.
GridField apply_multiplier(const GridField& u, const std::function<cplx(std::span<const double>)>& m);

/// Mollifier chi(x) = prod beta(x_a) with beta an even smooth bump on
/// [-1/sqrt(n), 1/sqrt(n)] normalized to unit integral, so supp chi lies in
/// the unit ball and int chi = 1.
double mollifier_profile(double t, int dim);
/// F beta(k) by composite Gauss-Legendre quadrature.
double mollifier_axis_transform(double k, int dim);

struct SmoothingSpec {
  int j = 1;
  BumpCutoff window;

  /// j >= 1 with the window 1 on |x| <= R/2 and 0 outside |x| >= R.
  static SmoothingSpec standard(int j, int dim, double R);
};

/// P_j u = chi_j * (psi_j u) computed as F^{-1}(F chi(xi / j) F(psi_j u)).
GridField smoothing_apply(const SmoothingSpec& s, const GridField& u);

struct OrderShift {
  double r_star_before = 0.0;
  double r_star_after = 0.0;
  double shift() const { return r_star_after - r_star_before; }
};

OrderShift order_shift_probe(const Symbol& a, const GridField& u, const Cutoff& window,
                             const DirectionCap& cap, const ProfileOptions& options = {});

}  // namespace microlocal
