#pragma once

#include <span>
#include <variant>
#include <vector>

#include "microlocal/grid.hpp"

namespace microlocal {

/// Smooth step built from f(t) = exp(-1/t): 1 for t <= 0, 0 for t >= 1,
/// C-infinity in between.
double smooth_step(double t);

/// Radial cutoff: 1 on |x - c| <= r_inner, 0 for |x - c| >= r_outer.
struct BumpCutoff {
  std::vector<double> center;
  double r_inner = 0.5;
  double r_outer = 1.0;

  static BumpCutoff make(std::vector<double> center, double r_inner, double r_outer);
  double value(std::span<const double> x) const;
};

/// Box cell of a squared partition of unity. Along every axis the factor is
/// sin(pi/2 s) rising across [lo - delta, lo + delta] and the matching
/// cos(pi/2 s) falling across [hi - delta, hi + delta], so neighbouring
/// cells sharing a face satisfy phi_left^2 + phi_right^2 = 1 there.
struct CellCutoff {
  std::vector<double> lo;
  std::vector<double> hi;
  double delta = 0.1;

  static CellCutoff make(std::vector<double> lo, std::vector<double> hi, double delta);
  double value(std::span<const double> x) const;
};

using Cutoff = std::variant<BumpCutoff, CellCutoff>;

double cutoff_value(const Cutoff& c, std::span<const double> x);
/// Representative point: the ball center or the cell midpoint.
std::vector<double> cutoff_center(const Cutoff& c);
int cutoff_dim(const Cutoff& c);
/// Closed box [lo, hi] containing the support.
void cutoff_bounds(const Cutoff& c, std::vector<double>& lo, std::vector<double>& hi);
std::vector<double> sample_cutoff(const GridSpec& spec, const Cutoff& c);

/// Tensor-product partition of [lo, hi]^n into `cells` equal boxes per
/// axis with sum phi^2 = 1 on [lo + delta, hi - delta]^n.
std::vector<CellCutoff> cell_partition(int dim, double lo, double hi, int cells, double delta);

}  // namespace microlocal
