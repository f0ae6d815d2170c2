#pragma once

#include <vector>

#include "microlocal/grid.hpp"

namespace microlocal {

/// 1 / (Gamma(s/2) 2^q pi^{q/2}).
double appendix_prefactor(int q, double s);

/// u_s^{(q)}(y) = prefactor * int_0^inf t^{(s-q-2)/2} e^{-t} e^{-|y|^2/(4t)} dt,
/// evaluated with t = e^tau on [-40, 40] by trapezoid halving from 512
/// intervals until successive values agree to 1e-10 relative
/// (QuadratureFailure past 2^20 intervals). At y = 0 this needs s > q.
double appendix_value(int q, double s, double y_abs);

/// Same kernel averaged over the cube [-h/2, h/2]^q centered at the origin;
/// finite for every s > 0.
double appendix_cell_average(int q, double s, double h);

/// Closed form prefactor * 2 (|y|/2)^nu K_nu(|y|), nu = (s - q) / 2, y != 0.
double appendix_closed_form(int q, double s, double y_abs);

/// u_s^{(q)} sampled on a q-dimensional grid. Values are cached per
/// integer |y|^2 / h^2. The origin sample is the point value when s > q
/// and the cell average otherwise.
GridField appendix_family(int q, double s, const GridSpec& grid);

/// Real part of the lattice inverse transform of <xi>^{-s}.
GridField bracket_inverse(double s, const GridSpec& grid);

struct DualRouteRow {
  std::vector<double> y;
  double route_integral = 0.0;
  double route_fft = 0.0;
  double rel_err = 0.0;
};

/// Both routes on grid points with |y| in [y_min, y_max].
std::vector<DualRouteRow> appendix_dual_route(int q, double s, const GridSpec& grid,
                                              double y_min = 0.5, double y_max = 5.0);

}  // namespace microlocal
