#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "microlocal/cones.hpp"
#include "microlocal/cutoff.hpp"
#include "microlocal/grid.hpp"

namespace microlocal {

/// Dyadic cone-localized energies E_j = sum_{shell_j in cap} |F(phi u)|^2 dxi
/// with shell_j = {2^j <= |xi| < 2^{j+1}}, and the least-squares slope of
/// log2 E_j against j over the fit window.
struct ShellProfile {
  std::vector<int> octaves;
  std::vector<double> energies;
  std::vector<bool> in_window;
  int window_min = 0;
  int window_max = 0;
  double fit_slope = 0.0;
  double r_star = 0.0;
  double residual = 0.0;
  /// The fit window reached energies below the noise floor before collecting
  /// enough octaves; r_star is then r_max.
  bool below_noise = false;
};

struct ProfileOptions {
  /// Octaves start at ceil(log2(radial_floor)).
  double radial_floor = 1.0;
  /// Low octaves dropped from the fit (cutoff leakage).
  int drop_low = 2;
  double r_max = 8.0;
  /// Octave energies at most this fraction of |u|^2_{L2} are rounding noise:
  /// the fit window ends before the first such octave.
  double noise_fraction = 1e-20;
};

inline constexpr int kMinFitPoints = 3;

/// F(phi u) for a cutoff phi.
SpectralField localized_spectrum(const GridField& u, const Cutoff& phi);

/// ((2 pi)^{-n} sum_{mask} <xi>^{2r} |F(phi u)|^2 dxi)^{1/2}. The mask is the
/// cap with |xi| >= radial_floor over the whole lattice; a full cap with
/// floor 0 includes xi = 0, so it reproduces sobolev_norm(phi u, r).
double cone_seminorm(const GridField& u, double r, const Cutoff& phi, const DirectionCap& cap,
                     double radial_floor);
/// cone_seminorm for several caps sharing one cutoff, from a single transform.
std::vector<double> cone_seminorms(const GridField& u, double r, const Cutoff& phi,
                                  std::span<const DirectionCap> caps, double radial_floor);
/// Same quadrature over an explicit lattice mask (flat lattice order).
double masked_seminorm(const GridField& u, double r, const Cutoff& phi,
                       std::span<const unsigned char> mask);

/// max <xi>^nu |F(phi u)(xi)| over lattice points of the cap with |xi| <= Xi/2.
double sup_seminorm(const GridField& u, double nu, const Cutoff& phi, const DirectionCap& cap);

ShellProfile shell_profile(const GridField& u, const Cutoff& phi, const DirectionCap& cap,
                           const ProfileOptions& options = {});
/// Profiles for several caps sharing one cutoff, from a single transform.
std::vector<ShellProfile> shell_profiles(const GridField& u, const Cutoff& phi,
                                         std::span<const DirectionCap> caps,
                                         const ProfileOptions& options = {});
/// Fits already-binned energies; InsufficientOctaves below kMinFitPoints
/// unless the window was cut short by the noise floor
/// noise_fraction * reference_energy.
ShellProfile fit_profile(std::vector<int> octaves, std::vector<double> energies,
                         int top_octave, const ProfileOptions& options = {},
                         double reference_energy = 0.0);

double critical_order(const ShellProfile& profile, double r_max = 8.0);
double critical_order_from_slope(double slope, double r_max = 8.0);

/// Rows `j,E_j,in_window`, then a `slope,r_star,residual` summary block.
void write_profile_csv(std::ostream& out, const ShellProfile& profile);

}  // namespace microlocal
