#pragma once

#include <optional>
#include <string>
#include <vector>

#include "microlocal/cones.hpp"
#include "microlocal/grid.hpp"

namespace microlocal {

/// f : R^m -> R^n, either affine or given by callbacks.
struct SmoothMap {
  enum class Kind { linear, callback };
  Kind kind = Kind::linear;
  int m = 1;
  int n = 1;
  LinearMap linear;
  MapCallback f;
  JacobianCallback jacobian;
  std::optional<int> declared_rank;

  /// Checks the declared rank against singular values (threshold 1e-10).
  static SmoothMap from_linear(LinearMap map, std::optional<int> declared_rank = {});
  static SmoothMap from_callback(int m, int n, MapCallback f, JacobianCallback jacobian,
                                 std::optional<int> declared_rank = {});
  void apply(std::span<const double> x, std::span<double> out) const;
  SmoothMap compose(const SmoothMap& inner) const;
};

enum class MapClass { general, constant_rank, submersion, diffeo };
enum class Verdict { admissible, not_admissible, open_in_paper };
const char* to_string(MapClass c);
const char* to_string(Verdict v);
MapClass parse_map_class(const std::string& text);

struct AdmissibilityRow {
  MapClass kind = MapClass::general;
  int n = 1;
  int k = 0;
  double r1 = 0.0;
  double r2 = 0.0;
  /// Thresholds checked: bound on r2 and bound on r2 - r1.
  double r2_bound = 0.0;
  double gap_bound = 0.0;
  Verdict verdict = Verdict::not_admissible;
  /// Diffeomorphisms with r1 = r2 give an isomorphism.
  bool isomorphism = false;
};

/// Case split for f^* : D'^{r2}_L -> D'^{r1}_{f^*L}:
///   general:        r2 - r1 > n/2 and r2 > n/2
///   constant rank:  r2 - r1 >= (n-k)/2 and r2 > (n-k)/2, with the
///                   borderline r2 = (n-k)/2, r1 <= 0 reported open
///   submersion:     r2 >= r1
///   diffeomorphism: r2 >= r1
/// RankOutOfRange for constant rank unless 1 <= k <= min(m, n); m defaults
/// to n.
AdmissibilityRow admissible(MapClass kind, int n, double r1, double r2, int k = 0, int m = -1);

struct PullbackOptions {
  /// Skip the continuity proxy.
  bool override_continuity = false;
  /// Work budget for interpolation, counted as target points x N^n.
  double budget = 2.0e9;
};

struct PullbackResult {
  GridField field;
  bool lattice_exact = false;
  bool continuity_warning = false;
  double global_r_star = 0.0;
  std::string warning;
};

/// x -> u(f(x)) sampled on `target`. Integer linear maps between grids of
/// equal spacing are a periodic index permutation; everything else uses
/// band-limited trigonometric interpolation. A continuity warning is set
/// when the global critical order of u does not exceed n/2.
PullbackResult pullback_field(const SmoothMap& f, const GridField& u, const GridSpec& target,
                              const PullbackOptions& options = {});

/// Gamma(r/2 + k/2 - n/4) / Gamma(r/2 + n/4) 2^{k-n} pi^{(k-n)/2}.
double restriction_constant(int n, int k, double r2p);

struct RestrictionRow {
  std::vector<double> x;
  double restricted = 0.0;
  double predicted = 0.0;
  double rel_err = 0.0;
};

struct RestrictionReport {
  int n = 2;
  int k = 1;
  double r2p = 0.0;
  double c0 = 0.0;
  double max_rel_err = 0.0;
  std::vector<RestrictionRow> rows;
};

/// Restricts the lattice field of <xi>^{-(r2p + n/2)} on an n-dimensional
/// grid (samples, extent) to the k-plane and compares it with
/// c0 * u^{(k)}_{r2p + k - n/2} on |x| in [x_min, x_max].
RestrictionReport restriction_identity_check(int n, int k, double r2p, int samples, double extent,
                                             double x_min = 0.25, double x_max = 3.0);

struct DivergenceOptions {
  /// Support radius of the radial mollifier profile psi.
  double psi_radius = 10.0;
  /// Order s of the family; defaults to s = n - k.
  std::optional<double> s;
};

/// value_j = int psi(z) u_s^{(n-k)}(z / j) dz for each j, i.e. the mollified
/// kernel psi_j * u evaluated at the origin, with psi a normalized radial
/// bump. Radial composite Gauss-Legendre with geometric grading at 0.
std::vector<double> divergence_experiment(int n, int k, const std::vector<int>& j_list,
                                          const DivergenceOptions& options = {});

}  // namespace microlocal
