#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "microlocal/cones.hpp"
#include "microlocal/cutoff.hpp"
#include "microlocal/grid.hpp"
#include "microlocal/seminorm.hpp"

namespace microlocal {

/// Directions covering S^{n-1}: +-1 for n = 1, angles 2 pi k / count (from
/// `offset`) for n = 2, a Fibonacci sphere for n = 3. Throws when caps of
/// the given half angle leave part of the sphere uncovered.
std::vector<DirectionCap> direction_cover(int dim, int count, double half_angle,
                                          double offset = 0.0);
/// Sampled check that every direction lies inside some cap.
bool caps_cover_sphere(int dim, const std::vector<DirectionCap>& caps);

/// Windows x caps. Patch p is (windows[p / caps.size()], caps[p % caps.size()]).
struct ScanLattice {
  std::vector<Cutoff> windows;
  std::vector<DirectionCap> caps;
  double spatial_stride = 0.0;
  int angular_count = 0;

  std::size_t size() const { return windows.size() * caps.size(); }
  const Cutoff& window(std::size_t patch) const { return windows[patch / caps.size()]; }
  const DirectionCap& cap(std::size_t patch) const { return caps[patch % caps.size()]; }
};

struct LatticeOptions {
  /// Window centers on a cubic grid of this stride within [-reach, reach]^n.
  double stride = 1.0;
  double reach = 1.0;
  double r_inner = 0.5;
  double r_outer = 1.0;
  int angular_count = 8;
  double half_angle = 0.42;
};

/// Regular lattice; checks that caps cover the sphere and window supports
/// cover [-reach, reach]^n.
ScanLattice regular_lattice(int dim, const LatticeOptions& options);
/// Validates an explicit lattice the same way, over [-reach, reach]^n.
void validate_lattice(const ScanLattice& lattice, int dim, double reach);

struct WavefrontRecord {
  std::vector<double> x;
  std::vector<double> omega;
  double r_star = 0.0;
  double residual = 0.0;
  bool singular = false;
};

struct WavefrontReport {
  double order = 0.0;
  double margin = 0.25;
  std::vector<WavefrontRecord> records;

  std::size_t singular_count() const;
};

struct WfOptions {
  /// Patch flagged singular when r_star <= r + margin.
  double margin = 0.25;
  ProfileOptions profile;
};

WavefrontReport wf_scan(const GridField& u, double r, const ScanLattice& lattice,
                        const WfOptions& options = {});

enum class TailVerdict { compact, noncompact, inconclusive };
const char* to_string(TailVerdict v);

struct SequenceRecord {
  std::vector<double> x;
  std::vector<double> omega;
  std::vector<double> tail;
  double rho = 0.0;
  double residual = 0.0;
  // Tail energy below the negligible floor: verdict is compact whatever rho says.
  bool negligible = false;
  TailVerdict verdict = TailVerdict::compact;
};

struct SequenceReport {
  double order = 0.0;
  std::vector<double> radii;
  std::vector<SequenceRecord> records;

  std::size_t count(TailVerdict v) const;
};

struct WfcOptions {
  double compact_ratio = 0.1;
  double noncompact_ratio = 0.8;
  /// Patches whose T(R_min) is at most this fraction of the largest
  /// T(R_min) over all patches are compact.
  double negligible_fraction = 1e-3;
  /// Patches with T(R_min) at most this value are compact.
  double absolute_floor = 0.0;
  double radial_floor = 1.0;
};

/// Geometric grid of `count` radii from Xi/16 to 3 Xi/16.
std::vector<double> default_radii(const GridSpec& spec, int count = 5);

/// T(R) = max_n sum_{cap, R <= |xi| < Xi/2} <xi>^{2r} |F(phi (u_n - u))|^2 dxi.
SequenceReport wfc_scan(const std::vector<GridField>& seq, const GridField& limit, double r,
                        const ScanLattice& lattice, const std::vector<double>& radii,
                        const WfcOptions& options = {});

/// One full-sphere patch whose window is 1 on the central half of the box.
ScanLattice kr_lattice(const GridSpec& spec);
SequenceReport kr_compactness(const std::vector<GridField>& seq, const GridField& limit,
                              double r, const WfcOptions& options = {});

/// Columns `x..., omega..., r_star, residual, verdict`.
void write_wavefront_csv(std::ostream& out, const WavefrontReport& report);
/// Columns `x..., omega..., rho, residual, verdict`.
void write_sequence_csv(std::ostream& out, const SequenceReport& report);

}  // namespace microlocal
