#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "microlocal/cutoff.hpp"
#include "microlocal/grid.hpp"
#include "microlocal/symbol.hpp"
#include "microlocal/wavefront.hpp"

namespace microlocal {

/// A finite sequence u_1, u_2, ... with its limit u. Members share grid and
/// channel count; parameters (frequencies or scales) increase strictly.
struct SequenceSpec {
  enum class Kind { oscillation, concentration, explicit_list };

  Kind kind = Kind::explicit_list;
  std::vector<int> parameters;
  std::vector<GridField> members;
  GridField limit = GridField::zeros(GridSpec::make(1, 32, 1.0));

  const GridSpec& spec() const { return limit.spec(); }
  int channels() const { return limit.channels(); }
  /// u_n - u for every member.
  std::vector<GridField> differences() const;
};

/// Fraction of spectral energy a member may carry above Xi/2.
inline constexpr double kMemberBandTolerance = 1e-4;

/// u_n = b(x) e^{i m_n k0 . x} with k0 = omega0 times the frequency step, so
/// every member sits exactly on the frequency lattice. Limit 0.
SequenceSpec oscillation_sequence(const GridField& b, std::vector<int> omega0,
                                  std::vector<int> freqs);
/// u_n = n^{d/2} profile(n (x - x0)), limit 0. The profile should have unit
/// L2 norm so every member has norm close to 1.
SequenceSpec concentration_sequence(const GridSpec& spec, const PointFunction& profile,
                                    std::vector<double> x0, std::vector<int> scales);
/// Members given directly. Parameters are 1, 2, ....
SequenceSpec explicit_sequence(std::vector<GridField> members, GridField limit);
/// Members read from MFLD1 files; the limit is zero when `limit_path` is empty.
SequenceSpec load_sequence(const std::vector<std::string>& paths, const std::string& limit_path);

/// Disjoint direction sectors covering the sphere. For n = 1 the two half
/// lines, for n = 2 sectors of angle 2 pi / count centred at offset + 2 pi k / count,
/// for n = 3 the Voronoi cells of a Fibonacci point set.
struct DirectionPartition {
  int dim = 2;
  int count = 8;
  double offset = 0.0;
  std::vector<std::vector<double>> centers;

  static DirectionPartition make(int dim, int count, double offset = 0.0);
  /// Sector index of a nonzero vector.
  int sector(std::span<const double> xi) const;
};

struct DefectBins {
  std::vector<CellCutoff> cells;
  DirectionPartition directions;

  /// Squared partition of [lo, hi]^n with `cells` boxes per axis and overlap
  /// delta, times the direction partition. Checks |sum phi^2 - 1| <= 1e-3 on
  /// the core [lo + delta, hi - delta]^n.
  static DefectBins make(int dim, double lo, double hi, int cells, double delta,
                         int sectors, double offset = 0.0);
  std::size_t size() const { return cells.size() * directions.centers.size(); }
  /// Bin b is (cells[b / sectors], sector b % sectors).
  std::size_t cell_of(std::size_t bin) const { return bin / directions.centers.size(); }
  int sector_of(std::size_t bin) const {
    return static_cast<int>(bin % directions.centers.size());
  }
};

/// Symbol phi_cell^2 chi_sector(xi / |xi|) rho(|xi|) M(xi / |xi|), quantized
/// as phi m(D) phi. An empty M means the identity on every channel.
Symbol bin_symbol(const DefectBins& bins, std::size_t bin, int channels, const MatrixFn& M = {});

/// sum_x (Op(a) v)(x) conj(v(x)) h^n, summed over channels.
cplx quadratic_form(const Symbol& a, const GridField& v);

struct DefectBin {
  std::vector<double> x;
  std::vector<double> omega;
  cplx value;
  double cauchy_gap = 0.0;
  bool reliable = true;
  /// Channel block B_ij = lim sum w F(phi v_j) conj F(phi v_i) dxi / (2 pi)^n, row-major.
  std::vector<cplx> block;
};

struct DefectEstimate {
  DefectBins bins;
  int channels = 1;
  int tail = 0;
  MatrixFn direction_symbol;
  std::vector<DefectBin> values;
  /// Sum of Re value over all bins.
  double total = 0.0;
  /// The last `tail` differences u_n - u, kept for recomputation.
  std::vector<GridField> tail_fields;

  /// max(0, -min Re value).
  double positivity_residual() const;
};

/// Per-bin q_n = quadratic_form(a_bin, u_n - u); value is the mean of the last
/// `tail` q_n, cauchy_gap their largest pairwise distance. A bin is reliable
/// when its gap is at most 10% of the total mass.
DefectEstimate defect_estimate(const SequenceSpec& seq, const DefectBins& bins, int tail,
                               const MatrixFn& direction_symbol = {});

/// max over bins of |theta(a^#) - conj theta(a)|, with theta(a^#) recomputed
/// through the quantized adjoint bin symbols.
double hermitian_check(const DefectEstimate& est);

struct SupportRow {
  std::vector<double> x;
  std::vector<double> omega;
  double mass = 0.0;
  bool massive = false;
  bool noncompact = false;
};

struct SupportComparison {
  std::vector<SupportRow> rows;
  /// Massive bins whose patch is not noncompact.
  std::size_t measure_outside_wfc = 0;
  /// Noncompact patches without mass.
  std::size_t wfc_outside_measure = 0;
};

/// Bins and patches must pair up one to one: same count, same window
/// centres and same direction centres (GeometryMismatch otherwise). A bin
/// is massive when its real value is at least mass_floor times the total.
SupportComparison support_vs_wfc(const DefectEstimate& est, const SequenceReport& report,
                                 double mass_floor);

/// Scan lattice pairing one to one with the bins: bump windows centred on
/// the cells and caps centred on the sectors.
ScanLattice matching_lattice(const DefectBins& bins, double r_inner, double r_outer,
                             double half_angle);

/// Columns `cell_x..., omega..., re, im, cauchy_gap, reliable`.
void write_defect_csv(std::ostream& out, const DefectEstimate& est);

}  // namespace microlocal
