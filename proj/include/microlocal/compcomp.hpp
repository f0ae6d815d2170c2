#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "microlocal/cutoff.hpp"
#include "microlocal/defect.hpp"
#include "microlocal/grid.hpp"
#include "microlocal/symbol.hpp"
#include "microlocal/wavefront.hpp"

namespace microlocal {

/// Homogeneous matrix amplitude a(x, xi) of degree `order` from k channels to
/// k' channels, wrapped as a polyhomogeneous symbol.
struct ConstraintSymbol {
  Symbol symbol = Symbol::identity();

  /// Checks a(x, t xi) = t^r a(x, xi) for t > 0 on sample points, |xi| >= 1,
  /// to 1e-10 relative.
  static ConstraintSymbol make(Symbol a, int dim);
  int rows() const { return symbol.rows(); }
  int cols() const { return symbol.cols(); }
  /// a(x, omega), rows x cols row-major.
  std::vector<cplx> at(std::span<const double> x, std::span<const double> omega) const;
};

/// Quadratic symbol b(x, omega) on box x S^{n-1}, k x k.
struct QuadSymbol {
  using Fn = std::function<void(std::span<const double>, std::span<const double>, std::span<cplx>)>;

  int dim = 2;
  int channels = 1;
  Fn b;
  bool hermitian = false;
  /// b ignores x; quantized as a Fourier multiplier.
  bool x_independent = true;

  /// With `hermitian` set, b = b^dagger is verified on samples to 1e-12.
  static QuadSymbol make(int dim, int channels, Fn b, bool hermitian, bool x_independent = true);
  /// Constant matrix, row-major.
  static QuadSymbol constant(int dim, std::vector<cplx> matrix, bool hermitian);
  /// b extended to all xi by b(x, xi / |xi|), with the direction average at xi = 0.
  Symbol extension() const;
};

enum class ConditionMode { nonneg, zero };
ConditionMode parse_condition_mode(const std::string& text);

struct ConditionVerdict {
  bool pass = true;
  /// Largest violation: max(0, -Re b z.z) / |z|^2 or |b z.z| / |z|^2.
  double worst_residual = 0.0;
  std::size_t samples = 0;
  /// Samples with a nontrivial kernel.
  std::size_t kernel_samples = 0;
  /// Samples with a relative singular value in [1e-8, 1e-5].
  std::size_t borderline = 0;
};

inline constexpr double kKernelThreshold = 1e-8;
inline constexpr double kBorderlineThreshold = 1e-5;

/// For every x in `points` and omega in `directions` (flattened with stride
/// dim): kernel of a(x, omega) from an SVD with relative threshold 1e-8,
/// then b z.z on an orthonormal kernel basis and on `combinations` seeded
/// random kernel vectors.
ConditionVerdict kernel_condition(const ConstraintSymbol& a, const QuadSymbol& b,
                                  std::span<const double> points,
                                  std::span<const double> directions, ConditionMode mode,
                                  std::uint64_t seed, int combinations = 4);

/// sum_x (Op(b~) u)(x) conj(u(x)) chi(x) h^n.
cplx quadratic_density(const QuadSymbol& b, const GridField& u, const BumpCutoff& chi);

struct CompCompOptions {
  /// Defaults to the single full-sphere window of kr_lattice.
  std::optional<ScanLattice> lattice;
  std::vector<double> radii;
  ConditionMode mode = ConditionMode::zero;
  std::uint64_t seed = 1;
  /// Directions per condition sample point (n = 2) or cover size (n = 3).
  int condition_directions = 32;
};

struct CompCompReport {
  /// wfc verdict for {A u_n} at order -r.
  SequenceReport proxy;
  TailVerdict proxy_verdict = TailVerdict::compact;
  ConditionVerdict condition;
  std::vector<int> parameters;
  std::vector<cplx> densities;
  cplx limit_density;
  /// |density_n - limit| per member.
  std::vector<double> gaps;
  /// Gap at the last member.
  double gap = 0.0;
  /// Largest sum chi |u_n|^2 h^n over the members.
  double scale = 0.0;
};

CompCompReport compcomp_run(const SequenceSpec& seq, const ConstraintSymbol& a,
                            const QuadSymbol& b, const BumpCutoff& chi, double r,
                            const CompCompOptions& options = {});

struct DivCurlPreset {
  SequenceSpec sequence;
  ConstraintSymbol a;
  QuadSymbol b;
  BumpCutoff chi;
  std::vector<double> omega0;
};

/// u_n = grad(m_n^{-1} sin(m_n omega0 . x) beta(x)) on the 2-D box of side
/// 2 pi with 512 samples, omega0 = e_1, beta a Gaussian of width 0.6; a is
/// the curl symbol and b = I - omega omega^T (passing) or omega0 omega0^T.
DivCurlPreset div_curl_preset(std::vector<int> freqs, bool passing = true);

/// Columns `n, density_re, density_im, gap`.
void write_compcomp_csv(std::ostream& out, const CompCompReport& report);

}  // namespace microlocal
