#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "microlocal/grid.hpp"

namespace microlocal {

/// Writes a rows x cols matrix (row-major) for a frequency or direction.
using MatrixFn = std::function<void(std::span<const double>, std::span<cplx>)>;
/// a(x, xi) for the general form; writes rows x cols row-major.
using AmplitudeFn =
    std::function<void(std::span<const double>, std::span<const double>, std::span<cplx>)>;

/// One separable piece: psi_L(x) m(xi) psi_R(x), quantized as
/// psi_L m(D) (psi_R u). Empty spatial factors mean 1, so Kohn-Nirenberg
/// terms have no right factor. `principal` is the degree-0 direction part
/// h with m(t omega) ~ t^order h(omega) as t -> infinity.
struct SymbolTerm {
  PointFunction left;
  PointFunction right;
  MatrixFn freq;
  MatrixFn principal;
};

/// Radial cutoff: 0 on |xi| <= 1/4, 1 on |xi| >= 1/2, smooth between.
double radial_cutoff(double t);

class Symbol {
public:
  enum class Form { multiplier, spatial, separable, polyhomogeneous, general };

  static Symbol identity(int channels = 1);
  static Symbol zero(int rows, int cols);
  /// <xi>^power, order power.
  static Symbol japanese_bracket(double power);
  /// Scalar multiplier m(xi) with principal part h.
  static Symbol multiplier(double order, std::function<cplx(std::span<const double>)> m,
                           std::function<cplx(std::span<const double>)> principal);
  static Symbol matrix_multiplier(double order, int rows, int cols, MatrixFn m, MatrixFn principal);
  /// Pointwise multiplication by psi(x), order 0.
  static Symbol spatial(PointFunction psi, int channels = 1);
  /// psi(x) m(xi), Kohn-Nirenberg ordering.
  static Symbol separable(PointFunction psi, const Symbol& multiplier_symbol);
  /// psi(x)^2 m(xi) quantized in the symmetric form psi m(D) psi; same
  /// principal symbol as the Kohn-Nirenberg ordering.
  static Symbol sandwiched(PointFunction psi, const Symbol& multiplier_symbol);
  /// rho(|xi|) |xi|^order a0(xi/|xi|) psi(x); psi empty means 1.
  static Symbol polyhomogeneous(double order, int rows, int cols, MatrixFn a0,
                                PointFunction psi = {});
  /// Arbitrary a(x, xi); quantized by the slow exact sum. `principal`, when
  /// given, is an x-independent principal part.
  static Symbol general(double order, int rows, int cols, AmplitudeFn a, MatrixFn principal = {});

  double order() const { return order_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  Form form() const { return form_; }
  const std::vector<SymbolTerm>& terms() const { return terms_; }
  const AmplitudeFn& amplitude() const { return general_; }
  bool hermitian() const { return hermitian_; }

  /// Checks sigma(x, omega) = sigma(x, omega)^dagger on every pair of sample
  /// point and direction (both flattened with stride dim), sets the flag
  /// when the deviation is within 1e-12, and returns the deviation.
  double mark_hermitian(int dim, std::span<const double> points,
                        std::span<const double> directions);

  /// a(x, xi).
  void evaluate(std::span<const double> x, std::span<const double> xi, std::span<cplx> out) const;
  /// Degree-0 principal part sigma(x, omega).
  void principal(std::span<const double> x, std::span<const double> omega,
                 std::span<cplx> out) const;
  std::vector<cplx> evaluate(std::span<const double> x, std::span<const double> xi) const;
  std::vector<cplx> principal(std::span<const double> x, std::span<const double> omega) const;

  /// Symbol plus another of the same shape and order.
  Symbol operator+(const Symbol& other) const;
  Symbol scaled(cplx c) const;

private:
  Symbol() = default;
  friend Symbol principal_compose(const Symbol& a, const Symbol& b);
  friend Symbol adjoint_symbol(const Symbol& a);

  double order_ = 0.0;
  int rows_ = 1;
  int cols_ = 1;
  Form form_ = Form::multiplier;
  std::vector<SymbolTerm> terms_;
  AmplitudeFn general_;
  MatrixFn general_principal_;
  bool hermitian_ = false;
};

/// Principal-level product: orders add and homogeneous parts multiply as
/// matrices. ChannelMismatch unless a.cols() == b.rows().
Symbol principal_compose(const Symbol& a, const Symbol& b);
/// Exact operator adjoint: left and right factors swap with conjugation
/// and the frequency matrices are conjugate-transposed.
Symbol adjoint_symbol(const Symbol& a);

/// Direction table `omega..., re, im` (one re/im pair per channel pair,
/// row-major). Interpolation is linear in angle for n = 2 and nearest
/// direction otherwise.
struct DirectionTable {
  int dim = 1;
  int rows = 1;
  int cols = 1;
  std::vector<std::vector<double>> directions;
  std::vector<std::vector<cplx>> values;

  static DirectionTable parse(std::istream& in, int rows = 1, int cols = 1);
  static DirectionTable load(const std::string& path, int rows = 1, int cols = 1);
  void lookup(std::span<const double> omega, std::span<cplx> out) const;
};

Symbol polyhomogeneous_from_table(double order, std::shared_ptr<const DirectionTable> table);

}  // namespace microlocal
