#pragma once

#include <Eigen/Dense>

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "microlocal/grid.hpp"
#include "microlocal/kernels.hpp"

namespace microlocal {

/// Open cone {xi != 0 : angle(xi, omega) < half_angle}. A half angle of pi
/// or more denotes the whole space minus the origin.
struct DirectionCap {
  std::vector<double> omega;
  double half_angle = 0.3;

  /// Normalizes omega; half_angle must lie in (0, pi].
  static DirectionCap make(std::vector<double> omega, double half_angle);
  bool full() const;
  bool contains(std::span<const double> xi) const;
  kernels::CapTest test() const;
};

struct SpatialBall {
  std::vector<double> center;
  double radius = 1.0;

  static SpatialBall make(std::vector<double> center, double radius);
  bool contains(std::span<const double> x) const;
  /// True when the closed ball lies in the box [-L/2, L/2)^n of `spec`.
  bool inside_box(const GridSpec& spec) const;
};

/// Affine map x -> A x + b from R^m to R^n.
struct LinearMap {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;

  static LinearMap linear(Eigen::MatrixXd A);
  static LinearMap affine(Eigen::MatrixXd A, Eigen::VectorXd b);
  int source_dim() const { return static_cast<int>(A.cols()); }
  int target_dim() const { return static_cast<int>(A.rows()); }
  /// (*this) o inner.
  LinearMap compose(const LinearMap& inner) const;
  /// Rank by singular values above 1e-10 times the largest.
  int rank() const;
};

/// One phase-space patch. The spatial part is {x : |S x + t - c| < r} and the
/// frequency part is T^T cone(omega, alpha). A patch built from a ball and
/// a cap has S = T = I and t = 0; pulling back by x -> A x + b replaces S
/// by S A, t by S b + t and T by T A, so pullbacks compose exactly.
class ConePatch {
public:
  ConePatch(SpatialBall ball, DirectionCap cap);

  int dim() const { return static_cast<int>(S_.cols()); }
  const SpatialBall& ball() const { return ball_; }
  const DirectionCap& cap() const { return cap_; }
  const Eigen::MatrixXd& spatial_map() const { return S_; }
  const Eigen::VectorXd& offset() const { return t_; }
  const Eigen::MatrixXd& frequency_map() const { return T_; }
  bool is_standard() const;

  bool spatial_contains(std::span<const double> x) const;
  bool frequency_contains(std::span<const double> xi) const;
  bool contains(std::span<const double> x, std::span<const double> xi) const;

  ConePatch pullback(const LinearMap& f) const;
  /// Same frequency part with the spatial part replaced by a plain ball.
  ConePatch with_ball(SpatialBall ball) const;
  /// Smallest cap around T^T omega containing the frequency set, estimated
  /// from its rim; exact when T is orthogonal. Returns a full cap when the
  /// image is not contained in a half-space.
  DirectionCap enclosing_cap() const;

  /// Exact equality of every defining array.
  bool operator==(const ConePatch& other) const;

private:
  ConePatch() = default;
  void prepare();

  SpatialBall ball_;
  DirectionCap cap_;
  Eigen::MatrixXd S_;
  Eigen::VectorXd t_;
  Eigen::MatrixXd T_;
  // Derived: pseudo-inverse of T^T and an orthonormal basis of ker T^T.
  Eigen::MatrixXd pinv_;
  Eigen::MatrixXd kernel_;
};

enum class Polarity { covers_region, covers_complement };

struct ConicRegion {
  std::vector<ConePatch> patches;
  Polarity polarity = Polarity::covers_region;

  bool contains(std::span<const double> x, std::span<const double> xi) const;
  bool operator==(const ConicRegion& other) const = default;
};

/// Nonzero lattice frequencies with |xi| >= radial_floor inside the cap
/// (1 = selected), in flat lattice order.
std::vector<unsigned char> freq_mask(const GridSpec& spec, const DirectionCap& cap,
                                     double radial_floor);

/// True iff no patch meets the normal set {(f(x), eta) : A^T eta = 0, eta != 0}.
bool normals_clear(const LinearMap& f, const ConicRegion& region);

/// {(x, A^T eta) : (f(x), eta) in region}; NormalsIntersect when the region
/// meets the normals of f. Only covers_region polarity can be pulled back.
ConicRegion pullback_region(const LinearMap& f, const ConicRegion& region);

using MapCallback = std::function<void(std::span<const double>, std::span<double>)>;
/// Jacobian callback writes the n x m matrix row-major.
using JacobianCallback = std::function<void(std::span<const double>, std::span<double>)>;

/// Nonlinear maps: the linear rule applied at every sample point, giving one
/// patch per (sample point, source patch) pair whose spatial part is the
/// ball of radius `sample_radius` around the sample point.
ConicRegion pullback_region(const MapCallback& f, const JacobianCallback& jacobian, int m, int n,
                            const ConicRegion& region, std::span<const double> sample_points,
                            double sample_radius);
/// Normal-set test for nonlinear maps at the sample points.
bool normals_clear(const MapCallback& f, const JacobianCallback& jacobian, int m, int n,
                   const ConicRegion& region, std::span<const double> sample_points);

/// `ball(x0..., r) x cap(omega..., alpha)`.
ConePatch parse_patch(const std::string& literal);
/// `covers_region` or `covers_complement`.
Polarity parse_polarity(const std::string& text);

}  // namespace microlocal
