#include "microlocal/cones.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>

#include "microlocal/error.hpp"

namespace microlocal {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kRankTol = 1e-10;

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double a : v) s += a * a;
  return std::sqrt(s);
}

Eigen::VectorXd to_vec(std::span<const double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[i];
  return out;
}

std::vector<double> to_std(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

// Orthonormal basis of ker M (as columns) by SVD.
Eigen::MatrixXd kernel_basis(const Eigen::MatrixXd& M) {
  const Eigen::Index cols = M.cols();
  if (M.rows() == 0) return Eigen::MatrixXd::Identity(cols, cols);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double smax = s.size() > 0 ? s[0] : 0.0;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s[i] > kRankTol * std::max(smax, 1e-300)) ++rank;
  return svd.matrixV().rightCols(cols - rank);
}

// Angle test between a cone(omega, alpha) and a linear subspace spanned by
// the orthonormal columns of K: do they share a nonzero vector?
bool cone_meets_subspace(const DirectionCap& cap, const Eigen::MatrixXd& K) {
  if (K.cols() == 0) return false;
  if (cap.full()) return true;
  const Eigen::VectorXd w = to_vec(cap.omega);
  const double proj = (K.transpose() * w).norm();
  return proj > std::cos(cap.half_angle);
}

// dist(p, range(M)) for a matrix M.
double distance_to_range(const Eigen::VectorXd& p, const Eigen::MatrixXd& M) {
  if (M.cols() == 0) return p.norm();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  const double smax = s.size() > 0 ? s[0] : 0.0;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s[i] > kRankTol * std::max(smax, 1e-300)) ++rank;
  const Eigen::MatrixXd U = svd.matrixU().leftCols(rank);
  return (p - U * (U.transpose() * p)).norm();
}

std::vector<double> parse_numbers(const std::string& body, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    require(b != std::string::npos, errors::kConfigError, "empty entry in " + what);
    const std::string tok = item.substr(b, e - b + 1);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::logic_error&) {
      used = 0;
    }
    require(used == tok.size() && std::isfinite(v), errors::kConfigError,
            "bad number '" + tok + "' in " + what);
    out.push_back(v);
  }
  return out;
}

// Extracts the argument list of `name(...)` starting at `pos`.
std::string call_body(const std::string& text, std::size_t& pos, const std::string& name) {
  while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  require(text.compare(pos, name.size() + 1, name + "(") == 0, errors::kConfigError,
          "expected " + name + "(...) in '" + text + "'");
  pos += name.size() + 1;
  const auto close = text.find(')', pos);
  require(close != std::string::npos, errors::kConfigError, "unclosed " + name + "(");
  std::string body = text.substr(pos, close - pos);
  pos = close + 1;
  return body;
}

}  // namespace

DirectionCap DirectionCap::make(std::vector<double> omega, double half_angle) {
  require(!omega.empty() && omega.size() <= 3, errors::kInvalidArgument,
          "cap direction must have 1 to 3 components");
  const double n = norm(omega);
  require(n > 0.0 && std::isfinite(n), errors::kInvalidArgument, "cap direction must be nonzero");
  require(half_angle > 0.0 && half_angle <= kPi, errors::kInvalidArgument,
          "cap half angle must lie in (0, pi]");
  for (double& w : omega) w /= n;
  return DirectionCap{std::move(omega), half_angle};
}

bool DirectionCap::full() const { return half_angle >= kPi; }

bool DirectionCap::contains(std::span<const double> xi) const {
  require(xi.size() == omega.size(), errors::kInvalidArgument, "frequency has wrong dimension");
  const double n = norm(xi);
  if (n == 0.0) return false;
  if (full()) return true;
  double dot = 0.0;
  for (std::size_t a = 0; a < xi.size(); ++a) dot += omega[a] * xi[a];
  return dot > n * std::cos(half_angle);
}

kernels::CapTest DirectionCap::test() const {
  kernels::CapTest t;
  for (std::size_t a = 0; a < omega.size(); ++a) t.omega[a] = omega[a];
  t.cos_half = std::cos(half_angle);
  t.full = full();
  return t;
}

SpatialBall SpatialBall::make(std::vector<double> center, double radius) {
  require(!center.empty() && center.size() <= 3, errors::kInvalidArgument,
          "ball center must have 1 to 3 coordinates");
  require(radius > 0.0 && std::isfinite(radius), errors::kInvalidArgument,
          "ball radius must be positive");
  return SpatialBall{std::move(center), radius};
}

bool SpatialBall::contains(std::span<const double> x) const {
  double d2 = 0.0;
  for (std::size_t a = 0; a < center.size(); ++a) d2 += (x[a] - center[a]) * (x[a] - center[a]);
  return std::sqrt(d2) < radius;
}

bool SpatialBall::inside_box(const GridSpec& spec) const {
  if (static_cast<int>(center.size()) != spec.dim) return false;
  const double half = 0.5 * spec.extent;
  for (double c : center)
    if (c - radius < -half || c + radius > half) return false;
  return true;
}

LinearMap LinearMap::linear(Eigen::MatrixXd A) {
  Eigen::VectorXd b = Eigen::VectorXd::Zero(A.rows());
  return affine(std::move(A), std::move(b));
}

LinearMap LinearMap::affine(Eigen::MatrixXd A, Eigen::VectorXd b) {
  require(A.rows() >= 1 && A.cols() >= 1 && A.rows() <= 3 && A.cols() <= 3,
          errors::kInvalidArgument, "map matrix must be between 1x1 and 3x3");
  require(b.size() == A.rows(), errors::kInvalidArgument, "offset has wrong length");
  require(A.allFinite() && b.allFinite(), errors::kInvalidArgument, "map must be finite");
  return LinearMap{std::move(A), std::move(b)};
}

LinearMap LinearMap::compose(const LinearMap& inner) const {
  require(source_dim() == inner.target_dim(), errors::kInvalidArgument,
          "composed maps have incompatible dimensions");
  return affine(A * inner.A, A * inner.b + b);
}

int LinearMap::rank() const {
  return source_dim() - static_cast<int>(kernel_basis(A).cols());
}

ConePatch::ConePatch(SpatialBall ball, DirectionCap cap)
    : ball_(std::move(ball)), cap_(std::move(cap)) {
  require(ball_.center.size() == cap_.omega.size(), errors::kInvalidArgument,
          "ball and cap dimensions differ");
  const auto n = static_cast<Eigen::Index>(ball_.center.size());
  S_ = Eigen::MatrixXd::Identity(n, n);
  t_ = Eigen::VectorXd::Zero(n);
  T_ = Eigen::MatrixXd::Identity(n, n);
  prepare();
}

void ConePatch::prepare() {
  const Eigen::MatrixXd Tt = T_.transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Tt, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double smax = s.size() > 0 ? s[0] : 0.0;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s[i] > kRankTol * std::max(smax, 1e-300)) ++rank;
  Eigen::MatrixXd sinv = Eigen::MatrixXd::Zero(Tt.cols(), Tt.rows());
  for (Eigen::Index i = 0; i < rank; ++i) sinv(i, i) = 1.0 / s[i];
  pinv_ = svd.matrixV() * sinv * svd.matrixU().transpose();
  kernel_ = svd.matrixV().rightCols(Tt.cols() - rank);
}

bool ConePatch::is_standard() const {
  const auto n = S_.rows();
  return S_.cols() == n && T_.cols() == n && S_ == Eigen::MatrixXd::Identity(n, n) &&
         T_ == Eigen::MatrixXd::Identity(n, n) && t_.isZero(0.0);
}

bool ConePatch::spatial_contains(std::span<const double> x) const {
  require(static_cast<int>(x.size()) == dim(), errors::kInvalidArgument,
          "point has wrong dimension");
  const Eigen::VectorXd y = S_ * to_vec(x) + t_ - to_vec(ball_.center);
  return y.norm() < ball_.radius;
}

bool ConePatch::frequency_contains(std::span<const double> xi) const {
  require(static_cast<int>(xi.size()) == dim(), errors::kInvalidArgument,
          "frequency has wrong dimension");
  if (is_standard()) return cap_.contains(xi);
  const Eigen::VectorXd x = to_vec(xi);
  const double xn = x.norm();
  if (xn == 0.0) return false;
  const Eigen::VectorXd eta = pinv_ * x;
  if ((T_.transpose() * eta - x).norm() > 1e-10 * xn) return false;
  if (cap_.full()) return true;
  const Eigen::VectorXd w = to_vec(cap_.omega);
  const double a = w.dot(eta) / eta.norm();
  double best = a;
  if (kernel_.cols() > 0) {
    const double wk = (kernel_.transpose() * w).norm();
    best = a > 0.0 ? std::sqrt(a * a + wk * wk) : wk;
  }
  return best > std::cos(cap_.half_angle);
}

bool ConePatch::contains(std::span<const double> x, std::span<const double> xi) const {
  return spatial_contains(x) && frequency_contains(xi);
}

ConePatch ConePatch::pullback(const LinearMap& f) const {
  require(f.target_dim() == dim(), errors::kInvalidArgument,
          "map target dimension does not match the patch");
  ConePatch out;
  out.ball_ = ball_;
  out.cap_ = cap_;
  out.S_ = S_ * f.A;
  out.t_ = S_ * f.b + t_;
  out.T_ = T_ * f.A;
  out.prepare();
  return out;
}

ConePatch ConePatch::with_ball(SpatialBall ball) const {
  require(static_cast<int>(ball.center.size()) == dim(), errors::kInvalidArgument,
          "ball dimension does not match the patch");
  ConePatch out = *this;
  out.ball_ = std::move(ball);
  out.S_ = Eigen::MatrixXd::Identity(dim(), dim());
  out.t_ = Eigen::VectorXd::Zero(dim());
  return out;
}

DirectionCap ConePatch::enclosing_cap() const {
  const int m = dim();
  const auto n = static_cast<int>(cap_.omega.size());
  std::vector<double> fallback(m, 0.0);
  fallback[0] = 1.0;
  if (cap_.full() || kernel_.cols() > 0 || cap_.half_angle >= 0.5 * kPi)
    return DirectionCap::make(fallback, kPi);
  const Eigen::MatrixXd Tt = T_.transpose();
  const Eigen::VectorXd w = to_vec(cap_.omega);
  const Eigen::VectorXd center = (Tt * w).normalized();
  if (n == 1) return DirectionCap::make(to_std(center), cap_.half_angle);
  // Rim directions cos(alpha) w + sin(alpha) v for unit v orthogonal to w.
  Eigen::MatrixXd perp = kernel_basis(w.transpose());
  const int samples = n == 2 ? 2 : 720;
  double worst = 0.0;
  for (int k = 0; k < samples; ++k) {
    Eigen::VectorXd v;
    if (n == 2) {
      v = (k == 0 ? 1.0 : -1.0) * perp.col(0);
    } else {
      const double phi = 2.0 * kPi * k / samples;
      v = std::cos(phi) * perp.col(0) + std::sin(phi) * perp.col(1);
    }
    const Eigen::VectorXd rim = std::cos(cap_.half_angle) * w + std::sin(cap_.half_angle) * v;
    const Eigen::VectorXd img = (Tt * rim).normalized();
    worst = std::max(worst, std::acos(std::clamp(img.dot(center), -1.0, 1.0)));
  }
  // Sampled rims in three dimensions may miss the extreme by the sampling
  // chord; inflate by the angular step.
  if (n == 3) worst *= 1.0 + 2.0 * kPi / samples;
  return DirectionCap::make(to_std(center), std::min(worst, kPi));
}

bool ConePatch::operator==(const ConePatch& o) const {
  return ball_.center == o.ball_.center && ball_.radius == o.ball_.radius &&
         cap_.omega == o.cap_.omega && cap_.half_angle == o.cap_.half_angle &&
         S_.rows() == o.S_.rows() && S_.cols() == o.S_.cols() && S_ == o.S_ &&
         t_.size() == o.t_.size() && t_ == o.t_ && T_.rows() == o.T_.rows() &&
         T_.cols() == o.T_.cols() && T_ == o.T_;
}

bool ConicRegion::contains(std::span<const double> x, std::span<const double> xi) const {
  require(norm(xi) > 0.0, errors::kInvalidArgument, "conic regions exclude the zero frequency");
  bool any = false;
  for (const auto& p : patches) {
    if (p.contains(x, xi)) {
      any = true;
      break;
    }
  }
  return polarity == Polarity::covers_region ? any : !any;
}

std::vector<unsigned char> freq_mask(const GridSpec& spec, const DirectionCap& cap,
                                     double radial_floor) {
  require(radial_floor >= 0.0, errors::kInvalidArgument, "radial floor must be nonnegative");
  require(static_cast<int>(cap.omega.size()) == spec.dim, errors::kInvalidArgument,
          "cap dimension does not match grid");
  std::vector<unsigned char> mask(spec.size(), 0);
  double xi[3];
  for (std::size_t i = 0; i < mask.size(); ++i) {
    spec.wavevector(i, std::span<double>(xi, spec.dim));
    const std::span<const double> v(xi, spec.dim);
    if (norm(v) >= radial_floor && cap.contains(v)) mask[i] = 1;
  }
  return mask;
}

bool normals_clear(const LinearMap& f, const ConicRegion& region) {
  const Eigen::MatrixXd normals = kernel_basis(f.A.transpose());
  if (normals.cols() == 0) return true;
  // The image of f is an unbounded affine subspace; a finite ball union
  // cannot cover it, so a complement region always meets the normals.
  if (region.polarity == Polarity::covers_complement) return false;
  for (const auto& p : region.patches) {
    require(p.dim() == f.target_dim(), errors::kInvalidArgument,
            "patch dimension does not match map target");
    const Eigen::VectorXd target =
        to_vec(p.ball().center) - p.offset() - p.spatial_map() * f.b;
    if (distance_to_range(target, p.spatial_map() * f.A) >= p.ball().radius) continue;
    // eta in the cap with (T A)^T eta = 0 but T^T eta != 0.
    const Eigen::MatrixXd k_new = kernel_basis((p.frequency_map() * f.A).transpose());
    const Eigen::MatrixXd k_old = kernel_basis(p.frequency_map().transpose());
    if (k_new.cols() > k_old.cols() && cone_meets_subspace(p.cap(), k_new)) return false;
  }
  return true;
}

ConicRegion pullback_region(const LinearMap& f, const ConicRegion& region) {
  require(region.polarity == Polarity::covers_region, errors::kInvalidArgument,
          "only covers_region polarity can be pulled back");
  require(normals_clear(f, region), errors::kNormalsIntersect,
          "region meets the set of normals of the map");
  ConicRegion out;
  out.polarity = region.polarity;
  out.patches.reserve(region.patches.size());
  for (const auto& p : region.patches) out.patches.push_back(p.pullback(f));
  return out;
}

namespace {

LinearMap linearize(const MapCallback& f, const JacobianCallback& jacobian, int m, int n,
                    std::span<const double> x) {
  std::vector<double> fx(n), jac(static_cast<std::size_t>(n) * m);
  f(x, fx);
  jacobian(x, jac);
  Eigen::MatrixXd A(n, m);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < m; ++c) A(r, c) = jac[static_cast<std::size_t>(r) * m + c];
  const Eigen::VectorXd b = to_vec(fx) - A * to_vec(x);
  return LinearMap::affine(A, b);
}

}  // namespace

ConicRegion pullback_region(const MapCallback& f, const JacobianCallback& jacobian, int m, int n,
                            const ConicRegion& region, std::span<const double> sample_points,
                            double sample_radius) {
  require(region.polarity == Polarity::covers_region, errors::kInvalidArgument,
          "only covers_region polarity can be pulled back");
  require(sample_points.size() % m == 0 && sample_radius > 0.0, errors::kInvalidArgument,
          "invalid sample points");
  require(normals_clear(f, jacobian, m, n, region, sample_points), errors::kNormalsIntersect,
          "region meets the set of normals of the map");
  ConicRegion out;
  for (std::size_t s = 0; s < sample_points.size() / m; ++s) {
    const auto x = sample_points.subspan(s * m, m);
    const LinearMap lin = linearize(f, jacobian, m, n, x);
    for (const auto& p : region.patches) {
      if (p.dim() != n) fail(errors::kInvalidArgument, "patch dimension does not match map");
      if (!p.spatial_contains(to_std(lin.A * to_vec(x) + lin.b))) continue;
      // Keep the frequency part of the linear pullback; localize space to
      // the sample ball.
      out.patches.push_back(p.pullback(lin).with_ball(
          SpatialBall::make(std::vector<double>(x.begin(), x.end()), sample_radius)));
    }
  }
  return out;
}

bool normals_clear(const MapCallback& f, const JacobianCallback& jacobian, int m, int n,
                   const ConicRegion& region, std::span<const double> sample_points) {
  require(sample_points.size() % m == 0, errors::kInvalidArgument, "invalid sample points");
  for (std::size_t s = 0; s < sample_points.size() / m; ++s) {
    const auto x = sample_points.subspan(s * m, m);
    const LinearMap lin = linearize(f, jacobian, m, n, x);
    ConicRegion local;
    local.polarity = region.polarity;
    for (const auto& p : region.patches)
      if (p.spatial_contains(to_std(lin.A * to_vec(x) + lin.b))) local.patches.push_back(p);
    if (!normals_clear(lin, local)) return false;
  }
  return true;
}

ConePatch parse_patch(const std::string& literal) {
  std::size_t pos = 0;
  const auto ball = parse_numbers(call_body(literal, pos, "ball"), "ball(...)");
  while (pos < literal.size() && std::isspace(static_cast<unsigned char>(literal[pos]))) ++pos;
  require(pos < literal.size() && literal[pos] == 'x', errors::kConfigError,
          "expected 'x' between ball(...) and cap(...)");
  ++pos;
  const auto cap = parse_numbers(call_body(literal, pos, "cap"), "cap(...)");
  require(literal.find_first_not_of(" \t\r", pos) == std::string::npos, errors::kConfigError,
          "trailing text after cap(...)");
  require(ball.size() >= 2 && ball.size() <= 4, errors::kConfigError,
          "ball(...) takes 1 to 3 coordinates and a radius");
  require(cap.size() == ball.size(), errors::kConfigError,
          "cap(...) dimension must match ball(...)");
  try {
    return ConePatch(SpatialBall::make({ball.begin(), ball.end() - 1}, ball.back()),
                     DirectionCap::make({cap.begin(), cap.end() - 1}, cap.back()));
  } catch (const Error& e) {
    fail(errors::kConfigError, e.what());
  }
}

Polarity parse_polarity(const std::string& text) {
  if (text == "covers_region") return Polarity::covers_region;
  if (text == "covers_complement") return Polarity::covers_complement;
  fail(errors::kConfigError, "polarity must be covers_region or covers_complement");
}

}  // namespace microlocal
