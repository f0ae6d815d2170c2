#include "microlocal/pullback.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <numbers>

#include "microlocal/appendix.hpp"
#include "microlocal/cutoff.hpp"
#include "microlocal/error.hpp"
#include "microlocal/kernels.hpp"
#include "microlocal/seminorm.hpp"

namespace microlocal {
namespace {

constexpr double kPi = std::numbers::pi;

bool integer_valued(const Eigen::MatrixXd& M) { return M.array().round().matrix() == M; }

std::optional<std::vector<std::size_t>> lattice_permutation(const LinearMap& map,
                                                            const GridSpec& source,
                                                            const GridSpec& target) {
  if (source.spacing() != target.spacing() || !integer_valued(map.A)) return std::nullopt;
  const Eigen::VectorXd shift = map.b / source.spacing();
  if (!integer_valued(shift)) return std::nullopt;
  const long long n = source.samples;
  std::vector<std::size_t> perm(target.size());
  for (std::size_t i = 0; i < target.size(); ++i) {
    const auto idx = target.multi_index(i);
    std::size_t flat = 0;
    for (int r = 0; r < source.dim; ++r) {
      long long y = static_cast<long long>(shift[r]);
      for (int c = 0; c < target.dim; ++c)
        y += static_cast<long long>(map.A(r, c)) * (idx[c] - target.samples / 2);
      long long j = (y + n / 2) % n;
      if (j < 0) j += n;
      flat = flat * static_cast<std::size_t>(n) + static_cast<std::size_t>(j);
    }
    perm[i] = flat;
  }
  return perm;
}

using Gauss = boost::math::quadrature::gauss<double, 20>;

}  // namespace

SmoothMap SmoothMap::from_linear(LinearMap map, std::optional<int> declared_rank) {
  SmoothMap s;
  s.kind = Kind::linear;
  s.m = map.source_dim();
  s.n = map.target_dim();
  if (declared_rank)
    require(*declared_rank == map.rank(), errors::kInvalidArgument,
            "declared rank " + std::to_string(*declared_rank) + " differs from computed rank " +
                std::to_string(map.rank()));
  s.linear = std::move(map);
  s.declared_rank = declared_rank;
  return s;
}

SmoothMap SmoothMap::from_callback(int m, int n, MapCallback f, JacobianCallback jacobian,
                                   std::optional<int> declared_rank) {
  require(m >= 1 && m <= 3 && n >= 1 && n <= 3, errors::kInvalidArgument,
          "map dimensions must be 1 to 3");
  require(static_cast<bool>(f), errors::kInvalidArgument, "map callback is empty");
  SmoothMap s;
  s.kind = Kind::callback;
  s.m = m;
  s.n = n;
  s.f = std::move(f);
  s.jacobian = std::move(jacobian);
  s.declared_rank = declared_rank;
  return s;
}

void SmoothMap::apply(std::span<const double> x, std::span<double> out) const {
  if (kind == Kind::callback) {
    f(x, out);
    return;
  }
  for (int r = 0; r < n; ++r) {
    double v = linear.b[r];
    for (int c = 0; c < m; ++c) v += linear.A(r, c) * x[c];
    out[r] = v;
  }
}

SmoothMap SmoothMap::compose(const SmoothMap& inner) const {
  require(m == inner.n, errors::kInvalidArgument, "composed maps have incompatible dimensions");
  if (kind == Kind::linear && inner.kind == Kind::linear)
    return from_linear(linear.compose(inner.linear));
  SmoothMap outer = *this;
  SmoothMap in = inner;
  MapCallback f = [outer, in](std::span<const double> x, std::span<double> out) {
    std::vector<double> mid(in.n);
    in.apply(x, mid);
    outer.apply(mid, out);
  };
  return from_callback(inner.m, n, std::move(f), {});
}

const char* to_string(MapClass c) {
  switch (c) {
    case MapClass::general: return "general";
    case MapClass::constant_rank: return "constant_rank";
    case MapClass::submersion: return "submersion";
    default: return "diffeo";
  }
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::admissible: return "true";
    case Verdict::not_admissible: return "false";
    default: return "open_in_paper";
  }
}

MapClass parse_map_class(const std::string& text) {
  if (text == "general") return MapClass::general;
  if (text == "constant_rank") return MapClass::constant_rank;
  if (text == "submersion") return MapClass::submersion;
  if (text == "diffeo") return MapClass::diffeo;
  fail(errors::kConfigError, "unknown map class '" + text + "'");
}

AdmissibilityRow admissible(MapClass kind, int n, double r1, double r2, int k, int m) {
  require(n >= 1, errors::kInvalidArgument, "n must be positive");
  require(std::isfinite(r1) && std::isfinite(r2), errors::kInvalidArgument,
          "orders must be finite");
  if (m < 0) m = n;
  AdmissibilityRow row;
  row.kind = kind;
  row.n = n;
  row.k = k;
  row.r1 = r1;
  row.r2 = r2;
  bool ok = false;
  switch (kind) {
    case MapClass::general:
      row.r2_bound = row.gap_bound = 0.5 * n;
      ok = r2 - r1 > row.gap_bound && r2 > row.r2_bound;
      break;
    case MapClass::constant_rank:
      require(k >= 1 && k <= std::min(m, n), errors::kRankOutOfRange,
              "rank k must satisfy 1 <= k <= min(m, n)");
      row.r2_bound = row.gap_bound = 0.5 * (n - k);
      if (r2 == row.r2_bound && r1 <= 0.0) {
        row.verdict = Verdict::open_in_paper;
        return row;
      }
      ok = r2 - r1 >= row.gap_bound && r2 > row.r2_bound;
      break;
    case MapClass::submersion:
    case MapClass::diffeo:
      row.r2_bound = -std::numeric_limits<double>::infinity();
      row.gap_bound = 0.0;
      ok = r2 >= r1;
      row.isomorphism = kind == MapClass::diffeo && r2 == r1;
      break;
  }
  row.verdict = ok ? Verdict::admissible : Verdict::not_admissible;
  return row;
}

PullbackResult pullback_field(const SmoothMap& f, const GridField& u, const GridSpec& target,
                              const PullbackOptions& options) {
  const GridSpec& source = u.spec();
  require(f.n == source.dim && f.m == target.dim, errors::kInvalidArgument,
          "map dimensions do not match the grids");
  PullbackResult result{GridField::zeros(target, u.channels()), false, false, 0.0, {}};
  if (!options.override_continuity) {
    const double r_in = 0.25 * source.extent * std::sqrt(static_cast<double>(source.dim));
    const BumpCutoff window =
        BumpCutoff::make(std::vector<double>(source.dim, 0.0), r_in, 1.25 * r_in);
    std::vector<double> e(source.dim, 0.0);
    e[0] = 1.0;
    try {
      result.global_r_star =
          shell_profile(u, window, DirectionCap::make(e, kPi)).r_star;
      if (result.global_r_star <= 0.5 * source.dim) {
        result.continuity_warning = true;
        result.warning = "ContinuityWarning: estimated order " +
                         std::to_string(result.global_r_star) + " does not exceed n/2";
      }
    } catch (const Error& err) {
      result.continuity_warning = true;
      result.warning = std::string("ContinuityWarning: ") + err.what();
    }
  }
  const std::size_t size = target.size();
  std::vector<cplx> data(size * u.channels());
  if (f.kind == SmoothMap::Kind::linear) {
    if (auto perm = lattice_permutation(f.linear, source, target)) {
      for (int c = 0; c < u.channels(); ++c) {
        const auto ch = u.channel(c);
        for (std::size_t i = 0; i < size; ++i) data[c * size + i] = ch[(*perm)[i]];
      }
      result.field = GridField(target, u.channels(), std::move(data));
      result.lattice_exact = true;
      return result;
    }
  }
  const double work = static_cast<double>(size) * static_cast<double>(source.size());
  require(work <= options.budget, errors::kSizeLimit,
          "interpolated pullback needs " + std::to_string(work) + " operations, budget " +
              std::to_string(options.budget));
  std::vector<double> points(size * source.dim);
  double x[3];
  for (std::size_t i = 0; i < size; ++i) {
    target.point(i, std::span<double>(x, target.dim));
    f.apply(std::span<const double>(x, target.dim),
            std::span<double>(points.data() + i * source.dim, source.dim));
  }
  for (int c = 0; c < u.channels(); ++c) {
    const auto U = forward_transform(u.channel_field(c));
    const auto vals = kernels::trig_interpolate(source, {U.coefficients(), points});
    std::copy(vals.begin(), vals.end(), data.begin() + c * size);
  }
  result.field = GridField(target, u.channels(), std::move(data));
  return result;
}

double restriction_constant(int n, int k, double r2p) {
  return std::tgamma(0.5 * r2p + 0.5 * k - 0.25 * n) / std::tgamma(0.5 * r2p + 0.25 * n) *
         std::pow(2.0, k - n) * std::pow(kPi, 0.5 * (k - n));
}

RestrictionReport restriction_identity_check(int n, int k, double r2p, int samples, double extent,
                                             double x_min, double x_max) {
  require(n >= 1 && n <= 3 && k >= 1 && k <= n, errors::kInvalidArgument,
          "need 1 <= k <= n <= 3");
  require(r2p > 0.5 * n, errors::kInvalidArgument, "restriction check needs r2' > n/2");
  RestrictionReport rep;
  rep.n = n;
  rep.k = k;
  rep.r2p = r2p;
  rep.c0 = restriction_constant(n, k, r2p);
  const GridSpec big = GridSpec::make(n, samples, extent);
  const GridSpec small = GridSpec::make(k, samples, extent);
  const GridField u = bracket_inverse(r2p + 0.5 * n, big);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, k);
  for (int i = 0; i < k; ++i) A(i, i) = 1.0;
  PullbackOptions opt;
  opt.override_continuity = true;
  const auto restricted = pullback_field(SmoothMap::from_linear(LinearMap::linear(A)), u, small, opt);
  const double s_small = r2p + k - 0.5 * n;
  double x[3];
  for (std::size_t i = 0; i < small.size(); ++i) {
    small.point(i, std::span<double>(x, k));
    double r = 0.0;
    for (int a = 0; a < k; ++a) r += x[a] * x[a];
    r = std::sqrt(r);
    if (r < x_min || r > x_max) continue;
    RestrictionRow row;
    row.x.assign(x, x + k);
    row.restricted = restricted.field.samples()[i].real();
    rep.rows.push_back(std::move(row));
  }
  kernels::for_each_index(rep.rows.size(), [&](std::size_t i) {
    auto& row = rep.rows[i];
    double r = 0.0;
    for (double v : row.x) r += v * v;
    row.predicted = rep.c0 * appendix_value(k, s_small, std::sqrt(r));
    row.rel_err = std::abs(row.restricted - row.predicted) / std::abs(row.predicted);
  });
  for (const auto& row : rep.rows) rep.max_rel_err = std::max(rep.max_rel_err, row.rel_err);
  return rep;
}

std::vector<double> divergence_experiment(int n, int k, const std::vector<int>& j_list,
                                          const DivergenceOptions& options) {
  require(n > k && k >= 0 && n - k <= 3, errors::kInvalidArgument, "need n > k and n - k <= 3");
  require(options.psi_radius > 0.0, errors::kInvalidArgument, "psi radius must be positive");
  const int q = n - k;
  const double s = options.s.value_or(static_cast<double>(q));
  const double R = options.psi_radius;
  // Panels [R 2^{-p-1}, R 2^{-p}], p = 0..kLevels-1; the remaining piece
  // near 0 carries O(R 2^{-kLevels} log) mass and is dropped.
  constexpr int kLevels = 30;
  struct Node {
    double rho;
    double weight;
  };
  std::vector<Node> nodes;
  for (int p = 0; p < kLevels; ++p) {
    const double hi = R * std::ldexp(1.0, -p);
    const double lo = 0.5 * hi;
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    const auto& abscissa = Gauss::abscissa();
    const auto& weights = Gauss::weights();
    for (std::size_t i = 0; i < abscissa.size(); ++i) {
      for (int sign : {-1, 1}) {
        if (abscissa[i] == 0.0 && sign < 0) continue;
        const double rho = mid + sign * half * abscissa[i];
        const double psi = smooth_step(rho / R);
        nodes.push_back({rho, half * weights[i] * psi * std::pow(rho, q - 1)});
      }
    }
  }
  double mass = 0.0;
  for (const auto& nd : nodes) mass += nd.weight;
  std::vector<double> out(j_list.size());
  for (std::size_t jj = 0; jj < j_list.size(); ++jj) {
    const int j = j_list[jj];
    require(j >= 1, errors::kInvalidArgument, "mollifier index j must be positive");
    std::vector<double> vals(nodes.size());
    kernels::for_each_index(nodes.size(), [&](std::size_t i) {
      // Bessel form: near y = 0 the tau integrand does not vanish at the
      // window edge and the trapezoid refines for ~1e6 nodes.
      vals[i] = nodes[i].weight == 0.0 ? 0.0 : appendix_closed_form(q, s, nodes[i].rho / j);
    });
    double total = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) total += nodes[i].weight * vals[i];
    out[jj] = total / mass;
  }
  return out;
}

}  // namespace microlocal
