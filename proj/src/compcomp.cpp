#include "microlocal/compcomp.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>

#include "microlocal/csv.hpp"
#include "microlocal/error.hpp"
#include "microlocal/kernels.hpp"
#include "microlocal/psido.hpp"

namespace microlocal {
namespace {

constexpr double kPi = std::numbers::pi;

// Sample directions on S^{n-1}, flattened.
std::vector<double> sphere_samples(int dim, int count) {
  std::vector<double> out;
  if (dim == 1) return {1.0, -1.0};
  if (dim == 2) {
    for (int k = 0; k < count; ++k) {
      out.push_back(std::cos(2.0 * kPi * k / count));
      out.push_back(std::sin(2.0 * kPi * k / count));
    }
    return out;
  }
  for (const auto& cap : direction_cover(3, std::max(count, 4), kPi))
    out.insert(out.end(), cap.omega.begin(), cap.omega.end());
  return out;
}

Eigen::MatrixXcd to_matrix(const std::vector<cplx>& v, int rows, int cols) {
  Eigen::MatrixXcd M(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) M(i, j) = v[i * cols + j];
  return M;
}

struct SampleResult {
  double residual = 0.0;
  double scale = 0.0;
  bool kernel = false;
  bool borderline = false;
};

}  // namespace

ConstraintSymbol ConstraintSymbol::make(Symbol a, int dim) {
  require(dim >= 1 && dim <= 3, errors::kInvalidArgument, "dimension must be 1, 2 or 3");
  const std::vector<std::vector<double>> points = {{0.0, 0.0, 0.0}, {0.3, -0.2, 0.1}};
  const std::vector<std::vector<double>> freqs = {
      {1.0, 0.0, 0.0}, {0.6, -0.8, 0.0}, {-1.3, 2.1, 0.7}, {0.0, 0.0, -1.0}};
  for (const auto& x : points)
    for (const auto& f : freqs) {
      std::span<const double> xs(x.data(), dim), fs(f.data(), dim);
      double norm = 0.0;
      for (int i = 0; i < dim; ++i) norm += f[i] * f[i];
      if (std::sqrt(norm) < 1.0) continue;
      const auto base = a.evaluate(xs, fs);
      double scale = 0.0;
      for (const auto& v : base) scale = std::max(scale, std::abs(v));
      for (double t : {2.0, 7.0}) {
        std::vector<double> g(dim);
        for (int i = 0; i < dim; ++i) g[i] = t * f[i];
        const auto scaled = a.evaluate(xs, g);
        const double tr = std::pow(t, a.order());
        for (std::size_t i = 0; i < base.size(); ++i)
          require(std::abs(scaled[i] - tr * base[i]) <= 1e-10 * std::max(tr * scale, 1e-300),
                  errors::kInvalidArgument, "constraint symbol is not positively homogeneous");
      }
    }
  return ConstraintSymbol{std::move(a)};
}

std::vector<cplx> ConstraintSymbol::at(std::span<const double> x,
                                       std::span<const double> omega) const {
  return symbol.principal(x, omega);
}

QuadSymbol QuadSymbol::make(int dim, int channels, Fn b, bool hermitian, bool x_independent) {
  require(dim >= 1 && dim <= 3 && channels >= 1, errors::kInvalidArgument,
          "invalid quadratic symbol shape");
  require(static_cast<bool>(b), errors::kInvalidArgument, "quadratic symbol is empty");
  QuadSymbol q{dim, channels, std::move(b), hermitian, x_independent};
  if (hermitian) {
    const auto dirs = sphere_samples(dim, 16);
    const std::vector<double> xs = {0.0, 0.0, 0.0, 0.4, -0.7, 0.25};
    std::vector<cplx> m(channels * channels);
    for (int p = 0; p < 2; ++p)
      for (std::size_t d = 0; d < dirs.size() / dim; ++d) {
        q.b(std::span<const double>(xs.data() + 3 * p, dim),
            std::span<const double>(dirs.data() + d * dim, dim), m);
        for (int i = 0; i < channels; ++i)
          for (int j = 0; j < channels; ++j)
            require(std::abs(m[i * channels + j] - std::conj(m[j * channels + i])) <= 1e-12,
                    errors::kInvalidArgument, "quadratic symbol flagged hermitian is not");
      }
  }
  return q;
}

QuadSymbol QuadSymbol::constant(int dim, std::vector<cplx> matrix, bool hermitian) {
  const int k = static_cast<int>(std::lround(std::sqrt(static_cast<double>(matrix.size()))));
  require(k >= 1 && static_cast<std::size_t>(k * k) == matrix.size(), errors::kInvalidArgument,
          "constant quadratic symbol must be square");
  return make(
      dim, k,
      [matrix](std::span<const double>, std::span<const double>, std::span<cplx> out) {
        std::copy(matrix.begin(), matrix.end(), out.begin());
      },
      hermitian);
}

Symbol QuadSymbol::extension() const {
  const int k = channels;
  const int n = dim;
  const Fn fn = b;
  if (!x_independent) {
    AmplitudeFn amp = [fn, k, n](std::span<const double> x, std::span<const double> xi,
                                 std::span<cplx> out) {
      double r = 0.0;
      for (double v : xi) r += v * v;
      r = std::sqrt(r);
      if (r == 0.0) {
        // Direction average at the origin.
        const auto dirs = sphere_samples(n, 64);
        const std::size_t count = dirs.size() / n;
        std::vector<cplx> tmp(k * k);
        std::fill(out.begin(), out.end(), cplx(0.0));
        for (std::size_t d = 0; d < count; ++d) {
          fn(x, std::span<const double>(dirs.data() + d * n, n), tmp);
          for (int e = 0; e < k * k; ++e) out[e] += tmp[e] / static_cast<double>(count);
        }
        return;
      }
      double w[3];
      for (int a = 0; a < n; ++a) w[a] = xi[a] / r;
      fn(x, std::span<const double>(w, n), out);
    };
    MatrixFn principal = [fn, n](std::span<const double> omega, std::span<cplx> out) {
      const double zero[3] = {0.0, 0.0, 0.0};
      fn(std::span<const double>(zero, n), omega, out);
    };
    return Symbol::general(0.0, k, k, amp, principal);
  }
  const double zero[3] = {0.0, 0.0, 0.0};
  std::vector<cplx> origin(k * k, cplx(0.0));
  {
    const auto dirs = sphere_samples(n, 64);
    const std::size_t count = dirs.size() / n;
    std::vector<cplx> tmp(k * k);
    for (std::size_t d = 0; d < count; ++d) {
      fn(std::span<const double>(zero, n), std::span<const double>(dirs.data() + d * n, n), tmp);
      for (int e = 0; e < k * k; ++e) origin[e] += tmp[e] / static_cast<double>(count);
    }
  }
  MatrixFn principal = [fn, n](std::span<const double> omega, std::span<cplx> out) {
    const double x0[3] = {0.0, 0.0, 0.0};
    fn(std::span<const double>(x0, n), omega, out);
  };
  MatrixFn m = [principal, origin, n](std::span<const double> xi, std::span<cplx> out) {
    double r = 0.0;
    for (double v : xi) r += v * v;
    r = std::sqrt(r);
    if (r == 0.0) {
      std::copy(origin.begin(), origin.end(), out.begin());
      return;
    }
    double w[3];
    for (int a = 0; a < n; ++a) w[a] = xi[a] / r;
    principal(std::span<const double>(w, n), out);
  };
  return Symbol::matrix_multiplier(0.0, k, k, m, principal);
}

ConditionMode parse_condition_mode(const std::string& text) {
  if (text == "nonneg") return ConditionMode::nonneg;
  if (text == "zero") return ConditionMode::zero;
  fail(errors::kConfigError, "unknown condition mode '" + text + "'");
}

ConditionVerdict kernel_condition(const ConstraintSymbol& a, const QuadSymbol& b,
                                  std::span<const double> points,
                                  std::span<const double> directions, ConditionMode mode,
                                  std::uint64_t seed, int combinations) {
  require(a.cols() == b.channels, errors::kChannelMismatch,
          "constraint symbol columns do not match the quadratic symbol");
  const int n = b.dim;
  const int k = b.channels;
  require(points.size() % n == 0 && directions.size() % n == 0, errors::kInvalidArgument,
          "sample arrays must have stride dim");
  const std::size_t np = points.size() / n;
  const std::size_t nd = directions.size() / n;
  std::vector<SampleResult> results(np * nd);
  kernels::for_each_index(results.size(), [&](std::size_t s) {
    const auto x = points.subspan((s / nd) * n, n);
    const auto w = directions.subspan((s % nd) * n, n);
    const Eigen::MatrixXcd A = to_matrix(a.at(x, w), a.rows(), a.cols());
    std::vector<cplx> bv(k * k);
    b.b(x, w, bv);
    const Eigen::MatrixXcd B = to_matrix(bv, k, k);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A, Eigen::ComputeFullV);
    const auto& sigma = svd.singularValues();
    const double smax = sigma.size() > 0 ? sigma(0) : 0.0;
    std::vector<int> kernel;
    SampleResult res;
    for (int j = 0; j < k; ++j) {
      const double rel = j < sigma.size() ? (smax > 0.0 ? sigma(j) / smax : 0.0) : 0.0;
      if (rel <= kKernelThreshold)
        kernel.push_back(j);
      else if (rel <= kBorderlineThreshold)
        res.borderline = true;
    }
    res.scale = B.cwiseAbs().maxCoeff();
    if (kernel.empty()) {
      results[s] = res;
      return;
    }
    res.kernel = true;
    auto residual = [&](const Eigen::VectorXcd& z) {
      const cplx v = z.dot(B * z) / z.squaredNorm();
      return mode == ConditionMode::zero ? std::abs(v) : std::max(0.0, -v.real());
    };
    const Eigen::MatrixXcd& V = svd.matrixV();
    for (int j : kernel) res.residual = std::max(res.residual, residual(V.col(j)));
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(s >> 32)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> normal;
    for (int c = 0; c < combinations; ++c) {
      Eigen::VectorXcd z = Eigen::VectorXcd::Zero(k);
      for (int j : kernel) z += cplx(normal(rng), normal(rng)) * V.col(j);
      if (z.squaredNorm() > 0.0) res.residual = std::max(res.residual, residual(z));
    }
    results[s] = res;
  });
  ConditionVerdict v;
  v.samples = results.size();
  for (const auto& r : results) {
    v.worst_residual = std::max(v.worst_residual, r.residual);
    if (r.kernel) ++v.kernel_samples;
    if (r.borderline) ++v.borderline;
    if (r.residual > 1e-9 * std::max(1.0, r.scale)) v.pass = false;
  }
  return v;
}

cplx quadratic_density(const QuadSymbol& b, const GridField& u, const BumpCutoff& chi) {
  require(b.channels == u.channels(), errors::kChannelMismatch,
          "quadratic symbol does not match the field's channels");
  require(b.dim == u.spec().dim && static_cast<int>(chi.center.size()) == b.dim,
          errors::kInvalidArgument, "dimension mismatch");
  const GridField w = quantize(b.extension(), u);
  const auto weight = sample_cutoff(u.spec(), Cutoff(chi));
  return inner_product(multiply(w, std::span<const double>(weight)), u);
}

CompCompReport compcomp_run(const SequenceSpec& seq, const ConstraintSymbol& a,
                            const QuadSymbol& b, const BumpCutoff& chi, double r,
                            const CompCompOptions& options) {
  require(!seq.members.empty(), errors::kEmptySequence, "sequence has no members");
  require(a.cols() == seq.channels() && b.channels == seq.channels(), errors::kChannelMismatch,
          "symbols do not match the sequence's channels");
  const GridSpec& spec = seq.spec();
  CompCompReport rep;
  rep.parameters = seq.parameters;

  std::vector<GridField> constrained;
  for (const auto& u : seq.members) constrained.push_back(quantize(a.symbol, u));
  const GridField constrained_limit = quantize(a.symbol, seq.limit);
  const ScanLattice lattice = options.lattice ? *options.lattice : kr_lattice(spec);
  const auto radii = options.radii.empty() ? default_radii(spec) : options.radii;
  // Tails of A(u_n - u) below 1e-10 of the largest |u_n - u|^2 count as zero.
  WfcOptions wfc;
  for (const auto& d : seq.differences())
    wfc.absolute_floor = std::max(wfc.absolute_floor, std::pow(l2_norm(d), 2));
  wfc.absolute_floor *= 1e-10;
  rep.proxy = wfc_scan(constrained, constrained_limit, -r, lattice, radii, wfc);
  if (rep.proxy.count(TailVerdict::noncompact) > 0)
    rep.proxy_verdict = TailVerdict::noncompact;
  else if (rep.proxy.count(TailVerdict::inconclusive) > 0)
    rep.proxy_verdict = TailVerdict::inconclusive;

  std::vector<double> points;
  for (const auto& w : lattice.windows) {
    const auto c = cutoff_center(w);
    points.insert(points.end(), c.begin(), c.end());
  }
  const auto dirs = sphere_samples(spec.dim, options.condition_directions);
  rep.condition = kernel_condition(a, b, points, dirs, options.mode, options.seed);

  const auto weight = sample_cutoff(spec, Cutoff(chi));
  rep.limit_density = quadratic_density(b, seq.limit, chi);
  for (const auto& u : seq.members) {
    const cplx d = quadratic_density(b, u, chi);
    rep.densities.push_back(d);
    rep.gaps.push_back(std::abs(d - rep.limit_density));
    rep.scale = std::max(
        rep.scale, inner_product(multiply(u, std::span<const double>(weight)), u).real());
  }
  rep.gap = rep.gaps.back();
  return rep;
}

DivCurlPreset div_curl_preset(std::vector<int> freqs, bool passing) {
  require(!freqs.empty(), errors::kEmptySequence, "no frequencies given");
  for (std::size_t i = 0; i < freqs.size(); ++i)
    require(freqs[i] > 0 && (i == 0 || freqs[i] > freqs[i - 1]), errors::kInvalidArgument,
            "frequencies must be positive and strictly increasing");
  const GridSpec spec = GridSpec::make(2, 512, 2.0 * kPi);
  constexpr double kWidth = 0.6;
  std::vector<GridField> members;
  for (int m : freqs) {
    const GridField v = GridField::sample(spec, [m](std::span<const double> x) {
      const double beta = std::exp(-(x[0] * x[0] + x[1] * x[1]) / (2.0 * kWidth * kWidth));
      return cplx(std::sin(m * x[0]) * beta / m);
    });
    members.push_back(GridField::stack({spectral_derivative(v, 0), spectral_derivative(v, 1)}));
  }
  DivCurlPreset p{explicit_sequence(std::move(members), GridField::zeros(spec, 2)),
                  ConstraintSymbol::make(
                      Symbol::polyhomogeneous(
                          1.0, 1, 2,
                          [](std::span<const double> w, std::span<cplx> out) {
                            out[0] = cplx(0.0, -w[1]);
                            out[1] = cplx(0.0, w[0]);
                          }),
                      2),
                  {},
                  BumpCutoff::make({0.0, 0.0}, 1.5, 2.5),
                  {1.0, 0.0}};
  p.sequence.kind = SequenceSpec::Kind::oscillation;
  p.sequence.parameters = std::move(freqs);
  if (passing) {
    p.b = QuadSymbol::make(
        2, 2,
        [](std::span<const double>, std::span<const double> w, std::span<cplx> out) {
          out[0] = 1.0 - w[0] * w[0];
          out[1] = -w[0] * w[1];
          out[2] = -w[1] * w[0];
          out[3] = 1.0 - w[1] * w[1];
        },
        true);
  } else {
    p.b = QuadSymbol::constant(2, {1.0, 0.0, 0.0, 0.0}, true);
  }
  return p;
}

void write_compcomp_csv(std::ostream& out, const CompCompReport& report) {
  CsvWriter w(out);
  w.header({"n", "density_re", "density_im", "gap"});
  for (std::size_t i = 0; i < report.densities.size(); ++i)
    w.row({fmt_int(report.parameters[i]), fmt_real(report.densities[i].real()),
           fmt_real(report.densities[i].imag()), fmt_real(report.gaps[i])});
}

}  // namespace microlocal
