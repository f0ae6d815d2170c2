#include "microlocal/symbol.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <sstream>

#include "microlocal/cutoff.hpp"
#include "microlocal/error.hpp"

namespace microlocal {
namespace {

constexpr double kPi = std::numbers::pi;

cplx spatial_value(const PointFunction& f, std::span<const double> x) {
  return f ? f(x) : cplx(1.0);
}

PointFunction product(PointFunction a, PointFunction b) {
  if (!a) return b;
  if (!b) return a;
  return [a = std::move(a), b = std::move(b)](std::span<const double> x) { return a(x) * b(x); };
}

PointFunction conjugated(PointFunction f) {
  if (!f) return f;
  return [f = std::move(f)](std::span<const double> x) { return std::conj(f(x)); };
}

MatrixFn identity_matrix(int k) {
  return [k](std::span<const double>, std::span<cplx> out) {
    std::fill(out.begin(), out.end(), cplx(0.0));
    for (int i = 0; i < k; ++i) out[i * k + i] = 1.0;
  };
}

MatrixFn dagger(MatrixFn f, int rows, int cols) {
  if (!f) return f;
  return [f = std::move(f), rows, cols](std::span<const double> v, std::span<cplx> out) {
    std::vector<cplx> m(static_cast<std::size_t>(rows) * cols);
    f(v, m);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) out[c * rows + r] = std::conj(m[r * cols + c]);
  };
}

// (rows x mid) * (mid x cols) of two matrix functions at the same argument.
MatrixFn matmul(MatrixFn a, MatrixFn b, int rows, int mid, int cols) {
  return [a = std::move(a), b = std::move(b), rows, mid, cols](std::span<const double> v,
                                                               std::span<cplx> out) {
    std::vector<cplx> ma(static_cast<std::size_t>(rows) * mid), mb(static_cast<std::size_t>(mid) * cols);
    a(v, ma);
    b(v, mb);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) {
        cplx s = 0.0;
        for (int k = 0; k < mid; ++k) s += ma[r * mid + k] * mb[k * cols + c];
        out[r * cols + c] = s;
      }
  };
}

// rho(|xi|) |xi|^order h(xi/|xi|).
MatrixFn homogeneous_extension(MatrixFn h, double order, int entries) {
  return [h = std::move(h), order, entries](std::span<const double> xi, std::span<cplx> out) {
    double n2 = 0.0;
    for (double v : xi) n2 += v * v;
    const double n = std::sqrt(n2);
    const double rho = radial_cutoff(n);
    if (rho == 0.0) {
      std::fill(out.begin(), out.begin() + entries, cplx(0.0));
      return;
    }
    double omega[3];
    for (std::size_t a = 0; a < xi.size(); ++a) omega[a] = xi[a] / n;
    h(std::span<const double>(omega, xi.size()), out);
    const double scale = rho * std::pow(n, order);
    for (int i = 0; i < entries; ++i) out[i] *= scale;
  };
}

}  // namespace

double radial_cutoff(double t) { return smooth_step((0.5 - t) / 0.25); }

Symbol Symbol::identity(int channels) {
  require(channels >= 1, errors::kInvalidArgument, "channels must be positive");
  Symbol s;
  s.rows_ = s.cols_ = channels;
  s.form_ = Form::multiplier;
  s.terms_.push_back({{}, {}, identity_matrix(channels), identity_matrix(channels)});
  s.hermitian_ = true;
  return s;
}

Symbol Symbol::zero(int rows, int cols) {
  require(rows >= 1 && cols >= 1, errors::kInvalidArgument, "channels must be positive");
  Symbol s;
  s.rows_ = rows;
  s.cols_ = cols;
  s.form_ = Form::multiplier;
  auto z = [](std::span<const double>, std::span<cplx> out) {
    std::fill(out.begin(), out.end(), cplx(0.0));
  };
  s.terms_.push_back({{}, {}, z, z});
  s.hermitian_ = rows == cols;
  return s;
}

Symbol Symbol::japanese_bracket(double power) {
  Symbol s = multiplier(
      power, [power](std::span<const double> xi) { return cplx(std::pow(japanese(xi), power)); },
      [](std::span<const double>) { return cplx(1.0); });
  s.hermitian_ = true;
  return s;
}

Symbol Symbol::multiplier(double order, std::function<cplx(std::span<const double>)> m,
                          std::function<cplx(std::span<const double>)> principal) {
  require(static_cast<bool>(m), errors::kInvalidArgument, "multiplier function is empty");
  MatrixFn mf = [m](std::span<const double> xi, std::span<cplx> out) { out[0] = m(xi); };
  MatrixFn pf;
  if (principal)
    pf = [principal](std::span<const double> w, std::span<cplx> out) { out[0] = principal(w); };
  return matrix_multiplier(order, 1, 1, std::move(mf), std::move(pf));
}

Symbol Symbol::matrix_multiplier(double order, int rows, int cols, MatrixFn m, MatrixFn principal) {
  require(rows >= 1 && cols >= 1 && static_cast<bool>(m), errors::kInvalidArgument,
          "invalid matrix multiplier");
  Symbol s;
  s.order_ = order;
  s.rows_ = rows;
  s.cols_ = cols;
  s.form_ = Form::multiplier;
  if (!principal) {
    // Numerical principal part: t^{-order} m(t omega) at large t.
    principal = [m, order, n = rows * cols](std::span<const double> w, std::span<cplx> out) {
      constexpr double t = 1e6;
      double xi[3];
      for (std::size_t a = 0; a < w.size(); ++a) xi[a] = t * w[a];
      m(std::span<const double>(xi, w.size()), out);
      const double scale = std::pow(t, -order);
      for (int i = 0; i < n; ++i) out[i] *= scale;
    };
  }
  s.terms_.push_back({{}, {}, std::move(m), std::move(principal)});
  return s;
}

Symbol Symbol::spatial(PointFunction psi, int channels) {
  Symbol s = identity(channels);
  s.form_ = Form::spatial;
  s.terms_[0].left = std::move(psi);
  s.hermitian_ = false;
  return s;
}

Symbol Symbol::separable(PointFunction psi, const Symbol& m) {
  require(m.form_ != Form::general, errors::kInvalidArgument,
          "separable symbols need a multiplier part");
  Symbol s = m;
  s.form_ = Form::separable;
  for (auto& t : s.terms_) t.left = product(psi, t.left);
  s.hermitian_ = false;
  return s;
}

Symbol Symbol::sandwiched(PointFunction psi, const Symbol& m) {
  require(m.form_ != Form::general, errors::kInvalidArgument,
          "sandwiched symbols need a multiplier part");
  Symbol s = m;
  s.form_ = Form::separable;
  for (auto& t : s.terms_) {
    t.left = product(psi, t.left);
    t.right = product(t.right, psi);
  }
  return s;
}

Symbol Symbol::polyhomogeneous(double order, int rows, int cols, MatrixFn a0, PointFunction psi) {
  require(rows >= 1 && cols >= 1 && static_cast<bool>(a0), errors::kInvalidArgument,
          "invalid polyhomogeneous symbol");
  Symbol s;
  s.order_ = order;
  s.rows_ = rows;
  s.cols_ = cols;
  s.form_ = Form::polyhomogeneous;
  s.terms_.push_back({std::move(psi), {}, homogeneous_extension(a0, order, rows * cols), a0});
  return s;
}

Symbol Symbol::general(double order, int rows, int cols, AmplitudeFn a, MatrixFn principal) {
  require(rows >= 1 && cols >= 1 && static_cast<bool>(a), errors::kInvalidArgument,
          "invalid general symbol");
  Symbol s;
  s.order_ = order;
  s.rows_ = rows;
  s.cols_ = cols;
  s.form_ = Form::general;
  s.general_ = std::move(a);
  s.general_principal_ = std::move(principal);
  return s;
}

double Symbol::mark_hermitian(int dim, std::span<const double> points,
                              std::span<const double> directions) {
  require(rows_ == cols_, errors::kChannelMismatch, "only square symbols can be hermitian");
  require(dim >= 1 && points.size() % dim == 0 && directions.size() % dim == 0,
          errors::kInvalidArgument, "samples must be flattened with stride dim");
  const int k = rows_;
  double worst = 0.0;
  double size = 1.0;
  std::vector<cplx> m(static_cast<std::size_t>(k) * k);
  for (std::size_t p = 0; p < points.size(); p += dim)
    for (std::size_t d = 0; d < directions.size(); d += dim) {
      principal(points.subspan(p, dim), directions.subspan(d, dim), m);
      for (int r = 0; r < k; ++r)
        for (int c = 0; c < k; ++c) {
          worst = std::max(worst, std::abs(m[r * k + c] - std::conj(m[c * k + r])));
          size = std::max(size, std::abs(m[r * k + c]));
        }
    }
  hermitian_ = worst <= 1e-12 * size;
  return worst;
}

void Symbol::evaluate(std::span<const double> x, std::span<const double> xi,
                      std::span<cplx> out) const {
  const std::size_t n = static_cast<std::size_t>(rows_) * cols_;
  if (form_ == Form::general) {
    general_(x, xi, out);
    return;
  }
  std::fill(out.begin(), out.begin() + n, cplx(0.0));
  std::vector<cplx> m(n);
  for (const auto& t : terms_) {
    const cplx s = spatial_value(t.left, x) * spatial_value(t.right, x);
    if (s == cplx(0.0)) continue;
    t.freq(xi, m);
    for (std::size_t i = 0; i < n; ++i) out[i] += s * m[i];
  }
}

void Symbol::principal(std::span<const double> x, std::span<const double> omega,
                       std::span<cplx> out) const {
  const std::size_t n = static_cast<std::size_t>(rows_) * cols_;
  if (form_ == Form::general) {
    if (general_principal_) {
      general_principal_(omega, out);
      return;
    }
    // Numerical limit t^{-order} a(x, t omega).
    constexpr double t = 1e6;
    double xi[3];
    for (std::size_t a = 0; a < omega.size(); ++a) xi[a] = t * omega[a];
    general_(x, std::span<const double>(xi, omega.size()), out);
    const double scale = std::pow(t, -order_);
    for (std::size_t i = 0; i < n; ++i) out[i] *= scale;
    return;
  }
  std::fill(out.begin(), out.begin() + n, cplx(0.0));
  std::vector<cplx> h(n);
  for (const auto& t : terms_) {
    const cplx s = spatial_value(t.left, x) * spatial_value(t.right, x);
    if (s == cplx(0.0)) continue;
    t.principal(omega, h);
    for (std::size_t i = 0; i < n; ++i) out[i] += s * h[i];
  }
}

std::vector<cplx> Symbol::evaluate(std::span<const double> x, std::span<const double> xi) const {
  std::vector<cplx> out(static_cast<std::size_t>(rows_) * cols_);
  evaluate(x, xi, out);
  return out;
}

std::vector<cplx> Symbol::principal(std::span<const double> x,
                                    std::span<const double> omega) const {
  std::vector<cplx> out(static_cast<std::size_t>(rows_) * cols_);
  principal(x, omega, out);
  return out;
}

Symbol Symbol::operator+(const Symbol& other) const {
  require(rows_ == other.rows_ && cols_ == other.cols_, errors::kChannelMismatch,
          "summed symbols differ in shape");
  require(form_ != Form::general && other.form_ != Form::general, errors::kInvalidArgument,
          "general symbols cannot be summed termwise");
  Symbol s = *this;
  s.order_ = std::max(order_, other.order_);
  s.form_ = form_ == other.form_ ? form_ : Form::separable;
  s.terms_.insert(s.terms_.end(), other.terms_.begin(), other.terms_.end());
  s.hermitian_ = hermitian_ && other.hermitian_;
  return s;
}

Symbol Symbol::scaled(cplx c) const {
  Symbol s = *this;
  if (form_ == Form::general) {
    s.general_ = [a = general_, c, n = rows_ * cols_](std::span<const double> x,
                                                       std::span<const double> xi,
                                                       std::span<cplx> out) {
      a(x, xi, out);
      for (int i = 0; i < n; ++i) out[i] *= c;
    };
    s.general_principal_ = {};
  } else {
    for (auto& t : s.terms_)
      t.left = product([c](std::span<const double>) { return c; }, t.left);
  }
  s.hermitian_ = hermitian_ && c.imag() == 0.0;
  return s;
}

Symbol principal_compose(const Symbol& a, const Symbol& b) {
  require(a.cols() == b.rows(), errors::kChannelMismatch,
          "composition needs a.cols == b.rows (" + std::to_string(a.cols()) + " vs " +
              std::to_string(b.rows()) + ")");
  const int rows = a.rows();
  const int mid = a.cols();
  const int cols = b.cols();
  const double order = a.order() + b.order();
  if (a.form() == Symbol::Form::general || b.form() == Symbol::Form::general) {
    AmplitudeFn amp = [a, b, rows, mid, cols, order](std::span<const double> x,
                                                     std::span<const double> xi,
                                                     std::span<cplx> out) {
      double n2 = 0.0;
      for (double v : xi) n2 += v * v;
      const double n = std::sqrt(n2);
      const double rho = radial_cutoff(n);
      std::fill(out.begin(), out.begin() + rows * cols, cplx(0.0));
      if (rho == 0.0) return;
      double w[3];
      for (std::size_t i = 0; i < xi.size(); ++i) w[i] = xi[i] / n;
      const std::span<const double> omega(w, xi.size());
      const auto pa = a.principal(x, omega);
      const auto pb = b.principal(x, omega);
      const double scale = rho * std::pow(n, order);
      for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
          cplx s = 0.0;
          for (int k = 0; k < mid; ++k) s += pa[r * mid + k] * pb[k * cols + c];
          out[r * cols + c] = scale * s;
        }
    };
    return Symbol::general(order, rows, cols, std::move(amp));
  }
  Symbol s;
  s.order_ = order;
  s.rows_ = rows;
  s.cols_ = cols;
  s.form_ = Symbol::Form::polyhomogeneous;
  for (const auto& ta : a.terms())
    for (const auto& tb : b.terms()) {
      MatrixFn h = matmul(ta.principal, tb.principal, rows, mid, cols);
      PointFunction left = product(product(ta.left, ta.right), product(tb.left, tb.right));
      s.terms_.push_back({std::move(left), {}, homogeneous_extension(h, order, rows * cols), h});
    }
  return s;
}

Symbol adjoint_symbol(const Symbol& a) {
  Symbol s;
  s.order_ = a.order_;
  s.rows_ = a.cols_;
  s.cols_ = a.rows_;
  s.form_ = a.form_;
  s.hermitian_ = a.hermitian_;
  if (a.form_ == Symbol::Form::general) {
    s.general_ = [g = a.general_, rows = a.rows_, cols = a.cols_](std::span<const double> x,
                                                                   std::span<const double> xi,
                                                                   std::span<cplx> out) {
      std::vector<cplx> m(static_cast<std::size_t>(rows) * cols);
      g(x, xi, m);
      for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) out[c * rows + r] = std::conj(m[r * cols + c]);
    };
    s.general_principal_ = dagger(a.general_principal_, a.rows_, a.cols_);
    return s;
  }
  for (const auto& t : a.terms_)
    s.terms_.push_back({conjugated(t.right), conjugated(t.left), dagger(t.freq, a.rows_, a.cols_),
                        dagger(t.principal, a.rows_, a.cols_)});
  return s;
}

DirectionTable DirectionTable::parse(std::istream& in, int rows, int cols) {
  require(rows >= 1 && cols >= 1, errors::kInvalidArgument, "table channels must be positive");
  DirectionTable t;
  t.rows = rows;
  t.cols = cols;
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), errors::kFormatError,
          "direction table is empty");
  const auto count_fields = [](const std::string& l) {
    return static_cast<int>(std::count(l.begin(), l.end(), ',')) + 1;
  };
  const int fields = count_fields(line);
  t.dim = fields - 2 * rows * cols;
  require(t.dim >= 1 && t.dim <= 3, errors::kFormatError,
          "direction table header must list 1 to 3 omega columns and re,im per channel pair");
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    require(count_fields(line) == fields, errors::kFormatError,
            "direction table row has the wrong number of fields");
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> nums;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        nums.push_back(std::stod(cell, &used));
        require(cell.find_first_not_of(" \t", used) == std::string::npos, errors::kFormatError,
                "trailing text in direction table cell");
      } catch (const std::logic_error&) {
        fail(errors::kFormatError, "bad number in direction table: '" + cell + "'");
      }
    }
    std::vector<double> omega(nums.begin(), nums.begin() + t.dim);
    double n = 0.0;
    for (double v : omega) n += v * v;
    n = std::sqrt(n);
    require(n > 0.0, errors::kFormatError, "direction table contains a zero direction");
    for (double& v : omega) v /= n;
    std::vector<cplx> vals(static_cast<std::size_t>(rows) * cols);
    for (int i = 0; i < rows * cols; ++i)
      vals[i] = cplx(nums[t.dim + 2 * i], nums[t.dim + 2 * i + 1]);
    t.directions.push_back(std::move(omega));
    t.values.push_back(std::move(vals));
  }
  require(!t.directions.empty(), errors::kFormatError, "direction table has no rows");
  if (t.dim == 2) {
    std::vector<std::size_t> order(t.directions.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    auto angle = [&](std::size_t i) {
      return std::atan2(t.directions[i][1], t.directions[i][0]);
    };
    std::sort(order.begin(), order.end(), [&](auto l, auto r) { return angle(l) < angle(r); });
    DirectionTable sorted = t;
    for (std::size_t i = 0; i < order.size(); ++i) {
      sorted.directions[i] = t.directions[order[i]];
      sorted.values[i] = t.values[order[i]];
    }
    return sorted;
  }
  return t;
}

DirectionTable DirectionTable::load(const std::string& path, int rows, int cols) {
  std::ifstream in(path);
  require(static_cast<bool>(in), errors::kFormatError, "cannot open direction table " + path);
  return parse(in, rows, cols);
}

void DirectionTable::lookup(std::span<const double> omega, std::span<cplx> out) const {
  const std::size_t n = static_cast<std::size_t>(rows) * cols;
  if (dim == 2 && directions.size() >= 2) {
    const double a = std::atan2(omega[1], omega[0]);
    const std::size_t m = directions.size();
    auto ang = [&](std::size_t i) { return std::atan2(directions[i][1], directions[i][0]); };
    // Find the bracketing pair cyclically.
    std::size_t hi = 0;
    while (hi < m && ang(hi) <= a) ++hi;
    const std::size_t lo_i = (hi + m - 1) % m;
    const std::size_t hi_i = hi % m;
    double a_lo = ang(lo_i), a_hi = ang(hi_i);
    double x = a;
    if (hi == 0 || hi == m) {
      // Wrapped interval across the branch cut.
      if (a_hi <= a_lo) a_hi += 2.0 * kPi;
      if (x < a_lo) x += 2.0 * kPi;
    }
    const double span = a_hi - a_lo;
    const double w = span > 0.0 ? (x - a_lo) / span : 0.0;
    for (std::size_t i = 0; i < n; ++i)
      out[i] = (1.0 - w) * values[lo_i][i] + w * values[hi_i][i];
    return;
  }
  std::size_t best = 0;
  double best_dot = -2.0;
  for (std::size_t i = 0; i < directions.size(); ++i) {
    double d = 0.0;
    for (int a = 0; a < dim; ++a) d += directions[i][a] * omega[a];
    if (d > best_dot) {
      best_dot = d;
      best = i;
    }
  }
  for (std::size_t i = 0; i < n; ++i) out[i] = values[best][i];
}

Symbol polyhomogeneous_from_table(double order, std::shared_ptr<const DirectionTable> table) {
  require(static_cast<bool>(table), errors::kInvalidArgument, "missing direction table");
  const int rows = table->rows;
  const int cols = table->cols;
  MatrixFn a0 = [table](std::span<const double> w, std::span<cplx> out) { table->lookup(w, out); };
  return Symbol::polyhomogeneous(order, rows, cols, std::move(a0));
}

}  // namespace microlocal
