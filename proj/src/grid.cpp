#include "microlocal/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "fft.hpp"
#include "microlocal/error.hpp"
#include "microlocal/kernels.hpp"

namespace microlocal {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Centered indexing without moving data: with h = N/2 per axis,
// roll(FFT(roll(x)))[k] = (-1)^{h + k} FFT((-1)^j x)[k] on every axis. The
// pre- and post-factors are checkerboards and the constant folds into `scale`.
void checkerboard(const GridSpec& spec, cplx* data, double scale) {
  const int n = spec.samples;
  const std::size_t size = spec.size();
  const std::size_t rows = size / n;
  // Row parity comes from the leading indices; the inner axis alternates.
  for (std::size_t r = 0; r < rows; ++r) {
    std::size_t rest = r;
    int parity = 0;
    for (int a = 1; a < spec.dim; ++a) {
      parity += static_cast<int>(rest % n);
      rest /= n;
    }
    double sgn = (parity & 1) ? -scale : scale;
    cplx* row = data + r * n;
    for (int k = 0; k < n; ++k, sgn = -sgn) row[k] *= sgn;
  }
}

double roll_sign(const GridSpec& spec) {
  return ((spec.samples / 2) * spec.dim) % 2 ? -1.0 : 1.0;
}

void check_same(const GridField& a, const GridField& b) {
  require(a.spec() == b.spec(), errors::kInvalidArgument, "fields live on different grids");
  require(a.channels() == b.channels(), errors::kChannelMismatch,
          "fields have different channel counts");
}

}  // namespace

GridSpec GridSpec::make(int dim, int samples, double extent) {
  require(dim >= 1 && dim <= 3, errors::kInvalidArgument, "dim must be 1, 2 or 3");
  require(samples >= 32 && (samples & (samples - 1)) == 0, errors::kInvalidArgument,
          "samples must be a power of two >= 32");
  require(std::isfinite(extent) && extent > 0.0, errors::kInvalidArgument,
          "extent must be finite and positive");
  return GridSpec{dim, samples, extent};
}

std::size_t GridSpec::size() const {
  std::size_t s = 1;
  for (int a = 0; a < dim; ++a) s *= static_cast<std::size_t>(samples);
  return s;
}

double GridSpec::nyquist() const { return std::numbers::pi * samples / extent; }
double GridSpec::freq_step() const { return kTwoPi / extent; }
double GridSpec::cell_volume() const { return std::pow(spacing(), dim); }
double GridSpec::freq_cell_volume() const { return std::pow(freq_step(), dim); }
double GridSpec::frequency(int axis_index) const {
  return (axis_index - samples / 2) * freq_step();
}

std::array<int, 3> GridSpec::multi_index(std::size_t flat) const {
  std::array<int, 3> idx{0, 0, 0};
  for (int a = dim - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(flat % samples);
    flat /= samples;
  }
  return idx;
}

std::size_t GridSpec::flat_index(std::span<const int> idx) const {
  std::size_t flat = 0;
  for (int a = 0; a < dim; ++a) flat = flat * samples + static_cast<std::size_t>(idx[a]);
  return flat;
}

void GridSpec::point(std::size_t flat, std::span<double> out) const {
  const auto idx = multi_index(flat);
  for (int a = 0; a < dim; ++a) out[a] = position(idx[a]);
}

void GridSpec::wavevector(std::size_t flat, std::span<double> out) const {
  const auto idx = multi_index(flat);
  for (int a = 0; a < dim; ++a) out[a] = frequency(idx[a]);
}

GridField::GridField(GridSpec spec, int channels, std::vector<cplx> samples)
    : spec_(spec), channels_(channels), data_(std::move(samples)) {
  require(channels >= 1, errors::kInvalidArgument, "a field needs at least one channel");
  require(data_.size() == spec_.size() * channels, errors::kInvalidArgument,
          "sample count does not match grid and channels");
  for (const cplx& v : data_)
    require(std::isfinite(v.real()) && std::isfinite(v.imag()), errors::kInvalidArgument,
            "field samples must be finite");
}

GridField GridField::zeros(const GridSpec& spec, int channels) {
  return GridField(spec, channels, std::vector<cplx>(spec.size() * channels));
}

GridField GridField::sample(const GridSpec& spec, const PointFunction& f) {
  std::vector<cplx> data(spec.size());
  double x[3];
  for (std::size_t i = 0; i < data.size(); ++i) {
    spec.point(i, std::span<double>(x, spec.dim));
    data[i] = f(std::span<const double>(x, spec.dim));
  }
  return GridField(spec, 1, std::move(data));
}

GridField GridField::sample_channels(
    const GridSpec& spec, int channels,
    const std::function<void(std::span<const double>, std::span<cplx>)>& f) {
  const std::size_t size = spec.size();
  std::vector<cplx> data(size * channels);
  std::vector<cplx> values(channels);
  double x[3];
  for (std::size_t i = 0; i < size; ++i) {
    spec.point(i, std::span<double>(x, spec.dim));
    std::fill(values.begin(), values.end(), cplx(0.0));
    f(std::span<const double>(x, spec.dim), values);
    for (int c = 0; c < channels; ++c) data[c * size + i] = values[c];
  }
  return GridField(spec, channels, std::move(data));
}

GridField GridField::stack(const std::vector<GridField>& fields) {
  require(!fields.empty(), errors::kInvalidArgument, "nothing to stack");
  const GridSpec spec = fields.front().spec();
  int channels = 0;
  std::vector<cplx> data;
  for (const auto& f : fields) {
    require(f.spec() == spec, errors::kInvalidArgument, "stacked fields differ in grid");
    data.insert(data.end(), f.samples().begin(), f.samples().end());
    channels += f.channels();
  }
  return GridField(spec, channels, std::move(data));
}

std::span<const cplx> GridField::channel(int c) const {
  require(c >= 0 && c < channels_, errors::kChannelMismatch, "channel index out of range");
  return std::span<const cplx>(data_).subspan(c * spec_.size(), spec_.size());
}

GridField GridField::channel_field(int c) const {
  auto s = channel(c);
  return GridField(spec_, 1, std::vector<cplx>(s.begin(), s.end()));
}

double GridField::max_abs() const {
  double m = 0.0;
  for (const cplx& v : data_) m = std::max(m, std::abs(v));
  return m;
}

SpectralField::SpectralField(GridSpec spec, int channels, std::vector<cplx> coefficients)
    : spec_(spec), channels_(channels), data_(std::move(coefficients)) {
  require(channels >= 1 && data_.size() == spec_.size() * channels, errors::kInvalidArgument,
          "coefficient count does not match grid and channels");
}

std::span<const cplx> SpectralField::channel(int c) const {
  require(c >= 0 && c < channels_, errors::kChannelMismatch, "channel index out of range");
  return std::span<const cplx>(data_).subspan(c * spec_.size(), spec_.size());
}

GridField operator+(const GridField& a, const GridField& b) {
  check_same(a, b);
  std::vector<cplx> data(a.samples().begin(), a.samples().end());
  for (std::size_t i = 0; i < data.size(); ++i) data[i] += b.samples()[i];
  return GridField(a.spec(), a.channels(), std::move(data));
}

GridField operator-(const GridField& a, const GridField& b) {
  check_same(a, b);
  std::vector<cplx> data(a.samples().begin(), a.samples().end());
  for (std::size_t i = 0; i < data.size(); ++i) data[i] -= b.samples()[i];
  return GridField(a.spec(), a.channels(), std::move(data));
}

GridField operator*(cplx c, const GridField& a) {
  std::vector<cplx> data(a.samples().begin(), a.samples().end());
  for (auto& v : data) v *= c;
  return GridField(a.spec(), a.channels(), std::move(data));
}

GridField multiply(const GridField& u, std::span<const double> weight) {
  const std::size_t size = u.spec().size();
  require(weight.size() == size, errors::kInvalidArgument, "weight does not match grid");
  std::vector<cplx> data(u.samples().begin(), u.samples().end());
  for (int c = 0; c < u.channels(); ++c)
    for (std::size_t i = 0; i < size; ++i) data[c * size + i] *= weight[i];
  return GridField(u.spec(), u.channels(), std::move(data));
}

GridField multiply(const GridField& u, std::span<const cplx> weight) {
  const std::size_t size = u.spec().size();
  require(weight.size() == size, errors::kInvalidArgument, "weight does not match grid");
  std::vector<cplx> data(u.samples().begin(), u.samples().end());
  for (int c = 0; c < u.channels(); ++c)
    for (std::size_t i = 0; i < size; ++i) data[c * size + i] *= weight[i];
  return GridField(u.spec(), u.channels(), std::move(data));
}

std::vector<double> sample_weight(const GridSpec& spec, const RealPointFunction& f) {
  std::vector<double> w(spec.size());
  double x[3];
  for (std::size_t i = 0; i < w.size(); ++i) {
    spec.point(i, std::span<double>(x, spec.dim));
    w[i] = f(std::span<const double>(x, spec.dim));
  }
  return w;
}

SpectralField forward_transform(const GridField& u) {
  const GridSpec& spec = u.spec();
  const std::size_t size = spec.size();
  std::vector<cplx> data(u.samples().begin(), u.samples().end());
  const double scale = spec.cell_volume();
  for (int c = 0; c < u.channels(); ++c) {
    cplx* block = data.data() + c * size;
    checkerboard(spec, block, 1.0);
    detail::fft_inplace(block, spec.dim, spec.samples, -1);
    checkerboard(spec, block, scale * roll_sign(spec));
  }
  return SpectralField(spec, u.channels(), std::move(data));
}

GridField inverse_transform(const SpectralField& U) {
  const GridSpec& spec = U.spec();
  const std::size_t size = spec.size();
  std::vector<cplx> data(U.coefficients().begin(), U.coefficients().end());
  const double scale = 1.0 / std::pow(spec.extent, spec.dim);
  for (int c = 0; c < U.channels(); ++c) {
    cplx* block = data.data() + c * size;
    checkerboard(spec, block, 1.0);
    detail::fft_inplace(block, spec.dim, spec.samples, +1);
    checkerboard(spec, block, scale * roll_sign(spec));
  }
  return GridField(spec, U.channels(), std::move(data));
}

SpectralField spectral_from_function(const GridSpec& spec, const PointFunction& m) {
  std::vector<cplx> data(spec.size());
  double xi[3];
  for (std::size_t i = 0; i < data.size(); ++i) {
    spec.wavevector(i, std::span<double>(xi, spec.dim));
    data[i] = m(std::span<const double>(xi, spec.dim));
  }
  return SpectralField(spec, 1, std::move(data));
}

double sobolev_norm(const GridField& u, double r) {
  const auto U = forward_transform(u);
  const GridSpec& spec = u.spec();
  kernels::RadialCapQuery q;
  q.caps.push_back(kernels::CapTest{{1.0, 0.0, 0.0}, 0.0, true});
  q.edges = {0.0, std::numeric_limits<double>::infinity()};
  q.weight_order = r;
  const auto bins = kernels::radial_cap_bins(spec, U.coefficients(), U.channels(), q);
  return std::sqrt(bins[0] * spec.freq_cell_volume() / std::pow(kTwoPi, spec.dim));
}

double l2_norm(const GridField& u) {
  double s = 0.0;
  for (const cplx& v : u.samples()) s += std::norm(v);
  return std::sqrt(s * u.spec().cell_volume());
}

cplx inner_product(const GridField& u, const GridField& v) {
  check_same(u, v);
  cplx s = 0.0;
  for (std::size_t i = 0; i < u.samples().size(); ++i)
    s += u.samples()[i] * std::conj(v.samples()[i]);
  return s * u.spec().cell_volume();
}

double bandwidth_utilization(const GridField& u) {
  const auto U = forward_transform(u);
  kernels::RadialCapQuery q;
  q.caps.push_back(kernels::CapTest{{1.0, 0.0, 0.0}, 0.0, true});
  const double half = 0.5 * u.spec().nyquist();
  q.edges = {0.0, half, std::numeric_limits<double>::infinity()};
  const auto bins = kernels::radial_cap_bins(u.spec(), U.coefficients(), U.channels(), q);
  const double total = bins[0] + bins[1];
  return total > 0.0 ? bins[1] / total : 0.0;
}

GridField modulate(const GridField& u, std::span<const double> xi0) {
  const GridSpec& spec = u.spec();
  require(static_cast<int>(xi0.size()) == spec.dim, errors::kInvalidArgument,
          "modulation vector has wrong dimension");
  std::vector<cplx> phase(spec.size());
  double x[3];
  for (std::size_t i = 0; i < phase.size(); ++i) {
    spec.point(i, std::span<double>(x, spec.dim));
    double a = 0.0;
    for (int d = 0; d < spec.dim; ++d) a += x[d] * xi0[d];
    phase[i] = cplx(std::cos(a), std::sin(a));
  }
  return multiply(u, std::span<const cplx>(phase));
}

GridField spectral_derivative(const GridField& u, int axis) {
  const GridSpec& spec = u.spec();
  require(axis >= 0 && axis < spec.dim, errors::kInvalidArgument, "axis out of range");
  const auto U = forward_transform(u);
  std::vector<cplx> data(U.coefficients().begin(), U.coefficients().end());
  const std::size_t size = spec.size();
  for (std::size_t i = 0; i < size; ++i) {
    const int k = spec.multi_index(i)[axis];
    // The unpaired Nyquist mode has no odd partner; drop it so real fields
    // keep real derivatives.
    const cplx m = k == 0 ? cplx(0.0) : cplx(0.0, spec.frequency(k));
    for (int c = 0; c < u.channels(); ++c) data[c * size + i] *= m;
  }
  return inverse_transform(SpectralField(spec, u.channels(), std::move(data)));
}

double japanese(std::span<const double> xi) {
  double s = 1.0;
  for (double v : xi) s += v * v;
  return std::sqrt(s);
}

}  // namespace microlocal
