#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace microlocal {

using cplx = std::complex<double>;

/// Centered uniform box grid [-L/2, L/2)^n with N samples per axis.
///
/// Sample i on an axis sits at x = (i - N/2) h with h = L/N. Spectral
/// coefficients use the same centered indexing: index i carries the
/// frequency xi = 2 pi (i - N/2) / L. Flat indices are row-major with
/// axis 0 varying slowest.
struct GridSpec {
  int dim = 1;
  int samples = 32;
  double extent = 1.0;

  /// Validated constructor: dim in {1,2,3}, samples a power of two >= 32,
  /// extent finite and positive.
  static GridSpec make(int dim, int samples, double extent);

  double spacing() const { return extent / samples; }
  std::size_t size() const;
  /// Nyquist radius pi N / L.
  double nyquist() const;
  double freq_step() const;
  double cell_volume() const;
  double freq_cell_volume() const;

  double position(int axis_index) const { return (axis_index - samples / 2) * spacing(); }
  double frequency(int axis_index) const;

  std::array<int, 3> multi_index(std::size_t flat) const;
  std::size_t flat_index(std::span<const int> idx) const;
  /// Spatial coordinates of a flat sample index.
  void point(std::size_t flat, std::span<double> out) const;
  /// Frequency vector of a flat lattice index.
  void wavevector(std::size_t flat, std::span<double> out) const;

  bool operator==(const GridSpec& other) const = default;
};

using PointFunction = std::function<cplx(std::span<const double>)>;
using RealPointFunction = std::function<double(std::span<const double>)>;

/// Complex samples of a (possibly vector-valued) field on a GridSpec.
/// Layout is channel-major: channel c occupies [c * N^n, (c+1) * N^n).
/// Instances are immutable; arithmetic helpers return new fields.
class GridField {
public:
  GridField(GridSpec spec, int channels, std::vector<cplx> samples);

  static GridField zeros(const GridSpec& spec, int channels = 1);
  static GridField sample(const GridSpec& spec, const PointFunction& f);
  /// Vector-valued sampling: `f(x, out)` writes `channels` values.
  static GridField sample_channels(
      const GridSpec& spec, int channels,
      const std::function<void(std::span<const double>, std::span<cplx>)>& f);
  static GridField stack(const std::vector<GridField>& scalar_fields);

  const GridSpec& spec() const { return spec_; }
  int channels() const { return channels_; }
  std::span<const cplx> samples() const { return data_; }
  std::span<const cplx> channel(int c) const;
  GridField channel_field(int c) const;
  cplx at(int c, std::size_t flat) const { return data_[c * spec_.size() + flat]; }

  double max_abs() const;

private:
  GridSpec spec_;
  int channels_;
  std::vector<cplx> data_;
};

/// Coefficients on the centered frequency lattice, same layout as GridField.
class SpectralField {
public:
  SpectralField(GridSpec spec, int channels, std::vector<cplx> coefficients);

  const GridSpec& spec() const { return spec_; }
  int channels() const { return channels_; }
  std::span<const cplx> coefficients() const { return data_; }
  std::span<const cplx> channel(int c) const;
  cplx at(int c, std::size_t flat) const { return data_[c * spec_.size() + flat]; }

private:
  GridSpec spec_;
  int channels_;
  std::vector<cplx> data_;
};

GridField operator+(const GridField& a, const GridField& b);
GridField operator-(const GridField& a, const GridField& b);
GridField operator*(cplx c, const GridField& a);
/// Pointwise product with a real weight sampled on the same grid.
GridField multiply(const GridField& u, std::span<const double> weight);
GridField multiply(const GridField& u, std::span<const cplx> weight);

/// Real weight sampled at every grid point.
std::vector<double> sample_weight(const GridSpec& spec, const RealPointFunction& f);

/// F u(xi) = int e^{-i x xi} u(x) dx, discretized as h^n times a DFT with
/// centered indexing.
SpectralField forward_transform(const GridField& u);
/// Exact lattice inverse: u(x) = (2 pi)^{-n} sum e^{i x xi} U(xi) dxi.
GridField inverse_transform(const SpectralField& U);

/// Spectral field from a multiplier evaluated at every lattice frequency
/// (single channel).
SpectralField spectral_from_function(const GridSpec& spec, const PointFunction& m);

/// H^r norm ((2 pi)^{-n} sum <xi>^{2r} |u^|^2 dxi)^{1/2}, summed over channels.
double sobolev_norm(const GridField& u, double r);
/// (sum |u|^2 h^n)^{1/2}, summed over channels.
double l2_norm(const GridField& u);
/// sum u conj(v) h^n, summed over channels.
cplx inner_product(const GridField& u, const GridField& v);

/// Fraction of spectral energy above Xi/2. Values near zero mean the field
/// is well resolved by the grid.
double bandwidth_utilization(const GridField& u);

/// e^{i xi0 . x} u(x).
GridField modulate(const GridField& u, std::span<const double> xi0);

/// Spectral partial derivative along `axis` (multiplier i xi_axis).
GridField spectral_derivative(const GridField& u, int axis);

/// Japanese bracket <xi> = (1 + |xi|^2)^{1/2}.
double japanese(std::span<const double> xi);

}  // namespace microlocal
