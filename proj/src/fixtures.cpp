#include "microlocal/fixtures.hpp"

#include <cmath>
#include <numbers>

namespace microlocal::fixtures {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kJumpWidth = 2.5;

double gaussian(std::span<const double> x, double width) {
  double r2 = 0.0;
  for (double v : x) r2 += v * v;
  return std::exp(-r2 / (2.0 * width * width));
}

}  // namespace

GridSpec jump_grid() { return GridSpec::make(2, 1024, 8.0 * kPi); }
GridSpec line_grid() { return GridSpec::make(1, 1024, 8.0 * kPi); }
GridSpec oscillation_grid() { return GridSpec::make(2, 512, 2.0 * kPi); }

GridField band_limited_step(const GridSpec& spec, int axis) {
  const int n = spec.samples;
  // Square wave along one axis, evaluated on that axis's samples.
  std::vector<double> line(n, 0.5);
  for (int k = 1; k < n / 2; k += 2) {
    const double c = 2.0 / (kPi * k);
    const double w = 2.0 * kPi * k / spec.extent;
    for (int i = 0; i < n; ++i) line[i] += c * std::sin(w * spec.position(i));
  }
  std::vector<cplx> data(spec.size());
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = line[spec.multi_index(i)[axis]];
  return GridField(spec, 1, std::move(data));
}

GridField jump_field(const GridSpec& spec) {
  const auto g = sample_weight(spec, [](std::span<const double> x) { return gaussian(x, kJumpWidth); });
  return multiply(band_limited_step(spec, 0), std::span<const double>(g));
}

GridField smooth_control(const GridSpec& spec) {
  return GridField::sample(spec,
                           [](std::span<const double> x) { return cplx(gaussian(x, kJumpWidth)); });
}

ScanLattice jump_lattice() {
  LatticeOptions o;
  o.stride = 4.5;
  o.reach = 4.5;
  o.r_inner = 0.5;
  o.r_outer = 4.5;
  o.angular_count = 8;
  o.half_angle = 0.42;
  return regular_lattice(2, o);
}

BumpCutoff wide_window(int dim) { return BumpCutoff::make(std::vector<double>(dim, 0.0), 0.5, 4.5); }

GridField oscillation_profile() {
  const BumpCutoff b = BumpCutoff::make({0.0, 0.0}, 0.05, 0.35);
  return GridField::sample(oscillation_grid(),
                           [&](std::span<const double> x) { return cplx(b.value(x)); });
}

SequenceSpec oscillation_fixture(std::vector<int> freqs) {
  return oscillation_sequence(oscillation_profile(), {1, 0}, std::move(freqs));
}

PointFunction concentration_profile() {
  // Widths 2 and 1; int exp(-y1^2 / 4 - y2^2) = 2 pi. The narrow axis sets
  // the band use: at scale 32 on the 512 grid the spectrum stays below Xi/2.
  const double c = 1.0 / std::sqrt(2.0 * kPi);
  return [c](std::span<const double> y) {
    return cplx(c * std::exp(-0.125 * y[0] * y[0] - 0.5 * y[1] * y[1]));
  };
}

SequenceSpec concentration_fixture(std::vector<int> scales) {
  return concentration_sequence(oscillation_grid(), concentration_profile(), {0.1, -0.1},
                                std::move(scales));
}

DefectBins oscillation_bins() { return DefectBins::make(2, -1.8, 1.8, 3, 0.2, 8); }

ScanLattice oscillation_lattice() { return matching_lattice(oscillation_bins(), 0.4, 0.9, 0.42); }

}  // namespace microlocal::fixtures
