#include "microlocal/seminorm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "microlocal/csv.hpp"
#include "microlocal/error.hpp"
#include "microlocal/kernels.hpp"

namespace microlocal {
namespace {

double two_pi_power(int n) { return std::pow(2.0 * std::numbers::pi, n); }

void check_dims(const GridField& u, const Cutoff& phi) {
  require(cutoff_dim(phi) == u.spec().dim, errors::kInvalidArgument,
          "cutoff dimension does not match grid");
}

int first_octave(double radial_floor) {
  return radial_floor <= 1.0 ? 0 : static_cast<int>(std::ceil(std::log2(radial_floor)));
}

// Largest j with 2^{j+1} <= Xi.
int top_octave(const GridSpec& spec) {
  return static_cast<int>(std::floor(std::log2(spec.nyquist()))) - 1;
}

}  // namespace

SpectralField localized_spectrum(const GridField& u, const Cutoff& phi) {
  check_dims(u, phi);
  const auto w = sample_cutoff(u.spec(), phi);
  return forward_transform(multiply(u, std::span<const double>(w)));
}

double cone_seminorm(const GridField& u, double r, const Cutoff& phi, const DirectionCap& cap,
                     double radial_floor) {
  return cone_seminorms(u, r, phi, std::span<const DirectionCap>(&cap, 1), radial_floor).front();
}

std::vector<double> cone_seminorms(const GridField& u, double r, const Cutoff& phi,
                                  std::span<const DirectionCap> caps, double radial_floor) {
  require(radial_floor >= 0.0, errors::kInvalidArgument, "radial floor must be nonnegative");
  kernels::RadialCapQuery q;
  for (const auto& cap : caps) {
    require(static_cast<int>(cap.omega.size()) == u.spec().dim, errors::kInvalidArgument,
            "cap dimension does not match grid");
    q.caps.push_back(cap.test());
  }
  const auto U = localized_spectrum(u, phi);
  q.edges = {radial_floor, std::numeric_limits<double>::infinity()};
  q.weight_order = r;
  const auto bins = kernels::radial_cap_bins(u.spec(), U.coefficients(), U.channels(), q);
  std::vector<double> out(caps.size());
  for (std::size_t c = 0; c < caps.size(); ++c)
    out[c] = std::sqrt(bins[c] * u.spec().freq_cell_volume() / two_pi_power(u.spec().dim));
  return out;
}

double masked_seminorm(const GridField& u, double r, const Cutoff& phi,
                       std::span<const unsigned char> mask) {
  const GridSpec& spec = u.spec();
  require(mask.size() == spec.size(), errors::kInvalidArgument, "mask does not match grid");
  const auto U = localized_spectrum(u, phi);
  double total = 0.0;
  double xi[3];
  for (std::size_t i = 0; i < spec.size(); ++i) {
    if (!mask[i]) continue;
    spec.wavevector(i, std::span<double>(xi, spec.dim));
    double e = 0.0;
    for (int c = 0; c < U.channels(); ++c) e += std::norm(U.at(c, i));
    total += std::pow(japanese(std::span<const double>(xi, spec.dim)), 2.0 * r) * e;
  }
  return std::sqrt(total * spec.freq_cell_volume() / two_pi_power(spec.dim));
}

double sup_seminorm(const GridField& u, double nu, const Cutoff& phi, const DirectionCap& cap) {
  require(nu >= 0.0, errors::kInvalidArgument, "sup seminorm needs nu >= 0");
  require(static_cast<int>(cap.omega.size()) == u.spec().dim, errors::kInvalidArgument,
          "cap dimension does not match grid");
  const auto U = localized_spectrum(u, phi);
  kernels::SupQuery q;
  q.cap = cap.test();
  q.nu = nu;
  q.ceiling = 0.5 * u.spec().nyquist();
  return kernels::masked_sup(u.spec(), U.coefficients(), U.channels(), q);
}

ShellProfile fit_profile(std::vector<int> octaves, std::vector<double> energies, int top,
                         const ProfileOptions& options, double reference_energy) {
  require(octaves.size() == energies.size(), errors::kInvalidArgument,
          "octave and energy lists differ in length");
  ShellProfile p;
  p.octaves = std::move(octaves);
  p.energies = std::move(energies);
  const int j0 = p.octaves.empty() ? 0 : p.octaves.front();
  p.window_min = j0 + options.drop_low;
  p.window_max = top - 1;
  const double floor = options.noise_fraction * reference_energy;
  bool cut = false;
  for (std::size_t i = 0; i < p.octaves.size(); ++i) {
    const int j = p.octaves[i];
    if (j >= p.window_min && j <= p.window_max && p.energies[i] <= floor) {
      p.window_max = j - 1;
      cut = true;
      break;
    }
  }
  p.in_window.resize(p.octaves.size());
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < p.octaves.size(); ++i) {
    const int j = p.octaves[i];
    p.in_window[i] = j >= p.window_min && j <= p.window_max;
    if (p.in_window[i]) {
      xs.push_back(j);
      ys.push_back(std::log2(std::max(p.energies[i], 1e-300)));
    }
  }
  if (cut && static_cast<int>(xs.size()) < kMinFitPoints) {
    p.below_noise = true;
    p.fit_slope = -2.0 * options.r_max;
    p.r_star = options.r_max;
    return p;
  }
  require(static_cast<int>(xs.size()) >= kMinFitPoints, errors::kInsufficientOctaves,
          "only " + std::to_string(xs.size()) + " octaves in the fit window; need " +
              std::to_string(kMinFitPoints));
  const double k = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= k;
  my /= k;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  p.fit_slope = sxy / sxx;
  double rss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double e = ys[i] - (my + p.fit_slope * (xs[i] - mx));
    rss += e * e;
  }
  p.residual = std::sqrt(rss / k);
  p.r_star = critical_order_from_slope(p.fit_slope, options.r_max);
  return p;
}

std::vector<ShellProfile> shell_profiles(const GridField& u, const Cutoff& phi,
                                         std::span<const DirectionCap> caps,
                                         const ProfileOptions& options) {
  const GridSpec& spec = u.spec();
  require(options.radial_floor >= 0.0, errors::kInvalidArgument,
          "radial floor must be nonnegative");
  const int j0 = first_octave(options.radial_floor);
  const int top = top_octave(spec);
  require(top - 1 - (j0 + options.drop_low) + 1 >= kMinFitPoints, errors::kInsufficientOctaves,
          "grid Nyquist radius leaves too few octaves above the radial floor");
  kernels::RadialCapQuery q;
  for (const auto& c : caps) {
    require(static_cast<int>(c.omega.size()) == spec.dim, errors::kInvalidArgument,
            "cap dimension does not match grid");
    q.caps.push_back(c.test());
  }
  std::vector<int> octaves;
  for (int j = j0; j <= top; ++j) {
    octaves.push_back(j);
    q.edges.push_back(std::ldexp(1.0, j));
  }
  q.edges.push_back(std::ldexp(1.0, top + 1));
  const auto U = localized_spectrum(u, phi);
  const auto bins = kernels::radial_cap_bins(spec, U.coefficients(), U.channels(), q);
  const std::size_t nb = octaves.size();
  const double dxi = spec.freq_cell_volume();
  const double reference = std::pow(l2_norm(u), 2) * two_pi_power(spec.dim);
  std::vector<ShellProfile> out;
  out.reserve(caps.size());
  for (std::size_t c = 0; c < caps.size(); ++c) {
    std::vector<double> e(nb);
    for (std::size_t b = 0; b < nb; ++b) e[b] = bins[c * nb + b] * dxi;
    out.push_back(fit_profile(octaves, std::move(e), top, options, reference));
  }
  return out;
}

ShellProfile shell_profile(const GridField& u, const Cutoff& phi, const DirectionCap& cap,
                           const ProfileOptions& options) {
  return shell_profiles(u, phi, std::span<const DirectionCap>(&cap, 1), options).front();
}

double critical_order_from_slope(double slope, double r_max) {
  return std::clamp(-0.5 * slope, -r_max, r_max);
}

double critical_order(const ShellProfile& profile, double r_max) {
  return critical_order_from_slope(profile.fit_slope, r_max);
}

void write_profile_csv(std::ostream& out, const ShellProfile& p) {
  CsvWriter w(out);
  w.header({"j", "E_j", "in_window"});
  for (std::size_t i = 0; i < p.octaves.size(); ++i)
    w.row({fmt_int(p.octaves[i]), fmt_real(p.energies[i]), p.in_window[i] ? "1" : "0"});
  w.blank();
  w.header({"slope", "r_star", "residual"});
  w.row({fmt_real(p.fit_slope), fmt_real(p.r_star), fmt_real(p.residual)});
}

}  // namespace microlocal
