#include "microlocal/wavefront.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "microlocal/csv.hpp"
#include "microlocal/error.hpp"
#include "microlocal/kernels.hpp"

namespace microlocal {
namespace {

constexpr double kPi = std::numbers::pi;

std::vector<std::vector<double>> sphere_samples(int dim, int count) {
  std::vector<std::vector<double>> out;
  if (dim == 1) return {{1.0}, {-1.0}};
  if (dim == 2) {
    for (int k = 0; k < count; ++k) {
      const double t = 2.0 * kPi * (k + 0.5) / count;
      out.push_back({std::cos(t), std::sin(t)});
    }
    return out;
  }
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  for (int k = 0; k < count; ++k) {
    const double z = 1.0 - 2.0 * (k + 0.5) / count;
    const double rad = std::sqrt(std::max(0.0, 1.0 - z * z));
    out.push_back({rad * std::cos(golden * k), rad * std::sin(golden * k), z});
  }
  return out;
}

std::vector<double> flat_center(const Cutoff& c) { return cutoff_center(c); }

}  // namespace

bool caps_cover_sphere(int dim, const std::vector<DirectionCap>& caps) {
  for (const auto& s : sphere_samples(dim, dim == 2 ? 7200 : 20000)) {
    bool hit = false;
    for (const auto& c : caps)
      if (c.contains(s)) {
        hit = true;
        break;
      }
    if (!hit) return false;
  }
  return true;
}

std::vector<DirectionCap> direction_cover(int dim, int count, double half_angle, double offset) {
  require(dim >= 1 && dim <= 3, errors::kInvalidArgument, "dim must be 1, 2 or 3");
  std::vector<DirectionCap> caps;
  if (dim == 1) {
    caps.push_back(DirectionCap::make({1.0}, 0.5 * kPi));
    caps.push_back(DirectionCap::make({-1.0}, 0.5 * kPi));
    return caps;
  }
  require(count >= 2, errors::kInvalidArgument, "need at least two directions");
  if (dim == 2) {
    require(half_angle > kPi / count, errors::kInvalidArgument,
            "cap half angle must exceed pi / angular_count to cover the circle");
    for (int k = 0; k < count; ++k) {
      const double t = offset + 2.0 * kPi * k / count;
      caps.push_back(DirectionCap::make({std::cos(t), std::sin(t)}, half_angle));
    }
    return caps;
  }
  for (auto& d : sphere_samples(3, count)) caps.push_back(DirectionCap::make(d, half_angle));
  require(caps_cover_sphere(3, caps), errors::kInvalidArgument,
          "caps do not cover the sphere; increase the count or the half angle");
  return caps;
}

void validate_lattice(const ScanLattice& lattice, int dim, double reach) {
  require(!lattice.windows.empty() && !lattice.caps.empty(), errors::kInvalidArgument,
          "scan lattice needs windows and caps");
  for (const auto& w : lattice.windows)
    require(cutoff_dim(w) == dim, errors::kInvalidArgument, "window dimension mismatch");
  for (const auto& c : lattice.caps)
    require(static_cast<int>(c.omega.size()) == dim, errors::kInvalidArgument,
            "cap dimension mismatch");
  require(caps_cover_sphere(dim, lattice.caps), errors::kInvalidArgument,
          "scan caps do not cover the sphere");
  const int per_axis = 21;
  std::size_t total = 1;
  for (int a = 0; a < dim; ++a) total *= per_axis;
  std::vector<double> x(dim);
  for (std::size_t f = 0; f < total; ++f) {
    std::size_t rest = f;
    for (int a = dim - 1; a >= 0; --a) {
      x[a] = -reach + 2.0 * reach * static_cast<double>(rest % per_axis) / (per_axis - 1);
      rest /= per_axis;
    }
    bool hit = false;
    for (const auto& w : lattice.windows)
      if (cutoff_value(w, x) > 0.0) {
        hit = true;
        break;
      }
    require(hit, errors::kInvalidArgument, "scan windows leave part of the analysis window uncovered");
  }
}

ScanLattice regular_lattice(int dim, const LatticeOptions& o) {
  require(o.stride > 0.0 && o.reach >= 0.0, errors::kInvalidArgument,
          "stride must be positive and reach nonnegative");
  // covering radius of the cubic lattice; supports are open balls
  require(0.5 * o.stride * std::sqrt(static_cast<double>(dim)) < o.r_outer, errors::kInvalidArgument,
          "scan windows leave part of the analysis window uncovered");
  ScanLattice lat;
  lat.spatial_stride = o.stride;
  lat.angular_count = dim == 1 ? 2 : o.angular_count;
  lat.caps = direction_cover(dim, o.angular_count, o.half_angle);
  const int half = static_cast<int>(std::floor(o.reach / o.stride + 1e-9));
  const int per_axis = 2 * half + 1;
  std::size_t total = 1;
  for (int a = 0; a < dim; ++a) total *= static_cast<std::size_t>(per_axis);
  for (std::size_t f = 0; f < total; ++f) {
    std::vector<double> c(dim);
    std::size_t rest = f;
    for (int a = dim - 1; a >= 0; --a) {
      c[a] = (static_cast<int>(rest % per_axis) - half) * o.stride;
      rest /= per_axis;
    }
    lat.windows.emplace_back(BumpCutoff::make(std::move(c), o.r_inner, o.r_outer));
  }
  validate_lattice(lat, dim, o.reach);
  return lat;
}

std::size_t WavefrontReport::singular_count() const {
  return static_cast<std::size_t>(
      std::count_if(records.begin(), records.end(), [](const auto& r) { return r.singular; }));
}

WavefrontReport wf_scan(const GridField& u, double r, const ScanLattice& lattice,
                        const WfOptions& options) {
  validate_lattice(lattice, u.spec().dim, 0.0);
  WavefrontReport report;
  report.order = r;
  report.margin = options.margin;
  report.records.resize(lattice.size());
  const std::size_t nc = lattice.caps.size();
  kernels::for_each_index(lattice.windows.size(), [&](std::size_t w) {
    const auto profiles = shell_profiles(u, lattice.windows[w], lattice.caps, options.profile);
    const auto center = flat_center(lattice.windows[w]);
    for (std::size_t c = 0; c < nc; ++c) {
      auto& rec = report.records[w * nc + c];
      rec.x = center;
      rec.omega = lattice.caps[c].omega;
      rec.r_star = profiles[c].r_star;
      rec.residual = profiles[c].residual;
      rec.singular = rec.r_star <= r + options.margin;
    }
  });
  return report;
}

const char* to_string(TailVerdict v) {
  switch (v) {
    case TailVerdict::compact: return "compact";
    case TailVerdict::noncompact: return "noncompact";
    default: return "inconclusive";
  }
}

std::size_t SequenceReport::count(TailVerdict v) const {
  return static_cast<std::size_t>(
      std::count_if(records.begin(), records.end(), [&](const auto& r) { return r.verdict == v; }));
}

std::vector<double> default_radii(const GridSpec& spec, int count) {
  require(count >= 2, errors::kInvalidArgument, "need at least two radii");
  const double lo = spec.nyquist() / 16.0;
  const double hi = 3.0 * spec.nyquist() / 16.0;
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i) out[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1));
  return out;
}

SequenceReport wfc_scan(const std::vector<GridField>& seq, const GridField& limit, double r,
                        const ScanLattice& lattice, const std::vector<double>& radii,
                        const WfcOptions& options) {
  require(!seq.empty(), errors::kEmptySequence, "sequence has no members");
  require(seq.size() >= 4, errors::kEmptySequence, "tail scans need at least 4 members");
  const GridSpec& spec = limit.spec();
  for (const auto& m : seq) {
    require(m.spec() == spec, errors::kInvalidArgument, "sequence members differ in grid");
    require(m.channels() == limit.channels(), errors::kChannelMismatch,
            "sequence members differ in channels");
  }
  require(radii.size() >= 2, errors::kInvalidArgument, "need at least two tail radii");
  const double ceiling = 0.5 * spec.nyquist();
  for (std::size_t i = 0; i < radii.size(); ++i) {
    require(radii[i] > options.radial_floor && radii[i] < ceiling, errors::kInvalidArgument,
            "tail radii must lie between the radial floor and Xi/2");
    require(i == 0 || radii[i] > radii[i - 1], errors::kInvalidArgument,
            "tail radii must increase");
  }
  validate_lattice(lattice, spec.dim, 0.0);

  std::vector<GridField> diffs;
  diffs.reserve(seq.size());
  for (const auto& m : seq) diffs.push_back(m - limit);

  kernels::RadialCapQuery q;
  for (const auto& c : lattice.caps) q.caps.push_back(c.test());
  q.edges = radii;
  q.edges.push_back(ceiling);
  q.weight_order = r;
  const std::size_t nr = radii.size();
  const std::size_t nc = lattice.caps.size();
  const double dxi = spec.freq_cell_volume();

  SequenceReport report;
  report.order = r;
  report.radii = radii;
  report.records.resize(lattice.size());
  kernels::for_each_index(lattice.windows.size(), [&](std::size_t w) {
    const auto weight = sample_cutoff(spec, lattice.windows[w]);
    std::vector<double> tails(nc * nr, 0.0);
    for (const auto& v : diffs) {
      const auto U = forward_transform(multiply(v, std::span<const double>(weight)));
      const auto bins = kernels::radial_cap_bins(spec, U.coefficients(), U.channels(), q);
      for (std::size_t c = 0; c < nc; ++c) {
        double acc = 0.0;
        for (std::size_t i = nr; i-- > 0;) {
          acc += bins[c * nr + i] * dxi;
          tails[c * nr + i] = std::max(tails[c * nr + i], acc);
        }
      }
    }
    const auto center = flat_center(lattice.windows[w]);
    for (std::size_t c = 0; c < nc; ++c) {
      auto& rec = report.records[w * nc + c];
      rec.x = center;
      rec.omega = lattice.caps[c].omega;
      rec.tail.assign(tails.begin() + c * nr, tails.begin() + (c + 1) * nr);
    }
  });

  double global = 0.0;
  for (const auto& rec : report.records) global = std::max(global, rec.tail.front());
  for (auto& rec : report.records) {
    const double t0 = rec.tail.front();
    const double t1 = rec.tail.back();
    rec.rho = t0 > 0.0 ? t1 / t0 : 0.0;
    rec.negligible = t0 <= options.negligible_fraction * global || t0 <= options.absolute_floor;
    if (rec.negligible) {
      rec.verdict = TailVerdict::compact;
    } else if (rec.rho <= options.compact_ratio) {
      rec.verdict = TailVerdict::compact;
    } else if (rec.rho >= options.noncompact_ratio) {
      rec.verdict = TailVerdict::noncompact;
    } else {
      rec.verdict = TailVerdict::inconclusive;
    }
    // Shape diagnostic: RMS deviation of log T from a straight line in log R.
    rec.residual = 0.0;
    if (t1 > 0.0) {
      const double k = static_cast<double>(nr);
      double mx = 0.0, my = 0.0;
      for (std::size_t i = 0; i < nr; ++i) {
        mx += std::log(radii[i]);
        my += std::log(rec.tail[i]);
      }
      mx /= k;
      my /= k;
      double sxx = 0.0, sxy = 0.0;
      for (std::size_t i = 0; i < nr; ++i) {
        sxx += (std::log(radii[i]) - mx) * (std::log(radii[i]) - mx);
        sxy += (std::log(radii[i]) - mx) * (std::log(rec.tail[i]) - my);
      }
      const double slope = sxy / sxx;
      double rss = 0.0;
      for (std::size_t i = 0; i < nr; ++i) {
        const double e = std::log(rec.tail[i]) - (my + slope * (std::log(radii[i]) - mx));
        rss += e * e;
      }
      rec.residual = std::sqrt(rss / k);
    }
  }
  return report;
}

ScanLattice kr_lattice(const GridSpec& spec) {
  const double r_in = 0.25 * spec.extent * std::sqrt(static_cast<double>(spec.dim));
  const double r_out = std::min(1.25 * r_in, 0.49 * spec.extent * std::sqrt(double(spec.dim)));
  ScanLattice lat;
  lat.windows.emplace_back(BumpCutoff::make(std::vector<double>(spec.dim, 0.0), r_in, r_out));
  std::vector<double> e(spec.dim, 0.0);
  e[0] = 1.0;
  lat.caps.push_back(DirectionCap::make(e, kPi));
  lat.angular_count = 1;
  return lat;
}

SequenceReport kr_compactness(const std::vector<GridField>& seq, const GridField& limit,
                              double r, const WfcOptions& options) {
  return wfc_scan(seq, limit, r, kr_lattice(limit.spec()), default_radii(limit.spec()),
                  options);
}

void write_wavefront_csv(std::ostream& out, const WavefrontReport& report) {
  CsvWriter w(out);
  const int dim = report.records.empty() ? 1 : static_cast<int>(report.records[0].x.size());
  auto names = indexed_names("x", dim);
  for (auto& s : indexed_names("omega", dim)) names.push_back(s);
  for (const char* s : {"r_star", "residual", "verdict"}) names.emplace_back(s);
  w.header(names);
  for (const auto& rec : report.records) {
    std::vector<std::string> cells;
    for (double v : rec.x) cells.push_back(fmt_real(v));
    for (double v : rec.omega) cells.push_back(fmt_real(v));
    cells.push_back(fmt_real(rec.r_star));
    cells.push_back(fmt_real(rec.residual));
    cells.push_back(rec.singular ? "singular_at(" + fmt_real(report.order) + ")" : "smooth");
    w.row(cells);
  }
}

void write_sequence_csv(std::ostream& out, const SequenceReport& report) {
  CsvWriter w(out);
  const int dim = report.records.empty() ? 1 : static_cast<int>(report.records[0].x.size());
  auto names = indexed_names("x", dim);
  for (auto& s : indexed_names("omega", dim)) names.push_back(s);
  for (const char* s : {"rho", "residual", "verdict"}) names.emplace_back(s);
  w.header(names);
  for (const auto& rec : report.records) {
    std::vector<std::string> cells;
    for (double v : rec.x) cells.push_back(fmt_real(v));
    for (double v : rec.omega) cells.push_back(fmt_real(v));
    cells.push_back(fmt_real(rec.rho));
    cells.push_back(fmt_real(rec.residual));
    cells.push_back(to_string(rec.verdict));
    w.row(cells);
  }
}

}  // namespace microlocal
