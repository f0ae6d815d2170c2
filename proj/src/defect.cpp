#include "microlocal/defect.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "microlocal/csv.hpp"
#include "microlocal/error.hpp"
#include "microlocal/field_io.hpp"
#include "microlocal/kernels.hpp"
#include "microlocal/psido.hpp"
#include "microlocal/seminorm.hpp"

namespace microlocal {
namespace {

constexpr double kPi = std::numbers::pi;

void validate_sequence(const SequenceSpec& seq) {
  require(!seq.members.empty(), errors::kEmptySequence, "sequence has no members");
  require(seq.parameters.size() == seq.members.size(), errors::kInvalidArgument,
          "one parameter per member required");
  for (std::size_t i = 1; i < seq.parameters.size(); ++i)
    require(seq.parameters[i] > seq.parameters[i - 1], errors::kInvalidArgument,
            "sequence parameters must increase strictly");
  for (const auto& m : seq.members) {
    require(m.spec() == seq.limit.spec(), errors::kInvalidArgument,
            "members and limit live on different grids");
    require(m.channels() == seq.limit.channels(), errors::kChannelMismatch,
            "members and limit have different channel counts");
    const double used = bandwidth_utilization(m);
    require(used <= kMemberBandTolerance, errors::kInvalidArgument,
            "member carries " + fmt_real(used) + " of its energy above Xi/2");
  }
}

std::vector<int> check_parameters(std::vector<int> p) {
  require(!p.empty(), errors::kEmptySequence, "no sequence parameters given");
  for (std::size_t i = 0; i < p.size(); ++i) {
    require(p[i] > 0, errors::kInvalidArgument, "sequence parameters must be positive");
    if (i > 0)
      require(p[i] > p[i - 1], errors::kInvalidArgument,
              "sequence parameters must increase strictly");
  }
  return p;
}

// Identity or M(omega) times the sector mask, k x k row-major.
void direction_matrix(const MatrixFn& M, int k, std::span<const double> omega, std::span<cplx> out) {
  if (M) {
    M(omega, out);
    return;
  }
  std::fill(out.begin(), out.end(), cplx(0.0));
  for (int i = 0; i < k; ++i) out[i * k + i] = 1.0;
}

}  // namespace

std::vector<GridField> SequenceSpec::differences() const {
  std::vector<GridField> out;
  out.reserve(members.size());
  for (const auto& m : members) out.push_back(m - limit);
  return out;
}

SequenceSpec oscillation_sequence(const GridField& b, std::vector<int> omega0,
                                  std::vector<int> freqs) {
  const GridSpec& spec = b.spec();
  require(static_cast<int>(omega0.size()) == spec.dim, errors::kInvalidArgument,
          "oscillation direction has wrong dimension");
  require(std::any_of(omega0.begin(), omega0.end(), [](int v) { return v != 0; }),
          errors::kInvalidArgument, "oscillation direction must be nonzero");
  SequenceSpec seq;
  seq.kind = SequenceSpec::Kind::oscillation;
  seq.parameters = check_parameters(std::move(freqs));
  seq.limit = GridField::zeros(spec, b.channels());
  for (int m : seq.parameters) {
    std::vector<double> xi(spec.dim);
    for (int a = 0; a < spec.dim; ++a) xi[a] = m * omega0[a] * spec.freq_step();
    seq.members.push_back(modulate(b, xi));
  }
  validate_sequence(seq);
  return seq;
}

SequenceSpec concentration_sequence(const GridSpec& spec, const PointFunction& profile,
                                    std::vector<double> x0, std::vector<int> scales) {
  require(static_cast<int>(x0.size()) == spec.dim, errors::kInvalidArgument,
          "concentration point has wrong dimension");
  require(static_cast<bool>(profile), errors::kInvalidArgument, "profile is empty");
  SequenceSpec seq;
  seq.kind = SequenceSpec::Kind::concentration;
  seq.parameters = check_parameters(std::move(scales));
  seq.limit = GridField::zeros(spec);
  for (int n : seq.parameters) {
    const double amp = std::pow(static_cast<double>(n), 0.5 * spec.dim);
    seq.members.push_back(GridField::sample(spec, [&](std::span<const double> x) {
      double y[3];
      for (int a = 0; a < spec.dim; ++a) y[a] = n * (x[a] - x0[a]);
      return amp * profile(std::span<const double>(y, spec.dim));
    }));
  }
  validate_sequence(seq);
  return seq;
}

SequenceSpec explicit_sequence(std::vector<GridField> members, GridField limit) {
  SequenceSpec seq;
  seq.kind = SequenceSpec::Kind::explicit_list;
  for (std::size_t i = 0; i < members.size(); ++i) seq.parameters.push_back(static_cast<int>(i) + 1);
  seq.members = std::move(members);
  seq.limit = std::move(limit);
  validate_sequence(seq);
  return seq;
}

SequenceSpec load_sequence(const std::vector<std::string>& paths, const std::string& limit_path) {
  require(!paths.empty(), errors::kEmptySequence, "no member files given");
  std::vector<GridField> members;
  for (const auto& p : paths) members.push_back(load_field(p));
  GridField limit = limit_path.empty()
                        ? GridField::zeros(members.front().spec(), members.front().channels())
                        : load_field(limit_path);
  return explicit_sequence(std::move(members), std::move(limit));
}

DirectionPartition DirectionPartition::make(int dim, int count, double offset) {
  DirectionPartition p;
  p.dim = dim;
  p.count = count;
  p.offset = offset;
  if (dim == 1) {
    require(count == 2, errors::kInvalidArgument, "the 1-D direction partition has two sectors");
    p.centers = {{1.0}, {-1.0}};
  } else if (dim == 2) {
    require(count >= 2, errors::kInvalidArgument, "need at least two direction sectors");
    for (int k = 0; k < count; ++k) {
      const double t = offset + 2.0 * kPi * k / count;
      p.centers.push_back({std::cos(t), std::sin(t)});
    }
  } else if (dim == 3) {
    require(count >= 4, errors::kInvalidArgument, "need at least four direction sectors");
    for (const auto& cap : direction_cover(3, count, kPi)) p.centers.push_back(cap.omega);
  } else {
    fail(errors::kInvalidArgument, "dimension must be 1, 2 or 3");
  }
  return p;
}

int DirectionPartition::sector(std::span<const double> xi) const {
  if (dim == 1) return xi[0] >= 0.0 ? 0 : 1;
  if (dim == 2) {
    const double width = 2.0 * kPi / count;
    const double t = std::atan2(xi[1], xi[0]) - offset + 0.5 * width;
    int k = static_cast<int>(std::floor(t / width)) % count;
    return k < 0 ? k + count : k;
  }
  int best = 0;
  double best_dot = -2.0;
  const double norm = std::sqrt(xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]);
  for (std::size_t k = 0; k < centers.size(); ++k) {
    const double d = (centers[k][0] * xi[0] + centers[k][1] * xi[1] + centers[k][2] * xi[2]) / norm;
    if (d > best_dot) {
      best_dot = d;
      best = static_cast<int>(k);
    }
  }
  return best;
}

DefectBins DefectBins::make(int dim, double lo, double hi, int cells, double delta, int sectors,
                            double offset) {
  DefectBins b;
  b.cells = cell_partition(dim, lo, hi, cells, delta);
  b.directions = DirectionPartition::make(dim, sectors, offset);
  constexpr int kProbe = 41;
  std::size_t total = 1;
  for (int a = 0; a < dim; ++a) total *= kProbe;
  const double core_lo = lo + delta;
  const double step = (hi - delta - core_lo) / (kProbe - 1);
  double worst = 0.0;
  for (std::size_t i = 0; i < total; ++i) {
    double x[3];
    std::size_t rest = i;
    for (int a = dim - 1; a >= 0; --a) {
      x[a] = core_lo + step * static_cast<double>(rest % kProbe);
      rest /= kProbe;
    }
    double sum = 0.0;
    for (const auto& c : b.cells) {
      const double v = c.value(std::span<const double>(x, dim));
      sum += v * v;
    }
    worst = std::max(worst, std::abs(sum - 1.0));
  }
  require(worst <= 1e-3, errors::kInvalidArgument,
          "cell partition defect " + fmt_real(worst) + " exceeds 1e-3");
  return b;
}

Symbol bin_symbol(const DefectBins& bins, std::size_t bin, int channels, const MatrixFn& M) {
  require(bin < bins.size(), errors::kInvalidArgument, "bin index out of range");
  const CellCutoff cell = bins.cells[bins.cell_of(bin)];
  const DirectionPartition dirs = bins.directions;
  const int sector = bins.sector_of(bin);
  const int k = channels;
  MatrixFn m = [dirs, sector, M, k](std::span<const double> xi, std::span<cplx> out) {
    double r = 0.0;
    for (double v : xi) r += v * v;
    r = std::sqrt(r);
    if (r == 0.0 || dirs.sector(xi) != sector) {
      std::fill(out.begin(), out.end(), cplx(0.0));
      return;
    }
    double omega[3];
    for (std::size_t a = 0; a < xi.size(); ++a) omega[a] = xi[a] / r;
    direction_matrix(M, k, std::span<const double>(omega, xi.size()), out);
    const double w = radial_cutoff(r);
    for (auto& v : out) v *= w;
  };
  MatrixFn principal = [dirs, sector, M, k](std::span<const double> omega, std::span<cplx> out) {
    if (dirs.sector(omega) != sector) {
      std::fill(out.begin(), out.end(), cplx(0.0));
      return;
    }
    direction_matrix(M, k, omega, out);
  };
  PointFunction psi = [cell](std::span<const double> x) { return cplx(cell.value(x)); };
  return Symbol::sandwiched(psi, Symbol::matrix_multiplier(0.0, k, k, m, principal));
}

cplx quadratic_form(const Symbol& a, const GridField& v) {
  require(a.rows() == v.channels() && a.cols() == v.channels(), errors::kChannelMismatch,
          "symbol shape does not match the field's channels");
  const GridField w = quantize(a, v);
  return inner_product(w, v);
}

double DefectEstimate::positivity_residual() const {
  double worst = 0.0;
  for (const auto& b : values) worst = std::max(worst, -b.value.real());
  return worst;
}

DefectEstimate defect_estimate(const SequenceSpec& seq, const DefectBins& bins, int tail,
                               const MatrixFn& direction_symbol) {
  require(tail >= 1, errors::kInvalidArgument, "tail length must be positive");
  require(static_cast<int>(seq.members.size()) >= tail + 2, errors::kEmptySequence,
          "need at least tail + 2 members");
  const GridSpec& spec = seq.spec();
  require(bins.directions.dim == spec.dim, errors::kInvalidArgument,
          "bin geometry dimension does not match the grid");
  const int k = seq.channels();
  const std::size_t size = spec.size();
  const std::size_t nsec = bins.directions.centers.size();

  // Per-frequency sector, radial weight and optional direction matrix.
  std::vector<int> sector(size, -1);
  std::vector<double> weight(size, 0.0);
  std::vector<cplx> matrix;
  if (direction_symbol) matrix.assign(size * k * k, cplx(0.0));
  double xi[3];
  for (std::size_t i = 0; i < size; ++i) {
    spec.wavevector(i, std::span<double>(xi, spec.dim));
    double r = 0.0;
    for (int a = 0; a < spec.dim; ++a) r += xi[a] * xi[a];
    r = std::sqrt(r);
    if (r == 0.0) continue;
    sector[i] = bins.directions.sector(std::span<const double>(xi, spec.dim));
    weight[i] = radial_cutoff(r);
    if (direction_symbol) {
      for (int a = 0; a < spec.dim; ++a) xi[a] /= r;
      direction_symbol(std::span<const double>(xi, spec.dim),
                       std::span<cplx>(matrix.data() + i * k * k, k * k));
    }
  }
  const double dxi = spec.freq_cell_volume() / std::pow(2.0 * kPi, spec.dim);

  DefectEstimate est;
  est.bins = bins;
  est.channels = k;
  est.tail = tail;
  est.direction_symbol = direction_symbol;
  const auto diffs = seq.differences();
  est.tail_fields.assign(diffs.end() - tail, diffs.end());

  // q[member][bin] and block[member][bin][k*k].
  std::vector<std::vector<cplx>> q(tail, std::vector<cplx>(bins.size()));
  std::vector<std::vector<cplx>> blocks(tail, std::vector<cplx>(bins.size() * k * k));
  const std::size_t ncell = bins.cells.size();
  kernels::for_each_index(static_cast<std::size_t>(tail) * ncell, [&](std::size_t job) {
    const std::size_t t = job / ncell;
    const std::size_t c = job % ncell;
    const auto V = localized_spectrum(est.tail_fields[t], Cutoff(bins.cells[c]));
    const auto coef = V.coefficients();
    std::vector<cplx> block(nsec * k * k, cplx(0.0));
    std::vector<cplx> value(nsec, cplx(0.0));
    for (std::size_t i = 0; i < size; ++i) {
      if (sector[i] < 0 || weight[i] == 0.0) continue;
      cplx* B = block.data() + sector[i] * k * k;
      cplx acc = 0.0;
      for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) {
          const cplx p = weight[i] * coef[b * size + i] * std::conj(coef[a * size + i]);
          B[a * k + b] += p;
          acc += direction_symbol ? matrix[i * k * k + a * k + b] * p : (a == b ? p : cplx(0.0));
        }
      value[sector[i]] += acc;
    }
    for (std::size_t s = 0; s < nsec; ++s) {
      const std::size_t bin = c * nsec + s;
      q[t][bin] = value[s] * dxi;
      for (int e = 0; e < k * k; ++e) blocks[t][bin * k * k + e] = block[s * k * k + e] * dxi;
    }
  });

  est.values.resize(bins.size());
  for (std::size_t bin = 0; bin < bins.size(); ++bin) {
    auto& out = est.values[bin];
    out.x = cutoff_center(Cutoff(bins.cells[bins.cell_of(bin)]));
    out.omega = bins.directions.centers[bins.sector_of(bin)];
    out.block.assign(k * k, cplx(0.0));
    for (int t = 0; t < tail; ++t) {
      out.value += q[t][bin];
      for (int e = 0; e < k * k; ++e) out.block[e] += blocks[t][bin * k * k + e];
    }
    out.value /= static_cast<double>(tail);
    for (auto& e : out.block) e /= static_cast<double>(tail);
    for (int s = 0; s < tail; ++s)
      for (int t = s + 1; t < tail; ++t)
        out.cauchy_gap = std::max(out.cauchy_gap, std::abs(q[s][bin] - q[t][bin]));
    est.total += out.value.real();
  }
  const double scale = std::abs(est.total);
  for (auto& b : est.values) b.reliable = b.cauchy_gap <= 0.1 * scale;
  return est;
}

double hermitian_check(const DefectEstimate& est) {
  if (est.values.empty() || est.tail_fields.empty()) return 0.0;
  std::vector<double> dev(est.values.size(), 0.0);
  kernels::for_each_index(est.values.size(), [&](std::size_t bin) {
    const Symbol a = bin_symbol(est.bins, bin, est.channels, est.direction_symbol);
    const Symbol adj = adjoint_symbol(a);
    cplx value = 0.0;
    for (const auto& v : est.tail_fields) value += quadratic_form(adj, v);
    value /= static_cast<double>(est.tail_fields.size());
    dev[bin] = std::abs(value - std::conj(est.values[bin].value));
  });
  return *std::max_element(dev.begin(), dev.end());
}

SupportComparison support_vs_wfc(const DefectEstimate& est, const SequenceReport& report,
                                 double mass_floor) {
  require(est.values.size() == report.records.size(), errors::kGeometryMismatch,
          "bin count " + std::to_string(est.values.size()) + " differs from patch count " +
              std::to_string(report.records.size()));
  auto close = [](const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (std::abs(a[i] - b[i]) > 1e-9) return false;
    return true;
  };
  SupportComparison cmp;
  const double floor = mass_floor * est.total;
  for (std::size_t i = 0; i < est.values.size(); ++i) {
    const auto& bin = est.values[i];
    const auto& rec = report.records[i];
    require(close(bin.x, rec.x) && close(bin.omega, rec.omega), errors::kGeometryMismatch,
            "bin " + std::to_string(i) + " does not match its patch");
    SupportRow row{bin.x, bin.omega, bin.value.real(), false, false};
    row.massive = est.total > 0.0 && row.mass >= floor;
    row.noncompact = rec.verdict == TailVerdict::noncompact;
    if (row.massive && !row.noncompact) ++cmp.measure_outside_wfc;
    if (row.noncompact && !row.massive) ++cmp.wfc_outside_measure;
    cmp.rows.push_back(std::move(row));
  }
  return cmp;
}

ScanLattice matching_lattice(const DefectBins& bins, double r_inner, double r_outer,
                             double half_angle) {
  ScanLattice lat;
  for (const auto& c : bins.cells)
    lat.windows.emplace_back(BumpCutoff::make(cutoff_center(Cutoff(c)), r_inner, r_outer));
  for (const auto& w : bins.directions.centers) lat.caps.push_back(DirectionCap::make(w, half_angle));
  lat.angular_count = static_cast<int>(lat.caps.size());
  if (bins.cells.size() > 1) {
    std::vector<double> lo, hi;
    cutoff_bounds(Cutoff(bins.cells[0]), lo, hi);
    lat.spatial_stride = hi[0] - lo[0] - 2.0 * bins.cells[0].delta;
  }
  return lat;
}

void write_defect_csv(std::ostream& out, const DefectEstimate& est) {
  CsvWriter w(out);
  const int dim = est.bins.directions.dim;
  auto names = indexed_names("cell_x", dim);
  for (auto& s : indexed_names("omega", dim)) names.push_back(s);
  for (const char* s : {"re", "im", "cauchy_gap", "reliable"}) names.emplace_back(s);
  w.header(names);
  for (const auto& b : est.values) {
    std::vector<std::string> cells;
    for (double v : b.x) cells.push_back(fmt_real(v));
    for (double v : b.omega) cells.push_back(fmt_real(v));
    cells.push_back(fmt_real(b.value.real()));
    cells.push_back(fmt_real(b.value.imag()));
    cells.push_back(fmt_real(b.cauchy_gap));
    cells.emplace_back(b.reliable ? "true" : "false");
    w.row(cells);
  }
}

}  // namespace microlocal
