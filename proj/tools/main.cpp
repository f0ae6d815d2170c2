// Batch runner: one subcommand per experiment, artifacts plus manifest.json
// in the output directory.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "microlocal/appendix.hpp"
#include "microlocal/compcomp.hpp"
#include "microlocal/config.hpp"
#include "microlocal/csv.hpp"
#include "microlocal/defect.hpp"
#include "microlocal/error.hpp"
#include "microlocal/field_io.hpp"
#include "microlocal/fixtures.hpp"
#include "microlocal/kernels.hpp"
#include "microlocal/manifest.hpp"
#include "microlocal/psido.hpp"
#include "microlocal/pullback.hpp"
#include "microlocal/selftest.hpp"
#include "microlocal/wavefront.hpp"

namespace fs = std::filesystem;
using namespace microlocal;

namespace {

constexpr double kPi = std::numbers::pi;

struct Globals {
  std::string config_path;
  std::string out_dir = "out";
  int threads = 0;
};

struct Run {
  Config cfg;
  std::string out_dir;
  Manifest manifest;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  std::string artifact(const std::string& name) const { return (fs::path(out_dir) / name).string(); }

  std::ofstream open(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    require(static_cast<bool>(out), errors::kFormatError, "cannot write " + path);
    return out;
  }

  void finish() {
    manifest.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    manifest.write(artifact("manifest.json"));
  }
};

const Config::Schema kCommon = {
    {"", {}},
    {"run", {"seed", "threads"}},
    {"output", {"dir"}},
};

Config::Schema with_common(Config::Schema extra) {
  for (const auto& [sec, keys] : kCommon) extra[sec].insert(keys.begin(), keys.end());
  return extra;
}

Run start_run(const Globals& g, const std::string& name, const Config::Schema& schema) {
  Run run;
  run.cfg = g.config_path.empty() ? Config::parse_text("", "<none>") : Config::load(g.config_path);
  run.cfg.restrict_to(with_common(schema));
  const int threads =
      g.threads > 0 ? g.threads : static_cast<int>(run.cfg.get_int("run", "threads", 0));
  require(threads >= 0, errors::kConfigError, "thread count must be nonnegative");
  kernels::set_threads(threads);
  run.out_dir = run.cfg.get("output", "dir", g.out_dir);
  fs::create_directories(run.out_dir);
  run.manifest.subcommand = name;
  run.manifest.config_path = g.config_path;
  run.manifest.config_hash = sha256_hex(run.cfg.text());
  run.manifest.seed = run.cfg.get_seed("run", "seed", 1);
  run.manifest.threads = kernels::threads();
  return run;
}

GridSpec grid_from(const Config& cfg, const GridSpec& fallback) {
  if (!cfg.has("grid", "dim") && !cfg.has("grid", "samples") && !cfg.has("grid", "extent"))
    return fallback;
  try {
    return GridSpec::make(static_cast<int>(cfg.get_int("grid", "dim", fallback.dim)),
                          static_cast<int>(cfg.get_int("grid", "samples", fallback.samples)),
                          cfg.get_real("grid", "extent", fallback.extent));
  } catch (const Error& e) {
    fail(errors::kConfigError, std::string("[grid]: ") + e.what());
  }
}

GridField input_field(const Config& cfg) {
  if (cfg.has("input", "field")) return load_field(cfg.get_path("input", "field"));
  const std::string fixture = cfg.get("input", "fixture", "jump");
  if (fixture == "jump") return fixtures::jump_field(grid_from(cfg, fixtures::jump_grid()));
  if (fixture == "smooth") return fixtures::smooth_control(grid_from(cfg, fixtures::jump_grid()));
  if (fixture == "bracket")
    return bracket_inverse(cfg.get_real("input", "s", 1.5), grid_from(cfg, fixtures::line_grid()));
  fail(errors::kConfigError, "unknown fixture '" + fixture + "'");
}

ScanLattice lattice_from(const Config& cfg, int dim) {
  LatticeOptions o;
  o.stride = cfg.get_real("lattice", "stride", 4.5);
  o.reach = cfg.get_real("lattice", "reach", o.stride);
  o.r_inner = cfg.get_real("lattice", "r_inner", 0.5);
  o.r_outer = cfg.get_real("lattice", "r_outer", 4.5);
  o.angular_count = static_cast<int>(cfg.get_int("lattice", "angular_count", dim == 1 ? 2 : 8));
  o.half_angle = cfg.get_real_in("lattice", "half_angle", 0.42, 1e-3, kPi);
  try {
    return regular_lattice(dim, o);
  } catch (const Error& e) {
    fail(errors::kConfigError, std::string("[lattice]: ") + e.what());
  }
}

PointFunction gaussian_profile(int dim) {
  if (dim == 2) return fixtures::concentration_profile();
  const double c = std::pow(kPi, -0.25 * dim);
  return [c](std::span<const double> y) {
    double r2 = 0.0;
    for (double v : y) r2 += v * v;
    return cplx(c * std::exp(-0.5 * r2));
  };
}

// `oscillation:8,16,32,64`, `concentration:4,8,16,32`, `explicit:a.mfld,b.mfld`
// or `config` for the [sequence] block.
SequenceSpec sequence_from(const std::string& text, const Config& cfg) {
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : text.substr(colon + 1);
  auto ints = [&](const std::string& s) {
    std::vector<int> out;
    for (const auto& item : split_list(s)) out.push_back(static_cast<int>(parse_int(item, kind)));
    return out;
  };
  if (kind == "oscillation") return fixtures::oscillation_fixture(ints(rest));
  if (kind == "concentration") return fixtures::concentration_fixture(ints(rest));
  if (kind == "explicit") return load_sequence(split_list(rest), "");
  require(kind == "config", errors::kConfigError, "unknown sequence spec '" + text + "'");
  const std::string k = cfg.get("sequence", "kind");
  if (k == "oscillation") {
    GridField b = cfg.has("sequence", "profile") ? load_field(cfg.get_path("sequence", "profile"))
                                                 : fixtures::oscillation_profile();
    std::vector<int> omega0 = cfg.has("sequence", "omega0") ? cfg.get_ints("sequence", "omega0")
                                                            : std::vector<int>{1, 0};
    return oscillation_sequence(b, omega0, cfg.get_ints("sequence", "freqs"));
  }
  if (k == "concentration") {
    const GridSpec spec = grid_from(cfg, fixtures::oscillation_grid());
    std::vector<double> x0 = cfg.has("sequence", "x0") ? cfg.get_reals("sequence", "x0")
                                                       : std::vector<double>(spec.dim, 0.0);
    return concentration_sequence(spec, gaussian_profile(spec.dim), x0,
                                  cfg.get_ints("sequence", "scales"));
  }
  if (k == "explicit") {
    return load_sequence(cfg.get_paths("sequence", "members"), cfg.has("sequence", "limit") ? cfg.get_path("sequence", "limit") : "");
  }
  fail(errors::kConfigError, "unknown sequence kind '" + k + "'");
}

// `default` or comma-separated key=value among lo, hi, cells, delta, sectors, offset.
DefectBins bins_from(const std::string& text, int dim) {
  double lo = -1.8, hi = 1.8, delta = 0.2, offset = 0.0;
  int cells = 3, sectors = dim == 1 ? 2 : 8;
  if (text != "default") {
    for (const auto& item : split_list(text)) {
      const auto eq = item.find('=');
      require(eq != std::string::npos, errors::kConfigError, "bad bin geometry item '" + item + "'");
      const std::string key = item.substr(0, eq);
      const std::string value = item.substr(eq + 1);
      if (key == "lo") lo = parse_real(value, key);
      else if (key == "hi") hi = parse_real(value, key);
      else if (key == "delta") delta = parse_real(value, key);
      else if (key == "offset") offset = parse_real(value, key);
      else if (key == "cells") cells = static_cast<int>(parse_int(value, key));
      else if (key == "sectors") sectors = static_cast<int>(parse_int(value, key));
      else fail(errors::kConfigError, "unknown bin geometry key '" + key + "'");
    }
  }
  try {
    return DefectBins::make(dim, lo, hi, cells, delta, sectors, offset);
  } catch (const Error& e) {
    fail(errors::kConfigError, std::string("bin geometry: ") + e.what());
  }
}

int cmd_wf_scan(const Globals& g, std::optional<double> order) {
  Run run = start_run(g, "wf-scan",
                      {{"grid", {"dim", "samples", "extent"}},
                       {"input", {"field", "fixture", "s"}},
                       {"lattice", {"stride", "reach", "r_inner", "r_outer", "angular_count", "half_angle"}},
                       {"scan", {"order", "margin", "radial_floor", "drop_low"}}});
  const Config& cfg = run.cfg;
  const GridField u = input_field(cfg);
  const ScanLattice lattice = lattice_from(cfg, u.spec().dim);
  WfOptions opt;
  opt.margin = cfg.get_real_in("scan", "margin", 0.25, 0.0, 4.0);
  opt.profile.radial_floor = cfg.get_real("scan", "radial_floor", 1.0);
  opt.profile.drop_low = static_cast<int>(cfg.get_int("scan", "drop_low", 2));
  const double r = order.value_or(cfg.get_real("scan", "order", 0.4));
  const auto report = wf_scan(u, r, lattice, opt);
  const std::string path = run.artifact("wavefront.csv");
  {
    auto out = run.open(path);
    write_wavefront_csv(out, report);
  }
  run.manifest.add_artifact(path);
  std::printf("patches %zu singular %zu\n", report.records.size(), report.singular_count());
  run.finish();
  return 0;
}

int cmd_wfc_scan(const Globals& g, std::optional<double> order) {
  Run run = start_run(g, "wfc-scan",
                      {{"grid", {"dim", "samples", "extent"}},
                       {"sequence", {"kind", "freqs", "omega0", "profile", "scales", "x0", "members", "limit"}},
                       {"lattice", {"kind", "stride", "reach", "r_inner", "r_outer", "angular_count", "half_angle"}},
                       {"scan", {"order", "compact_ratio", "noncompact_ratio", "negligible"}}});
  const Config& cfg = run.cfg;
  const SequenceSpec seq = sequence_from("config", cfg);
  const std::string kind = cfg.get("lattice", "kind", "matched");
  ScanLattice lattice;
  if (kind == "matched") {
    lattice = matching_lattice(fixtures::oscillation_bins(), cfg.get_real("lattice", "r_inner", 0.4),
                               cfg.get_real("lattice", "r_outer", 0.9),
                               cfg.get_real_in("lattice", "half_angle", 0.42, 1e-3, kPi));
  } else if (kind == "regular") {
    lattice = lattice_from(cfg, seq.spec().dim);
  } else if (kind == "kr") {
    lattice = kr_lattice(seq.spec());
  } else {
    fail(errors::kConfigError, "unknown lattice kind '" + kind + "'");
  }
  WfcOptions opt;
  opt.compact_ratio = cfg.get_real_in("scan", "compact_ratio", 0.1, 0.0, 1.0);
  opt.noncompact_ratio = cfg.get_real_in("scan", "noncompact_ratio", 0.8, opt.compact_ratio, 1.0);
  opt.negligible_fraction = cfg.get_real_in("scan", "negligible", 1e-3, 0.0, 1.0);
  const double r = order.value_or(cfg.get_real("scan", "order", 0.0));
  const auto report = wfc_scan(seq.members, seq.limit, r, lattice, default_radii(seq.spec()), opt);
  const std::string path = run.artifact("sequence.csv");
  {
    auto out = run.open(path);
    write_sequence_csv(out, report);
  }
  run.manifest.add_artifact(path);
  std::printf("patches %zu noncompact %zu inconclusive %zu\n", report.records.size(),
              report.count(TailVerdict::noncompact), report.count(TailVerdict::inconclusive));
  run.finish();
  return 0;
}

int cmd_psido_apply(const Globals& g) {
  Run run = start_run(g, "psido-apply",
                      {{"grid", {"dim", "samples", "extent"}},
                       {"input", {"field", "fixture", "s"}},
                       {"symbol", {"kind", "power", "table", "order"}},
                       {"probe", {"center", "r_inner", "r_outer", "omega", "half_angle"}}});
  const Config& cfg = run.cfg;
  const GridField u = input_field(cfg);
  const std::string kind = cfg.get("symbol", "kind", "bracket");
  std::optional<Symbol> a;
  if (kind == "bracket") {
    a = Symbol::japanese_bracket(cfg.get_real("symbol", "power", -1.0));
  } else if (kind == "table") {
    auto table = std::make_shared<const DirectionTable>(
        DirectionTable::load(cfg.get_path("symbol", "table"), u.channels(), u.channels()));
    a = polyhomogeneous_from_table(cfg.get_real("symbol", "order", 0.0), table);
  } else {
    fail(errors::kConfigError, "unknown symbol kind '" + kind + "'");
  }
  const GridField v = quantize(*a, u);
  const std::string field_path = run.artifact("applied.mfld");
  save_field(field_path, v);
  run.manifest.add_artifact(field_path);
  if (cfg.has("probe", "omega")) {
    const int dim = u.spec().dim;
    const auto center = cfg.has("probe", "center") ? cfg.get_reals("probe", "center")
                                                   : std::vector<double>(dim, 0.0);
    const Cutoff window = BumpCutoff::make(center, cfg.get_real("probe", "r_inner", 0.5),
                                           cfg.get_real("probe", "r_outer", 4.5));
    const DirectionCap cap = DirectionCap::make(cfg.get_reals("probe", "omega"),
                                                cfg.get_real("probe", "half_angle", 0.42));
    const auto shift = order_shift_probe(*a, u, window, cap);
    const std::string path = run.artifact("order_shift.csv");
    {
      auto out = run.open(path);
      CsvWriter w(out);
      w.header({"r_star_before", "r_star_after", "shift"});
      w.row({fmt_real(shift.r_star_before), fmt_real(shift.r_star_after), fmt_real(shift.shift())});
    }
    run.manifest.add_artifact(path);
    std::printf("r_star %.6f -> %.6f\n", shift.r_star_before, shift.r_star_after);
  }
  run.finish();
  return 0;
}

int cmd_pullback_verify(const Globals& g, const std::string& kind, int n, int k, int m, double r1,
                        double r2) {
  Run run = start_run(g, "pullback-verify", {});
  const auto row = admissible(parse_map_class(kind), n, r1, r2, k, m);
  const std::string path = run.artifact("admissibility.csv");
  {
    auto out = run.open(path);
    CsvWriter w(out);
    w.header({"kind", "n", "k", "r1", "r2", "r2_bound", "gap_bound", "verdict", "isomorphism"});
    w.row({to_string(row.kind), fmt_int(row.n), fmt_int(row.k), fmt_real(row.r1), fmt_real(row.r2),
           fmt_real(row.r2_bound), fmt_real(row.gap_bound), to_string(row.verdict),
           row.isomorphism ? "true" : "false"});
  }
  run.manifest.add_artifact(path);
  std::printf("%s n=%d k=%d r1=%g r2=%g -> %s\n", to_string(row.kind), n, k, r1, r2,
              to_string(row.verdict));
  run.finish();
  return 0;
}

int cmd_appendix_check(const Globals& g, int q, double s, int samples, double extent) {
  Run run = start_run(g, "appendix-check", {});
  const auto rows = appendix_dual_route(q, s, GridSpec::make(q, samples, extent));
  const std::string path = run.artifact("appendix.csv");
  double worst = 0.0;
  {
    auto out = run.open(path);
    CsvWriter w(out);
    auto names = indexed_names("y", q);
    for (const char* c : {"route_integral", "route_fft", "rel_err"}) names.emplace_back(c);
    w.header(names);
    for (const auto& r : rows) {
      std::vector<std::string> cells;
      for (double v : r.y) cells.push_back(fmt_real(v));
      cells.push_back(fmt_real(r.route_integral));
      cells.push_back(fmt_real(r.route_fft));
      cells.push_back(fmt_real(r.rel_err));
      w.row(cells);
      worst = std::max(worst, r.rel_err);
    }
  }
  run.manifest.add_artifact(path);
  std::printf("rows %zu max rel_err %.3e\n", rows.size(), worst);
  run.finish();
  return 0;
}

int cmd_defect(const Globals& g, const std::string& seq_text, const std::string& bins_text,
               int tail, bool hermitian) {
  Run run = start_run(g, "defect-estimate",
                      {{"grid", {"dim", "samples", "extent"}},
                       {"sequence", {"kind", "freqs", "omega0", "profile", "scales", "x0", "members", "limit"}}});
  const SequenceSpec seq = sequence_from(seq_text, run.cfg);
  const DefectBins bins = bins_from(bins_text, seq.spec().dim);
  const auto est = defect_estimate(seq, bins, tail);
  const std::string path = run.artifact("defect.csv");
  {
    auto out = run.open(path);
    write_defect_csv(out, est);
  }
  run.manifest.add_artifact(path);
  std::printf("bins %zu total %.6e positivity_residual %.3e\n", est.values.size(), est.total,
              est.positivity_residual());
  if (hermitian) std::printf("hermitian_deviation %.3e\n", hermitian_check(est));
  run.finish();
  return 0;
}

int cmd_compcomp(const Globals& g, const std::string& preset, const std::string& freqs,
                 const std::string& b, double order) {
  Run run = start_run(g, "compcomp-run", {{"condition", {"mode", "directions"}}});
  require(preset == "div-curl", errors::kConfigError, "unknown preset '" + preset + "'");
  require(b == "pass" || b == "fail", errors::kConfigError, "--b must be pass or fail");
  std::vector<int> list;
  for (const auto& item : split_list(freqs)) list.push_back(static_cast<int>(parse_int(item, "--freqs")));
  const auto p = div_curl_preset(list, b == "pass");
  CompCompOptions opt;
  opt.seed = run.manifest.seed;
  opt.mode = parse_condition_mode(run.cfg.get("condition", "mode", "zero"));
  opt.condition_directions = static_cast<int>(run.cfg.get_int("condition", "directions", 32));
  const auto rep = compcomp_run(p.sequence, p.a, p.b, p.chi, order, opt);
  const std::string path = run.artifact("compcomp.csv");
  {
    auto out = run.open(path);
    write_compcomp_csv(out, rep);
  }
  run.manifest.add_artifact(path);
  std::printf("proxy %s condition %s worst_residual %.3e gap %.6e scale %.6e\n",
              to_string(rep.proxy_verdict), rep.condition.pass ? "pass" : "fail",
              rep.condition.worst_residual, rep.gap, rep.scale);
  run.finish();
  return 0;
}

int cmd_selftest(const Globals& g) {
  Run run = start_run(g, "selftest", {});
  const auto results = run_selftest(run.manifest.seed);
  const std::string path = run.artifact("selftest.csv");
  bool ok = true;
  {
    auto out = run.open(path);
    CsvWriter w(out);
    w.header({"check", "pass", "value", "tolerance"});
    for (const auto& r : results) {
      w.row({r.name, r.pass ? "true" : "false", fmt_real(r.value), fmt_real(r.tolerance)});
      std::printf("%-24s %s  %.3e (tol %.1e)\n", r.name.c_str(), r.pass ? "PASS" : "FAIL", r.value,
                  r.tolerance);
      ok = ok && r.pass;
    }
  }
  run.manifest.add_artifact(path);
  run.finish();
  return ok ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Microlocal analysis experiments on sampled fields"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config_path, "Configuration file")->check(CLI::ExistingFile);
  app.add_option("--out", g.out_dir, "Output directory");
  app.add_option("--threads", g.threads, "Worker threads (0: OpenMP default)")->check(CLI::NonNegativeNumber);

  std::optional<double> order;
  auto* wf = app.add_subcommand("wf-scan", "Sobolev wave front scan of one field");
  wf->add_option("--order", order, "Sobolev order r");
  auto* wfc = app.add_subcommand("wfc-scan", "Compactness wave front scan of a sequence");
  wfc->add_option("--order", order, "Sobolev order r");
  auto* psido = app.add_subcommand("psido-apply", "Apply a quantized symbol to a field");

  std::string kind;
  int n = 2, k = 0, m = -1;
  double r1 = 0.0, r2 = 0.0;
  auto* pb = app.add_subcommand("pullback-verify", "Admissibility row for a pullback");
  pb->add_option("--case", kind, "general | constant_rank | submersion | diffeo")->required();
  pb->add_option("--n", n, "Target dimension")->required();
  pb->add_option("--k", k, "Rank for constant_rank");
  pb->add_option("--m", m, "Source dimension (default n)");
  pb->add_option("--r1", r1, "Order r1")->required();
  pb->add_option("--r2", r2, "Order r2")->required();

  int q = 1, samples = 1024;
  double s = 2.0, extent = 40.0;
  auto* ap = app.add_subcommand("appendix-check", "Integral formula versus lattice inverse transform");
  ap->add_option("--q", q, "Dimension q")->check(CLI::Range(1, 3));
  ap->add_option("--s", s, "Order s > 0");
  ap->add_option("--samples", samples, "Samples per axis");
  ap->add_option("--extent", extent, "Box side");

  std::string seq_text = "oscillation:8,16,32,64", bins_text = "default";
  int tail = 2;
  bool hermitian = false;
  auto* de = app.add_subcommand("defect-estimate", "Binned defect measure of a sequence");
  de->add_option("--seq", seq_text, "oscillation:<freqs> | concentration:<scales> | explicit:<files> | config");
  de->add_option("--bins", bins_text, "default or lo=,hi=,cells=,delta=,sectors=,offset=");
  de->add_option("--tail", tail, "Tail length K");
  de->add_flag("--hermitian", hermitian, "Also report the hermitian deviation");

  std::string preset = "div-curl", freqs = "8,16,32,64", b = "pass";
  double cc_order = 1.0;
  auto* cc = app.add_subcommand("compcomp-run", "Compensated compactness experiment");
  cc->add_option("--preset", preset, "Preset name");
  cc->add_option("--freqs", freqs, "Comma-separated frequencies");
  cc->add_option("--b", b, "pass | fail");
  cc->add_option("--order", cc_order, "Constraint order r");

  auto* st = app.add_subcommand("selftest", "Exact invariant suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (wf->parsed()) return cmd_wf_scan(g, order);
    if (wfc->parsed()) return cmd_wfc_scan(g, order);
    if (psido->parsed()) return cmd_psido_apply(g);
    if (pb->parsed()) return cmd_pullback_verify(g, kind, n, k, m, r1, r2);
    if (ap->parsed()) return cmd_appendix_check(g, q, s, samples, extent);
    if (de->parsed()) return cmd_defect(g, seq_text, bins_text, tail, hermitian);
    if (cc->parsed()) return cmd_compcomp(g, preset, freqs, b, cc_order);
    if (st->parsed()) return cmd_selftest(g);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.name() == errors::kConfigError ? 2 : 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 2;
}
