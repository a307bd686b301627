// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <memory>
#include <ostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "config.hpp"
#include "tevlab/assembly.hpp"
#include "tevlab/eigensolve.hpp"
#include "tevlab/oracles.hpp"
#include "tevlab/spectral.hpp"

namespace tevlab::cli {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "0.1.0";

ordered_json complex_json(cplx z) { return ordered_json::array({z.real(), z.imag()}); }

ordered_json point_json(Point2 p) { return ordered_json::array({p.x, p.y}); }

ordered_json condition_json(const ConditionReport& r) {
  return {{"id", r.id},          {"pass", r.pass},           {"margin", r.margin},
          {"location", point_json(r.location)}, {"samples", r.samples}, {"min_value", r.min_value},
          {"max_value", r.max_value}};
}

// Collects artifacts and writes them in one place, in a fixed order.
class OutputStage {
 public:
  OutputStage(std::string dir, std::string hash) : dir_(std::move(dir)), hash_(std::move(hash)) {}

  void json(const std::string& name, ordered_json body) {
    ordered_json doc;
    doc["config_hash"] = hash_;
    for (auto& [k, v] : body.items()) doc[k] = v;
    put(name, doc.dump(2) + "\n");
  }

  void csv(const std::string& name, const std::string& body) { put(name, "# config_hash=" + hash_ + "\n" + body); }

  void raw(const std::string& name, const std::string& body) { put(name, body); }

  void manifest(const std::string& command, const RunConfig& cfg, int threads, double wall, int status) {
    ordered_json files = ordered_json::array();
    for (const auto& [name, bytes] : written_) {
      files.push_back({{"name", name}, {"bytes", bytes.size()}, {"fnv1a", config_hash(bytes)}});
    }
    ordered_json m = {{"tool", "tevlab"},
                      {"version", kVersion},
                      {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                    std::to_string(EIGEN_MINOR_VERSION)},
                      {"command", command},
                      {"config_hash", hash_},
                      {"seed", cfg.seed},
                      {"threads", threads},
                      {"exit_status", status},
                      {"wall_time_s", wall},
                      {"files", files}};
    write_atomic(dir_, "manifest.json", m.dump(2) + "\n");
  }

 private:
  void put(const std::string& name, const std::string& bytes) {
    write_atomic(dir_, name, bytes);
    written_.emplace_back(name, bytes);
  }

  std::string dir_, hash_;
  std::vector<std::pair<std::string, std::string>> written_;
};

std::shared_ptr<const TriMesh> build_mesh(const RunConfig& c) {
  if (c.domain_kind == "file") return std::make_shared<const TriMesh>(load_mesh_file(c.mesh_path));
  return std::make_shared<const TriMesh>(mesh_unit_disk(c.level));
}

ordered_json inputs_json(const RunConfig& c) {
  ordered_json d = {{"kind", c.domain_kind}};
  if (c.domain_kind == "disk") d["level"] = c.level;
  else d["path"] = c.mesh_path;
  return {{"domain", d}, {"media", c.media_text}, {"seed", c.seed}};
}

WindowOptions window_options(const RunConfig& c) {
  WindowOptions w;
  w.arnoldi.nev = c.nev;
  w.arnoldi.tol = c.tol;
  w.arnoldi.seed = c.seed;
  w.sector_half_angle = c.sector;
  w.extra_shifts = c.shifts;
  return w;
}

std::string spectrum_csv(const Spectrum& s) {
  std::ostringstream out;
  write_spectrum_csv(s, out);
  return out.str();
}

ordered_json spectrum_summary(const Spectrum& s) {
  long solves = 0;
  for (const auto& sh : s.shifts) solves += sh.solves;
  double worst = 0.0;
  for (const auto& e : s.entries) worst = std::max(worst, e.residual);
  return {{"t_max", s.t_max},         {"clusters", s.entries.size()}, {"eigenvalues", s.total_multiplicity()},
          {"shifts", s.shifts.size()}, {"solves", solves},             {"max_residual", worst},
          {"warnings", s.warnings}};
}

Spectrum compute_spectrum(const RunConfig& c, const TransmissionPencil& p) {
  return spectrum_window(p, c.t_max, window_options(c));
}

// --- commands ---------------------------------------------------------------

int cmd_mesh(const RunConfig& c, OutputStage& out) {
  const auto mesh = build_mesh(c);
  std::ostringstream ss;
  save_mesh(*mesh, ss);
  std::string text = ss.str();
  const auto nl = text.find('\n');
  text.insert(nl + 1, "# config_hash=" + config_hash(c.source_text) + "\n");
  out.raw("mesh.tmesh", text);
  out.json("mesh.json", {{"inputs", inputs_json(c)},
                         {"vertices", mesh->num_vertices()},
                         {"triangles", mesh->num_triangles()},
                         {"edges", mesh->num_edges()},
                         {"boundary_edges", mesh->boundary_edges().size()},
                         {"h", mesh->characteristic_h()},
                         {"area", mesh->area()}});
  return kSuccess;
}

int cmd_check(const RunConfig& c, OutputStage& out) {
  const auto mesh = build_mesh(c);
  const auto samples = interior_samples(*mesh);
  const auto frames = boundary_frames(*mesh);
  const auto [mat, sig] = check_ellipticity(c.media, samples);
  const ConditionReport comp = check_complementing(c.media, frames);
  const ConditionReport jump = check_jump(c.media, frames);
  const std::vector<ConditionReport> all = {mat, sig, comp, jump};
  ordered_json reports = ordered_json::array();
  ordered_json failed = ordered_json::array();
  for (const auto& r : all) {
    reports.push_back(condition_json(r));
    if (!r.pass) failed.push_back(r.id);
  }
  out.json("check.json",
           {{"inputs", inputs_json(c)}, {"conditions", reports}, {"failed", failed}, {"pass", failed.empty()}});
  return failed.empty() ? kSuccess : kAnalysisFailure;
}

int cmd_eigs(const RunConfig& c, OutputStage& out) {
  const auto p = assemble_pencil(build_mesh(c), c.media);
  const Spectrum s = compute_spectrum(c, p);
  out.csv("spectrum.csv", spectrum_csv(s));
  ordered_json j = {{"inputs", inputs_json(c)}, {"ndof", p.size()}, {"pencil_warnings", p.warnings}};
  j["spectrum"] = spectrum_summary(s);
  out.json("eigs.json", j);
  return kSuccess;
}

int cmd_weyl(const RunConfig& c, OutputStage& out) {
  const auto p = assemble_pencil(build_mesh(c), c.media);
  const Spectrum s = compute_spectrum(c, p);
  const double c_analytic = weyl_constant(*p.mesh, c.media);
  WeylWindow win;
  win.lo_fraction = c.weyl_lo;
  win.hi_fraction = c.weyl_hi;
  win.grid = c.weyl_grid;
  const WeylEstimate w = fit_weyl(s, c_analytic, win);
  std::ostringstream counting;
  counting << "t,N\n" << std::setprecision(17);
  for (std::size_t i = 0; i < w.t_grid.size(); ++i) counting << w.t_grid[i] << ',' << w.counts[i] << '\n';
  out.csv("spectrum.csv", spectrum_csv(s));
  out.csv("counting.csv", counting.str());
  ordered_json j = {{"inputs", inputs_json(c)}, {"ndof", p.size()}, {"spectrum", spectrum_summary(s)}};
  j["weyl"] = {{"c_analytic", w.c_analytic},
               {"c_fit", w.c_fit},
               {"intercept", w.intercept},
               {"c_fit_origin", w.c_fit_origin},
               {"window", {w.t_lo, w.t_hi}},
               {"relative_deviation", w.relative_deviation},
               {"eigenvalues_in_window", w.eigenvalues_in_window}};
  if (c.tauberian) {
    TauberianOptions to;
    to.lambda0 = cplx(0.0, c.Lambda0);
    to.c_reference = w.c_fit;
    std::vector<double> T;
    for (double r : log_grid(c.tauberian_lo * c.t_max, c.tauberian_hi * c.t_max, c.tauberian_points))
      T.push_back(std::pow(r, 8.0));
    const TauberianReport tr = tauberian_check(s.entries, T, to);
    j["tauberian"] = {{"a", tr.a},
                      {"power", tr.power},
                      {"T", tr.T},
                      {"S", tr.S},
                      {"P", tr.P},
                      {"free_slope", tr.free_slope},
                      {"normalization", tr.normalization},
                      {"c_tauberian", tr.c_tauberian},
                      {"c_reference", tr.c_reference},
                      {"relative_deviation", tr.relative_deviation},
                      {"warnings", tr.warnings}};
  }
  out.json("weyl.json", j);
  return kSuccess;
}

int cmd_resolvent(const RunConfig& c, OutputStage& out) {
  const auto p = assemble_pencil(build_mesh(c), c.media);
  ResolventOptions ro;
  ro.iterations = c.power_iterations;
  ro.restarts = c.power_restarts;
  ro.seed = c.seed;
  ro.epsilon0 = c.epsilon0;
  ro.Lambda0 = c.Lambda0;
  const auto grid = log_grid(c.scan_t_min, c.scan_t_max, c.scan_points);
  ordered_json scans = ordered_json::array();
  std::ostringstream csv;
  csv << "theta,t,l2,gradient,max_norm,ok\n" << std::setprecision(17);
  for (double theta : c.rays) {
    const ResolventScan s = resolvent_norm_scan(p, theta, grid, ro);
    ordered_json pts = ordered_json::array();
    for (const auto& pt : s.points) {
      pts.push_back({{"t", pt.t}, {"l2", pt.l2}, {"gradient", pt.gradient}, {"max_norm", pt.max_norm}, {"ok", pt.ok},
                     {"error", pt.error}});
      csv << theta << ',' << pt.t << ',' << pt.l2 << ',' << pt.gradient << ',' << pt.max_norm << ',' << pt.ok << '\n';
    }
    scans.push_back({{"theta", theta},
                     {"points", pts},
                     {"slope_l2", s.slope_l2},
                     {"slope_gradient", s.slope_gradient},
                     {"slope_max", s.slope_max},
                     {"warnings", s.warnings}});
  }
  out.csv("resolvent.csv", csv.str());
  out.json("resolvent.json", {{"inputs", inputs_json(c)}, {"ndof", p.size()}, {"scans", scans}});
  return kSuccess;
}

int cmd_trace(const RunConfig& c, OutputStage& out) {
  const auto p = assemble_pencil(build_mesh(c), c.media);
  TraceOptions to;
  to.Lambda0 = c.Lambda0;
  to.dense_cap = c.dense_cap;
  const TraceReport r = trace_identity_check(p.K, p.M, c.trace_t, to);
  ordered_json shifts = ordered_json::array();
  for (cplx s : r.shifts) shifts.push_back(complex_json(s));
  // shifted resolvent identity at lambda0 with a seeded random shift
  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double sr = u(rng), si = u(rng);
  const cplx s(sr * c.Lambda0, si * c.Lambda0);
  const ModifiedResolventReport mr = modified_resolvent_check(MatR(p.K), MatR(p.M), r.lambda0, s);
  out.json("trace.json", {{"inputs", inputs_json(c)},
                          {"ndof", p.size()},
                          {"t", r.t},
                          {"k", r.k},
                          {"Lambda0", r.Lambda0},
                          {"lambda0", complex_json(r.lambda0)},
                          {"Lambda0_raises", r.raises},
                          {"theta", r.theta},
                          {"shifts", shifts},
                          {"shift_conditions", r.conditions},
                          {"lhs", complex_json(r.lhs)},
                          {"rhs", complex_json(r.rhs)},
                          {"abs_gap", r.abs_gap},
                          {"rel_gap", r.rel_gap},
                          {"eigenvalues", r.eigenvalues},
                          {"warnings", r.warnings},
                          {"modified_resolvent",
                           {{"s", complex_json(s)},
                            {"deviation_right", mr.deviation_right},
                            {"deviation_left", mr.deviation_left},
                            {"condition", mr.condition},
                            {"tolerance", mr.tolerance},
                            {"pass", mr.pass}}}});
  return kSuccess;
}

int cmd_oracle(const RunConfig& c, OutputStage& out) {
  DiskOracleOptions o;
  o.max_mode = c.oracle_max_mode;
  o.k_max = c.oracle_k_max;
  o.complex_roots = c.oracle_complex;
  const auto ev = disk_eigenvalues(c.oracle_n, o);
  std::ostringstream csv;
  csv << "mode,k_re,k_im,lambda_re,lambda_im,multiplicity,determinant_residual\n" << std::setprecision(17);
  for (const auto& e : ev) {
    csv << e.mode << ',' << e.k.real() << ',' << e.k.imag() << ',' << e.lambda.real() << ',' << e.lambda.imag() << ','
        << e.multiplicity << ',' << e.determinant_residual << '\n';
  }
  out.csv("oracle.csv", csv.str());
  return kSuccess;
}

}  // namespace

void write_atomic(const std::string& dir, const std::string& name, const std::string& content) {
  fs::create_directories(dir);
  const fs::path target = fs::path(dir) / name;
  const fs::path tmp = fs::path(dir) / ("." + name + ".tmp");
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + tmp.string());
    f << content;
    f.flush();
    if (!f) throw std::runtime_error("short write to " + tmp.string());
  }
  fs::rename(tmp, target);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"tevlab: transmission eigenvalue lab"};
  app.set_version_flag("--version", kVersion);
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  int threads = 1;
  app.add_option("--config", config_path, "INI configuration file");
  app.add_option("--out", out_dir, "output directory (overrides [output] dir)");
  app.add_option("--seed", seed, "random seed (overrides [run] seed)");
  app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  app.require_subcommand(1);

  struct Command {
    const char* name;
    const char* help;
    bool media_required;
    std::function<int(const RunConfig&, OutputStage&)> fn;
  };
  const std::vector<Command> commands = {
      {"mesh", "generate or load the mesh and write it out", false, cmd_mesh},
      {"check", "verify ellipticity, complementing and jump conditions", true, cmd_check},
      {"eigs", "eigenvalues with |lambda| <= t_max", true, cmd_eigs},
      {"weyl", "counting-function fit against the Weyl constant", true, cmd_weyl},
      {"resolvent", "resolvent norm scan along rays", true, cmd_resolvent},
      {"trace", "trace identity for a product of four resolvents", true, cmd_trace},
      {"oracle", "unit-disk transmission eigenvalues from Bessel functions", false, cmd_oracle},
  };
  for (const auto& cmd : commands) app.add_subcommand(cmd.name, cmd.help);

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsageError;
  }

  const Command* chosen = nullptr;
  for (const auto& cmd : commands) {
    if (app.got_subcommand(cmd.name)) chosen = &cmd;
  }
  RunConfig cfg;
  try {
    if (config_path.empty()) {
      if (chosen->media_required) throw ConfigError("<none>", 0, "command '" + std::string(chosen->name) +
                                                                     "' needs --config with a [media] section");
      cfg = load_config("", "<defaults>", false);
    } else {
      cfg = load_config_file(config_path, chosen->media_required);
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kUsageError;
  }
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  if (seed) cfg.seed = *seed;
  // the seed is part of the run identity
  const std::string hash = config_hash(cfg.source_text + "\nseed=" + std::to_string(cfg.seed));

  OutputStage stage(cfg.out_dir, hash);
  const auto t0 = std::chrono::steady_clock::now();
  int status = kAnalysisFailure;
  try {
    status = chosen->fn(cfg, stage);
  } catch (const std::exception& e) {
    err << chosen->name << ": " << e.what() << '\n';
    try {
      stage.json("error.json", {{"command", chosen->name}, {"error", e.what()}});
    } catch (const std::exception& e2) {
      err << "could not write error report: " << e2.what() << '\n';
    }
    status = kAnalysisFailure;
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  try {
    stage.manifest(chosen->name, cfg, threads, wall, status);
  } catch (const std::exception& e) {
    err << "could not write manifest: " << e.what() << '\n';
    return kAnalysisFailure;
  }
  out << chosen->name << ": exit " << status << ", outputs in " << cfg.out_dir << '\n';
  return status;
}

}  // namespace tevlab::cli
