// nvie: command line front end.
//
//   nvie [--config F] [--threads N] [--no-corrections] [--output DIR] <command> ...
//
// Exit codes: 0 success, 2 configuration, 3 solver convergence, 4 quadrature
// self-certification.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nvie/errors.hpp"
#include "nvie/scene_config.hpp"
#include "nvie/studies.hpp"
#include "nvie/weight_table.hpp"

namespace fs = std::filesystem;
using namespace nvie;

namespace {

enum ExitCode { ok = 0, failure = 1, config_error = 2, convergence_error = 3, accuracy_error = 4 };

struct Globals {
  std::string config;
  int threads = 0;
  bool no_corrections = false;
  std::string phase;
  std::string output;
  std::string cache;
  std::vector<std::string> overrides;
};

std::array<int, 3> parse_grid(const std::string& text) {
  std::string t = text;
  for (char& c : t)
    if (c == ',' || c == 'x') c = ' ';
  std::istringstream in(t);
  std::vector<int> v;
  int n;
  while (in >> n) v.push_back(n);
  if (!in.eof() || (v.size() != 1 && v.size() != 3))
    throw ConfigError("grid '" + text + "': expected p or m_r,m_theta,m_phi");
  return v.size() == 1 ? std::array<int, 3>{v[0], v[0], v[0]} : std::array<int, 3>{v[0], v[1], v[2]};
}

ReferenceShape parse_shape(const std::string& s) {
  if (s == "cube") return ReferenceShape::cube;
  if (s == "sphere") return ReferenceShape::sphere;
  throw ConfigError("shape must be cube or sphere, got '" + s + "'");
}

class Context {
 public:
  explicit Context(const Globals& g) : g_(g) {
    if (!g.config.empty()) {
      cfg_ = load_scene_config(g.config, g.overrides);
      have_config_ = true;
    } else if (!g.overrides.empty()) {
      throw ConfigError("--set needs --config");
    }
    if (!g.output.empty()) cfg_.output.directory = g.output;
    if (!g.cache.empty()) cfg_.table_cache = g.cache;
    if (g.no_corrections) cfg_.assembly.corrections = false;
    if (!g.phase.empty()) cfg_.assembly.phase = parse_self_phase(g.phase);
    store_ = std::make_unique<TableStore>(cfg_.table_cache);
  }

  bool have_config() const { return have_config_; }
  const SceneConfig& config() const { return cfg_; }
  TableStore& store() { return *store_; }
  const AssemblyOptions& assembly() const { return cfg_.assembly; }

  fs::path output(const std::string& name) const {
    fs::create_directories(cfg_.output.directory);
    return cfg_.output.directory / name;
  }

  std::ofstream open(const std::string& name) const {
    const auto path = output(name);
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path.string());
    std::printf("wrote %s\n", path.string().c_str());
    return out;
  }

 private:
  Globals g_;
  SceneConfig cfg_;
  bool have_config_ = false;
  std::unique_ptr<TableStore> store_;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------------------

struct WeightsArgs {
  std::string shape = "cube";
  std::string grid = "3";
  std::vector<double> deltas{1e-3};
  bool csv = false;
};

int cmd_generate_weights(Context& ctx, const WeightsArgs& a) {
  std::vector<std::pair<std::shared_ptr<const CollocationGrid>, double>> jobs;
  if (ctx.have_config()) {
    const Scene& scene = ctx.config().scene;
    for (const auto& s : scene.scatterers)
      jobs.emplace_back(ctx.store().grid(s.shape, s.grid_params), scene.delta);
  } else {
    const auto grid = ctx.store().grid(parse_shape(a.shape), parse_grid(a.grid));
    for (double d : a.deltas) jobs.emplace_back(grid, d);
  }
  for (const auto& [grid, delta] : jobs) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto table = ctx.store().weights(*grid, delta);
    std::printf("%s %d %d %d  delta %.3e  nodes %d  %.1f s\n", to_string(grid->shape()),
                grid->params()[0], grid->params()[1], grid->params()[2], delta, grid->size(),
                seconds_since(t0));
    if (a.csv) {
      char name[96];
      std::snprintf(name, sizeof name, "weights_%s_%d_%d_%d_%.3e.csv", to_string(grid->shape()),
                    grid->params()[0], grid->params()[1], grid->params()[2], delta);
      auto out = ctx.open(name);
      write_table_csv(*table, out);
    }
  }
  return ok;
}

struct ValidateArgs {
  std::vector<double> deltas{0.1, 0.05, 0.025, 0.0125};
  double reference_delta = 1e-3;
};

int cmd_validate_tables(Context& ctx, const ValidateArgs& a) {
  const auto report = validate_tables(a.deltas, a.reference_delta, ctx.store());
  for (const auto& row : report.rows) {
    std::printf("%-6s node %2d  reference g11 %.6f g12 %.6f g22 %.6f g23 %.6f g33 %.6f\n",
                to_string(row.node_class), row.node, row.reference(0, 0), row.reference(0, 1),
                row.reference(1, 1), row.reference(1, 2), row.reference(2, 2));
    for (std::size_t i = 0; i < report.deltas.size(); ++i) {
      const auto& v = row.values[i];
      std::printf("        delta %-7g  g11 %.6f g12 %.6f g22 %.6f g23 %.6f g33 %.6f\n",
                  report.deltas[i], v(0, 0), v(0, 1), v(1, 1), v(1, 2), v(2, 2));
    }
  }
  auto out = ctx.open("validation.csv");
  write_validation_report(report, out);
  return ok;
}

int cmd_solve(Context& ctx) {
  if (!ctx.have_config()) throw ConfigError("solve needs --config");
  const auto& cfg = ctx.config();
  const auto t0 = std::chrono::steady_clock::now();
  const SolveOutput out = solve_scene(cfg.scene, ctx.store(), cfg.solver,
                                      ctx.assembly());
  std::printf("unknowns %d  iterations %d  residual %.3e  %.1f s\n",
              3 * out.discretization->node_count(), out.result.iterations, out.result.residual,
              seconds_since(t0));
  const FieldSolution sol = out.solution();
  {
    auto f = ctx.open("nodal.csv");
    write_nodal_csv(sol, f);
  }
  const FieldSlice slice = sample_slice(sol, cfg.output);
  char name[64];
  std::snprintf(name, sizeof name, "slice_%c_%g.csv", cfg.output.slice_axis, cfg.output.slice_value);
  auto f = ctx.open(name);
  write_field_csv(slice.points, slice.field, f);
  return ok;
}

struct ConvergenceArgs {
  std::string study;
  std::vector<std::string> resolutions;
  int reference = 7;
};

int cmd_convergence(Context& ctx, const ConvergenceArgs& a) {
  const StudyKind kind = a.study == "sphere" ? StudyKind::sphere : StudyKind::cube;
  std::vector<std::array<int, 3>> res;
  for (const auto& r : a.resolutions) res.push_back(parse_grid(r));
  if (res.empty()) {
    if (kind == StudyKind::sphere)
      res = {{2, 2, 2}, {3, 3, 3}, {4, 4, 4}, {5, 5, 5}};
    else
      res = {{3, 3, 3}, {4, 4, 4}, {5, 5, 5}, {6, 6, 6}};
  }
  Scene scene;
  if (ctx.have_config())
    scene = ctx.config().scene;
  else
    scene = kind == StudyKind::sphere ? mie_sphere_scene(res.front()) : benchmark_cube_scene();
  const auto report = convergence_study(kind, scene, res, {a.reference, a.reference, a.reference},
                                        ctx.store(), ctx.config().solver, ctx.assembly());
  write_convergence_report(report, std::cout);
  auto out = ctx.open(std::string("convergence_") + a.study + ".csv");
  write_convergence_report(report, out);
  return ok;
}

struct DeltaArgs {
  std::vector<double> deltas{0.1, 0.05, 0.025, 0.0125};
  double reference_delta = 1e-3;
};

int cmd_delta_study(Context& ctx, const DeltaArgs& a) {
  const Scene scene = ctx.have_config() ? ctx.config().scene : benchmark_cube_scene();
  const auto report = delta_study(scene, a.deltas, a.reference_delta, ctx.assembly(),
                                  ctx.store(), ctx.config().solver);
  write_delta_report(report, std::cout);
  {
    auto out = ctx.open("delta_study.csv");
    write_delta_report(report, out);
  }
  auto out = ctx.open("delta_profile.csv");
  write_delta_profile(report, out);
  return ok;
}

struct MieArgs {
  std::string grid = "3";
};

int cmd_mie_compare(Context& ctx, const MieArgs& a) {
  const Scene scene = ctx.have_config() ? ctx.config().scene : mie_sphere_scene(parse_grid(a.grid));
  const MieConfig mie = mie_config_for(scene);
  const SolveOutput out = solve_scene(scene, ctx.store(), ctx.config().solver,
                                      ctx.assembly());
  const auto cmp = mie_compare(out.solution(), mie);
  std::printf("a %g  k %g  m %g%+gi  nodes %d\n", mie.a, mie.k, mie.m.real(), mie.m.imag(),
              out.discretization->node_count());
  std::printf("nodal max %.3e (relative %.3e)  L2 over %zu points %.3e\n", cmp.nodal_max,
              cmp.nodal_relative, cmp.points.size(), cmp.sample_l2);
  {
    auto f = ctx.open("mie_vie.csv");
    write_field_csv(cmp.points, cmp.vie, f);
  }
  auto f = ctx.open("mie_series.csv");
  write_field_csv(cmp.points, cmp.mie, f);
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nystrom solver for the finite-exclusion-volume VIE"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config, "scene file (INI)");
  app.add_option("--threads", g.threads, "OpenMP threads")->check(CLI::NonNegativeNumber);
  app.add_flag("--no-corrections", g.no_corrections, "drop the exclusion-ball corrections");
  app.add_option("--phase", g.phase, "self-interaction phase: nodal or expanded");
  app.add_option("--output", g.output, "output directory");
  app.add_option("--cache", g.cache, "weight table cache directory");
  app.add_option("--set", g.overrides, "override section.key=value in the scene file");

  WeightsArgs wa;
  auto* gw = app.add_subcommand("generate-weights", "compute (and cache) weight tables");
  gw->add_option("--shape", wa.shape)->check(CLI::IsMember({"cube", "sphere"}));
  gw->add_option("--grid", wa.grid, "p or m_r,m_theta,m_phi");
  gw->add_option("--delta", wa.deltas)->check(CLI::PositiveNumber);
  gw->add_flag("--csv", wa.csv, "also write the tables as CSV");

  ValidateArgs va;
  auto* vt = app.add_subcommand("validate-tables", "p = 3 cube tables against direct integration");
  vt->add_option("--deltas", va.deltas)->check(CLI::PositiveNumber);
  vt->add_option("--reference-delta", va.reference_delta)->check(CLI::PositiveNumber);

  auto* sv = app.add_subcommand("solve", "solve the scene of --config and write field data");

  ConvergenceArgs ca;
  auto* cv = app.add_subcommand("convergence", "error against the interpolation order");
  cv->add_option("study", ca.study)->required()->check(CLI::IsMember({"sphere", "cube"}));
  cv->add_option("--resolutions", ca.resolutions, "grids, e.g. 3 4 5 or 2,2,2 3,3,3");
  cv->add_option("--reference", ca.reference, "p of the cube self reference");

  DeltaArgs da;
  auto* ds = app.add_subcommand("delta-study", "dependence of matrix and solution on delta");
  ds->add_option("--deltas", da.deltas)->check(CLI::PositiveNumber);
  ds->add_option("--reference-delta", da.reference_delta)->check(CLI::PositiveNumber);

  MieArgs ma;
  auto* mc = app.add_subcommand("mie-compare", "single sphere against the Mie series");
  mc->add_option("--grid", ma.grid, "sphere grid when no --config is given");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : config_error;
  }

  try {
    if (g.threads > 0) omp_set_num_threads(g.threads);
    Context ctx(g);
    if (gw->parsed()) return cmd_generate_weights(ctx, wa);
    if (vt->parsed()) return cmd_validate_tables(ctx, va);
    if (sv->parsed()) return cmd_solve(ctx);
    if (cv->parsed()) return cmd_convergence(ctx, ca);
    if (ds->parsed()) return cmd_delta_study(ctx, da);
    if (mc->parsed()) return cmd_mie_compare(ctx, ma);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return config_error;
  } catch (const ConvergenceError& e) {
    std::fprintf(stderr, "solver did not converge: %s (residual %.3e after %d iterations)\n",
                 e.what(), e.residual(), e.iterations());
    return convergence_error;
  } catch (const AccuracyError& e) {
    std::fprintf(stderr, "quadrature not certified: %s (achieved %.3e)\n", e.what(), e.achieved());
    return accuracy_error;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return failure;
  }
  return failure;
}
