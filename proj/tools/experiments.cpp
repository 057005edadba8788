#include "experiments.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <ostream>
#include <stdexcept>

#include "CLI11.hpp"
#include "bdsde/errors.hpp"
#include "bdsde/grid.hpp"
#include "bdsde/model.hpp"
#include "bdsde/montecarlo.hpp"
#include "bdsde/oracle.hpp"
#include "bdsde/picard.hpp"
#include "bdsde/spde.hpp"
#include "bdsde/tree_solver.hpp"
#include "checks.hpp"
#include "json.hpp"
#include "output.hpp"

#ifndef BDSDE_VERSION
#define BDSDE_VERSION "unknown"
#endif

namespace bdsde::tools {
namespace {

using nlohmann::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json config_echo(const std::string& command, const ExperimentConfig& c) {
  return {
      {"command", command}, {"model", c.model},       {"params", c.params},
      {"T", c.horizon},     {"n", c.n},               {"n_list", c.n_list},
      {"scheme", c.scheme}, {"samples", c.samples},   {"seed", c.seed},
      {"tol", c.tol},       {"keep_tree", c.keep_tree}, {"gamma", c.gamma},
      {"p_max", c.p_max},   {"picard_tol", c.picard_tol}, {"norm", c.norm},
      {"sigma", c.sigma},   {"drift0", c.drift0},     {"drift1", c.drift1},
      {"terminal", c.h},           {"x_min", c.x_min},       {"x_max", c.x_max},
      {"x_count", c.x_count},
  };
}

json meta(const std::string& command, const ExperimentConfig& c) {
  return {{"config", config_echo(command, c)},
          {"versions", {{"bdsde", BDSDE_VERSION}, {"compiler", __VERSION__}}},
          {"seed", c.seed}};
}

std::string output_path(const ExperimentConfig& c, const std::string& fallback) {
  return c.out.empty() ? fallback : c.out;
}

ProblemSpec model_of(const ExperimentConfig& c) {
  try {
    return builtin(c.model, c.params);
  } catch (const NotFound& e) {
    std::string known;
    for (const auto& name : builtin_names()) known += (known.empty() ? "" : ", ") + name;
    throw UsageError(std::string(e.what()) + " (known: " + known + ")");
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
}

Scheme scheme_of(const ExperimentConfig& c) {
  try {
    return parse_scheme(c.scheme);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

TimeGrid grid_of(const ExperimentConfig& c, int n) {
  if (!(c.horizon > 0.0) || !std::isfinite(c.horizon)) throw UsageError("T must be positive");
  if (n < 1) throw UsageError("n must be at least 1");
  return TimeGrid(c.horizon, n);
}

void check_spec(const ProblemSpec& spec, const TimeGrid& grid) {
  try {
    validate_spec(spec, grid);
  } catch (const StepTooCoarse& e) {
    throw UsageError(e.what());
  } catch (const InvalidModel& e) {
    throw UsageError(e.what());
  }
}

NormMethod norm_of(const std::string& name) {
  static const std::map<std::string, NormMethod> methods = {
      {"auto", NormMethod::automatic},
      {"enumeration", NormMethod::enumeration},
      {"level-sets", NormMethod::level_sets},
      {"monte-carlo", NormMethod::monte_carlo}};
  const auto it = methods.find(name);
  if (it == methods.end()) throw UsageError("unknown norm method '" + name + "'");
  return it->second;
}

TerminalFunctional terminal_of(const std::string& text) {
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  double arg = 0.0;
  if (colon != std::string::npos) {
    try {
      std::size_t used = 0;
      arg = std::stod(text.substr(colon + 1), &used);
      if (used != text.size() - colon - 1) throw std::invalid_argument(text);
    } catch (const std::exception&) {
      throw UsageError("bad terminal function '" + text + "'");
    }
  }
  if (kind == "identity") return TerminalFunctional::identity();
  if (kind == "square") return TerminalFunctional::square();
  if (kind == "constant") return TerminalFunctional::constant(arg);
  if (kind == "call") return TerminalFunctional::call(arg);
  throw UsageError("unknown terminal function '" + text +
                   "' (identity, square, constant:c, call:k)");
}

/// y and z along the forward path `beta`, j = 0..n.
std::pair<std::vector<double>, std::vector<double>> along(const SolveReport& r,
                                                          std::span<const Sign> beta) {
  std::vector<double> y, z;
  std::size_t node = 0;
  for (std::size_t j = 0; j < r.levels.size(); ++j) {
    y.push_back(r.levels[j].y[node]);
    z.push_back(r.levels[j].z[node]);
    if (j < beta.size() && beta[j] > 0) ++node;
  }
  return {y, z};
}

int cmd_solve(const ExperimentConfig& c, std::ostream& out) {
  const auto spec = model_of(c);
  const auto scheme = scheme_of(c);
  const auto grid = grid_of(c, c.n);
  check_spec(spec, grid);
  const auto path = sample_path(grid, c.seed);
  SolveOptions opts;
  opts.tol = c.tol;
  const auto r = solve_with(scheme, spec, grid, path.eps, opts);
  const auto [py, pz] = along(r, path.beta);

  json doc = {{"command", "solve"},
              {"model", spec.name},
              {"scheme", scheme_name(scheme)},
              {"T", c.horizon},
              {"n", c.n},
              {"seed", c.seed},
              {"y0", r.y0},
              {"z0", r.z0},
              {"fixed_point_iterations", r.fixed_point_iterations},
              {"residual", r.residual},
              {"path_y", py},
              {"path_z", pz}};
  if (const auto exact = exact_solution(spec, grid, path)) {
    doc["exact_y0"] = exact->y_path.front();
    doc["abs_error_y0"] = std::abs(r.y0 - exact->y_path.front());
    doc["path_error"] = path_error(py, std::span(pz).first(pz.size() - 1), exact->y_path,
                                   exact->z_path, grid.delta());
  }
  if (c.keep_tree) {
    const std::string file = output_path(c, "solve_tree.csv");
    std::vector<std::vector<std::string>> rows;
    for (const auto& lv : r.levels) {
      for (int i = 0; i <= lv.level; ++i) {
        const auto ii = static_cast<std::size_t>(i);
        rows.push_back({std::to_string(lv.level), std::to_string(i),
                        format_number(grid.node_value(lv.level, i)), format_number(lv.y[ii]),
                        format_number(lv.z[ii]), scheme_name(scheme)});
      }
    }
    write_csv(file, {"level", "node", "W", "y", "z", "scheme"}, rows, meta("solve", c));
    doc["tree_csv"] = file;
  }
  out << doc.dump(2) << '\n';
  return 0;
}

int cmd_mc(const ExperimentConfig& c, std::ostream& out) {
  const auto spec = model_of(c);
  const auto grid = grid_of(c, c.n);
  check_spec(spec, grid);
  McOptions o;
  o.scheme = scheme_of(c);
  o.tol = c.tol;
  const auto r = estimate(spec, grid, c.samples, c.seed, o);
  const std::string file = output_path(c, "mc.csv");
  auto m = meta("mc", c);
  m["n_failed"] = r.n_failed;
  write_csv(file, {"n", "samples", "mean", "var", "ci", "l2err"},
            {{std::to_string(c.n), std::to_string(r.n_samples), format_number(r.mean_y0),
              format_number(r.var_y0), format_number(r.ci_halfwidth),
              r.l2_error_vs_oracle ? format_number(*r.l2_error_vs_oracle) : ""}},
            m);
  json doc = {{"command", "mc"},        {"model", spec.name},      {"n", c.n},
              {"samples", r.n_samples}, {"failed", r.n_failed},    {"mean", r.mean_y0},
              {"var", r.var_y0},        {"ci", r.ci_halfwidth},    {"csv", file}};
  if (r.l2_error_vs_oracle) doc["l2err"] = *r.l2_error_vs_oracle;
  if (r.path_error_vs_oracle) doc["path_err"] = *r.path_error_vs_oracle;
  out << doc.dump(2) << '\n';
  return 0;
}

int cmd_convergence(const ExperimentConfig& c, std::ostream& out) {
  const auto spec = model_of(c);
  if (c.n_list.empty()) throw UsageError("n-list must not be empty");
  for (std::size_t k = 0; k < c.n_list.size(); ++k) {
    if (c.n_list[k] < 1 || (k > 0 && c.n_list[k] <= c.n_list[k - 1])) {
      throw UsageError("n-list must be positive and strictly increasing");
    }
  }
  check_spec(spec, grid_of(c, c.n_list.front()));
  const auto t = convergence_study(spec, c.horizon, c.n_list, c.samples, c.seed);
  std::vector<std::vector<std::string>> rows;
  for (const auto& row : t.rows) {
    rows.push_back({std::to_string(row.n), format_number(row.error), format_number(row.ci)});
  }
  auto m = meta("convergence", c);
  m["reference"] = t.reference;
  m["slope"] = t.slope ? json(*t.slope) : json(nullptr);
  const std::string file = output_path(c, "convergence.csv");
  write_csv(file, {"n", "err", "ci"}, rows, m);
  out << json{{"command", "convergence"}, {"rows", t.rows.size()}, {"slope", m["slope"]},
              {"reference", t.reference}, {"csv", file}}
             .dump(2)
      << '\n';
  return 0;
}

int cmd_picard(const ExperimentConfig& c, std::ostream& out) {
  const auto spec = model_of(c);
  const auto grid = grid_of(c, c.n);
  check_spec(spec, grid);
  if (!(c.gamma > 0.0)) throw UsageError("gamma must be positive");
  if (c.p_max < 1) throw UsageError("p-max must be at least 1");
  PicardOptions o;
  o.gamma = c.gamma;
  o.p_max = c.p_max;
  o.tol = c.picard_tol;
  o.norm.method = norm_of(c.norm);
  o.norm.mc_seed = c.seed;
  const auto res = picard_solve(spec, grid, sample_path(grid, c.seed).eps, o);
  const auto& d = res.diagnostics;
  std::vector<std::vector<std::string>> rows;
  for (std::size_t p = 0; p < d.norms.size(); ++p) {
    rows.push_back({std::to_string(p), format_number(d.norms[p]),
                    d.ratios[p] ? format_number(*d.ratios[p]) : ""});
  }
  auto m = meta("picard-diagnose", c);
  m["delta"] = d.delta;
  m["converged"] = d.converged;
  m["norms_gamma_1"] = d.norms_unit;
  const std::string file = output_path(c, "picard.csv");
  write_csv(file, {"p", "norm_sq", "ratio"}, rows, m);
  out << json{{"command", "picard-diagnose"}, {"iterations", res.iterate.p},
              {"converged", d.converged},     {"y0", res.iterate.levels.front().y.front()},
              {"csv", file}}
             .dump(2)
      << '\n';
  return d.converged ? 0 : 1;
}

int cmd_spde(const ExperimentConfig& c, std::ostream& out) {
  const auto spec = model_of(c);
  const auto grid = grid_of(c, c.n);
  check_spec(spec, grid);
  if (c.x_count < 1) throw UsageError("x-count must be at least 1");
  if (!(c.x_min <= c.x_max)) throw UsageError("x-min must not exceed x-max");
  ForwardSpec fwd;
  fwd.sigma = c.sigma;
  fwd.drift0 = c.drift0;
  fwd.drift1 = c.drift1;
  fwd.h = terminal_of(c.h);
  std::vector<double> xs;
  for (int k = 0; k < c.x_count; ++k) {
    xs.push_back(c.x_count == 1 ? c.x_min
                                : c.x_min + (c.x_max - c.x_min) * k / (c.x_count - 1));
  }
  const auto eps = sample_path(grid, c.seed).eps;
  const auto s = u_surface(fwd, spec, grid, xs, eps, c.seed);
  std::vector<std::vector<std::string>> rows;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    rows.push_back({format_number(xs[k]), format_number(s.u[k]), std::to_string(c.seed)});
  }
  auto m = meta("spde", c);
  m["noise_term"] = scaled_partial_sums(eps, grid).back();
  m["time"] = 0.0;
  const std::string file = output_path(c, "surface.csv");
  write_csv(file, {"x", "u0", "eps_seed"}, rows, m);
  out << json{{"command", "spde"}, {"points", xs.size()}, {"csv", file}}.dump(2) << '\n';
  return 0;
}

int cmd_paths(const ExperimentConfig& c, std::ostream& out) {
  const auto grid = grid_of(c, c.n);
  const auto path = sample_path(grid, c.seed);
  const auto w = walk_values(path, grid);
  const double bt = w.B.back();
  std::vector<std::vector<std::string>> rows;
  for (int j = 0; j <= c.n; ++j) {
    const auto jj = static_cast<std::size_t>(j);
    rows.push_back({format_number(grid.t(j)), format_number(w.W[jj]), format_number(bt - w.B[jj])});
  }
  const std::string file = output_path(c, "paths.csv");
  write_csv(file, {"t", "W", "B_rev"}, rows, meta("paths", c));
  out << json{{"command", "paths"}, {"rows", rows.size()}, {"csv", file}}.dump(2) << '\n';
  return 0;
}

int cmd_oracle_check(const ExperimentConfig& c, std::ostream& out) {
  json records = json::array();
  bool all = true;
  for (const auto& crit : acceptance_criteria()) {
    for (const auto& r : run_criterion(crit)) {
      all = all && r.pass;
      records.push_back({{"criterion", crit.id},
                         {"claim", r.claim},
                         {"lhs", r.lhs},
                         {"relation", r.relation},
                         {"rhs", r.rhs},
                         {"pass", r.pass},
                         {"detail", r.detail}});
      out << (r.pass ? "PASS " : "FAIL ") << crit.id << ": " << r.claim << '\n';
    }
  }
  const std::string file = output_path(c, "oracle_check.json");
  json doc = meta("oracle-check", c);
  doc["pass"] = all;
  doc["checks"] = records;
  write_json(file, doc);
  return all ? 0 : 1;
}

void add_options(CLI::App& app, ExperimentConfig& c) {
  app.add_option("--model", c.model, "builtin model key");
  app.add_option("--params", c.params, "model parameters")->delimiter(',');
  app.add_option("--T", c.horizon, "horizon");
  app.add_option("--n", c.n, "time steps");
  app.add_option("--n-list", c.n_list, "step counts for convergence")->delimiter(',');
  app.add_option("--scheme", c.scheme, "implicit | explicit | picard");
  app.add_option("--samples", c.samples, "Monte-Carlo samples");
  app.add_option("--seed", c.seed, "noise seed");
  app.add_option("--tol", c.tol, "fixed-point tolerance");
  app.add_option("--out", c.out, "output file");
  app.add_flag("--keep-tree", c.keep_tree, "write the full tree as CSV");
  app.add_option("--gamma", c.gamma, "weight base of the Picard norm");
  app.add_option("--p-max", c.p_max, "Picard iteration cap");
  app.add_option("--picard-tol", c.picard_tol, "Picard stopping norm");
  app.add_option("--norm", c.norm, "auto | enumeration | level-sets | monte-carlo");
  app.add_option("--sigma", c.sigma, "forward volatility");
  app.add_option("--drift0", c.drift0, "forward drift intercept");
  app.add_option("--drift1", c.drift1, "forward drift slope");
  app.add_option("--terminal", c.h, "identity | square | constant:c | call:k");
  app.add_option("--x-min", c.x_min, "left end of the x grid");
  app.add_option("--x-max", c.x_max, "right end of the x grid");
  app.add_option("--x-count", c.x_count, "x grid points");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  ExperimentConfig c;
  CLI::App app{"Backward doubly stochastic tree solvers: experiment runner", "bdsde"};
  app.set_config("--config", "", "flat key = value file; command-line flags win");
  app.require_subcommand(1, 1);
  add_options(app, c);

  using Handler = std::function<int(const ExperimentConfig&, std::ostream&)>;
  const std::vector<std::tuple<const char*, const char*, Handler>> commands = {
      {"solve", "solve one noise path and print the report", cmd_solve},
      {"mc", "Monte-Carlo estimate of y0", cmd_mc},
      {"convergence", "error table over n-list", cmd_convergence},
      {"picard-diagnose", "Picard iteration with contraction diagnostics", cmd_picard},
      {"spde", "u(0, x) over an x grid", cmd_spde},
      {"oracle-check", "run the invariant suite", cmd_oracle_check},
      {"paths", "walk paths (t, W, B_T - B_t)", cmd_paths},
  };
  for (const auto& [name, help, fn] : commands) app.add_subcommand(name, help)->fallthrough();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    for (const auto& [cmd, help, fn] : commands) {
      if (name == cmd) return fn(c, out);
    }
    throw UsageError("unknown subcommand");
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const ResourceLimit& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const NumericFailure& e) {
    err << json{{"error", "numeric_failure"},
                {"message", e.what()},
                {"level", e.level()},
                {"node", e.node()},
                {"residual", e.residual()}}
               .dump()
        << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << json{{"error", "run_failed"}, {"message", e.what()}}.dump() << '\n';
    return 1;
  }
}

}  // namespace bdsde::tools
