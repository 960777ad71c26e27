#include "lgcol/cli.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "lgcol/analysis.hpp"
#include "lgcol/expr.hpp"
#include "lgcol/ivp.hpp"

namespace lgcol {

namespace {

using nlohmann::json;

std::string num(double x)
{
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

/// Writes a file or throws; callers treat I/O failures as configuration errors.
void write_file(const std::string & path, const std::string & content)
{
  std::ofstream f(path, std::ios::binary);
  if (!f) { throw ConfigError("out", "cannot write '" + path + "'"); }
  f << content;
}

std::string with_ext(const RunConfig & cfg, const std::string & stem)
{
  return cfg.output + "_" + stem + "." + cfg.format;
}

SolveOptions solve_options(const RunConfig & cfg)
{
  SolveOptions o;
  o.feas_tol = cfg.solver.feas_tol;
  o.opt_tol  = cfg.solver.opt_tol;
  o.max_iter = cfg.solver.max_iter;
  return o;
}

std::vector<std::string> coord_names(const std::string & prefix, int n)
{
  std::vector<std::string> names;
  for (int i = 1; i <= n; ++i) { names.push_back(prefix + std::to_string(i)); }
  return names;
}

struct Table
{
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;  ///< CSV cells
  std::vector<json> records;                   ///< same rows as JSON objects
};

std::string render_csv(const std::string & schema, const std::string & column_doc, const json & config,
                       const Table & t)
{
  std::ostringstream os;
  os << "# schema: " << schema << "\n";
  os << "# columns: " << column_doc << "\n";
  os << "# config: " << config.dump() << "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i) { os << (i ? "," : "") << t.columns[i]; }
  os << "\n";
  for (const auto & row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) { os << (i ? "," : "") << row[i]; }
    os << "\n";
  }
  return os.str();
}

std::string render_json(const std::string & schema, const json & config, const Table & t)
{
  json doc;
  doc["schema"] = schema;
  doc["config"] = config;
  doc["rows"]   = t.records;
  return doc.dump(2) + "\n";
}

std::string render(const RunConfig & cfg, const std::string & schema, const std::string & column_doc, const Table & t)
{
  const json config = to_json(cfg);
  return cfg.format == "csv" ? render_csv(schema, column_doc, config, t) : render_json(schema, config, t);
}

Table trajectory_table(const Trajectory & traj, const SecondOrderModel & model)
{
  const int n_q = traj.n_q(), n_u = traj.n_u();
  Table t;
  t.columns.push_back("t");
  for (const auto & v : {coord_names("q", n_q), coord_names("v", n_q), coord_names("u", n_u)}) {
    t.columns.insert(t.columns.end(), v.begin(), v.end());
  }
  t.columns.push_back("u_extrapolated");
  for (const auto & v : {coord_names("eps1_q", n_q), coord_names("eps2_q", n_q)}) {
    t.columns.insert(t.columns.end(), v.begin(), v.end());
  }

  const double tf = traj.tf();
  for (int i = 0; i < kTrajectorySamples; ++i) {
    const double time = i == kTrajectorySamples - 1 ? tf : tf * i / (kTrajectorySamples - 1);
    const Eigen::VectorXd q = traj.configuration(time), v = traj.velocity(time), u = traj.control(time);
    const Eigen::VectorXd e1 = eps1(traj, time), e2 = eps2(traj, model, time);
    const bool extrap        = traj.control_extrapolated(time);

    std::vector<double> vals{time};
    for (const Eigen::VectorXd * vec : {&q, &v, &u}) { vals.insert(vals.end(), vec->data(), vec->data() + vec->size()); }
    std::vector<std::string> row;
    json rec;
    for (std::size_t c = 0; c < vals.size(); ++c) {
      row.push_back(num(vals[c]));
      rec[t.columns[c]] = vals[c];
    }
    row.push_back(extrap ? "1" : "0");
    rec["u_extrapolated"] = extrap;
    std::size_t c = vals.size() + 1;
    for (const Eigen::VectorXd * vec : {&e1, &e2}) {
      for (Eigen::Index k = 0; k < vec->size(); ++k, ++c) {
        row.push_back(num((*vec)[k]));
        rec[t.columns[c]] = (*vec)[k];
      }
    }
    t.rows.push_back(std::move(row));
    t.records.push_back(std::move(rec));
  }
  return t;
}

std::string opt_num(const std::optional<double> & v) { return v ? num(*v) : ""; }

}  // namespace

int cmd_solve(const RunConfig & cfg, std::ostream & out)
{
  validate(cfg);
  const ModelConfig models = resolve_model_config(cfg);
  const OcpDefinition ocp  = make_ocp(cfg, models);
  const int N              = cfg.N_list.front();
  const int n_q            = ocp.model.n_q;

  Table summary;
  summary.columns = {"scheme", "N", "status", "objective", "tf", "eq_violation"};
  for (const auto & v : {coord_names("E1_q", n_q), coord_names("E2_q", n_q)}) {
    summary.columns.insert(summary.columns.end(), v.begin(), v.end());
  }
  for (const char * c : {"E1_joint", "E2_joint", "iterations", "wall_seconds"}) { summary.columns.emplace_back(c); }

  bool all_converged = true;
  for (const Scheme scheme : schemes(cfg)) {
    const OcpSolution sol = solve_ocp(ocp, scheme, N, solve_options(cfg));
    const ErrorReport rep = error_report(sol.trajectory, ocp.model);
    const bool ok         = sol.result.status == SolveStatus::Converged;
    all_converged         = all_converged && ok;

    write_file(with_ext(cfg, to_string(scheme) + "_trajectory"),
               render(cfg, kTrajectorySchema,
                      "t [s]; q_i configuration; v_i velocity; u_j control; u_extrapolated 1 outside the "
                      "collocation hull; eps1_q_i first-order error; eps2_q_i second-order error",
                      trajectory_table(sol.trajectory, ocp.model)));

    std::vector<std::string> row{to_string(scheme), std::to_string(N), to_string(sol.result.status),
                                 num(sol.result.objective_value), num(sol.trajectory.tf()), num(sol.result.eq_violation)};
    json rec{{"scheme", to_string(scheme)},          {"N", N},
             {"status", to_string(sol.result.status)}, {"objective", sol.result.objective_value},
             {"tf", sol.trajectory.tf()},              {"eq_violation", sol.result.eq_violation}};
    for (int i = 0; i < n_q; ++i) {
      row.push_back(num(rep.e1[static_cast<std::size_t>(i)]));
      rec["E1_q" + std::to_string(i + 1)] = rep.e1[static_cast<std::size_t>(i)];
    }
    for (int i = 0; i < n_q; ++i) {
      row.push_back(num(rep.e2[static_cast<std::size_t>(i)]));
      rec["E2_q" + std::to_string(i + 1)] = rep.e2[static_cast<std::size_t>(i)];
    }
    row.push_back(opt_num(rep.joint_e1));
    row.push_back(opt_num(rep.joint_e2));
    row.push_back(std::to_string(sol.result.iterations));
    row.push_back(num(sol.wall_seconds));
    rec["E1_joint"]     = rep.joint_e1 ? json(*rep.joint_e1) : json(nullptr);
    rec["E2_joint"]     = rep.joint_e2 ? json(*rep.joint_e2) : json(nullptr);
    rec["iterations"]   = sol.result.iterations;
    rec["wall_seconds"] = sol.wall_seconds;
    summary.rows.push_back(std::move(row));
    summary.records.push_back(std::move(rec));

    out << to_string(scheme) << " N=" << N << " " << sol.result.diagnostics << " tf=" << num(sol.trajectory.tf())
        << " E2=" << (rep.joint_e2 ? num(*rep.joint_e2) : num(rep.e2.front())) << "\n";
  }

  write_file(with_ext(cfg, "summary"),
             render(cfg, kSolveSummarySchema,
                    "scheme; N collocation points; status; objective; tf [s]; eq_violation max-norm; E1_q_i and "
                    "E2_q_i integrated absolute errors; joint errors when units agree; iterations; wall_seconds "
                    "(timing, not reproducible)",
                    summary));
  return all_converged ? kExitOk : kExitSolveFailed;
}

int cmd_sweep(const RunConfig & cfg, std::ostream & out)
{
  validate(cfg);
  const ModelConfig models = resolve_model_config(cfg);
  const OcpDefinition ocp  = make_ocp(cfg, models);
  const int n_q            = ocp.model.n_q;

  Table table;
  table.columns = {"scheme", "N", "status", "objective", "tf"};
  const auto e2_cols = coord_names("E2_q", n_q);
  table.columns.insert(table.columns.end(), e2_cols.begin(), e2_cols.end());
  for (const char * c : {"E2_joint", "iterations", "wall_seconds"}) { table.columns.emplace_back(c); }

  int converged = 0;
  for (const Scheme scheme : schemes(cfg)) {
    const auto reports = sweep(ocp, scheme, cfg.N_list, solve_options(cfg));
    for (const auto & rep : reports) {
      converged += rep.status == SolveStatus::Converged ? 1 : 0;
      std::vector<std::string> row{to_string(scheme), std::to_string(rep.N), to_string(rep.status),
                                   num(rep.objective), num(rep.tf)};
      json rec{{"scheme", to_string(scheme)}, {"N", rep.N},  {"status", to_string(rep.status)},
               {"objective", rep.objective},  {"tf", rep.tf}};
      for (int i = 0; i < n_q; ++i) {
        row.push_back(num(rep.e2[static_cast<std::size_t>(i)]));
        rec[e2_cols[static_cast<std::size_t>(i)]] = rep.e2[static_cast<std::size_t>(i)];
      }
      row.push_back(opt_num(rep.joint_e2));
      row.push_back(std::to_string(rep.iterations));
      row.push_back(num(rep.wall_seconds));
      rec["E2_joint"]     = rep.joint_e2 ? json(*rep.joint_e2) : json(nullptr);
      rec["iterations"]   = rep.iterations;
      rec["wall_seconds"] = rep.wall_seconds;
      table.rows.push_back(std::move(row));
      table.records.push_back(std::move(rec));
      out << to_string(scheme) << " N=" << rep.N << " status=" << to_string(rep.status)
          << " E2_q1=" << num(rep.e2.front()) << "\n";
    }
  }

  write_file(with_ext(cfg, "sweep"),
             render(cfg, kSweepSchema,
                    "scheme; N collocation points; status; objective; tf [s]; E2_q_i integrated |second-order "
                    "error| per coordinate; E2_joint when units agree (empty otherwise); iterations; wall_seconds "
                    "(timing, not reproducible)",
                    table));
  return converged > 0 ? kExitOk : kExitSolveFailed;
}

int cmd_ivp(const RunConfig & cfg, std::ostream & out)
{
  validate(cfg);
  const ModelConfig models     = resolve_model_config(cfg);
  const SecondOrderModel model = make_model(cfg, models);

  const auto vec = [&](const std::vector<double> & v, const char * field) {
    if (v.empty()) { return Eigen::VectorXd::Zero(model.n_q).eval(); }
    if (static_cast<int>(v.size()) != model.n_q) {
      throw ConfigError(field, "expected " + std::to_string(model.n_q) + " values for model '" + model.name + "'");
    }
    return Eigen::Map<const Eigen::VectorXd>(v.data(), model.n_q).eval();
  };
  const Eigen::VectorXd q0 = vec(cfg.q0, "q0");
  const Eigen::VectorXd v0 = vec(cfg.v0, "v0");

  if (static_cast<int>(cfg.controls.size()) != model.n_u) {
    throw ConfigError("u", "expected " + std::to_string(model.n_u) + " control expressions");
  }
  std::vector<Expression> exprs;
  for (const auto & src : cfg.controls) { exprs.push_back(Expression::parse(src)); }
  const ControlFn control = [exprs](double t) {
    Eigen::VectorXd u(static_cast<Eigen::Index>(exprs.size()));
    for (std::size_t j = 0; j < exprs.size(); ++j) { u[static_cast<Eigen::Index>(j)] = exprs[j](t); }
    return u;
  };

  const ReferenceSolution ref = reference_integrate(model, q0, v0, control, cfg.tf, cfg.reference_tol);

  Table table;
  table.columns = {"scheme", "N", "status", "endpoint_q_discrepancy", "max_q_discrepancy", "endpoint_v_discrepancy",
                   "max_v_discrepancy"};
  int exit_code = kExitOk;
  for (const Scheme scheme : schemes(cfg)) {
    const IvpSpec spec{model, q0, v0, control, cfg.tf, cfg.N_list.front()};
    std::vector<std::string> row{to_string(scheme), std::to_string(spec.N)};
    json rec{{"scheme", to_string(scheme)}, {"N", spec.N}};
    try {
      const Trajectory traj = solve_ivp(spec, scheme);
      double end_q = (traj.configuration(cfg.tf) - ref.configuration(cfg.tf)).cwiseAbs().maxCoeff();
      double end_v = (traj.velocity(cfg.tf) - ref.velocity(cfg.tf)).cwiseAbs().maxCoeff();
      double max_q = 0., max_v = 0.;
      for (int i = 0; i < kTrajectorySamples; ++i) {
        const double t = i == kTrajectorySamples - 1 ? cfg.tf : cfg.tf * i / (kTrajectorySamples - 1);
        max_q = std::max(max_q, (traj.configuration(t) - ref.configuration(t)).cwiseAbs().maxCoeff());
        max_v = std::max(max_v, (traj.velocity(t) - ref.velocity(t)).cwiseAbs().maxCoeff());
      }
      row.insert(row.end(), {"converged", num(end_q), num(max_q), num(end_v), num(max_v)});
      rec.update({{"status", "converged"},
                  {"endpoint_q_discrepancy", end_q},
                  {"max_q_discrepancy", max_q},
                  {"endpoint_v_discrepancy", end_v},
                  {"max_v_discrepancy", max_v}});
      out << to_string(scheme) << " N=" << spec.N << " endpoint |dq|=" << num(end_q) << " max |dq|=" << num(max_q)
          << "\n";
    } catch (const IvpDivergenceError & e) {
      exit_code = kExitSolveFailed;
      row.insert(row.end(), {"diverged", "", "", "", ""});
      rec.update({{"status", "diverged"}, {"residual_history", e.residual_history}});
      out << to_string(scheme) << " N=" << spec.N << " " << e.what() << "\n";
    }
    table.rows.push_back(std::move(row));
    table.records.push_back(std::move(rec));
  }

  write_file(with_ext(cfg, "ivp"),
             render(cfg, kIvpSchema,
                    "scheme; N; status; endpoint and max-over-grid (1000 uniform samples) max-norm discrepancy of "
                    "configuration and velocity against the adaptive Runge-Kutta reference",
                    table));
  return exit_code;
}

int run_cli(const std::vector<std::string> & args, std::ostream & out, std::ostream & err)
{
  CLI::App app{"Legendre-Gauss pseudospectral collocation: first-order (lg) and second-order (lg2) schemes"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string n_range;
  std::uint64_t seed = 0;

  const auto common = [&](CLI::App * sub) {
    sub->add_option("--config", cfg.config_path, "model-parameter file (JSON)");
    sub->add_option("--scheme", cfg.scheme, "lg, lg2 or both");
    sub->add_option("--feas-tol", cfg.solver.feas_tol, "constraint feasibility tolerance");
    sub->add_option("--opt-tol", cfg.solver.opt_tol, "projected-gradient tolerance");
    sub->add_option("--max-iter", cfg.solver.max_iter, "Newton iteration cap");
    sub->add_option("--out", cfg.output, "output path prefix");
    sub->add_option("--format", cfg.format, "csv or json");
    sub->add_option("--seed", seed, "reserved; results are deterministic");
  };

  int N = cfg.N_list.front();
  auto * solve_cmd = app.add_subcommand("solve", "solve one benchmark and write trajectory samples and a summary");
  solve_cmd->add_option("--problem", cfg.problem, "pendulum, cartpole, double_integrator or custom");
  solve_cmd->add_option("--N", N, "collocation points");
  common(solve_cmd);

  auto * sweep_cmd = app.add_subcommand("sweep", "solve over a range of N and tabulate dynamic errors");
  sweep_cmd->add_option("--problem", cfg.problem, "pendulum, cartpole, double_integrator or custom");
  sweep_cmd->add_option("--N-range", n_range, "first:last[:step]")->required();
  common(sweep_cmd);

  auto * ivp_cmd = app.add_subcommand("ivp", "solve an initial value problem by collocation and compare to a reference");
  ivp_cmd->add_option("--model", cfg.problem, "pendulum, cartpole, double_integrator or custom");
  ivp_cmd->add_option("--q0", cfg.q0, "initial configuration");
  ivp_cmd->add_option("--v0", cfg.v0, "initial velocity");
  ivp_cmd->add_option("--u", cfg.controls, "control expression in t, one per control");
  ivp_cmd->add_option("--tf", cfg.tf, "final time [s]");
  ivp_cmd->add_option("--N", N, "collocation points");
  ivp_cmd->add_option("--ref-tol", cfg.reference_tol, "reference integrator tolerance");
  common(ivp_cmd);

  std::vector<const char *> argv;
  for (const auto & a : args) { argv.push_back(a.c_str()); }
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError & e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  }

  CLI::App * active = app.get_subcommands().front();
  if (active->get_help_ptr() && active->get_help_ptr()->count() > 0) {
    out << active->help();
    return kExitOk;
  }
  cfg.command = active->get_name();
  if (active->count("--seed") > 0) { cfg.seed = seed; }

  try {
    if (cfg.command == "sweep") {
      cfg.N_list = parse_range(n_range);
    } else {
      cfg.N_list = {N};
    }
    if (cfg.command == "ivp") {
      if (active->count("--scheme") == 0) { cfg.scheme = "both"; }
    }
    // tolerances not given on the command line come from the model-parameter file
    if (!cfg.config_path.empty()) {
      const ModelConfig models = load_model_config(cfg.config_path);
      if (active->count("--feas-tol") == 0) { cfg.solver.feas_tol = models.solver.feas_tol; }
      if (active->count("--opt-tol") == 0) { cfg.solver.opt_tol = models.solver.opt_tol; }
      if (active->count("--max-iter") == 0) { cfg.solver.max_iter = models.solver.max_iter; }
    }
    validate(cfg);

    if (cfg.command == "solve") { return cmd_solve(cfg, out); }
    if (cfg.command == "sweep") { return cmd_sweep(cfg, out); }
    return cmd_ivp(cfg, out);
  } catch (const ConfigError & e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const ExprParseError & e) {
    err << "error: u: " << e.what() << "\n";
    return kExitConfigError;
  }
}

}  // namespace lgcol
