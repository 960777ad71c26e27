#include "lgcol/analysis.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

namespace lgcol {

Eigen::VectorXd eps1(const Trajectory & traj, double t) { return traj.config_rate(t) - traj.velocity(t); }

Eigen::VectorXd eps2(const Trajectory & traj, const SecondOrderModel & model, double t)
{
  if (model.n_q != traj.n_q()) { throw std::invalid_argument("eps2: model and trajectory dimensions differ"); }
  return traj.config_accel(t) - model.accel(traj.configuration(t), traj.config_rate(t), traj.control(t), t);
}

double joint_eps2(const Trajectory & traj, const SecondOrderModel & model, double t)
{
  if (!model.uniform_units) {
    throw std::invalid_argument("joint_eps2: coordinates of model '" + model.name + "' do not share units");
  }
  return eps2(traj, model, t).cwiseAbs().sum();
}

double integrate_error(const std::function<double(double)> & err_fn, double tf)
{
  if (!(tf > 0.)) { throw std::invalid_argument("integrate_error: t_f must be positive"); }
  static const std::vector<double> nodes   = lg_points(kErrorPanelPoints);
  static const std::vector<double> weights = lg_weights(kErrorPanelPoints);

  const double width = tf / kErrorPanels;
  double total       = 0.;
  for (int p = 0; p < kErrorPanels; ++p) {
    const double a = p * width;
    double panel   = 0.;
    for (int k = 0; k < kErrorPanelPoints; ++k) {
      const double t = a + 0.5 * width * (nodes[static_cast<std::size_t>(k)] + 1.);
      const double e = err_fn(t);
      if (!std::isfinite(e)) {
        throw std::domain_error("integrate_error: non-finite error value at t=" + std::to_string(t));
      }
      panel += weights[static_cast<std::size_t>(k)] * e;
    }
    total += 0.5 * width * panel;
  }
  return total;
}

ErrorReport error_report(const Trajectory & traj, const SecondOrderModel & model)
{
  ErrorReport rep;
  rep.scheme = traj.scheme();
  rep.N      = traj.basis().N;
  rep.tf     = traj.tf();

  const double tf = traj.tf();
  for (int i = 0; i < traj.n_q(); ++i) {
    rep.e1.push_back(integrate_error([&](double t) { return std::abs(eps1(traj, t)[i]); }, tf));
    rep.e2.push_back(integrate_error([&](double t) { return std::abs(eps2(traj, model, t)[i]); }, tf));
  }
  if (model.uniform_units) {
    rep.joint_e1 = integrate_error([&](double t) { return eps1(traj, t).cwiseAbs().sum(); }, tf);
    rep.joint_e2 = integrate_error([&](double t) { return joint_eps2(traj, model, t); }, tf);
  }
  return rep;
}

OcpSolution solve_ocp(const OcpDefinition & ocp, Scheme scheme, int N, const SolveOptions & opts)
{
  Transcription tr = transcribe(ocp, scheme, N);
  SolveOptions o   = opts;
  if (o.initial_guess.size() == 0) { o.initial_guess = tr.initial_guess; }

  const auto start = std::chrono::steady_clock::now();
  SolveResult res  = solve(tr.problem, o);
  const std::chrono::duration<double> wall = std::chrono::steady_clock::now() - start;

  Trajectory traj = extract_trajectory(tr.layout, res.z_star, tr.basis);
  return {std::move(tr), std::move(res), std::move(traj), wall.count()};
}

std::vector<ErrorReport> sweep(const OcpDefinition & ocp, Scheme scheme, std::span<const int> N_list,
                               const SolveOptions & opts)
{
  if (N_list.empty()) { throw std::invalid_argument("sweep: N_list is empty"); }
  for (int N : N_list) {
    if (N < 1) { throw std::invalid_argument("sweep: N=" + std::to_string(N) + " must be >= 1"); }
  }
  std::vector<ErrorReport> reports;
  reports.reserve(N_list.size());
  for (int N : N_list) {
    const OcpSolution sol = solve_ocp(ocp, scheme, N, opts);
    ErrorReport rep       = error_report(sol.trajectory, ocp.model);
    rep.status            = sol.result.status;
    rep.objective         = sol.result.objective_value;
    rep.eq_violation      = sol.result.eq_violation;
    rep.iterations        = sol.result.iterations;
    rep.wall_seconds      = sol.wall_seconds;
    reports.push_back(std::move(rep));
  }
  return reports;
}

}  // namespace lgcol
