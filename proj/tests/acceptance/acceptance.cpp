// Acceptance suite: one pass/fail line per criterion.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "lgcol/analysis.hpp"
#include "lgcol/basis.hpp"
#include "lgcol/ivp.hpp"
#include "lgcol/models.hpp"
#include "lgcol/transcription.hpp"

using namespace lgcol;

namespace {

struct Outcome
{
  bool pass{false};
  std::string detail;
  /// Numeric outputs compared bitwise by the determinism criterion.
  std::vector<double> values;
};

struct Criterion
{
  int id;
  std::string title;
  double time_limit;  ///< seconds, 0 when unbounded
  std::function<Outcome()> run;
};

std::string fmt(double x)
{
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", x);
  return buf;
}

Outcome basis_exactness()
{
  double quad_err = 0., diff_err = 0.;
  for (int N = 1; N <= 30; ++N) {
    const auto tau = lg_points(N);
    const auto w   = lg_weights(N);
    for (int k = 0; k <= 2 * N - 1; ++k) {
      double s = 0.;
      for (int i = 0; i < N; ++i) { s += w[static_cast<std::size_t>(i)] * std::pow(tau[static_cast<std::size_t>(i)], k); }
      const double exact = k % 2 == 0 ? 2. / (k + 1) : 0.;
      quad_err           = std::max(quad_err, std::abs(s - exact));
    }
    const auto basis = build_basis(NodeKind::Lg2, N);
    const auto & pts = basis.nodes.points;
    for (int k = 0; k <= N + 1; ++k) {
      Eigen::VectorXd v(basis.B), dv(basis.B);
      for (int i = 0; i < basis.B; ++i) {
        const double t = pts[static_cast<std::size_t>(i)];
        v[i]           = std::pow(t, k);
        dv[i]          = k == 0 ? 0. : k * std::pow(t, k - 1);
      }
      diff_err = std::max(diff_err, (basis.D * v - dv).cwiseAbs().maxCoeff());
    }
  }
  return {quad_err <= 1e-12 && diff_err <= 1e-9,
          "max quadrature error " + fmt(quad_err) + " (tol 1e-12), max D* error " + fmt(diff_err) + " (tol 1e-9)",
          {quad_err, diff_err}};
}

Outcome structural_identity()
{
  std::mt19937_64 rng(2024);
  std::vector<Trajectory> trajs;
  for (const auto & [ocp, N] : {std::pair{pendulum_ocp(), 10}, std::pair{cartpole_ocp(), 10}}) {
    trajs.push_back(solve_ocp(ocp, Scheme::Lg2, N).trajectory);
  }
  trajs.push_back(solve_ivp_lg2({pendulum_model(), Eigen::VectorXd::Constant(1, 0.5), Eigen::VectorXd::Zero(1),
                                 [](double) { return Eigen::VectorXd::Zero(1); }, 2., 12}));
  std::uniform_real_distribution<double> d(-2., 2.);
  for (int N : {3, 17, 40}) {
    const auto tr     = transcribe_lg2(cartpole_ocp(), N);
    Eigen::VectorXd z = tr.initial_guess;
    for (Eigen::Index i = 0; i < z.size(); ++i) { z[i] += d(rng); }
    trajs.push_back(extract_trajectory(tr.layout, z, tr.basis));
  }
  double worst = 0.;
  for (const auto & traj : trajs) {
    std::uniform_real_distribution<double> t(0., traj.tf());
    for (int i = 0; i < 100; ++i) { worst = std::max(worst, eps1(traj, t(rng)).cwiseAbs().maxCoeff()); }
  }
  return {worst == 0., std::to_string(trajs.size()) + " trajectories x 100 times, max |eps1| = " + fmt(worst),
          {worst}};
}

Outcome residual_contrast()
{
  const auto model = pendulum_model();
  const auto lg2   = solve_ocp(pendulum_ocp(), Scheme::Lg2, 10);
  const auto lg    = solve_ocp(pendulum_ocp(), Scheme::Lg, 10);
  Outcome o;
  double lg2_max = 0.;
  int lg_large   = 0;
  const Eigen::VectorXd t2 = lg2.trajectory.collocation_times();
  const Eigen::VectorXd t1 = lg.trajectory.collocation_times();
  for (Eigen::Index k = 0; k < t2.size(); ++k) {
    const double r2 = std::abs(eps2(lg2.trajectory, model, t2[k])[0]);
    const double r1 = std::abs(eps2(lg.trajectory, model, t1[k])[0]);
    lg2_max         = std::max(lg2_max, r2);
    lg_large += r1 > 1e-4 ? 1 : 0;
    o.values.insert(o.values.end(), {r2, r1});
  }
  const bool converged = lg2.result.status == SolveStatus::Converged && lg.result.status == SolveStatus::Converged;
  o.values.insert(o.values.end(), {lg2.result.objective_value, lg.result.objective_value});
  o.pass   = converged && lg2_max <= 1e-6 && 2 * lg_large >= t1.size();
  o.detail = "lg2 max residual " + fmt(lg2_max) + " (tol 1e-6); lg residual > 1e-4 at " + std::to_string(lg_large)
             + "/" + std::to_string(t1.size()) + " points; lg " + to_string(lg.result.status) + ", lg2 "
             + to_string(lg2.result.status);
  return o;
}

Outcome error_ratio(const OcpDefinition & ocp, const std::vector<int> & Ns, double factor)
{
  Outcome o;
  o.pass = true;
  std::ostringstream os;
  for (int N : Ns) {
    const auto lg  = sweep(ocp, Scheme::Lg, std::vector<int>{N}).front();
    const auto lg2 = sweep(ocp, Scheme::Lg2, std::vector<int>{N}).front();
    const double ratio = lg2.e2[0] / lg.e2[0];
    const bool ok = lg.status == SolveStatus::Converged && lg2.status == SolveStatus::Converged
                    && lg2.e2[0] <= factor * lg.e2[0];
    o.pass = o.pass && ok;
    os << (os.tellp() > 0 ? "; " : "") << "N=" << N << " ratio " << fmt(ratio) << (ok ? "" : " FAIL");
    if (lg.status != SolveStatus::Converged) { os << " lg " << to_string(lg.status); }
    if (lg2.status != SolveStatus::Converged) { os << " lg2 " << to_string(lg2.status); }
    o.values.insert(o.values.end(), {lg.e2[0], lg2.e2[0], lg.objective, lg2.objective});
  }
  o.detail = os.str() + " (need <= " + fmt(factor) + ")";
  return o;
}

Outcome ivp_convergence()
{
  const auto model   = pendulum_model();
  const auto zero_u  = [](double) { return Eigen::VectorXd::Zero(1); };
  const auto q0      = Eigen::VectorXd::Constant(1, 0.5);
  const auto v0      = Eigen::VectorXd::Zero(1);
  const double tf    = 2.;
  const auto ref     = reference_integrate(model, q0, v0, zero_u, tf, 1e-13);
  Outcome o;
  o.pass = true;
  std::ostringstream os;
  double prev = 0.;
  for (int N : {4, 8, 16}) {
    const auto traj = solve_ivp_lg2({model, q0, v0, zero_u, tf, N});
    double err      = 0.;
    for (int i = 0; i <= 1000; ++i) {
      const double t = tf * i / 1000.;
      err            = std::max(err, std::abs(traj.configuration(t)[0] - ref.configuration(t)[0]));
    }
    if (N > 4) { o.pass = o.pass && err * 10. <= prev; }
    prev = err;
    os << (N > 4 ? ", " : "") << "N=" << N << " " << fmt(err);
    o.values.push_back(err);
  }
  o.pass   = o.pass && prev <= 1e-8;
  o.detail = "max discrepancy " + os.str() + " (need 10x per doubling, <= 1e-8 at N=16)";
  return o;
}

Outcome min_time_oracle()
{
  const auto sol   = solve_ocp(double_integrator_min_time_ocp(), Scheme::Lg2, 12);
  const double tf  = sol.result.objective_value;
  const bool conv  = sol.result.status == SolveStatus::Converged;
  return {conv && std::abs(tf - 2.) <= 1e-3,
          "t_f* = " + std::to_string(tf) + ", |t_f* - 2| = " + fmt(std::abs(tf - 2.)) + " (tol 1e-3), "
            + to_string(sol.result.status),
          {tf}};
}

std::vector<Criterion> criteria()
{
  std::vector<Criterion> c{
    {1, "basis exactness", 10., basis_exactness},
    {2, "lg2 first-order error identically zero", 0., structural_identity},
    {3, "collocation-point residual contrast", 60., residual_contrast},
    {4, "pendulum E2(lg2) <= E2(lg)/10", 600.,
     [] { return error_ratio(pendulum_ocp(), {10, 14, 18, 22}, 0.1); }},
    {5, "cart-pole E2_q1(lg2) <= 0.75 E2_q1(lg)", 600.,
     [] { return error_ratio(cartpole_ocp(), {10, 14, 18}, 0.75); }},
    {6, "ivp spectral convergence", 30., ivp_convergence},
    {7, "double-integrator min-time t_f* = 2", 60., min_time_oracle},
  };
  c.push_back({8, "determinism of criteria 3-7", 0., [c] {
                 Outcome o;
                 o.pass = true;
                 std::ostringstream os;
                 for (int id = 3; id <= 7; ++id) {
                   const auto & crit = c[static_cast<std::size_t>(id - 1)];
                   const auto a      = crit.run();
                   const auto b      = crit.run();
                   bool same         = a.values.size() == b.values.size();
                   for (std::size_t i = 0; same && i < a.values.size(); ++i) {
                     same = std::memcmp(&a.values[i], &b.values[i], sizeof(double)) == 0;
                   }
                   o.pass = o.pass && same;
                   os << (id > 3 ? ", " : "") << id << (same ? " identical" : " DIFFERS");
                 }
                 o.detail = os.str();
                 return o;
               }});
  return c;
}

bool run_one(const Criterion & c)
{
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = c.run();
  } catch (const std::exception & e) {
    o.pass   = false;
    o.detail = std::string("exception: ") + e.what();
  }
  const double secs  = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool in_time = c.time_limit <= 0. || secs < c.time_limit;
  const bool pass    = o.pass && in_time;
  std::cout << "criterion " << c.id << ": " << (pass ? "PASS" : "FAIL") << "  " << c.title << "  [" << o.detail
            << "]  " << fmt(secs) << " s" << (in_time ? "" : " (over " + fmt(c.time_limit) + " s limit)") << std::endl;
  return pass;
}

}  // namespace

int main(int argc, char ** argv)
{
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--criterion" && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::cerr << "usage: acceptance [--criterion k]\n";
      return 2;
    }
  }
  const auto all = criteria();
  if (only < 0 || only > static_cast<int>(all.size())) {
    std::cerr << "unknown criterion " << only << "\n";
    return 2;
  }
  bool ok = true;
  for (const auto & c : all) {
    if (only == 0 || c.id == only) { ok = run_one(c) && ok; }
  }
  return ok ? 0 : 1;
}
