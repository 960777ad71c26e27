#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "lgcol/analysis.hpp"
#include "lgcol/transcription.hpp"

using namespace lgcol;

namespace {

/// q'' = -q with an unused control and no boundary conditions.
OcpDefinition oscillator_ocp(double tf)
{
  OcpDefinition ocp;
  ocp.model = {
    .name  = "oscillator",
    .n_q   = 1,
    .n_u   = 1,
    .accel = [](const Eigen::VectorXd & q, const Eigen::VectorXd &, const Eigen::VectorXd &, double) {
      return Eigen::VectorXd(-q);
    },
  };
  ocp.cost_integrand = [](const Eigen::VectorXd &, const Eigen::VectorXd & u) { return u[0] * u[0]; };
  ocp.control_bounds = {Bound{}};
  ocp.state_bounds   = {Bound{}, Bound{}};
  ocp.final_time     = FixedFinalTime{tf};
  ocp.guess_q_start  = Eigen::VectorXd::Zero(1);
  ocp.guess_q_end    = Eigen::VectorXd::Zero(1);
  return ocp;
}

/// Pack a row-major node block into a decision vector.
void write_nodes(const DecisionLayout & layout, Eigen::VectorXd & z, const Eigen::MatrixXd & M)
{
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    for (Eigen::Index j = 0; j < M.cols(); ++j) { z[layout.nodes.offset + i * layout.nodes.cols + j] = M(i, j); }
  }
}

Eigen::VectorXd random_vector(Eigen::Index n, std::mt19937_64 & rng, double scale = 1.)
{
  std::uniform_real_distribution<double> d(-scale, scale);
  Eigen::VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i) { z[i] = d(rng); }
  return z;
}

double collocation_residual(const Transcription & tr, const Eigen::VectorXd & z)
{
  const Eigen::VectorXd c = tr.problem.eq_constraints(z);
  return c.head(tr.problem.eq_blocks.front().size).cwiseAbs().maxCoeff();
}

/// Node-sampled cos(t) for LG2 (Q) or (cos t, -sin t) for LG (X).
Eigen::VectorXd sampled_cosine(const Transcription & tr, double tf)
{
  Eigen::VectorXd z = Eigen::VectorXd::Zero(tr.layout.total_len);
  const auto & pts  = tr.basis.nodes.points;
  Eigen::MatrixXd M(tr.layout.nodes.rows, tr.layout.nodes.cols);
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    const double t = tf * (pts[static_cast<std::size_t>(i)] + 1.) / 2.;
    M(i, 0)        = std::cos(t);
    if (M.cols() == 2) { M(i, 1) = -std::sin(t); }
  }
  write_nodes(tr.layout, z, M);
  return z;
}

}  // namespace

TEST(TimeMap, Examples)
{
  EXPECT_EQ(time_to_tau(0., 2.), -1.);
  EXPECT_EQ(time_to_tau(2., 2.), 1.);
  EXPECT_EQ(time_to_tau(0.5, 2.), -0.5);
  EXPECT_EQ(tau_to_time(-1., 2.), 0.);
  EXPECT_EQ(tau_to_time(1., 2.), 2.);
}

TEST(TimeMap, RoundTrip)
{
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> frac(0., 1.), len(0.01, 100.);
  for (int i = 0; i < 1000; ++i) {
    const double tf = len(rng);
    const double t  = frac(rng) * tf;
    EXPECT_NEAR(tau_to_time(time_to_tau(t, tf), tf), t, 1e-15 * tf * 2.);
  }
}

TEST(TimeMap, RejectsOutOfRange)
{
  EXPECT_THROW((void)time_to_tau(-0.1, 1.), std::out_of_range);
  EXPECT_THROW((void)time_to_tau(1.1, 1.), std::out_of_range);
  EXPECT_THROW((void)time_to_tau(0.5, 0.), std::invalid_argument);
  EXPECT_THROW((void)tau_to_time(1.5, 1.), std::out_of_range);
}

TEST(SchemeNames, RoundTrip)
{
  EXPECT_EQ(scheme_from_string("lg"), Scheme::Lg);
  EXPECT_EQ(scheme_from_string("lg2"), Scheme::Lg2);
  EXPECT_EQ(to_string(Scheme::Lg), "lg");
  EXPECT_EQ(to_string(Scheme::Lg2), "lg2");
  EXPECT_THROW((void)scheme_from_string("lobatto"), std::invalid_argument);
}

TEST(Layout, ShapesAndCoverage)
{
  for (int N : {1, 5, 12}) {
    for (const auto & [ocp, free_tf] : {std::pair{pendulum_ocp(), true}, std::pair{cartpole_ocp(), false}}) {
      const int n_q = ocp.model.n_q, n_u = ocp.model.n_u;
      for (Scheme s : {Scheme::Lg, Scheme::Lg2}) {
        const auto tr  = transcribe(ocp, s, N);
        const auto & L = tr.layout;
        if (s == Scheme::Lg) {
          EXPECT_EQ(L.nodes.rows, N + 1);
          EXPECT_EQ(L.nodes.cols, 2 * n_q);
        } else {
          EXPECT_EQ(L.nodes.rows, N + 2);
          EXPECT_EQ(L.nodes.cols, n_q);
        }
        EXPECT_EQ(L.controls.rows, N);
        EXPECT_EQ(L.controls.cols, n_u);
        EXPECT_EQ(L.nodes.offset, 0);
        EXPECT_EQ(L.controls.offset, L.nodes.size());
        EXPECT_EQ(L.tf_index.has_value(), free_tf);
        const Eigen::Index end = L.controls.offset + L.controls.size();
        if (free_tf) { EXPECT_EQ(*L.tf_index, end); }
        EXPECT_EQ(L.total_len, end + (free_tf ? 1 : 0));
        EXPECT_EQ(tr.problem.dim, L.total_len);
        EXPECT_EQ(tr.initial_guess.size(), L.total_len);
      }
    }
  }
}

TEST(TranscribeLg, PendulumConstraintCount)
{
  const auto tr = transcribe_lg(pendulum_ocp(), 5);
  EXPECT_EQ(tr.problem.n_eq, 14);
  EXPECT_EQ(tr.problem.eq_constraints(tr.initial_guess).size(), 14);
  ASSERT_EQ(tr.problem.eq_blocks.size(), 2u);
  EXPECT_EQ(tr.problem.eq_blocks[0].size, 10);
  EXPECT_EQ(tr.problem.eq_blocks[1].size, 4);
}

TEST(TranscribeLg2, PendulumConstraintCount)
{
  const auto tr = transcribe_lg2(pendulum_ocp(), 5);
  EXPECT_EQ(tr.problem.n_eq, 9);
  EXPECT_EQ(tr.problem.eq_constraints(tr.initial_guess).size(), 9);
  EXPECT_EQ(tr.problem.eq_blocks[0].size, 5);
  EXPECT_EQ(tr.problem.eq_blocks[1].size, 4);
}

TEST(TranscribeLg, SampledAnalyticSolutionSatisfiesCollocation)
{
  const double tf = 1.;
  const auto tr   = transcribe_lg(oscillator_ocp(tf), 16);
  EXPECT_LT(collocation_residual(tr, sampled_cosine(tr, tf)), 1e-8);
}

TEST(TranscribeLg, ZeroDynamicsConstantNodes)
{
  auto ocp        = oscillator_ocp(2.);
  ocp.model.accel = [](const Eigen::VectorXd &, const Eigen::VectorXd &, const Eigen::VectorXd &, double) {
    return Eigen::VectorXd::Zero(1).eval();
  };
  const auto tr     = transcribe_lg(ocp, 7);
  Eigen::VectorXd z = Eigen::VectorXd::Zero(tr.layout.total_len);
  Eigen::MatrixXd X(tr.layout.nodes.rows, 2);
  X.col(0).setConstant(0.75);
  X.col(1).setZero();
  write_nodes(tr.layout, z, X);
  EXPECT_LE(collocation_residual(tr, z), 1e-14);
}

TEST(Transcribe, CartPoleZeroControlCost)
{
  std::mt19937_64 rng(11);
  for (Scheme s : {Scheme::Lg, Scheme::Lg2}) {
    const auto tr     = transcribe(cartpole_ocp(), s, 8);
    Eigen::VectorXd z = random_vector(tr.layout.total_len, rng);
    z.segment(tr.layout.controls.offset, tr.layout.controls.size()).setZero();
    EXPECT_EQ(tr.problem.objective(z), 0.);
  }
}

TEST(Transcribe, CostQuadratureMatchesControlEnergy)
{
  // u(t) = t on [0, 2]: int u^2 = 8/3, exact for the Gauss rule
  std::mt19937_64 rng(12);
  for (Scheme s : {Scheme::Lg, Scheme::Lg2}) {
    const auto tr     = transcribe(cartpole_ocp(), s, 6);
    Eigen::VectorXd z = random_vector(tr.layout.total_len, rng);
    for (int k = 0; k < 6; ++k) { z[tr.layout.controls.offset + k] = tau_to_time(tr.basis.control.nodes[k], 2.); }
    EXPECT_NEAR(tr.problem.objective(z), 8. / 3., 1e-13);
  }
}

TEST(Transcribe, MinimumTimeObjectiveIsFinalTime)
{
  std::mt19937_64 rng(13);
  for (Scheme s : {Scheme::Lg, Scheme::Lg2}) {
    const auto tr = transcribe(pendulum_ocp(), s, 9);
    for (int i = 0; i < 10; ++i) {
      Eigen::VectorXd z      = random_vector(tr.layout.total_len, rng);
      z[*tr.layout.tf_index] = 0.1 + 9.9 * (z[*tr.layout.tf_index] + 1.) / 2.;
      EXPECT_EQ(tr.problem.objective(z), z[*tr.layout.tf_index]);
    }
  }
}

TEST(Transcribe, UnitIntegrandQuadratureGivesFinalTime)
{
  auto ocp           = oscillator_ocp(3.5);
  ocp.cost_integrand = [](const Eigen::VectorXd &, const Eigen::VectorXd &) { return 1.; };
  std::mt19937_64 rng(14);
  for (Scheme s : {Scheme::Lg, Scheme::Lg2}) {
    for (int N : {1, 4, 10, 25}) {
      const auto tr = transcribe(ocp, s, N);
      EXPECT_NEAR(tr.problem.objective(random_vector(tr.layout.total_len, rng)), 3.5, 1e-14);
    }
  }
}

TEST(TranscribeLg2, QuadraticConfigurationIsExact)
{
  const double tf = 1.7;
  auto ocp        = oscillator_ocp(tf);
  const double a  = 2. * (2. / tf) * (2. / tf);
  ocp.model.accel = [a](const Eigen::VectorXd &, const Eigen::VectorXd &, const Eigen::VectorXd &, double) {
    return Eigen::VectorXd::Constant(1, a).eval();
  };
  for (int N : {1, 3, 8, 20}) {
    const auto tr     = transcribe_lg2(ocp, N);
    Eigen::VectorXd z = Eigen::VectorXd::Zero(tr.layout.total_len);
    Eigen::MatrixXd Q(N + 2, 1);
    for (int i = 0; i < N + 2; ++i) {
      const double tau = tr.basis.nodes.points[static_cast<std::size_t>(i)];
      Q(i, 0)          = tau * tau;
    }
    write_nodes(tr.layout, z, Q);
    EXPECT_LT(collocation_residual(tr, z), 1e-9) << "N=" << N;
  }
}

TEST(TranscribeLg2, OscillatorResidualConvergesSpectrally)
{
  const double tf = 8.;
  double prev     = 0.;
  for (int N : {4, 8, 16}) {
    const auto tr  = transcribe_lg2(oscillator_ocp(tf), N);
    const double r = collocation_residual(tr, sampled_cosine(tr, tf));
    if (N > 4) { EXPECT_LE(r, prev / 10.) << "N=" << N; }
    prev = r;
  }
}

TEST(TranscribeLg2, BoundaryUsesGenuineEndpointNodes)
{
  const auto tr     = transcribe_lg2(pendulum_ocp(), 6);
  Eigen::VectorXd z = Eigen::VectorXd::Zero(tr.layout.total_len);
  Eigen::MatrixXd Q(8, 1);
  const double tf = 3.;
  for (int i = 0; i < 8; ++i) {
    // q(t) = pi (3 s^2 - 2 s^3), s = t / tf: rest-to-rest
    const double s = (tr.basis.nodes.points[static_cast<std::size_t>(i)] + 1.) / 2.;
    Q(i, 0)        = std::numbers::pi * (3. * s * s - 2. * s * s * s);
  }
  write_nodes(tr.layout, z, Q);
  z[*tr.layout.tf_index]  = tf;
  const Eigen::VectorXd c = tr.problem.eq_constraints(z);
  EXPECT_LT(c.tail(4).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Transcribe, LgTerminalStateFromInterpolant)
{
  const auto tr     = transcribe_lg(pendulum_ocp(), 6);
  Eigen::VectorXd z = Eigen::VectorXd::Zero(tr.layout.total_len);
  Eigen::MatrixXd X(7, 2);
  for (int i = 0; i < 7; ++i) {
    const double s = (tr.basis.nodes.points[static_cast<std::size_t>(i)] + 1.) / 2.;
    X(i, 0)        = std::numbers::pi * (3. * s * s - 2. * s * s * s);
    X(i, 1)        = std::numbers::pi * 6. * s * (1. - s) / 3.;
  }
  write_nodes(tr.layout, z, X);
  z[*tr.layout.tf_index]  = 3.;
  const Eigen::VectorXd c = tr.problem.eq_constraints(z);
  EXPECT_LT(c.tail(4).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Transcribe, EvaluatorsArePureAndSized)
{
  std::mt19937_64 rng(15);
  for (Scheme s : {Scheme::Lg, Scheme::Lg2}) {
    const auto tr = transcribe(cartpole_ocp(), s, 7);
    for (int i = 0; i < 5; ++i) {
      const Eigen::VectorXd z = random_vector(tr.layout.total_len, rng);
      const Eigen::VectorXd a = tr.problem.eq_constraints(z);
      const Eigen::VectorXd b = tr.problem.eq_constraints(z);
      EXPECT_EQ(a.size(), tr.problem.n_eq);
      EXPECT_EQ(a, b);
      EXPECT_EQ(tr.problem.objective(z), tr.problem.objective(z));
      if (tr.problem.n_ineq > 0) { EXPECT_EQ(tr.problem.ineq_constraints(z).size(), tr.problem.n_ineq); }
    }
  }
}

TEST(Transcribe, BoundsAndGuess)
{
  const auto tr = transcribe_lg2(pendulum_ocp(), 10);
  const auto & L = tr.layout;
  for (Eigen::Index k = 0; k < L.controls.size(); ++k) {
    EXPECT_EQ(tr.problem.lower[L.controls.offset + k], -2.5);
    EXPECT_EQ(tr.problem.upper[L.controls.offset + k], 2.5);
    EXPECT_EQ(tr.initial_guess[L.controls.offset + k], 0.);
  }
  EXPECT_EQ(tr.problem.lower[*L.tf_index], 0.1);
  EXPECT_EQ(tr.problem.upper[*L.tf_index], 10.);
  EXPECT_EQ(tr.initial_guess[*L.tf_index], 5.05);
  const Eigen::MatrixXd Q = L.node_matrix(tr.initial_guess);
  EXPECT_EQ(Q(0, 0), 0.);
  EXPECT_NEAR(Q(L.nodes.rows - 1, 0), std::numbers::pi, 1e-15);
  for (Eigen::Index i = 1; i < Q.rows(); ++i) { EXPECT_GT(Q(i, 0), Q(i - 1, 0)); }
  EXPECT_NO_THROW(validate(tr.problem));
}

TEST(Transcribe, RejectsBadInput)
{
  EXPECT_ANY_THROW((void)transcribe_lg(pendulum_ocp(), 0));
  EXPECT_ANY_THROW((void)transcribe_lg2(pendulum_ocp(), 0));
  auto ocp = pendulum_ocp();
  ocp.state_bounds.pop_back();
  EXPECT_THROW((void)transcribe_lg2(ocp, 5), std::invalid_argument);
}

TEST(ExtractTrajectory, NodeValuesReproduced)
{
  std::mt19937_64 rng(16);
  for (Scheme s : {Scheme::Lg, Scheme::Lg2}) {
    const auto tr           = transcribe(cartpole_ocp(), s, 9);
    const Eigen::VectorXd z = random_vector(tr.layout.total_len, rng);
    const auto traj         = extract_trajectory(tr.layout, z, tr.basis);
    const Eigen::MatrixXd M = tr.layout.node_matrix(z);
    const Eigen::VectorXd t = traj.node_times();
    EXPECT_EQ(traj.node_values(), M);
    for (Eigen::Index i = 0; i < t.size(); ++i) {
      const Eigen::VectorXd q = traj.configuration(t[i]);
      for (int j = 0; j < 2; ++j) { EXPECT_NEAR(q[j], M(i, j), 1e-12); }
    }
    const Eigen::VectorXd tc = traj.collocation_times();
    const Eigen::MatrixXd U  = tr.layout.control_matrix(z);
    for (Eigen::Index k = 0; k < tc.size(); ++k) {
      EXPECT_NEAR(traj.control(tc[k])[0], U(k, 0), 1e-12);
      EXPECT_FALSE(traj.control_extrapolated(tc[k]));
    }
    EXPECT_TRUE(traj.control_extrapolated(0.));
    EXPECT_TRUE(traj.control_extrapolated(2.));
  }
}

TEST(ExtractTrajectory, Lg2VelocityMatchesFiniteDifference)
{
  std::mt19937_64 rng(17);
  const auto tr           = transcribe_lg2(pendulum_ocp(), 10);
  Eigen::VectorXd z       = tr.initial_guess;
  z.head(tr.layout.nodes.size()) += 0.3 * random_vector(tr.layout.nodes.size(), rng);
  const auto traj         = extract_trajectory(tr.layout, z, tr.basis);
  const double tf         = traj.tf();
  const double h          = 1e-6 * tf;
  std::uniform_real_distribution<double> d(h, tf - h);
  for (int i = 0; i < 50; ++i) {
    const double t  = d(rng);
    const double fd = (traj.configuration(t + h)[0] - traj.configuration(t - h)[0]) / (2. * h);
    EXPECT_NEAR(fd, traj.velocity(t)[0], 1e-5);
  }
}

TEST(ExtractTrajectory, Lg2FirstOrderErrorIdenticallyZero)
{
  std::mt19937_64 rng(18);
  for (const auto & ocp : {pendulum_ocp(), cartpole_ocp()}) {
    const auto tr = transcribe_lg2(ocp, 11);
    for (int rep = 0; rep < 5; ++rep) {
      Eigen::VectorXd z = random_vector(tr.layout.total_len, rng, 3.);
      if (tr.layout.tf_index) { z[*tr.layout.tf_index] = 4.; }
      const auto traj = extract_trajectory(tr.layout, z, tr.basis);
      std::uniform_real_distribution<double> d(0., traj.tf());
      for (int i = 0; i < 100; ++i) { EXPECT_EQ(eps1(traj, d(rng)).cwiseAbs().maxCoeff(), 0.); }
    }
  }
}

TEST(ExtractTrajectory, LgVelocityIsIndependent)
{
  const auto tr     = transcribe_lg(pendulum_ocp(), 8);
  Eigen::VectorXd z = tr.initial_guess;
  z[*tr.layout.tf_index] = 2.;
  // q nodes linear in time, v nodes zero
  const auto traj = extract_trajectory(tr.layout, z, tr.basis);
  const double t  = 1.;
  EXPECT_EQ(traj.velocity(t)[0], 0.);
  EXPECT_NEAR(traj.config_rate(t)[0], std::numbers::pi / 2., 1e-10);
  EXPECT_GT(std::abs(eps1(traj, t)[0]), 1.);
}

TEST(ExtractTrajectory, RejectsLengthMismatch)
{
  const auto tr = transcribe_lg2(pendulum_ocp(), 4);
  EXPECT_THROW((void)extract_trajectory(tr.layout, Eigen::VectorXd::Zero(tr.layout.total_len + 1), tr.basis),
               std::invalid_argument);
  const auto other = build_basis(NodeKind::Lg2, 5);
  EXPECT_THROW((void)extract_trajectory(tr.layout, tr.initial_guess, other), std::invalid_argument);
}
