#include <stdexcept>
#include <string>

#include "lgcol/transcription.hpp"

namespace lgcol {

namespace {

double column_eval(const LagrangeBasis & basis, const Eigen::MatrixXd & values, Eigen::Index col, double tau)
{
  // column-major storage: each column is contiguous
  return barycentric_eval(basis, {values.col(col).data(), static_cast<std::size_t>(values.rows())}, tau);
}

void check_shapes(const CollocationBasis & basis, const Eigen::MatrixXd & nodes, const Eigen::MatrixXd & U)
{
  if (nodes.rows() != basis.B) {
    throw std::invalid_argument("trajectory: expected " + std::to_string(basis.B) + " node rows, got "
                                + std::to_string(nodes.rows()));
  }
  if (U.rows() != basis.N) {
    throw std::invalid_argument("trajectory: expected " + std::to_string(basis.N) + " control rows, got "
                                + std::to_string(U.rows()));
  }
}

}  // namespace

Trajectory Trajectory::lg2(CollocationBasis basis, double tf, Eigen::MatrixXd Q, Eigen::MatrixXd U)
{
  if (basis.nodes.kind != NodeKind::Lg2) { throw std::invalid_argument("Trajectory::lg2 needs an lg2 basis"); }
  check_shapes(basis, Q, U);
  Trajectory traj;
  traj.scheme_    = Scheme::Lg2;
  traj.tf_        = tf;
  traj.n_q_       = static_cast<int>(Q.cols());
  traj.dq_nodes_  = basis.interp.diff * Q;
  traj.ddq_nodes_ = basis.interp.diff * traj.dq_nodes_;
  traj.nodes_     = std::move(Q);
  traj.controls_  = std::move(U);
  traj.basis_     = std::move(basis);
  return traj;
}

Trajectory Trajectory::lg(CollocationBasis basis, double tf, Eigen::MatrixXd X, Eigen::MatrixXd U)
{
  if (basis.nodes.kind != NodeKind::LgFirstOrder) { throw std::invalid_argument("Trajectory::lg needs an lg basis"); }
  check_shapes(basis, X, U);
  if (X.cols() % 2 != 0) { throw std::invalid_argument("Trajectory::lg: state width must be even"); }
  Trajectory traj;
  traj.scheme_    = Scheme::Lg;
  traj.tf_        = tf;
  traj.n_q_       = static_cast<int>(X.cols() / 2);
  traj.dq_nodes_  = basis.interp.diff * X.leftCols(traj.n_q_);
  traj.ddq_nodes_ = basis.interp.diff * traj.dq_nodes_;
  traj.nodes_     = std::move(X);
  traj.controls_  = std::move(U);
  traj.basis_     = std::move(basis);
  return traj;
}

Eigen::VectorXd Trajectory::node_times() const
{
  Eigen::VectorXd t(basis_.B);
  for (int i = 0; i < basis_.B; ++i) { t[i] = tau_to_time(basis_.nodes.points[static_cast<std::size_t>(i)], tf_); }
  return t;
}

Eigen::VectorXd Trajectory::collocation_times() const
{
  Eigen::VectorXd t(basis_.N);
  for (int k = 0; k < basis_.N; ++k) { t[k] = tau_to_time(basis_.control.nodes[k], tf_); }
  return t;
}

Eigen::VectorXd Trajectory::eval_columns(const Eigen::MatrixXd & values, Eigen::Index first, Eigen::Index count,
                                         double t) const
{
  const double tau = time_to_tau(t, tf_);
  Eigen::VectorXd out(count);
  for (Eigen::Index j = 0; j < count; ++j) { out[j] = column_eval(basis_.interp, values, first + j, tau); }
  return out;
}

Eigen::VectorXd Trajectory::configuration(double t) const { return eval_columns(nodes_, 0, n_q_, t); }

Eigen::VectorXd Trajectory::velocity(double t) const
{
  if (scheme_ == Scheme::Lg2) { return config_rate(t); }
  return eval_columns(nodes_, n_q_, n_q_, t);
}

Eigen::VectorXd Trajectory::config_rate(double t) const { return (2. / tf_) * eval_columns(dq_nodes_, 0, n_q_, t); }

Eigen::VectorXd Trajectory::config_accel(double t) const
{
  const double s = 2. / tf_;
  return s * s * eval_columns(ddq_nodes_, 0, n_q_, t);
}

Eigen::VectorXd Trajectory::control(double t) const
{
  const double tau = time_to_tau(t, tf_);
  Eigen::VectorXd u(controls_.cols());
  for (Eigen::Index j = 0; j < controls_.cols(); ++j) { u[j] = column_eval(basis_.control, controls_, j, tau); }
  return u;
}

bool Trajectory::control_extrapolated(double t) const
{
  const double tau = time_to_tau(t, tf_);
  return tau < basis_.control.nodes[0] || tau > basis_.control.nodes[basis_.N - 1];
}

}  // namespace lgcol
