#include "lgcol/ivp.hpp"

#include <Eigen/LU>

#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "lgcol/nlp.hpp"

namespace lgcol {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void check_spec(const IvpSpec & spec)
{
  if (!(spec.tf > 0.)) { throw std::invalid_argument("ivp: tf must be positive"); }
  if (spec.q0.size() != spec.model.n_q || spec.v0.size() != spec.model.n_q) {
    throw std::invalid_argument("ivp: initial state dimension does not match model '" + spec.model.name + "'");
  }
  if (!spec.control_fn) { throw std::invalid_argument("ivp: missing control function"); }
}

Eigen::MatrixXd sample_controls(const IvpSpec & spec, const CollocationBasis & basis)
{
  Eigen::MatrixXd U(basis.N, spec.model.n_u);
  for (int k = 0; k < basis.N; ++k) {
    const Eigen::VectorXd u = spec.control_fn(spec.tf * (basis.control.nodes[k] + 1.) / 2.);
    if (u.size() != spec.model.n_u) { throw std::invalid_argument("ivp: control function returned wrong dimension"); }
    U.row(k) = u.transpose();
  }
  return U;
}

/// Damped Newton with a finite-difference Jacobian; halves the step until the residual norm drops.
Eigen::VectorXd newton_solve(const VectorFn & residual, Eigen::VectorXd w)
{
  constexpr int kMaxIter      = 50;
  constexpr int kMaxHalvings  = 30;

  std::vector<double> history;
  Eigen::VectorXd r = residual(w);
  for (int it = 0; it <= kMaxIter; ++it) {
    const double rmax = r.allFinite() ? r.cwiseAbs().maxCoeff() : std::numeric_limits<double>::quiet_NaN();
    history.push_back(rmax);
    if (!std::isfinite(rmax)) { break; }
    const bool converged = rmax <= kIvpTolerance;

    const Eigen::MatrixXd jac = differentiate(residual, w);
    const Eigen::VectorXd dw  = jac.partialPivLu().solve(-r);
    if (!dw.allFinite()) { break; }

    if (converged) {
      // one polishing step; keep it only if it does not make things worse
      const Eigen::VectorXd w1 = w + dw;
      const Eigen::VectorXd r1 = residual(w1);
      if (r1.allFinite() && r1.cwiseAbs().maxCoeff() <= rmax) { w = w1; }
      return w;
    }

    const double r_norm = r.norm();
    double alpha        = 1.;
    bool decreased      = false;
    for (int h = 0; h <= kMaxHalvings; ++h, alpha *= 0.5) {
      const Eigen::VectorXd w1 = w + alpha * dw;
      const Eigen::VectorXd r1 = residual(w1);
      if (r1.allFinite() && r1.norm() < r_norm) {
        w         = w1;
        r         = r1;
        decreased = true;
        break;
      }
    }
    if (!decreased) { break; }
  }

  std::ostringstream os;
  os << "collocation Newton iteration diverged after " << history.size()
     << " iterations (last max residual " << history.back() << "); reduce tf or raise N";
  throw IvpDivergenceError(os.str(), std::move(history));
}

}  // namespace

Trajectory solve_ivp_lg2(const IvpSpec & spec)
{
  check_spec(spec);
  const int n_q         = spec.model.n_q;
  CollocationBasis basis = build_basis(NodeKind::Lg2, spec.N);
  const Eigen::MatrixXd U = sample_controls(spec, basis);
  const int N = basis.N, B = basis.B;

  const auto residual = [&](const Eigen::VectorXd & w) {
    const Eigen::MatrixXd Q   = Eigen::Map<const RowMatrix>(w.data(), B, n_q);
    const double s            = 2. / spec.tf;
    const Eigen::MatrixXd Qd  = s * (basis.D * Q);
    const Eigen::MatrixXd Qdd = s * (basis.D * Qd);
    Eigen::VectorXd r(B * n_q);
    for (int k = 0; k < N; ++k) {
      const double t = spec.tf * (basis.control.nodes[k] + 1.) / 2.;
      r.segment(k * n_q, n_q) =
        Qdd.row(k + 1).transpose()
        - spec.model.accel(Q.row(k + 1).transpose(), Qd.row(k + 1).transpose(), U.row(k).transpose(), t);
    }
    r.segment(N * n_q, n_q)       = Q.row(0).transpose() - spec.q0;
    r.segment((N + 1) * n_q, n_q) = Qd.row(0).transpose() - spec.v0;
    return r;
  };

  Eigen::VectorXd w0(B * n_q);
  for (int i = 0; i < B; ++i) { w0.segment(i * n_q, n_q) = spec.q0; }
  const Eigen::VectorXd w = newton_solve(residual, w0);
  Eigen::MatrixXd Q       = Eigen::Map<const RowMatrix>(w.data(), B, n_q);
  return Trajectory::lg2(std::move(basis), spec.tf, std::move(Q), U);
}

Trajectory solve_ivp_lg(const IvpSpec & spec)
{
  check_spec(spec);
  const int n_q          = spec.model.n_q;
  const int n_x          = 2 * n_q;
  CollocationBasis basis = build_basis(NodeKind::LgFirstOrder, spec.N);
  const Eigen::MatrixXd U = sample_controls(spec, basis);
  const int N = basis.N, B = basis.B;
  const VectorField f = first_order_wrap(spec.model);

  Eigen::VectorXd x0(n_x);
  x0 << spec.q0, spec.v0;

  const auto residual = [&](const Eigen::VectorXd & w) {
    const Eigen::MatrixXd X  = Eigen::Map<const RowMatrix>(w.data(), B, n_x);
    const Eigen::MatrixXd DX = (2. / spec.tf) * (basis.D * X);
    Eigen::VectorXd r(B * n_x);
    for (int k = 0; k < N; ++k) {
      const double t          = spec.tf * (basis.control.nodes[k] + 1.) / 2.;
      r.segment(k * n_x, n_x) = DX.row(k).transpose() - f(X.row(k + 1).transpose(), U.row(k).transpose(), t);
    }
    r.tail(n_x) = X.row(0).transpose() - x0;
    return r;
  };

  Eigen::VectorXd w0(B * n_x);
  for (int i = 0; i < B; ++i) { w0.segment(i * n_x, n_x) = x0; }
  const Eigen::VectorXd w = newton_solve(residual, w0);
  Eigen::MatrixXd X       = Eigen::Map<const RowMatrix>(w.data(), B, n_x);
  return Trajectory::lg(std::move(basis), spec.tf, std::move(X), U);
}

Trajectory solve_ivp(const IvpSpec & spec, Scheme scheme)
{
  return scheme == Scheme::Lg ? solve_ivp_lg(spec) : solve_ivp_lg2(spec);
}

}  // namespace lgcol
