#ifndef LGCOL__IVP_HPP_
#define LGCOL__IVP_HPP_

/**
 * @file
 * @brief Initial value problems solved through the collocation equations, and an adaptive
 * Runge-Kutta reference integrator used as an oracle.
 */

#include <Eigen/Core>

#include <functional>
#include <memory>
#include <stdexcept>
#include <vector>

#include "models.hpp"
#include "transcription.hpp"

namespace lgcol {

using ControlFn = std::function<Eigen::VectorXd(double t)>;

struct IvpSpec
{
  SecondOrderModel model;
  Eigen::VectorXd q0;
  Eigen::VectorXd v0;
  ControlFn control_fn;
  double tf{1.};
  int N{10};
};

/// Newton on the collocation system failed; carries the residual norm per iteration.
class IvpDivergenceError : public std::runtime_error
{
public:
  IvpDivergenceError(const std::string & what, std::vector<double> history)
      : std::runtime_error(what), residual_history(std::move(history))
  {}

  std::vector<double> residual_history;
};

/// Max-norm residual at which the collocation Newton iteration stops.
inline constexpr double kIvpTolerance = 1e-10;

/**
 * @brief Second-order collocation IVP.
 *
 * Unknowns: Q, (N+2) x n_q. Equations: N n_q collocation residuals, Q_0 = q0 and
 * (2/tf) (D* Q)_0 = v0. Controls are sampled from control_fn at the collocation times.
 */
Trajectory solve_ivp_lg2(const IvpSpec & spec);

/**
 * @brief First-order collocation IVP.
 *
 * Unknowns: X, (N+1) x 2 n_q. Equations: N 2 n_q collocation residuals and X_0 = (q0, v0).
 */
Trajectory solve_ivp_lg(const IvpSpec & spec);

Trajectory solve_ivp(const IvpSpec & spec, Scheme scheme);

/// Thrown by the reference integrator when the step size underflows.
class StepSizeUnderflow : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Dense output of an adaptive Dormand-Prince integration over [0, tf].
class ReferenceSolution
{
public:
  struct Track;

  ReferenceSolution(int n_q, double tf, std::shared_ptr<const Track> track);

  [[nodiscard]] double tf() const { return tf_; }
  [[nodiscard]] int n_q() const { return n_q_; }
  [[nodiscard]] std::size_t steps() const;

  /// Full state (q, v) at t in [0, tf].
  [[nodiscard]] Eigen::VectorXd state(double t) const;
  [[nodiscard]] Eigen::VectorXd configuration(double t) const { return state(t).head(n_q_); }
  [[nodiscard]] Eigen::VectorXd velocity(double t) const { return state(t).tail(n_q_); }

private:
  int n_q_;
  double tf_;
  std::shared_ptr<const Track> track_;
};

/// Adaptive Dormand-Prince 5(4) on the first-order form; tol in [1e-13, 1e-6] is the requested
/// accuracy and steps are accepted against abs = rel = tol / 10.
ReferenceSolution reference_integrate(const SecondOrderModel & model, const Eigen::VectorXd & q0,
                                      const Eigen::VectorXd & v0, const ControlFn & control_fn, double tf,
                                      double tol);

}  // namespace lgcol

#endif  // LGCOL__IVP_HPP_
