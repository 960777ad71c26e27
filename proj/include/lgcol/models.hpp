#ifndef LGCOL__MODELS_HPP_
#define LGCOL__MODELS_HPP_

/**
 * @file
 * @brief Second-order dynamics, optimal control problem definitions and the benchmark systems.
 */

#include <Eigen/Core>

#include <functional>
#include <limits>
#include <string>
#include <variant>
#include <vector>

namespace lgcol {

/// Acceleration map q'' = g(q, v, u, t).
using AccelFn = std::function<Eigen::VectorXd(
  const Eigen::VectorXd & q, const Eigen::VectorXd & v, const Eigen::VectorXd & u, double t)>;

/// First-order vector field x' = f(x, u, t) with x = (q, v).
using VectorField =
  std::function<Eigen::VectorXd(const Eigen::VectorXd & x, const Eigen::VectorXd & u, double t)>;

struct SecondOrderModel
{
  std::string name;
  int n_q{0};
  int n_u{0};
  AccelFn accel;
  /// All configuration coordinates share a unit (joint errors are meaningful).
  bool uniform_units{true};
};

VectorField first_order_wrap(const SecondOrderModel & model);

struct Bound
{
  double lo{-std::numeric_limits<double>::infinity()};
  double hi{std::numeric_limits<double>::infinity()};
};

struct FixedFinalTime
{
  double value{1.};
};

struct FreeFinalTime
{
  double lo{0.1};
  double hi{10.};
};

using FinalTimeMode = std::variant<FixedFinalTime, FreeFinalTime>;

struct OcpDefinition
{
  SecondOrderModel model;

  /// L(x, u); ignored when `minimum_time` is set.
  std::function<double(const Eigen::VectorXd & x, const Eigen::VectorXd & u)> cost_integrand;
  /// L == 1: the objective is exactly t_f.
  bool minimum_time{false};

  /// h(x, u) <= 0, `n_path` entries; empty function when n_path == 0.
  std::function<Eigen::VectorXd(const Eigen::VectorXd & x, const Eigen::VectorXd & u)> path_constraint;
  int n_path{0};

  /// b(x0, xf, t_f) == 0, `n_boundary` entries.
  std::function<Eigen::VectorXd(const Eigen::VectorXd & x0, const Eigen::VectorXd & xf, double tf)>
    boundary_constraint;
  int n_boundary{0};

  std::vector<Bound> control_bounds;  ///< n_u entries
  std::vector<Bound> state_bounds;    ///< 2 n_q entries, (q, v) order

  FinalTimeMode final_time{FixedFinalTime{}};

  /// Configurations the deterministic initial guess interpolates between.
  Eigen::VectorXd guess_q_start;
  Eigen::VectorXd guess_q_end;
};

/// Throws std::invalid_argument naming the first inconsistency found.
void validate(const OcpDefinition & ocp);

struct PendulumParams
{
  double mass{1.};
  double length{1.};
  double gravity{9.81};
  double torque_max{2.5};
  double tf_min{0.1};
  double tf_max{10.};

  bool operator==(const PendulumParams &) const = default;
};

struct CartPoleParams
{
  double cart_mass{1.};
  double pole_mass{0.3};
  double pole_length{0.5};
  double gravity{9.81};
  double distance{1.};
  double duration{2.};
  double force_max{20.};
  double track_limit{2.};

  bool operator==(const CartPoleParams &) const = default;
};

/// Angle measured from the hanging rest pose; upright is pi.
double pendulum_accel(const PendulumParams & p, double q, double v, double u);

/// Cart position and pole angle (0 hanging) accelerations.
Eigen::Vector2d cartpole_accel(const CartPoleParams & p, const Eigen::Vector2d & q, const Eigen::Vector2d & v, double u);

SecondOrderModel pendulum_model(const PendulumParams & p = {});
SecondOrderModel cartpole_model(const CartPoleParams & p = {});
/// q'' = u with a single coordinate.
SecondOrderModel double_integrator_model();

/// Minimum-time swing-up from (0, 0) to (pi, 0) with |u| <= torque_max.
OcpDefinition pendulum_ocp(const PendulumParams & p = {});
/// Minimum-effort swing-up from rest to (distance, pi) in fixed time.
OcpDefinition cartpole_ocp(const CartPoleParams & p = {});
/// Minimum-time rest-to-rest transfer over `distance` with |u| <= u_max.
OcpDefinition double_integrator_min_time_ocp(double distance = 1., double u_max = 1., double tf_lo = 0.1, double tf_hi = 10.);

}  // namespace lgcol

#endif  // LGCOL__MODELS_HPP_
