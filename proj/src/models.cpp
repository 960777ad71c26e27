#include "lgcol/models.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace lgcol {

VectorField first_order_wrap(const SecondOrderModel & model)
{
  const int n_q = model.n_q;
  return [n_q, accel = model.accel](const Eigen::VectorXd & x, const Eigen::VectorXd & u, double t) {
    Eigen::VectorXd dx(2 * n_q);
    const Eigen::VectorXd q = x.head(n_q);
    const Eigen::VectorXd v = x.tail(n_q);
    dx.head(n_q)            = v;
    dx.tail(n_q)            = accel(q, v, u, t);
    return dx;
  };
}

void validate(const OcpDefinition & ocp)
{
  const auto & m = ocp.model;
  if (m.n_q < 1 || m.n_u < 0) { throw std::invalid_argument("ocp: model dimensions must satisfy n_q >= 1, n_u >= 0"); }
  if (!m.accel) { throw std::invalid_argument("ocp: model '" + m.name + "' has no acceleration function"); }
  if (!ocp.minimum_time && !ocp.cost_integrand) { throw std::invalid_argument("ocp: missing cost integrand"); }
  if (ocp.n_path < 0 || ocp.n_boundary < 0) { throw std::invalid_argument("ocp: negative constraint count"); }
  if (ocp.n_path > 0 && !ocp.path_constraint) { throw std::invalid_argument("ocp: n_path > 0 without path constraint"); }
  if (ocp.n_boundary > 0 && !ocp.boundary_constraint) {
    throw std::invalid_argument("ocp: n_boundary > 0 without boundary constraint");
  }
  if (static_cast<int>(ocp.control_bounds.size()) != m.n_u) {
    throw std::invalid_argument("ocp: control_bounds has " + std::to_string(ocp.control_bounds.size())
                                + " entries, expected n_u=" + std::to_string(m.n_u));
  }
  if (static_cast<int>(ocp.state_bounds.size()) != 2 * m.n_q) {
    throw std::invalid_argument("ocp: state_bounds has " + std::to_string(ocp.state_bounds.size())
                                + " entries, expected 2*n_q=" + std::to_string(2 * m.n_q));
  }
  const auto check_bound = [](const Bound & b, const char * what) {
    if (std::isnan(b.lo) || std::isnan(b.hi) || b.lo > b.hi) {
      throw std::invalid_argument(std::string("ocp: invalid ") + what + " bound");
    }
  };
  for (const auto & b : ocp.control_bounds) { check_bound(b, "control"); }
  for (const auto & b : ocp.state_bounds) { check_bound(b, "state"); }
  if (const auto * f = std::get_if<FreeFinalTime>(&ocp.final_time)) {
    if (!(f->lo > 0.) || f->lo > f->hi || !std::isfinite(f->hi)) {
      throw std::invalid_argument("ocp: free final time needs 0 < lo <= hi < inf");
    }
  } else if (!(std::get<FixedFinalTime>(ocp.final_time).value > 0.)) {
    throw std::invalid_argument("ocp: fixed final time must be positive");
  }
  if (ocp.guess_q_start.size() != m.n_q || ocp.guess_q_end.size() != m.n_q) {
    throw std::invalid_argument("ocp: guess configurations must have n_q entries");
  }
}

double pendulum_accel(const PendulumParams & p, double q, double /*v*/, double u)
{
  return (u - p.mass * p.gravity * p.length * std::sin(q)) / (p.mass * p.length * p.length);
}

Eigen::Vector2d cartpole_accel(const CartPoleParams & p, const Eigen::Vector2d & q, const Eigen::Vector2d & v, double u)
{
  const double s = std::sin(q[1]);
  const double c = std::cos(q[1]);
  const double m1 = p.cart_mass, m2 = p.pole_mass, l = p.pole_length, g = p.gravity;
  const double den = m1 + m2 * (1. - c * c);
  return {
    (l * m2 * s * v[1] * v[1] + u + m2 * g * c * s) / den,
    -(l * m2 * c * s * v[1] * v[1] + u * c + (m1 + m2) * g * s) / (l * den),
  };
}

SecondOrderModel pendulum_model(const PendulumParams & p)
{
  return {
    .name  = "pendulum",
    .n_q   = 1,
    .n_u   = 1,
    .accel = [p](const Eigen::VectorXd & q, const Eigen::VectorXd & v, const Eigen::VectorXd & u, double) {
      return Eigen::VectorXd::Constant(1, pendulum_accel(p, q[0], v[0], u[0]));
    },
    .uniform_units = true,
  };
}

SecondOrderModel cartpole_model(const CartPoleParams & p)
{
  return {
    .name  = "cartpole",
    .n_q   = 2,
    .n_u   = 1,
    .accel = [p](const Eigen::VectorXd & q, const Eigen::VectorXd & v, const Eigen::VectorXd & u, double) {
      return Eigen::VectorXd(cartpole_accel(p, q.head<2>(), v.head<2>(), u[0]));
    },
    // meters and radians
    .uniform_units = false,
  };
}

SecondOrderModel double_integrator_model()
{
  return {
    .name  = "double_integrator",
    .n_q   = 1,
    .n_u   = 1,
    .accel = [](const Eigen::VectorXd &, const Eigen::VectorXd &, const Eigen::VectorXd & u, double) {
      return Eigen::VectorXd(u.head(1));
    },
    .uniform_units = true,
  };
}

namespace {

// b(x0, xf, t_f) = (x0 - start, xf - goal)
auto fixed_endpoints(Eigen::VectorXd start, Eigen::VectorXd goal)
{
  return [start = std::move(start), goal = std::move(goal)](
           const Eigen::VectorXd & x0, const Eigen::VectorXd & xf, double) {
    Eigen::VectorXd r(start.size() + goal.size());
    r << x0 - start, xf - goal;
    return r;
  };
}

}  // namespace

OcpDefinition pendulum_ocp(const PendulumParams & p)
{
  OcpDefinition ocp;
  ocp.model          = pendulum_model(p);
  ocp.minimum_time   = true;
  ocp.cost_integrand = [](const Eigen::VectorXd &, const Eigen::VectorXd &) { return 1.; };
  ocp.boundary_constraint = fixed_endpoints(Eigen::Vector2d(0., 0.), Eigen::Vector2d(std::numbers::pi, 0.));
  ocp.n_boundary          = 4;
  ocp.control_bounds      = {Bound{-p.torque_max, p.torque_max}};
  ocp.state_bounds        = {Bound{}, Bound{}};
  ocp.final_time          = FreeFinalTime{p.tf_min, p.tf_max};
  ocp.guess_q_start       = Eigen::VectorXd::Constant(1, 0.);
  ocp.guess_q_end         = Eigen::VectorXd::Constant(1, std::numbers::pi);
  return ocp;
}

OcpDefinition cartpole_ocp(const CartPoleParams & p)
{
  OcpDefinition ocp;
  ocp.model          = cartpole_model(p);
  ocp.cost_integrand = [](const Eigen::VectorXd &, const Eigen::VectorXd & u) { return u[0] * u[0]; };
  ocp.boundary_constraint =
    fixed_endpoints(Eigen::Vector4d(0., 0., 0., 0.), Eigen::Vector4d(p.distance, std::numbers::pi, 0., 0.));
  ocp.n_boundary     = 8;
  ocp.control_bounds = {Bound{-p.force_max, p.force_max}};
  ocp.state_bounds   = {Bound{-p.track_limit, p.track_limit}, Bound{}, Bound{}, Bound{}};
  ocp.final_time     = FixedFinalTime{p.duration};
  ocp.guess_q_start  = Eigen::Vector2d(0., 0.);
  ocp.guess_q_end    = Eigen::Vector2d(p.distance, std::numbers::pi);
  return ocp;
}

OcpDefinition double_integrator_min_time_ocp(double distance, double u_max, double tf_lo, double tf_hi)
{
  OcpDefinition ocp;
  ocp.model               = double_integrator_model();
  ocp.minimum_time        = true;
  ocp.cost_integrand      = [](const Eigen::VectorXd &, const Eigen::VectorXd &) { return 1.; };
  ocp.boundary_constraint = fixed_endpoints(Eigen::Vector2d(0., 0.), Eigen::Vector2d(distance, 0.));
  ocp.n_boundary          = 4;
  ocp.control_bounds      = {Bound{-u_max, u_max}};
  ocp.state_bounds        = {Bound{}, Bound{}};
  ocp.final_time          = FreeFinalTime{tf_lo, tf_hi};
  ocp.guess_q_start       = Eigen::VectorXd::Constant(1, 0.);
  ocp.guess_q_end         = Eigen::VectorXd::Constant(1, distance);
  return ocp;
}

}  // namespace lgcol
