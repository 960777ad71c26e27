#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "lgcol/ivp.hpp"

namespace lgcol {

namespace odeint = boost::numeric::odeint;

namespace {

using State        = std::vector<double>;
using DenseStepper = odeint::result_of::make_dense_output<odeint::runge_kutta_dopri5<State>>::type;

}  // namespace

/// One dense-output stepper snapshot per accepted step.
struct ReferenceSolution::Track
{
  std::vector<DenseStepper> steps;
};

ReferenceSolution::ReferenceSolution(int n_q, double tf, std::shared_ptr<const Track> track)
    : n_q_(n_q), tf_(tf), track_(std::move(track))
{}

std::size_t ReferenceSolution::steps() const { return track_->steps.size(); }

Eigen::VectorXd ReferenceSolution::state(double t) const
{
  if (!(t >= 0. && t <= tf_)) {
    throw std::out_of_range("reference solution: t=" + std::to_string(t) + " outside [0, tf]");
  }
  const auto & steps = track_->steps;
  // first step whose end time reaches t
  const auto it = std::lower_bound(steps.begin(), steps.end(), t,
                                   [](const DenseStepper & s, double value) { return s.current_time() < value; });
  const DenseStepper & s = it == steps.end() ? steps.back() : *it;
  State x(static_cast<std::size_t>(2 * n_q_));
  if (t == s.current_time()) {
    x = s.current_state();
  } else {
    s.calc_state(t, x);
  }
  return Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
}

ReferenceSolution reference_integrate(const SecondOrderModel & model, const Eigen::VectorXd & q0,
                                      const Eigen::VectorXd & v0, const ControlFn & control_fn, double tf,
                                      double tol)
{
  if (!(tol >= 1e-13 && tol <= 1e-6)) { throw std::invalid_argument("reference_integrate: tol must lie in [1e-13, 1e-6]"); }
  if (!(tf > 0.)) { throw std::invalid_argument("reference_integrate: tf must be positive"); }
  if (q0.size() != model.n_q || v0.size() != model.n_q) {
    throw std::invalid_argument("reference_integrate: initial state dimension mismatch");
  }

  const VectorField f = first_order_wrap(model);
  const int n_x       = 2 * model.n_q;
  auto rhs            = [&](const State & x, State & dxdt, double t) {
    const Eigen::VectorXd dx = f(Eigen::Map<const Eigen::VectorXd>(x.data(), n_x), control_fn(t), t);
    std::copy(dx.data(), dx.data() + n_x, dxdt.begin());
  };

  State x0(static_cast<std::size_t>(n_x));
  std::copy(q0.data(), q0.data() + model.n_q, x0.begin());
  std::copy(v0.data(), v0.data() + model.n_q, x0.begin() + model.n_q);

  auto track      = std::make_shared<ReferenceSolution::Track>();
  // tol is the requested global accuracy; steps are controlled one decade tighter
  const double step_tol = tol / 10.;
  auto stepper          = odeint::make_dense_output(step_tol, step_tol, odeint::runge_kutta_dopri5<State>());
  const double h0 = std::min(1e-3, tf / 100.);
  const double h_min = 1e-14 * std::max(1., tf);
  stepper.initialize(x0, 0., h0);
  try {
    while (stepper.current_time() < tf) {
      stepper.do_step(rhs);
      if (stepper.current_time() < tf && stepper.current_time_step() < h_min) {
        throw StepSizeUnderflow("reference_integrate: step size underflow at t=" + std::to_string(stepper.current_time()));
      }
      track->steps.push_back(stepper);
    }
  } catch (const odeint::step_adjustment_error & e) {
    throw StepSizeUnderflow(std::string("reference_integrate: ") + e.what());
  }
  return ReferenceSolution(model.n_q, tf, std::move(track));
}

}  // namespace lgcol
