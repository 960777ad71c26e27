#ifndef LGCOL__ANALYSIS_HPP_
#define LGCOL__ANALYSIS_HPP_

/**
 * @file
 * @brief Dynamic-error functionals of collocated trajectories and LG vs LG2 sweeps.
 *
 * First-order error:  eps1_i(t) = q'_i(t) - v_i(t)
 * Second-order error: eps2_i(t) = q''_i(t) - g_i(q(t), q'(t), u(t), t)
 * Integrated errors:  E_i = int_0^tf |eps_i(t)| dt, joint E = int_0^tf sum_i |eps_i(t)| dt
 */

#include <Eigen/Core>

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "models.hpp"
#include "nlp.hpp"
#include "transcription.hpp"

namespace lgcol {

Eigen::VectorXd eps1(const Trajectory & traj, double t);

Eigen::VectorXd eps2(const Trajectory & traj, const SecondOrderModel & model, double t);

/// sum_i |eps2_i(t)|; throws std::invalid_argument unless the model's coordinates share units.
double joint_eps2(const Trajectory & traj, const SecondOrderModel & model, double t);

/// Composite Gauss-Legendre rule over [0, tf].
inline constexpr int kErrorPanels      = 20;
inline constexpr int kErrorPanelPoints = 10;

/// int_0^tf err_fn(t) dt on kErrorPanels equal panels of kErrorPanelPoints Gauss points each.
double integrate_error(const std::function<double(double)> & err_fn, double tf);

struct ErrorReport
{
  Scheme scheme{Scheme::Lg2};
  int N{0};
  std::vector<double> e1;  ///< per coordinate
  std::vector<double> e2;  ///< per coordinate
  std::optional<double> joint_e1;
  std::optional<double> joint_e2;

  SolveStatus status{SolveStatus::Converged};
  double objective{0.};
  double tf{0.};
  double eq_violation{0.};
  int iterations{0};
  double wall_seconds{0.};
};

/// Error functionals of a trajectory (solve metadata left at defaults).
ErrorReport error_report(const Trajectory & traj, const SecondOrderModel & model);

struct OcpSolution
{
  Transcription transcription;
  SolveResult result;
  Trajectory trajectory;
  double wall_seconds{0.};
};

/// Transcribe, solve from the deterministic initial guess, and extract the trajectory.
OcpSolution solve_ocp(const OcpDefinition & ocp, Scheme scheme, int N, const SolveOptions & opts = {});

/// One report per entry of N_list, in order; failed solves keep their status.
std::vector<ErrorReport> sweep(const OcpDefinition & ocp, Scheme scheme, std::span<const int> N_list,
                               const SolveOptions & opts = {});

}  // namespace lgcol

#endif  // LGCOL__ANALYSIS_HPP_
