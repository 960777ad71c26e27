#ifndef LGCOL__NLP_HPP_
#define LGCOL__NLP_HPP_

/**
 * @file
 * @brief Dense nonlinear program representation and the reference solver.
 *
 * The reference solver is an augmented Lagrangian method. Equality constraints (and general
 * inequalities, after slack conversion) enter the augmented Lagrangian; variable bounds are
 * kept explicitly and handled by a projected active-set Newton inner loop whose model Hessian is
 * H + mu J^T J, with H a finite-difference Hessian of the Lagrangian. A projected
 * Levenberg-Marquardt phase first moves the initial guess onto the constraint manifold.
 */

#include <Eigen/Core>

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace lgcol {

using ScalarFn = std::function<double(const Eigen::VectorXd &)>;
using VectorFn = std::function<Eigen::VectorXd(const Eigen::VectorXd &)>;

/// Thrown when an evaluator returns a non-finite value during differentiation.
class NonFiniteError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

struct ConstraintBlock
{
  std::string name;
  Eigen::Index size{0};
};

/**
 * @brief min f(z) s.t. c(z) = 0, h(z) <= 0, lower <= z <= upper.
 *
 * Evaluators must be pure; the sizes of c and h are fixed at n_eq and n_ineq.
 */
struct NlpProblem
{
  Eigen::Index dim{0};
  ScalarFn objective;
  VectorFn eq_constraints;
  VectorFn ineq_constraints;
  Eigen::Index n_eq{0};
  Eigen::Index n_ineq{0};
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  std::vector<ConstraintBlock> eq_blocks;
  std::vector<ConstraintBlock> ineq_blocks;
};

/// Throws std::invalid_argument if sizes or bounds are inconsistent.
void validate(const NlpProblem & problem);

/// Central-difference Jacobian, rows = outputs, cols = variables.
Eigen::MatrixXd differentiate(const VectorFn & fn, const Eigen::VectorXd & z);

/// Central-difference gradient of a scalar function.
Eigen::VectorXd gradient(const ScalarFn & fn, const Eigen::VectorXd & z);

struct SolveOptions
{
  double feas_tol{1e-8};
  double opt_tol{1e-6};
  /// Cap on inner Newton iterations summed over all outer iterations (restoration included).
  int max_iter{5000};
  /// Empty means the midpoint of finite bounds (0 where unbounded).
  Eigen::VectorXd initial_guess;
};

enum class SolveStatus { Converged, MaxIter, LineSearchFailure };

std::string to_string(SolveStatus status);

struct SolveResult
{
  Eigen::VectorXd z_star;
  double objective_value{0.};
  double eq_violation{0.};    ///< max |c_i(z*)|
  double ineq_violation{0.};  ///< max(0, max h_i(z*))
  int iterations{0};
  int outer_iterations{0};
  double optimality{0.};      ///< projected Lagrangian gradient norm at exit
  SolveStatus status{SolveStatus::MaxIter};
  std::string diagnostics;
};

/// max |c_i(z)| and max(0, max h_i(z)).
std::pair<double, double> constraint_violation(const NlpProblem & problem, const Eigen::VectorXd & z);

SolveResult solve(const NlpProblem & problem, const SolveOptions & opts = {});

/// Schema tag written into every export.
inline constexpr const char * kNlpExportSchema = "lgcol.nlp.v1";

/// Dense problem description for an external backend plus a reference evaluation.
struct NlpExport
{
  Eigen::Index dim{0};
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  std::vector<ConstraintBlock> eq_blocks;
  std::vector<ConstraintBlock> ineq_blocks;
  Eigen::VectorXd sample_point;
  double sample_objective{0.};
  Eigen::VectorXd sample_eq;
  Eigen::VectorXd sample_ineq;

  [[nodiscard]] Eigen::Index n_eq() const;
  [[nodiscard]] Eigen::Index n_ineq() const;
};

/// Serialize dims, bounds, constraint blocks and evaluations at `sample`.
nlohmann::json export_problem(const NlpProblem & problem, const Eigen::VectorXd & sample);
NlpExport import_problem(const nlohmann::json & doc);

}  // namespace lgcol

#endif  // LGCOL__NLP_HPP_
