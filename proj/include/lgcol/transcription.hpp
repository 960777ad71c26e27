#ifndef LGCOL__TRANSCRIPTION_HPP_
#define LGCOL__TRANSCRIPTION_HPP_

/**
 * @file
 * @brief Transcription of an optimal control problem into an NLP with the first-order LG scheme
 * or the second-order LG2 scheme, and reconstruction of the resulting trajectories.
 */

#include <Eigen/Core>

#include <optional>
#include <string>

#include "basis.hpp"
#include "models.hpp"
#include "nlp.hpp"

namespace lgcol {

enum class Scheme { Lg, Lg2 };

std::string to_string(Scheme scheme);
/// Accepts "lg" and "lg2"; throws std::invalid_argument otherwise.
Scheme scheme_from_string(const std::string & name);
NodeKind node_kind(Scheme scheme);

/// tau = -1 + 2 t / t_f; rejects t outside [0, t_f].
double time_to_tau(double t, double tf);
/// t = t_f (tau + 1) / 2; rejects tau outside [-1, 1].
double tau_to_time(double tau, double tf);

/// Row-major matrix block inside the flat decision vector.
struct Slice
{
  Eigen::Index offset{0};
  Eigen::Index rows{0};
  Eigen::Index cols{0};

  [[nodiscard]] Eigen::Index size() const { return rows * cols; }
};

struct DecisionLayout
{
  Scheme scheme{Scheme::Lg2};
  int N{0};
  int n_q{0};
  int n_u{0};
  /// LG: X, (N+1) x 2 n_q. LG2: Q, (N+2) x n_q.
  Slice nodes;
  /// U, N x n_u.
  Slice controls;
  /// Present when the final time is free.
  std::optional<Eigen::Index> tf_index;
  /// Used when the final time is fixed.
  double tf_fixed{0.};
  Eigen::Index total_len{0};

  [[nodiscard]] Eigen::MatrixXd node_matrix(const Eigen::VectorXd & z) const;
  [[nodiscard]] Eigen::MatrixXd control_matrix(const Eigen::VectorXd & z) const;
  [[nodiscard]] double final_time(const Eigen::VectorXd & z) const;
};

struct Transcription
{
  NlpProblem problem;
  DecisionLayout layout;
  CollocationBasis basis;
  /// Deterministic guess: configuration interpolated linearly between the guess poses,
  /// zero velocity and control, midpoint final time when free.
  Eigen::VectorXd initial_guess;
};

/// First-order LG transcription of x' = f(x, u, t) with x = (q, v).
Transcription transcribe_lg(const OcpDefinition & ocp, int N);

/// Second-order LG2 transcription of q'' = g(q, q', u, t).
Transcription transcribe_lg2(const OcpDefinition & ocp, int N);

Transcription transcribe(const OcpDefinition & ocp, Scheme scheme, int N);

/**
 * @brief Polynomial trajectory over [0, t_f].
 *
 * LG2 stores only configuration node values; velocity is the exact derivative of the configuration
 * polynomial. LG stores full-state node values and velocity is an independent interpolant.
 * Controls live on the N-point Gauss basis; evaluation outside the Gauss hull is extrapolation.
 */
class Trajectory
{
public:
  static Trajectory lg2(CollocationBasis basis, double tf, Eigen::MatrixXd Q, Eigen::MatrixXd U);
  static Trajectory lg(CollocationBasis basis, double tf, Eigen::MatrixXd X, Eigen::MatrixXd U);

  [[nodiscard]] Scheme scheme() const { return scheme_; }
  [[nodiscard]] const CollocationBasis & basis() const { return basis_; }
  [[nodiscard]] double tf() const { return tf_; }
  [[nodiscard]] int n_q() const { return n_q_; }
  [[nodiscard]] int n_u() const { return static_cast<int>(controls_.cols()); }

  /// Node values: Q for LG2, X for LG (rows = nodes).
  [[nodiscard]] const Eigen::MatrixXd & node_values() const { return nodes_; }
  [[nodiscard]] const Eigen::MatrixXd & control_values() const { return controls_; }
  /// Node times in seconds.
  [[nodiscard]] Eigen::VectorXd node_times() const;
  /// Collocation times in seconds.
  [[nodiscard]] Eigen::VectorXd collocation_times() const;

  [[nodiscard]] Eigen::VectorXd configuration(double t) const;
  /// Velocity polynomial v(t); identical to config_rate(t) for LG2.
  [[nodiscard]] Eigen::VectorXd velocity(double t) const;
  /// Exact time derivative of the configuration polynomial.
  [[nodiscard]] Eigen::VectorXd config_rate(double t) const;
  /// Exact second time derivative of the configuration polynomial.
  [[nodiscard]] Eigen::VectorXd config_accel(double t) const;
  [[nodiscard]] Eigen::VectorXd control(double t) const;
  /// True when t lies outside the hull of the collocation points.
  [[nodiscard]] bool control_extrapolated(double t) const;

private:
  Trajectory() = default;

  [[nodiscard]] Eigen::VectorXd eval_columns(const Eigen::MatrixXd & values, Eigen::Index first, Eigen::Index count,
                                             double t) const;

  Scheme scheme_{Scheme::Lg2};
  CollocationBasis basis_;
  double tf_{1.};
  int n_q_{0};
  Eigen::MatrixXd nodes_;
  Eigen::MatrixXd controls_;
  Eigen::MatrixXd dq_nodes_;   ///< tau-derivative of configuration columns at nodes
  Eigen::MatrixXd ddq_nodes_;  ///< second tau-derivative at nodes
};

/// Rebuild the trajectory encoded by decision vector z.
Trajectory extract_trajectory(const DecisionLayout & layout, const Eigen::VectorXd & z, const CollocationBasis & basis);

}  // namespace lgcol

#endif  // LGCOL__TRANSCRIPTION_HPP_
