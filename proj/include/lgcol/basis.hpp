#ifndef LGCOL__BASIS_HPP_
#define LGCOL__BASIS_HPP_

/**
 * @file
 * @brief Legendre-Gauss nodes, quadrature weights, barycentric interpolation and
 * differentiation matrices for the first-order (LG) and second-order (LG2) schemes.
 */

#include <Eigen/Core>

#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace lgcol {

/// Largest supported collocation count.
inline constexpr int kMaxCollocationPoints = 64;

/// Thrown when the Newton root finder for Legendre nodes fails to converge.
class NodeGenerationError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

enum class NodeKind {
  CollocationOnly,  ///< the N Gauss points alone (control basis)
  LgFirstOrder,     ///< -1 followed by the N Gauss points, B = N + 1
  Lg2,              ///< -1, the N Gauss points, +1, B = N + 2
};

struct NodeSet
{
  std::vector<double> points;
  NodeKind kind{NodeKind::CollocationOnly};
};

/**
 * @brief Lagrange basis on an arbitrary set of distinct nodes.
 *
 * Holds the barycentric weights and the square differentiation matrix
 * (row k = derivative of the interpolant at node k).
 */
struct LagrangeBasis
{
  Eigen::VectorXd nodes;
  Eigen::VectorXd bary;
  Eigen::MatrixXd diff;

  [[nodiscard]] Eigen::Index size() const { return nodes.size(); }
};

/// Build barycentric weights and the square differentiation matrix for `nodes`.
LagrangeBasis make_lagrange_basis(std::span<const double> nodes);

/**
 * @brief Barycentric (second form) evaluation of the interpolant through (nodes, values).
 *
 * Returns the node value bit-exactly when tau coincides with a node.
 */
double barycentric_eval(const LagrangeBasis & basis, std::span<const double> values, double tau);

/**
 * @brief Node set, quadrature and differentiation data for one scheme and collocation count.
 *
 * `D` has shape N x (N+1) for the first-order scheme (derivatives at the collocation points only)
 * and (N+2) x (N+2) for the second-order scheme (derivatives at every node).
 */
struct CollocationBasis
{
  NodeSet nodes;
  int N{0};
  int B{0};
  Eigen::VectorXd quad_weights;
  Eigen::VectorXd bary_weights;
  Eigen::MatrixXd D;

  /// Full B x B basis on the node set; `interp` evaluates polynomials of degree B - 1.
  LagrangeBasis interp;
  /// N-point basis on the Gauss points only, used for controls.
  LagrangeBasis control;

  /// Index of the first collocation point inside the node set (always 1).
  static constexpr int first_collocation = 1;
};

/// P_n(tau) and P_n'(tau) by the three-term recurrence.
std::pair<double, double> legendre_eval(int n, double tau);

/// Strictly increasing roots of P_N.
std::vector<double> lg_points(int N);

/// Gauss-Legendre weights for the roots of P_N.
std::vector<double> lg_weights(int N);

CollocationBasis build_basis(NodeKind kind, int N);

/// Evaluate the degree B-1 interpolant through the basis nodes at tau.
double interp_eval(const CollocationBasis & basis, std::span<const double> node_values, double tau);

/// D * node_values; tau-domain derivatives (callers apply 2 / t_f).
Eigen::VectorXd diff_values(const CollocationBasis & basis, std::span<const double> node_values);

}  // namespace lgcol

#endif  // LGCOL__BASIS_HPP_
