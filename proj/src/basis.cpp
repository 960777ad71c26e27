#include "lgcol/basis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace lgcol {

namespace {

void check_count(int N)
{
  if (N < 1 || N > kMaxCollocationPoints) {
    throw std::invalid_argument(
      "collocation count N=" + std::to_string(N) + " outside [1, " + std::to_string(kMaxCollocationPoints) + "]");
  }
}

}  // namespace

LagrangeBasis make_lagrange_basis(std::span<const double> nodes)
{
  const auto B = static_cast<Eigen::Index>(nodes.size());
  LagrangeBasis basis;
  basis.nodes = Eigen::Map<const Eigen::VectorXd>(nodes.data(), B);
  basis.bary.resize(B);

  for (Eigen::Index j = 0; j < B; ++j) {
    double prod = 1.;
    for (Eigen::Index k = 0; k < B; ++k) {
      if (k != j) { prod *= basis.nodes[j] - basis.nodes[k]; }
    }
    basis.bary[j] = 1. / prod;
  }
  basis.bary /= basis.bary.cwiseAbs().maxCoeff();

  basis.diff.setZero(B, B);
  for (Eigen::Index i = 0; i < B; ++i) {
    double diag = 0.;
    for (Eigen::Index j = 0; j < B; ++j) {
      if (j == i) { continue; }
      const double dij = (basis.bary[j] / basis.bary[i]) / (basis.nodes[i] - basis.nodes[j]);
      basis.diff(i, j) = dij;
      diag -= dij;
    }
    basis.diff(i, i) = diag;
  }
  return basis;
}

double barycentric_eval(const LagrangeBasis & basis, std::span<const double> values, double tau)
{
  const auto B = basis.size();
  if (static_cast<Eigen::Index>(values.size()) != B) {
    throw std::invalid_argument("barycentric_eval: expected " + std::to_string(B) + " node values");
  }
  double num = 0., den = 0.;
  for (Eigen::Index j = 0; j < B; ++j) {
    const double diff = tau - basis.nodes[j];
    if (diff == 0.) { return values[static_cast<std::size_t>(j)]; }
    const double c = basis.bary[j] / diff;
    num += c * values[static_cast<std::size_t>(j)];
    den += c;
  }
  return num / den;
}

std::pair<double, double> legendre_eval(int n, double tau)
{
  if (n == 0) { return {1., 0.}; }
  double p_prev = 1., dp_prev = 0.;
  double p = tau, dp = 1.;
  for (int k = 2; k <= n; ++k) {
    const double p_next  = ((2. * k - 1.) * tau * p - (k - 1.) * p_prev) / k;
    const double dp_next = ((2. * k - 1.) * (p + tau * dp) - (k - 1.) * dp_prev) / k;
    p_prev               = p;
    dp_prev              = dp;
    p                    = p_next;
    dp                   = dp_next;
  }
  return {p, dp};
}

std::vector<double> lg_points(int N)
{
  check_count(N);
  constexpr double kTol  = 1e-14;
  constexpr int kMaxIter = 100;

  std::vector<double> pts(static_cast<std::size_t>(N), 0.);
  // roots come in +/- pairs; solve the negative half and mirror it
  for (int i = 1; i <= N / 2; ++i) {
    double x = -std::cos(std::numbers::pi * (i - 0.25) / (N + 0.5));
    bool converged = false;
    for (int it = 0; it < kMaxIter; ++it) {
      const auto [p, dp] = legendre_eval(N, x);
      const double step  = p / dp;
      x -= step;
      if (std::abs(step) <= kTol) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      throw NodeGenerationError(
        "Newton iteration for root " + std::to_string(i) + " of P_" + std::to_string(N) + " did not converge");
    }
    pts[static_cast<std::size_t>(i - 1)] = x;
    pts[static_cast<std::size_t>(N - i)] = -x;
  }
  return pts;
}

std::vector<double> lg_weights(int N)
{
  const auto pts = lg_points(N);
  std::vector<double> w(pts.size());
  std::transform(pts.begin(), pts.end(), w.begin(), [N](double x) {
    const double dp = legendre_eval(N, x).second;
    return 2. / ((1. - x * x) * dp * dp);
  });
  return w;
}

CollocationBasis build_basis(NodeKind kind, int N)
{
  if (kind == NodeKind::CollocationOnly) {
    throw std::invalid_argument("build_basis: scheme must be lg-firstorder or lg2");
  }
  check_count(N);

  const auto gauss   = lg_points(N);
  const auto weights = lg_weights(N);

  CollocationBasis basis;
  basis.N          = N;
  basis.nodes.kind = kind;
  basis.nodes.points.push_back(-1.);
  basis.nodes.points.insert(basis.nodes.points.end(), gauss.begin(), gauss.end());
  if (kind == NodeKind::Lg2) { basis.nodes.points.push_back(1.); }
  basis.B = static_cast<int>(basis.nodes.points.size());

  basis.quad_weights = Eigen::Map<const Eigen::VectorXd>(weights.data(), N);
  basis.interp       = make_lagrange_basis(basis.nodes.points);
  basis.control      = make_lagrange_basis(gauss);
  basis.bary_weights = basis.interp.bary;

  if (kind == NodeKind::LgFirstOrder) {
    basis.D = basis.interp.diff.bottomRows(N);
  } else {
    basis.D = basis.interp.diff;
  }
  return basis;
}

double interp_eval(const CollocationBasis & basis, std::span<const double> node_values, double tau)
{
  return barycentric_eval(basis.interp, node_values, tau);
}

Eigen::VectorXd diff_values(const CollocationBasis & basis, std::span<const double> node_values)
{
  if (static_cast<int>(node_values.size()) != basis.B) {
    throw std::invalid_argument("diff_values: expected " + std::to_string(basis.B) + " node values");
  }
  return basis.D * Eigen::Map<const Eigen::VectorXd>(node_values.data(), basis.B);
}

}  // namespace lgcol
