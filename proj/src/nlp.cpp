#include "lgcol/nlp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace lgcol {

void validate(const NlpProblem & problem)
{
  if (problem.dim < 1) { throw std::invalid_argument("nlp: dim must be positive"); }
  if (!problem.objective) { throw std::invalid_argument("nlp: missing objective"); }
  if (problem.n_eq > 0 && !problem.eq_constraints) { throw std::invalid_argument("nlp: missing equality evaluator"); }
  if (problem.n_ineq > 0 && !problem.ineq_constraints) {
    throw std::invalid_argument("nlp: missing inequality evaluator");
  }
  if (problem.lower.size() != problem.dim || problem.upper.size() != problem.dim) {
    throw std::invalid_argument("nlp: bound vectors must have dim entries");
  }
  for (Eigen::Index i = 0; i < problem.dim; ++i) {
    if (std::isnan(problem.lower[i]) || std::isnan(problem.upper[i]) || problem.lower[i] > problem.upper[i]) {
      throw std::invalid_argument("nlp: invalid bounds on variable " + std::to_string(i));
    }
  }
}

Eigen::MatrixXd differentiate(const VectorFn & fn, const Eigen::VectorXd & z)
{
  static const double kStepScale = std::cbrt(std::numeric_limits<double>::epsilon());

  const Eigen::VectorXd f0 = fn(z);
  for (Eigen::Index i = 0; i < f0.size(); ++i) {
    if (!std::isfinite(f0[i])) {
      throw NonFiniteError("differentiate: output " + std::to_string(i) + " is non-finite at the base point");
    }
  }

  Eigen::MatrixXd jac(f0.size(), z.size());
  Eigen::VectorXd zp = z, zm = z;
  for (Eigen::Index j = 0; j < z.size(); ++j) {
    const double h = kStepScale * std::max(1., std::abs(z[j]));
    zp[j]          = z[j] + h;
    zm[j]          = z[j] - h;
    const double span = zp[j] - zm[j];
    const Eigen::VectorXd fp = fn(zp);
    const Eigen::VectorXd fm = fn(zm);
    for (Eigen::Index i = 0; i < f0.size(); ++i) {
      if (!std::isfinite(fp[i]) || !std::isfinite(fm[i])) {
        throw NonFiniteError("differentiate: output " + std::to_string(i) + " is non-finite when perturbing variable "
                             + std::to_string(j));
      }
    }
    jac.col(j) = (fp - fm) / span;
    zp[j] = zm[j] = z[j];
  }
  return jac;
}

Eigen::VectorXd gradient(const ScalarFn & fn, const Eigen::VectorXd & z)
{
  const Eigen::MatrixXd row = differentiate([&fn](const Eigen::VectorXd & x) { return Eigen::VectorXd::Constant(1, fn(x)); }, z);
  return row.row(0).transpose();
}

std::string to_string(SolveStatus status)
{
  switch (status) {
  case SolveStatus::Converged: return "converged";
  case SolveStatus::MaxIter: return "max_iter";
  case SolveStatus::LineSearchFailure: return "line_search_failure";
  }
  return "unknown";
}

std::pair<double, double> constraint_violation(const NlpProblem & problem, const Eigen::VectorXd & z)
{
  double eq = 0., ineq = 0.;
  if (problem.n_eq > 0) { eq = problem.eq_constraints(z).cwiseAbs().maxCoeff(); }
  if (problem.n_ineq > 0) { ineq = std::max(0., problem.ineq_constraints(z).maxCoeff()); }
  return {eq, ineq};
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/**
 * Bound-constrained equality form of the problem:
 *   y = (z, s),  c_hat(y) = (se .* c(z), si .* h(z) + s),  s >= 0,
 * with gradient-based row scaling computed once at the initial point.
 */
class ScaledProblem
{
public:
  ScaledProblem(const NlpProblem & p, const Eigen::VectorXd & z0) : p_(p)
  {
    n_  = p.dim;
    me_ = p.n_eq;
    mi_ = p.n_ineq;

    lower_.resize(n_ + mi_);
    upper_.resize(n_ + mi_);
    lower_ << p.lower, Eigen::VectorXd::Zero(mi_);
    upper_ << p.upper, Eigen::VectorXd::Constant(mi_, kInf);

    sf_ = 1.;
    se_ = Eigen::VectorXd::Ones(me_);
    si_ = Eigen::VectorXd::Ones(mi_);
    const Eigen::VectorXd gf = gradient(p.objective, z0);
    sf_ = scale_for(gf.cwiseAbs().maxCoeff());
    if (me_ > 0) {
      const Eigen::MatrixXd je = differentiate(p.eq_constraints, z0);
      for (Eigen::Index i = 0; i < me_; ++i) { se_[i] = scale_for(je.row(i).cwiseAbs().maxCoeff()); }
    }
    if (mi_ > 0) {
      const Eigen::MatrixXd ji = differentiate(p.ineq_constraints, z0);
      for (Eigen::Index i = 0; i < mi_; ++i) { si_[i] = scale_for(ji.row(i).cwiseAbs().maxCoeff()); }
    }
  }

  [[nodiscard]] Eigen::Index size() const { return n_ + mi_; }
  [[nodiscard]] Eigen::Index n_con() const { return me_ + mi_; }
  [[nodiscard]] const Eigen::VectorXd & lower() const { return lower_; }
  [[nodiscard]] const Eigen::VectorXd & upper() const { return upper_; }

  Eigen::VectorXd initial_point(const Eigen::VectorXd & z0) const
  {
    Eigen::VectorXd y(size());
    y.head(n_) = z0;
    if (mi_ > 0) { y.tail(mi_) = (-(si_.array() * p_.ineq_constraints(z0).array())).max(0.); }
    return y;
  }

  [[nodiscard]] double objective(const Eigen::VectorXd & y) const { return sf_ * p_.objective(y.head(n_)); }

  [[nodiscard]] Eigen::VectorXd constraints(const Eigen::VectorXd & y) const
  {
    Eigen::VectorXd c(me_ + mi_);
    if (me_ > 0) { c.head(me_) = se_.cwiseProduct(p_.eq_constraints(y.head(n_))); }
    if (mi_ > 0) { c.tail(mi_) = si_.cwiseProduct(p_.ineq_constraints(y.head(n_))) + y.tail(mi_); }
    return c;
  }

  [[nodiscard]] Eigen::VectorXd objective_gradient(const Eigen::VectorXd & y) const
  {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(size());
    g.head(n_)        = sf_ * gradient(p_.objective, y.head(n_));
    return g;
  }

  [[nodiscard]] Eigen::MatrixXd jacobian(const Eigen::VectorXd & y) const
  {
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(me_ + mi_, size());
    const Eigen::VectorXd z = y.head(n_);
    if (me_ > 0) { jac.topLeftCorner(me_, n_) = se_.asDiagonal() * differentiate(p_.eq_constraints, z); }
    if (mi_ > 0) {
      jac.bottomLeftCorner(mi_, n_) = si_.asDiagonal() * differentiate(p_.ineq_constraints, z);
      jac.bottomRightCorner(mi_, mi_).setIdentity();
    }
    return jac;
  }

  /// Second-order central differences of f + lam^T c_hat over the original variables.
  [[nodiscard]] Eigen::MatrixXd lagrangian_hessian(const Eigen::VectorXd & y, const Eigen::VectorXd & lam) const
  {
    static const double kStepScale = std::pow(std::numeric_limits<double>::epsilon(), 0.25);
    const auto L = [&](const Eigen::VectorXd & x) { return objective(x) + lam.dot(constraints(x)); };
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(size(), size());
    Eigen::VectorXd h(n_);
    for (Eigen::Index j = 0; j < n_; ++j) { h[j] = kStepScale * std::max(1., std::abs(y[j])); }
    const double l0 = L(y);
    Eigen::VectorXd x = y;
    for (Eigen::Index i = 0; i < n_; ++i) {
      x[i]            = y[i] + h[i];
      const double lp = L(x);
      x[i]            = y[i] - h[i];
      const double lm = L(x);
      x[i]            = y[i];
      H(i, i)         = (lp - 2. * l0 + lm) / (h[i] * h[i]);
      for (Eigen::Index j = i + 1; j < n_; ++j) {
        x[i] = y[i] + h[i];
        x[j] = y[j] + h[j];
        const double lpp = L(x);
        x[j]             = y[j] - h[j];
        const double lpm = L(x);
        x[i]             = y[i] - h[i];
        const double lmm = L(x);
        x[j]             = y[j] + h[j];
        const double lmp = L(x);
        x[i] = y[i];
        x[j] = y[j];
        H(i, j) = H(j, i) = (lpp - lpm - lmp + lmm) / (4. * h[i] * h[j]);
      }
    }
    return H;
  }

  [[nodiscard]] Eigen::VectorXd project(const Eigen::VectorXd & y) const
  {
    return y.cwiseMax(lower_).cwiseMin(upper_);
  }

private:
  static double scale_for(double max_abs) { return max_abs > 100. ? 100. / max_abs : 1.; }

  const NlpProblem & p_;
  Eigen::Index n_{0}, me_{0}, mi_{0};
  Eigen::VectorXd lower_, upper_;
  double sf_{1.};
  Eigen::VectorXd se_, si_;
};

/// Iterate data of the augmented Lagrangian at one point.
struct Point
{
  Eigen::VectorXd y;
  double f{0.};
  Eigen::VectorXd c;
  Eigen::VectorXd gf;
  Eigen::MatrixXd jac;
};

enum class InnerExit { Converged, LineSearch, MaxIter };

/**
 * Projected Levenberg-Marquardt on 0.5 |c_hat(y)|^2 over the box. Moves the starting point
 * towards the feasible set before the objective enters; returns the best point found.
 */
Eigen::VectorXd restore_feasibility(const ScaledProblem & sp, Eigen::VectorXd y, double tol, int max_iter,
                                    int & iterations)
{
  if (sp.n_con() == 0) { return y; }
  const auto n = sp.size();
  Eigen::VectorXd c = sp.constraints(y);
  double phi        = 0.5 * c.squaredNorm();
  double nu         = 1e-3;
  for (int k = 0; k < max_iter && c.cwiseAbs().maxCoeff() > tol; ++k) {
    ++iterations;
    const Eigen::MatrixXd jac = sp.jacobian(y);
    const Eigen::VectorXd g   = jac.transpose() * c;
    std::vector<Eigen::Index> free;
    for (Eigen::Index i = 0; i < n; ++i) {
      const bool at_lo = y[i] <= sp.lower()[i] && g[i] > 0.;
      const bool at_hi = y[i] >= sp.upper()[i] && g[i] < 0.;
      if (!at_lo && !at_hi) { free.push_back(i); }
    }
    if (free.empty()) { break; }
    const auto nf = static_cast<Eigen::Index>(free.size());
    Eigen::MatrixXd jF(jac.rows(), nf);
    for (Eigen::Index a = 0; a < nf; ++a) { jF.col(a) = jac.col(free[static_cast<std::size_t>(a)]); }
    const Eigen::MatrixXd jtj = jF.transpose() * jF;
    const Eigen::VectorXd gF  = jF.transpose() * c;
    const double diag_scale   = std::max(1., jtj.diagonal().maxCoeff());

    bool improved = false;
    for (int tries = 0; tries < 30 && !improved; ++tries) {
      Eigen::MatrixXd H = jtj;
      H.diagonal().array() += nu * (jtj.diagonal().array().max(1e-8 * diag_scale));
      const Eigen::VectorXd dF = H.llt().solve(-gF);
      Eigen::VectorXd trial    = y;
      for (Eigen::Index a = 0; a < nf; ++a) { trial[free[static_cast<std::size_t>(a)]] += dF[a]; }
      trial                       = sp.project(trial);
      const Eigen::VectorXd ct    = sp.constraints(trial);
      const double phit           = 0.5 * ct.squaredNorm();
      if (std::isfinite(phit) && phit < phi) {
        y        = trial;
        c        = ct;
        phi      = phit;
        nu       = std::max(1e-12, nu / 10.);
        improved = true;
      } else {
        nu *= 10.;
      }
    }
    if (!improved) { break; }
  }
  return y;
}

class AugmentedLagrangian
{
public:
  AugmentedLagrangian(const ScaledProblem & sp, Eigen::VectorXd y0) : sp_(sp)
  {
    lambda_ = Eigen::VectorXd::Zero(sp.n_con());
    pt_.y   = sp.project(y0);
    refresh(pt_);
    estimate_multipliers();
  }

  [[nodiscard]] const Point & point() const { return pt_; }
  [[nodiscard]] double mu() const { return mu_; }
  [[nodiscard]] const Eigen::VectorXd & lambda() const { return lambda_; }

  [[nodiscard]] double projected_gradient_norm() const
  {
    const Eigen::VectorXd g = merit_gradient(pt_);
    return (sp_.project(pt_.y - g) - pt_.y).cwiseAbs().maxCoeff();
  }

  /// Approximately minimize the augmented Lagrangian over the box.
  InnerExit minimize(double tol, int max_iter, int & iterations)
  {
    const auto n = sp_.size();
    while (true) {
      const Eigen::VectorXd g = merit_gradient(pt_);
      const double pg         = (sp_.project(pt_.y - g) - pt_.y).cwiseAbs().maxCoeff();
      if (pg <= tol) { return InnerExit::Converged; }
      if (iterations >= max_iter) { return InnerExit::MaxIter; }
      ++iterations;

      // variables held at a bound with the gradient pointing outward
      const double eps_active = std::min(1e-8, pg);
      std::vector<Eigen::Index> free;
      free.reserve(static_cast<std::size_t>(n));
      for (Eigen::Index i = 0; i < n; ++i) {
        const bool at_lo = pt_.y[i] - sp_.lower()[i] <= eps_active && g[i] > 0.;
        const bool at_hi = sp_.upper()[i] - pt_.y[i] <= eps_active && g[i] < 0.;
        if (!at_lo && !at_hi) { free.push_back(i); }
      }

      Eigen::VectorXd d = Eigen::VectorXd::Zero(n);
      if (!free.empty()) {
        const auto nf = static_cast<Eigen::Index>(free.size());
        Eigen::MatrixXd H(nf, nf);
        Eigen::VectorXd gF(nf);
        const Eigen::VectorXd lam  = pt_.c.size() ? (lambda_ + mu_ * pt_.c).eval() : Eigen::VectorXd();
        const Eigen::MatrixXd hess = sp_.lagrangian_hessian(pt_.y, lam) + mu_ * pt_.jac.transpose() * pt_.jac;
        for (Eigen::Index a = 0; a < nf; ++a) {
          gF[a] = g[free[static_cast<std::size_t>(a)]];
          for (Eigen::Index b = 0; b < nf; ++b) {
            H(a, b) = hess(free[static_cast<std::size_t>(a)], free[static_cast<std::size_t>(b)]);
          }
        }
        Eigen::VectorXd dF = newton_step(H, gF);
        for (Eigen::Index a = 0; a < nf; ++a) { d[free[static_cast<std::size_t>(a)]] = dF[a]; }
      }

      Point trial;
      bool accepted = (g.dot(d) < 0.) && line_search(g, d, trial);
      if (!accepted) {
        d        = -g / std::max(1., g.cwiseAbs().maxCoeff());
        accepted = line_search(g, d, trial);
      }
      if (!accepted) { return InnerExit::LineSearch; }

      pt_ = std::move(trial);
    }
  }

  /// Least-squares multipliers on the variables away from their bounds.
  void estimate_multipliers()
  {
    if (pt_.c.size() == 0) { return; }
    std::vector<Eigen::Index> free;
    for (Eigen::Index i = 0; i < sp_.size(); ++i) {
      if (pt_.y[i] > sp_.lower()[i] && pt_.y[i] < sp_.upper()[i]) { free.push_back(i); }
    }
    if (free.empty()) { return; }
    const auto nf = static_cast<Eigen::Index>(free.size());
    Eigen::MatrixXd jtF(nf, pt_.c.size());
    Eigen::VectorXd gF(nf);
    for (Eigen::Index a = 0; a < nf; ++a) {
      jtF.row(a) = pt_.jac.col(free[static_cast<std::size_t>(a)]).transpose();
      gF[a]      = pt_.gf[free[static_cast<std::size_t>(a)]];
    }
    lambda_ = jtF.completeOrthogonalDecomposition().solve(-gF).cwiseMax(-kLambdaMax).cwiseMin(kLambdaMax);
  }

  /// First-order multiplier update; returns the scaled constraint violation.
  double update_multipliers()
  {
    lambda_ = (lambda_ + mu_ * pt_.c).cwiseMax(-kLambdaMax).cwiseMin(kLambdaMax);
    return pt_.c.size() ? pt_.c.cwiseAbs().maxCoeff() : 0.;
  }

  void increase_penalty() { mu_ = std::min(10. * mu_, kMuMax); }

private:
  static constexpr double kLambdaMax = 1e12;
  static constexpr double kMuMax     = 1e12;

  void refresh(Point & p) const
  {
    p.f   = sp_.objective(p.y);
    p.c   = sp_.constraints(p.y);
    p.gf  = sp_.objective_gradient(p.y);
    p.jac = sp_.jacobian(p.y);
  }

  [[nodiscard]] double merit(double f, const Eigen::VectorXd & c) const
  {
    return f + lambda_.dot(c) + 0.5 * mu_ * c.squaredNorm();
  }

  [[nodiscard]] Eigen::VectorXd merit_gradient(const Point & p) const
  {
    if (p.c.size() == 0) { return p.gf; }
    return p.gf + p.jac.transpose() * (lambda_ + mu_ * p.c);
  }

  static Eigen::VectorXd newton_step(const Eigen::MatrixXd & H, const Eigen::VectorXd & g)
  {
    Eigen::LLT<Eigen::MatrixXd> llt(H);
    double shift = 0.;
    const double base = std::max(1e-12, 1e-10 * H.diagonal().cwiseAbs().maxCoeff());
    while (llt.info() != Eigen::Success) {
      shift = shift == 0. ? base : 10. * shift;
      llt.compute(H + shift * Eigen::MatrixXd::Identity(H.rows(), H.cols()));
    }
    return llt.solve(-g);
  }

  /// Armijo backtracking along the projection arc.
  bool line_search(const Eigen::VectorXd & g, const Eigen::VectorXd & d, Point & out) const
  {
    constexpr double kArmijo = 1e-4;
    constexpr int kMaxHalvings = 40;
    const double phi0 = merit(pt_.f, pt_.c);
    double alpha      = 1.;
    for (int k = 0; k < kMaxHalvings; ++k, alpha *= 0.5) {
      const Eigen::VectorXd y = sp_.project(pt_.y + alpha * d);
      const Eigen::VectorXd step = y - pt_.y;
      if (step.cwiseAbs().maxCoeff() == 0.) { return false; }
      const double predicted = g.dot(step);
      const double f         = sp_.objective(y);
      const Eigen::VectorXd c = sp_.constraints(y);
      if (!std::isfinite(f) || !c.allFinite()) { continue; }
      const double phi = merit(f, c);
      // below rounding level of the merit value the decrease test is meaningless
      const bool noise_floor =
        k == 0 && std::abs(predicted) <= 16. * std::numeric_limits<double>::epsilon() * (1. + std::abs(phi0));
      if (phi <= phi0 + kArmijo * predicted || (noise_floor && phi <= phi0 + std::abs(predicted))) {
        out.y = y;
        refresh(out);
        return true;
      }
    }
    return false;
  }

  const ScaledProblem & sp_;
  Point pt_;
  Eigen::VectorXd lambda_;
  double mu_{100.};
};

}  // namespace

SolveResult solve(const NlpProblem & problem, const SolveOptions & opts)
{
  validate(problem);

  Eigen::VectorXd z0(problem.dim);
  if (opts.initial_guess.size() == 0) {
    for (Eigen::Index i = 0; i < problem.dim; ++i) {
      const double lo = problem.lower[i], hi = problem.upper[i];
      z0[i] = std::isfinite(lo) && std::isfinite(hi) ? 0.5 * (lo + hi) : std::clamp(0., lo, hi);
    }
  } else {
    if (opts.initial_guess.size() != problem.dim) {
      throw std::invalid_argument("solve: initial guess has " + std::to_string(opts.initial_guess.size())
                                  + " entries, expected " + std::to_string(problem.dim));
    }
    z0 = opts.initial_guess.cwiseMax(problem.lower).cwiseMin(problem.upper);
  }

  const ScaledProblem sp(problem, z0);
  constexpr int kRestoreIterations = 200;
  int iterations                   = 0;
  AugmentedLagrangian al(sp, restore_feasibility(sp, sp.initial_point(z0), opts.feas_tol, kRestoreIterations,
                                                 iterations));

  constexpr int kMaxOuter         = 200;
  constexpr int kMaxLineSearchFails = 3;
  constexpr int kInnerPerOuter      = 300;

  SolveResult res;
  double omega      = std::max(opts.opt_tol, 1e-2);
  double prev_viol  = al.point().c.size() ? al.point().c.cwiseAbs().maxCoeff() : 0.;
  int ls_failures   = 0;
  InnerExit last    = InnerExit::Converged;
  bool done         = false;
  SolveStatus status = SolveStatus::MaxIter;

  int outer = 0;
  for (; outer < kMaxOuter && !done; ++outer) {
    const int budget = std::min(opts.max_iter, iterations + kInnerPerOuter);
    last             = al.minimize(omega, budget, iterations);
    const double pg = al.projected_gradient_norm();

    const Eigen::VectorXd z         = al.point().y.head(problem.dim);
    const auto [eq_viol, ineq_viol] = constraint_violation(problem, z);
    const double slack_resid        = al.point().c.size() ? al.point().c.cwiseAbs().maxCoeff() : 0.;
    const bool feasible = eq_viol <= opts.feas_tol && ineq_viol <= opts.feas_tol && slack_resid <= opts.feas_tol;

    if (feasible && pg <= opts.opt_tol) {
      status = SolveStatus::Converged;
      done   = true;
      break;
    }
    if (last == InnerExit::MaxIter && iterations >= opts.max_iter) {
      status = SolveStatus::MaxIter;
      done   = true;
      break;
    }
    ls_failures = last == InnerExit::LineSearch ? ls_failures + 1 : 0;
    if (ls_failures >= kMaxLineSearchFails) {
      status = SolveStatus::LineSearchFailure;
      done   = true;
      break;
    }

    const double viol = al.update_multipliers();
    if (!feasible && viol > 0.25 * prev_viol) { al.increase_penalty(); }
    prev_viol = viol;
    omega     = feasible ? opts.opt_tol : std::max(opts.opt_tol, 0.1 * omega);
  }

  res.z_star           = al.point().y.head(problem.dim);
  res.objective_value  = problem.objective(res.z_star);
  std::tie(res.eq_violation, res.ineq_violation) = constraint_violation(problem, res.z_star);
  res.iterations       = iterations;
  res.outer_iterations = outer + (done ? 1 : 0);
  res.optimality       = al.projected_gradient_norm();
  res.status           = status;

  std::ostringstream os;
  os << "status=" << to_string(status) << " outer=" << res.outer_iterations << " inner=" << iterations
     << " mu=" << al.mu() << " eq_viol=" << res.eq_violation << " ineq_viol=" << res.ineq_violation
     << " proj_grad=" << res.optimality;
  if (status != SolveStatus::Converged) {
    os << (last == InnerExit::LineSearch ? " (line search could not decrease the merit function)"
                                         : " (iteration limit reached)");
  }
  res.diagnostics = os.str();
  return res;
}

}  // namespace lgcol
