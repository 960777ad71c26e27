#include "lgcol/transcription.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>

namespace lgcol {

std::string to_string(Scheme scheme) { return scheme == Scheme::Lg ? "lg" : "lg2"; }

Scheme scheme_from_string(const std::string & name)
{
  if (name == "lg") { return Scheme::Lg; }
  if (name == "lg2") { return Scheme::Lg2; }
  throw std::invalid_argument("unknown scheme '" + name + "' (expected lg or lg2)");
}

NodeKind node_kind(Scheme scheme) { return scheme == Scheme::Lg ? NodeKind::LgFirstOrder : NodeKind::Lg2; }

double time_to_tau(double t, double tf)
{
  if (!(tf > 0.)) { throw std::invalid_argument("time_to_tau: t_f must be positive"); }
  if (!(t >= 0. && t <= tf)) {
    throw std::out_of_range("time_to_tau: t=" + std::to_string(t) + " outside [0, " + std::to_string(tf) + "]");
  }
  return -1. + 2. * t / tf;
}

double tau_to_time(double tau, double tf)
{
  if (!(tf > 0.)) { throw std::invalid_argument("tau_to_time: t_f must be positive"); }
  if (!(tau >= -1. && tau <= 1.)) { throw std::out_of_range("tau_to_time: tau outside [-1, 1]"); }
  return tf * (tau + 1.) / 2.;
}

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::MatrixXd read_block(const Eigen::VectorXd & z, const Slice & s)
{
  return Eigen::Map<const RowMatrix>(z.data() + s.offset, s.rows, s.cols);
}

void write_block(Eigen::VectorXd & z, const Slice & s, const Eigen::MatrixXd & m)
{
  Eigen::Map<RowMatrix>(z.data() + s.offset, s.rows, s.cols) = m;
}

struct Context
{
  OcpDefinition ocp;
  CollocationBasis basis;
  DecisionLayout layout;
  VectorField f;
  Eigen::VectorXd coll_tau;  ///< collocation points

  [[nodiscard]] double coll_time(Eigen::Index k, double tf) const { return tf * (coll_tau[k] + 1.) / 2.; }

  /// Gauss quadrature of the cost over the collocation states.
  [[nodiscard]] double objective(const Eigen::MatrixXd & Xc, const Eigen::MatrixXd & U, double tf) const
  {
    if (ocp.minimum_time) { return tf; }
    double acc = 0.;
    for (Eigen::Index k = 0; k < basis.N; ++k) {
      acc += basis.quad_weights[k] * ocp.cost_integrand(Xc.row(k).transpose(), U.row(k).transpose());
    }
    return tf / 2. * acc;
  }

  [[nodiscard]] Eigen::VectorXd path(const Eigen::MatrixXd & Xc, const Eigen::MatrixXd & U) const
  {
    const int np = ocp.n_path;
    Eigen::VectorXd h(basis.N * np);
    for (Eigen::Index k = 0; k < basis.N; ++k) {
      h.segment(k * np, np) = ocp.path_constraint(Xc.row(k).transpose(), U.row(k).transpose());
    }
    return h;
  }
};

DecisionLayout make_layout(const OcpDefinition & ocp, Scheme scheme, int N)
{
  DecisionLayout layout;
  layout.scheme = scheme;
  layout.N      = N;
  layout.n_q    = ocp.model.n_q;
  layout.n_u    = ocp.model.n_u;
  if (scheme == Scheme::Lg) {
    layout.nodes = {0, N + 1, 2 * ocp.model.n_q};
  } else {
    layout.nodes = {0, N + 2, ocp.model.n_q};
  }
  layout.controls  = {layout.nodes.size(), N, ocp.model.n_u};
  layout.total_len = layout.nodes.size() + layout.controls.size();
  if (std::holds_alternative<FreeFinalTime>(ocp.final_time)) {
    layout.tf_index = layout.total_len;
    layout.total_len += 1;
  } else {
    layout.tf_fixed = std::get<FixedFinalTime>(ocp.final_time).value;
  }
  return layout;
}

/// Variable bounds and initial guess shared by both schemes.
void fill_bounds_and_guess(const Context & ctx, NlpProblem & nlp, Eigen::VectorXd & guess)
{
  const auto & ocp    = ctx.ocp;
  const auto & layout = ctx.layout;
  const auto & nodes  = ctx.basis.nodes.points;
  const int n_q       = ocp.model.n_q;

  nlp.lower = Eigen::VectorXd::Constant(layout.total_len, -std::numeric_limits<double>::infinity());
  nlp.upper = Eigen::VectorXd::Constant(layout.total_len, std::numeric_limits<double>::infinity());
  guess     = Eigen::VectorXd::Zero(layout.total_len);

  const Eigen::Index node_cols = layout.nodes.cols;
  Eigen::MatrixXd lo(layout.nodes.rows, node_cols), hi(layout.nodes.rows, node_cols), g0(layout.nodes.rows, node_cols);
  g0.setZero();
  for (Eigen::Index i = 0; i < layout.nodes.rows; ++i) {
    const double s = (nodes[static_cast<std::size_t>(i)] + 1.) / 2.;
    for (Eigen::Index j = 0; j < node_cols; ++j) {
      lo(i, j) = ocp.state_bounds[static_cast<std::size_t>(j)].lo;
      hi(i, j) = ocp.state_bounds[static_cast<std::size_t>(j)].hi;
      if (j < n_q) { g0(i, j) = (1. - s) * ocp.guess_q_start[j] + s * ocp.guess_q_end[j]; }
    }
  }
  write_block(nlp.lower, layout.nodes, lo);
  write_block(nlp.upper, layout.nodes, hi);
  write_block(guess, layout.nodes, g0);

  for (Eigen::Index k = 0; k < layout.controls.rows; ++k) {
    for (Eigen::Index j = 0; j < layout.controls.cols; ++j) {
      const auto idx = layout.controls.offset + k * layout.controls.cols + j;
      nlp.lower[idx] = ocp.control_bounds[static_cast<std::size_t>(j)].lo;
      nlp.upper[idx] = ocp.control_bounds[static_cast<std::size_t>(j)].hi;
    }
  }
  if (layout.tf_index) {
    const auto & free     = std::get<FreeFinalTime>(ocp.final_time);
    nlp.lower[*layout.tf_index] = free.lo;
    nlp.upper[*layout.tf_index] = free.hi;
    guess[*layout.tf_index]     = 0.5 * (free.lo + free.hi);
  }
  guess = guess.cwiseMax(nlp.lower).cwiseMin(nlp.upper);
}

std::shared_ptr<Context> make_context(const OcpDefinition & ocp, Scheme scheme, int N)
{
  validate(ocp);
  auto ctx      = std::make_shared<Context>();
  ctx->ocp      = ocp;
  ctx->basis    = build_basis(node_kind(scheme), N);
  ctx->layout   = make_layout(ocp, scheme, N);
  ctx->f        = first_order_wrap(ocp.model);
  ctx->coll_tau = ctx->basis.control.nodes;
  return ctx;
}

}  // namespace

Eigen::MatrixXd DecisionLayout::node_matrix(const Eigen::VectorXd & z) const { return read_block(z, nodes); }

Eigen::MatrixXd DecisionLayout::control_matrix(const Eigen::VectorXd & z) const { return read_block(z, controls); }

double DecisionLayout::final_time(const Eigen::VectorXd & z) const { return tf_index ? z[*tf_index] : tf_fixed; }

Transcription transcribe_lg(const OcpDefinition & ocp, int N)
{
  auto ctx         = make_context(ocp, Scheme::Lg, N);
  const int n_q    = ocp.model.n_q;
  const int n_x    = 2 * n_q;
  const int n_path = ocp.n_path;

  Transcription out;
  out.layout = ctx->layout;
  out.basis  = ctx->basis;

  NlpProblem & nlp = out.problem;
  nlp.dim          = ctx->layout.total_len;
  nlp.n_eq         = static_cast<Eigen::Index>(N) * n_x + ocp.n_boundary;
  nlp.n_ineq       = static_cast<Eigen::Index>(N) * n_path;
  nlp.eq_blocks    = {{"collocation", static_cast<Eigen::Index>(N) * n_x}, {"boundary", ocp.n_boundary}};
  if (n_path > 0) { nlp.ineq_blocks = {{"path", nlp.n_ineq}}; }

  nlp.objective = [ctx](const Eigen::VectorXd & z) {
    const Eigen::MatrixXd X = ctx->layout.node_matrix(z);
    return ctx->objective(X.bottomRows(ctx->basis.N), ctx->layout.control_matrix(z), ctx->layout.final_time(z));
  };

  nlp.eq_constraints = [ctx, n_x](const Eigen::VectorXd & z) {
    const auto & b          = ctx->basis;
    const Eigen::MatrixXd X = ctx->layout.node_matrix(z);
    const Eigen::MatrixXd U = ctx->layout.control_matrix(z);
    const double tf         = ctx->layout.final_time(z);

    Eigen::VectorXd r(b.N * n_x + ctx->ocp.n_boundary);
    const Eigen::MatrixXd DX = (2. / tf) * (b.D * X);
    for (Eigen::Index k = 0; k < b.N; ++k) {
      const Eigen::VectorXd fk =
        ctx->f(X.row(k + 1).transpose(), U.row(k).transpose(), ctx->coll_time(k, tf));
      r.segment(k * n_x, n_x) = DX.row(k).transpose() - fk;
    }
    if (ctx->ocp.n_boundary > 0) {
      // terminal state from the degree-N state interpolant at tau = +1
      Eigen::VectorXd xf(n_x);
      for (Eigen::Index j = 0; j < n_x; ++j) {
        const Eigen::VectorXd col = X.col(j);
        xf[j] = barycentric_eval(b.interp, {col.data(), static_cast<std::size_t>(col.size())}, 1.);
      }
      r.tail(ctx->ocp.n_boundary) = ctx->ocp.boundary_constraint(X.row(0).transpose(), xf, tf);
    }
    return r;
  };

  if (n_path > 0) {
    nlp.ineq_constraints = [ctx](const Eigen::VectorXd & z) {
      const Eigen::MatrixXd X = ctx->layout.node_matrix(z);
      return ctx->path(X.bottomRows(ctx->basis.N), ctx->layout.control_matrix(z));
    };
  }

  fill_bounds_and_guess(*ctx, nlp, out.initial_guess);
  return out;
}

Transcription transcribe_lg2(const OcpDefinition & ocp, int N)
{
  auto ctx         = make_context(ocp, Scheme::Lg2, N);
  const int n_q    = ocp.model.n_q;
  const int n_path = ocp.n_path;

  // velocity bounds cannot be variable bounds since velocity is not a decision variable
  std::vector<std::pair<int, Bound>> vel_bounds;
  for (int j = 0; j < n_q; ++j) {
    const auto & bnd = ocp.state_bounds[static_cast<std::size_t>(n_q + j)];
    if (std::isfinite(bnd.lo) || std::isfinite(bnd.hi)) { vel_bounds.emplace_back(j, bnd); }
  }

  Transcription out;
  out.layout = ctx->layout;
  out.basis  = ctx->basis;

  NlpProblem & nlp = out.problem;
  nlp.dim          = ctx->layout.total_len;
  nlp.n_eq         = static_cast<Eigen::Index>(N) * n_q + ocp.n_boundary;
  const Eigen::Index n_vel = 2 * static_cast<Eigen::Index>(vel_bounds.size()) * (N + 2);
  nlp.n_ineq               = static_cast<Eigen::Index>(N) * n_path + n_vel;
  nlp.eq_blocks            = {{"collocation", static_cast<Eigen::Index>(N) * n_q}, {"boundary", ocp.n_boundary}};
  if (n_path > 0) { nlp.ineq_blocks.push_back({"path", static_cast<Eigen::Index>(N) * n_path}); }
  if (n_vel > 0) { nlp.ineq_blocks.push_back({"velocity_bounds", n_vel}); }

  // state at collocation points assembled from (Q, Qdot)
  auto collocation_states = [ctx, n_q](const Eigen::MatrixXd & Q, const Eigen::MatrixXd & Qd) {
    Eigen::MatrixXd Xc(ctx->basis.N, 2 * n_q);
    Xc << Q.middleRows(1, ctx->basis.N), Qd.middleRows(1, ctx->basis.N);
    return Xc;
  };

  nlp.objective = [ctx, collocation_states](const Eigen::VectorXd & z) {
    if (ctx->ocp.minimum_time) { return ctx->layout.final_time(z); }
    const double tf          = ctx->layout.final_time(z);
    const Eigen::MatrixXd Q  = ctx->layout.node_matrix(z);
    const Eigen::MatrixXd Qd = (2. / tf) * (ctx->basis.D * Q);
    return ctx->objective(collocation_states(Q, Qd), ctx->layout.control_matrix(z), tf);
  };

  nlp.eq_constraints = [ctx, n_q](const Eigen::VectorXd & z) {
    const auto & b           = ctx->basis;
    const Eigen::MatrixXd Q  = ctx->layout.node_matrix(z);
    const Eigen::MatrixXd U  = ctx->layout.control_matrix(z);
    const double tf          = ctx->layout.final_time(z);
    const double scale       = 2. / tf;
    const Eigen::MatrixXd Qd = scale * (b.D * Q);
    const Eigen::MatrixXd Qdd = scale * (b.D * Qd);

    Eigen::VectorXd r(b.N * n_q + ctx->ocp.n_boundary);
    for (Eigen::Index k = 0; k < b.N; ++k) {
      const Eigen::Index row = k + 1;
      const Eigen::VectorXd gk = ctx->ocp.model.accel(Q.row(row).transpose(), Qd.row(row).transpose(),
                                                      U.row(k).transpose(), ctx->coll_time(k, tf));
      r.segment(k * n_q, n_q) = Qdd.row(row).transpose() - gk;
    }
    if (ctx->ocp.n_boundary > 0) {
      const Eigen::Index last = b.B - 1;
      Eigen::VectorXd x0(2 * n_q), xf(2 * n_q);
      x0 << Q.row(0).transpose(), Qd.row(0).transpose();
      xf << Q.row(last).transpose(), Qd.row(last).transpose();
      r.tail(ctx->ocp.n_boundary) = ctx->ocp.boundary_constraint(x0, xf, tf);
    }
    return r;
  };

  if (nlp.n_ineq > 0) {
    nlp.ineq_constraints = [ctx, vel_bounds, collocation_states, n_path](const Eigen::VectorXd & z) {
      const auto & b           = ctx->basis;
      const Eigen::MatrixXd Q  = ctx->layout.node_matrix(z);
      const double tf          = ctx->layout.final_time(z);
      const Eigen::MatrixXd Qd = (2. / tf) * (b.D * Q);
      const Eigen::Index n_vel = 2 * static_cast<Eigen::Index>(vel_bounds.size()) * b.B;
      Eigen::VectorXd h(b.N * n_path + n_vel);
      if (n_path > 0) { h.head(b.N * n_path) = ctx->path(collocation_states(Q, Qd), ctx->layout.control_matrix(z)); }
      Eigen::Index idx = b.N * n_path;
      for (const auto & [j, bnd] : vel_bounds) {
        for (Eigen::Index i = 0; i < b.B; ++i) {
          // an infinite side contributes a never-active row
          h[idx++] = std::isfinite(bnd.hi) ? Qd(i, j) - bnd.hi : -1.;
          h[idx++] = std::isfinite(bnd.lo) ? bnd.lo - Qd(i, j) : -1.;
        }
      }
      return h;
    };
  }

  fill_bounds_and_guess(*ctx, nlp, out.initial_guess);
  return out;
}

Transcription transcribe(const OcpDefinition & ocp, Scheme scheme, int N)
{
  return scheme == Scheme::Lg ? transcribe_lg(ocp, N) : transcribe_lg2(ocp, N);
}

Trajectory extract_trajectory(const DecisionLayout & layout, const Eigen::VectorXd & z, const CollocationBasis & basis)
{
  if (z.size() != layout.total_len) {
    throw std::invalid_argument("extract_trajectory: decision vector has " + std::to_string(z.size())
                                + " entries, layout expects " + std::to_string(layout.total_len));
  }
  if (basis.N != layout.N || basis.nodes.kind != node_kind(layout.scheme)) {
    throw std::invalid_argument("extract_trajectory: basis does not match layout");
  }
  const double tf = layout.final_time(z);
  if (layout.scheme == Scheme::Lg2) {
    return Trajectory::lg2(basis, tf, layout.node_matrix(z), layout.control_matrix(z));
  }
  return Trajectory::lg(basis, tf, layout.node_matrix(z), layout.control_matrix(z));
}

}  // namespace lgcol
