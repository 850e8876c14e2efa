#include "proxmm/outer.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include <Eigen/LU>

namespace proxmm {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

void check_start(const Problem& p, const Vector& x0, const Vector& lambda0) {
  if (x0.size() != p.n()) throw std::invalid_argument("solve: x0 dimension mismatch");
  if (lambda0.size() != p.m()) throw std::invalid_argument("solve: lambda0 dimension mismatch");
}

// Shared loop of the two multiplier methods; `proximal` selects the
// proximally regularized subproblem, otherwise the plain one plus ridge.
SolveResult multiplier_loop(const Problem& p, const OuterConfig& cfg, Vector x0, Vector lambda0,
                            bool proximal) {
  cfg.validate();
  check_start(p, x0, lambda0);
  const bool need_ridge = !proximal && !p.f.is_strongly_convex();

  SolveResult out;
  out.trace.status = SolveStatus::MaxIterations;
  Vector x = std::move(x0), lambda = std::move(lambda0);
  double c = cfg.c_schedule.at(0);

  for (int k = 0; k < cfg.max_outer; ++k) {
    const auto t0 = Clock::now();
    c = cfg.c_schedule.at(k);
    const double eps = cfg.eps_schedule.at(k);
    double tol = eps / c;

    Subproblem sp;
    sp.problem = &p;
    sp.x_ref = x;
    sp.lambda = lambda;
    sp.c = c;
    sp.prox_weight = proximal ? 1.0 : 0.0;
    sp.ridge = need_ridge ? 1e-8 * c : 0.0;

    InnerResult ir = solve_subproblem(sp, tol, cfg.inner);
    Vector x_next = ir.xi;
    Vector lambda_next = multiplier_update(p, IterateState{x, lambda, c}, x_next);
    double step = std::sqrt((x_next - x).squaredNorm() + (lambda_next - lambda).squaredNorm());

    // With r = 1 the stopping threshold depends on the step just taken, so
    // verify afterwards and re-solve tighter (warm-started) if it fails.
    if (cfg.r == 1) {
      for (int guard = 0; guard < 5 && !ir.stalled; ++guard) {
        if (ir.grad_norm <= (eps / c) * std::min(1.0, step)) break;
        tol *= 0.1;
        ir = solve_subproblem(sp, tol, cfg.inner, std::optional<Vector>(x_next));
        x_next = ir.xi;
        lambda_next = multiplier_update(p, IterateState{x, lambda, c}, x_next);
        step = std::sqrt((x_next - x).squaredNorm() + (lambda_next - lambda).squaredNorm());
      }
    }

    const KktResidual kkt = kkt_residual(p, IterateState{x_next, lambda_next, c});

    TraceRow row;
    row.k = k;
    row.c = c;
    row.eps = eps;
    row.objective = objective_value(p, x_next);
    row.kkt_stat = kkt.stationarity;
    row.kkt_feas = kkt.feasibility;
    row.inner_iters = ir.iters;
    row.inner_grad_norm = ir.grad_norm;
    row.step_norm = step;
    row.inner_tol = tol;
    row.inner_converged = ir.converged;
    row.ridge_active = sp.ridge > 0.0;
    row.wall_ms = elapsed_ms(t0);
    out.trace.rows.push_back(row);
    if (cfg.record_iterates) {
      out.trace.x_history.push_back(x_next);
      out.trace.lambda_history.push_back(lambda_next);
    }

    x = std::move(x_next);
    lambda = std::move(lambda_next);

    if (ir.stalled) {
      out.trace.status = SolveStatus::InnerStalled;
      break;
    }
    if (kkt.stationarity <= cfg.kkt_tol && kkt.feasibility <= cfg.kkt_tol) {
      out.trace.status = SolveStatus::Converged;
      break;
    }
  }

  out.state = IterateState{std::move(x), std::move(lambda), c};
  return out;
}

}  // namespace

CSchedule CSchedule::constant(double c0_in) {
  CSchedule s;
  s.c0 = c0_in;
  s.factor = 1.0;
  s.validate();
  return s;
}

CSchedule CSchedule::geometric(double c0_in, double factor_in, double cap_in) {
  CSchedule s;
  s.c0 = c0_in;
  s.factor = factor_in;
  s.cap = cap_in;
  s.validate();
  return s;
}

double CSchedule::at(int k) const {
  return std::min(c0 * std::pow(factor, k), cap);
}

void CSchedule::validate() const {
  if (!(c0 > 0.0)) throw std::invalid_argument("CSchedule: c0 must be positive");
  if (!(factor >= 1.0)) throw std::invalid_argument("CSchedule: factor must be >= 1");
  if (!(cap >= c0)) throw std::invalid_argument("CSchedule: cap must be >= c0");
}

double EpsSchedule::at(int k) const { return eps0 * std::pow(kappa, k); }

void EpsSchedule::validate() const {
  if (!(eps0 > 0.0)) throw std::invalid_argument("EpsSchedule: eps0 must be positive");
  if (!(kappa > 0.0 && kappa < 1.0))
    throw std::invalid_argument("EpsSchedule: kappa must lie in (0, 1)");
}

void OuterConfig::validate() const {
  c_schedule.validate();
  eps_schedule.validate();
  if (r != 0 && r != 1) throw std::invalid_argument("OuterConfig: r must be 0 or 1");
  if (max_outer < 1) throw std::invalid_argument("OuterConfig: max_outer must be >= 1");
  if (!(kkt_tol > 0.0)) throw std::invalid_argument("OuterConfig: kkt_tol must be positive");
  inner.validate();
}

SolveResult pmm_solve(const Problem& p, const OuterConfig& cfg, Vector x0, Vector lambda0) {
  return multiplier_loop(p, cfg, std::move(x0), std::move(lambda0), true);
}

SolveResult alm_solve(const Problem& p, const OuterConfig& cfg, Vector x0, Vector lambda0) {
  return multiplier_loop(p, cfg, std::move(x0), std::move(lambda0), false);
}

AdmmResult admm_solve(const Problem& p, double c, int max_iters, double tol, Vector x0,
                      Vector v0, Vector lambda0) {
  if (!(c > 0.0)) throw std::invalid_argument("admm_solve: c must be positive");
  if (max_iters < 1) throw std::invalid_argument("admm_solve: max_iters must be >= 1");
  if (!(tol > 0.0)) throw std::invalid_argument("admm_solve: tol must be positive");
  check_start(p, x0, lambda0);
  if (v0.size() != p.m()) throw std::invalid_argument("admm_solve: v0 dimension mismatch");

  AdmmResult out;
  out.trace.status = SolveStatus::MaxIterations;
  Vector x = std::move(x0), v = std::move(v0), lambda = std::move(lambda0);
  const Index n = p.n();
  const int cg_iters = static_cast<int>(10 * n);
  const Vector zero_x = Vector::Zero(n);
  const auto x_step_apply = [&](const Vector& d) -> Vector {
    return p.f.hessian_apply(zero_x, d) + c * p.e.adjoint_apply(p.e.apply(d));
  };

  for (int k = 0; k < max_iters; ++k) {
    const auto t0 = Clock::now();
    // x-step normal equations (hess f + c E^T E) x = rhs, warm-started CG.
    const Vector rhs = -(p.f.gradient(zero_x) + p.e.adjoint_apply(lambda - c * v));
    const Vector residual0 = rhs - x_step_apply(x);
    const double cg_tol = 1e-10 * std::max(1.0, rhs.norm());
    const CgResult cg = cg_solve(x_step_apply, residual0, cg_tol, cg_iters);
    x += cg.x;

    const Vector ex = p.e.apply(x);
    const Vector v_next = prox_eval(p.phi, ex + lambda / c, c);
    const Vector lambda_next = lambda + c * (ex - v_next);
    const double primal = (ex - v_next).norm();
    const double dual = c * p.e.adjoint_apply(v_next - v).norm();

    const KktResidual kkt = kkt_residual(p, IterateState{x, lambda_next, c});
    TraceRow row;
    row.k = k;
    row.c = c;
    row.eps = 0.0;
    row.objective = objective_value(p, x);
    row.kkt_stat = kkt.stationarity;
    row.kkt_feas = kkt.feasibility;
    row.inner_iters = cg.iters;
    row.inner_grad_norm = cg.residual;
    row.step_norm = std::max(primal, dual);
    row.inner_converged = cg.converged;
    row.wall_ms = elapsed_ms(t0);
    out.trace.rows.push_back(row);

    v = v_next;
    lambda = lambda_next;
    if (std::max(primal, dual) <= tol) {
      out.trace.status = SolveStatus::Converged;
      break;
    }
  }

  out.state = IterateState{std::move(x), std::move(lambda), c};
  out.v = std::move(v);
  return out;
}

double fb_envelope_value(const Problem& p, double c, const Vector& x) {
  if (!(c > 0.0)) throw std::invalid_argument("fb_envelope_value: c must be positive");
  const Vector gf = p.f.gradient(x);
  const Vector z = x - gf / c;
  return p.f.value(x) + envelope_eval(p.phi, z, c) - gf.squaredNorm() / (2.0 * c);
}

FbnResult fb_newton_solve(const Problem& p, double c, const FbnConfig& cfg,
                          const std::optional<Vector>& x0) {
  if (!std::holds_alternative<LinearOperator::Identity>(p.e.node()))
    throw std::invalid_argument("fb_newton_solve: requires E = identity");
  if (!(c > 0.0)) throw std::invalid_argument("fb_newton_solve: c must be positive");
  if (!(cfg.tol >= 0.0) || cfg.max_iters < 1 || !(cfg.gamma > 0.0 && cfg.gamma < 0.5) ||
      !(cfg.rho > 0.0 && cfg.rho < 1.0) || cfg.max_backtracks < 0 || !(cfg.delta >= 0.0))
    throw std::invalid_argument("fb_newton_solve: bad config");
  // The forward-backward envelope is an exact merit function only for
  // c above the curvature of f; check against the power-iteration estimate.
  if (c <= p.f.grad_lipschitz_upper() / 1.01)
    throw std::invalid_argument("fb_newton_solve: c must exceed the Lipschitz bound of grad f");

  const Index n = p.n();
  Vector x = x0.value_or(Vector::Zero(n));
  if (x.size() != n) throw std::invalid_argument("fb_newton_solve: x0 dimension mismatch");

  FbnResult out;
  out.trace.status = SolveStatus::MaxIterations;
  const auto fbe = [&](const Vector& xx) { return fb_envelope_value(p, c, xx); };

  for (int k = 0; k < cfg.max_iters; ++k) {
    const auto t0 = Clock::now();
    const Vector gf = p.f.gradient(x);
    const Vector z = x - gf / c;
    const Vector q = prox_eval(p.phi, z, c);
    const Vector res = x - q;  // fixed-point residual
    if (res.norm() <= cfg.tol) {
      out.trace.status = SolveStatus::Converged;
      break;
    }

    // Dense Newton matrix M = I - G (I - hess f / c) + delta I (nonsymmetric).
    const JacobianElement jac = prox_jacobian(p.phi, z, c);
    Matrix m(n, n);
    for (Index j = 0; j < n; ++j) {
      Vector ej = Vector::Zero(n);
      ej[j] = 1.0;
      m.col(j) = ej - jac.apply(ej - p.f.hessian_apply(x, ej) / c);
    }
    m.diagonal().array() += cfg.delta;
    Vector d = Eigen::PartialPivLU<Matrix>(m).solve(-res);

    // Globalize on the envelope: grad F_c(x) = (c I - hess f(x)) res, which for
    // c above the curvature vanishes only with res itself.
    const Vector fbe_grad = c * res - p.f.hessian_apply(x, res);
    double dir_deriv = d.dot(fbe_grad);
    if (!(dir_deriv < 0.0)) {
      d = -fbe_grad;
      dir_deriv = d.dot(fbe_grad);
      if (!(dir_deriv < 0.0)) {
        out.trace.status = SolveStatus::InnerStalled;
        break;
      }
    }
    const auto tau = armijo_search(fbe, x, d, dir_deriv, cfg.gamma, cfg.rho, cfg.max_backtracks);
    if (!tau) {
      out.trace.status = SolveStatus::InnerStalled;
      break;
    }
    x += *tau * d;

    const Vector gf2 = p.f.gradient(x);
    const Vector z2 = x - gf2 / c;
    const Vector res2 = x - prox_eval(p.phi, z2, c);
    const double rn2 = res2.norm();
    TraceRow row;
    row.k = k;
    row.c = c;
    row.eps = 0.0;
    row.objective = objective_value(p, x);
    row.kkt_stat = (c * res2 - p.f.hessian_apply(x, res2)).norm();
    row.kkt_feas = rn2;
    row.inner_iters = 1;
    row.inner_grad_norm = row.kkt_stat;
    row.step_norm = *tau * d.norm();
    row.wall_ms = elapsed_ms(t0);
    out.trace.rows.push_back(row);

    if (rn2 <= cfg.tol) {
      out.trace.status = SolveStatus::Converged;
      break;
    }
  }

  out.x = std::move(x);
  return out;
}

}  // namespace proxmm
