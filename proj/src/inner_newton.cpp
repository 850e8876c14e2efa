#include "proxmm/inner_newton.hpp"

#include <cmath>
#include <stdexcept>

namespace proxmm {

namespace {

void check_subproblem(const Subproblem& sp) {
  if (sp.problem == nullptr) throw std::invalid_argument("subproblem: missing problem");
  const Problem& p = *sp.problem;
  if (sp.x_ref.size() != p.n()) throw std::invalid_argument("subproblem: x_ref dimension mismatch");
  if (sp.lambda.size() != p.m())
    throw std::invalid_argument("subproblem: lambda dimension mismatch");
  if (!(sp.c > 0.0)) throw std::invalid_argument("subproblem: c must be positive");
  if (sp.prox_weight < 0.0 || sp.ridge < 0.0)
    throw std::invalid_argument("subproblem: negative weights");
}

// Newton operator for the general subproblem: the proximal term contributes
// prox_weight/c on the diagonal and the ridge is added verbatim.
Vector subproblem_operator_apply(const Subproblem& sp, const Vector& xi,
                                 const JacobianElement& g, const Vector& d) {
  const Problem& p = *sp.problem;
  const Vector t = p.e.apply(d);
  Vector out = p.f.hessian_apply(xi, d);
  out += sp.c * p.e.adjoint_apply(t - g.apply(t));
  const double diag = sp.prox_weight / sp.c + sp.ridge;
  if (diag > 0.0) out += diag * d;
  return out;
}

}  // namespace

void InnerConfig::validate() const {
  if (!(gamma > 0.0 && gamma < 0.5))
    throw std::invalid_argument("InnerConfig: gamma must lie in (0, 1/2)");
  if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("InnerConfig: rho must lie in (0, 1)");
  if (max_iters < 1) throw std::invalid_argument("InnerConfig: max_iters must be >= 1");
  if (max_backtracks < 0) throw std::invalid_argument("InnerConfig: max_backtracks must be >= 0");
  if (!(cg_rel_tol_cap > 0.0 && cg_rel_tol_cap <= 1.0))
    throw std::invalid_argument("InnerConfig: cg_rel_tol_cap must lie in (0, 1]");
  if (cg_max_iters < 0) throw std::invalid_argument("InnerConfig: cg_max_iters must be >= 0");
}

double subproblem_value(const Subproblem& sp, const Vector& xi) {
  check_subproblem(sp);
  const Problem& p = *sp.problem;
  if (xi.size() != p.n()) throw std::invalid_argument("subproblem_value: dimension mismatch");
  const Vector w = p.e.apply(xi) + sp.lambda / sp.c;
  double val = p.f.value(xi) + envelope_eval(p.phi, w, sp.c) -
               sp.lambda.squaredNorm() / (2.0 * sp.c);
  if (sp.prox_weight > 0.0)
    val += sp.prox_weight / (2.0 * sp.c) * (xi - sp.x_ref).squaredNorm();
  return val;
}

Vector subproblem_grad(const Subproblem& sp, const Vector& xi) {
  check_subproblem(sp);
  const Problem& p = *sp.problem;
  if (xi.size() != p.n()) throw std::invalid_argument("subproblem_grad: dimension mismatch");
  const Vector w = p.e.apply(xi) + sp.lambda / sp.c;
  Vector g = p.f.gradient(xi) + sp.c * p.e.adjoint_apply(w - prox_eval(p.phi, w, sp.c));
  if (sp.prox_weight > 0.0) g += (sp.prox_weight / sp.c) * (xi - sp.x_ref);
  return g;
}

double psi_value(const Problem& p, const Vector& x_k, const Vector& lambda_k, double c,
                 const Vector& xi) {
  return subproblem_value(Subproblem{&p, x_k, lambda_k, c, 1.0, 0.0}, xi);
}

Vector psi_grad(const Problem& p, const Vector& x_k, const Vector& lambda_k, double c,
                const Vector& xi) {
  return subproblem_grad(Subproblem{&p, x_k, lambda_k, c, 1.0, 0.0}, xi);
}

Vector lna_apply(const Problem& p, const Vector& xi, double c, const JacobianElement& g,
                 const Vector& d) {
  if (!(c > 0.0)) throw std::invalid_argument("lna_apply: c must be positive");
  if (xi.size() != p.n() || d.size() != p.n())
    throw std::invalid_argument("lna_apply: dimension mismatch");
  if (g.dim() != p.m()) throw std::invalid_argument("lna_apply: jacobian dimension mismatch");
  Subproblem sp;
  sp.problem = &p;
  sp.c = c;
  sp.prox_weight = 1.0;
  return subproblem_operator_apply(sp, xi, g, d);
}

CgResult cg_solve(const std::function<Vector(const Vector&)>& apply, const Vector& rhs,
                  double tol_abs, int max_iters) {
  if (max_iters < 0) throw std::invalid_argument("cg_solve: max_iters must be >= 0");
  const Index n = rhs.size();
  CgResult out;
  out.x = Vector::Zero(n);
  Vector r = rhs;
  double rr = r.squaredNorm();
  out.residual = std::sqrt(rr);
  if (out.residual <= tol_abs) {
    out.converged = true;
    return out;
  }
  Vector x = out.x, p = r;
  for (int it = 0; it < max_iters; ++it) {
    const Vector ap = apply(p);
    const double pap = p.dot(ap);
    if (!(pap > 0.0)) break;  // curvature breakdown; keep the best iterate
    const double alpha = rr / pap;
    x += alpha * p;
    r -= alpha * ap;
    const double rr_next = r.squaredNorm();
    out.iters = it + 1;
    if (std::sqrt(rr_next) < out.residual) {
      out.residual = std::sqrt(rr_next);
      out.x = x;
    }
    if (out.residual <= tol_abs) {
      out.converged = true;
      break;
    }
    p = r + (rr_next / rr) * p;
    rr = rr_next;
  }
  return out;
}

NewtonSystemResult solve_newton_system(const std::function<Vector(const Vector&)>& v_apply,
                                       const Vector& rhs, double tol_abs, int max_iters,
                                       double fallback_scale) {
  if (!(fallback_scale > 0.0))
    throw std::invalid_argument("solve_newton_system: fallback_scale must be positive");
  const CgResult cg = cg_solve(v_apply, rhs, tol_abs, max_iters);
  NewtonSystemResult out;
  out.d = cg.x;
  out.iters = cg.iters;
  out.residual = cg.residual;
  out.degraded = !cg.converged;
  if (!(out.d.dot(rhs) > 0.0)) {  // not a descent direction for -rhs = grad
    out.d = fallback_scale * rhs;
    out.fallback = true;
  }
  return out;
}

std::optional<double> armijo_search(const std::function<double(const Vector&)>& psi_fn,
                                    const Vector& xi, const Vector& d, double dir_deriv,
                                    double gamma, double rho, int max_backtracks) {
  if (!(dir_deriv < 0.0))
    throw std::invalid_argument("armijo_search: dir_deriv must be negative");
  if (!(gamma > 0.0 && gamma < 0.5) || !(rho > 0.0 && rho < 1.0))
    throw std::invalid_argument("armijo_search: parameters out of range");
  const double psi0 = psi_fn(xi);
  double tau = 1.0;
  for (int i = 0; i <= max_backtracks; ++i) {
    if (psi_fn(xi + tau * d) <= psi0 + gamma * tau * dir_deriv) return tau;
    tau *= rho;
  }
  return std::nullopt;
}

InnerResult solve_subproblem(const Subproblem& sp, double stop_tol, const InnerConfig& cfg,
                             const std::optional<Vector>& xi0) {
  check_subproblem(sp);
  cfg.validate();
  if (!(stop_tol >= 0.0)) throw std::invalid_argument("solve_subproblem: negative stop_tol");
  const Problem& p = *sp.problem;
  const Index n = p.n();
  Vector xi = xi0.value_or(sp.x_ref);
  if (xi.size() != n) throw std::invalid_argument("solve_subproblem: xi0 dimension mismatch");
  const int cg_iters = cfg.cg_max_iters > 0 ? cfg.cg_max_iters : static_cast<int>(10 * n);

  InnerResult res;
  const auto value_at = [&](const Vector& v) { return subproblem_value(sp, v); };

  for (int iter = 0;; ++iter) {
    const Vector g = subproblem_grad(sp, xi);
    const double gn = g.norm();
    res.residual_history.push_back(gn);
    res.psi_history.push_back(subproblem_value(sp, xi));
    res.grad_norm = gn;
    if (gn <= stop_tol) {
      res.converged = true;
      break;
    }
    if (iter >= cfg.max_iters) break;

    const Vector w = p.e.apply(xi) + sp.lambda / sp.c;
    const JacobianElement jac = prox_jacobian(p.phi, w, sp.c);
    const double cg_tol = std::min(cfg.cg_rel_tol_cap, std::sqrt(gn)) * gn;
    const auto v_apply = [&](const Vector& d) {
      return subproblem_operator_apply(sp, xi, jac, d);
    };
    const NewtonSystemResult sys = solve_newton_system(v_apply, -g, cg_tol, cg_iters, sp.c);
    res.cg_degraded = res.cg_degraded || sys.degraded;
    res.used_fallback = res.used_fallback || sys.fallback;

    const double dir_deriv = g.dot(sys.d);
    const auto tau = armijo_search(value_at, xi, sys.d, dir_deriv, cfg.gamma, cfg.rho,
                                   cfg.max_backtracks);
    if (!tau) {
      res.stalled = true;
      break;
    }
    xi += *tau * sys.d;
    res.step_sizes.push_back(*tau);
    res.iters = iter + 1;
  }

  res.xi = std::move(xi);
  return res;
}

InnerResult newton_solve(const Problem& p, const Vector& x_k, const Vector& lambda_k, double c,
                         double stop_tol, const InnerConfig& cfg,
                         const std::optional<Vector>& xi0) {
  return solve_subproblem(Subproblem{&p, x_k, lambda_k, c, 1.0, 0.0}, stop_tol, cfg, xi0);
}

}  // namespace proxmm
