#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "proxmm/lagrangian.hpp"
#include "proxmm/problem.hpp"
#include "proxmm/types.hpp"

namespace proxmm {

struct InnerConfig {
  double gamma = 0.1;         // Armijo slope fraction, in (0, 1/2)
  double rho = 0.5;           // backtracking factor, in (0, 1)
  int max_iters = 100;        // Newton iteration budget
  int max_backtracks = 60;    // line-search reductions before declaring a stall
  double cg_rel_tol_cap = 0.5;
  int cg_max_iters = 0;       // 0 means 10 * n

  void validate() const;
};

struct InnerResult {
  Vector xi;                            // final iterate
  double grad_norm = 0.0;               // ||grad psi|| at xi
  int iters = 0;                        // accepted Newton steps
  std::vector<double> residual_history; // ||grad psi|| per visited iterate (incl. final)
  std::vector<double> psi_history;      // psi per visited iterate (incl. final)
  std::vector<double> step_sizes;       // accepted Armijo step lengths
  bool converged = false;               // grad_norm <= stop_tol reached
  bool stalled = false;                 // line search exhausted its budget
  bool cg_degraded = false;             // some linear solve missed its forcing tolerance
  bool used_fallback = false;           // some step fell back to scaled steepest descent
};

// Regularized subproblem minimized by the inner solver:
//   psi(xi) = f(xi) + phi_c(E xi + lambda/c) - ||lambda||^2/(2c)
//           + prox_weight/(2c) ||xi - x_ref||^2 ,
// i.e. the augmented Lagrangian in xi plus an optional proximal term around
// x_ref. prox_weight = 1 gives the proximally regularized subproblem of the
// outer primal-dual scheme; prox_weight = 0 with a small ridge gives the plain
// multiplier-method subproblem. ridge only enters the Newton operator.
struct Subproblem {
  const Problem* problem = nullptr;
  Vector x_ref;
  Vector lambda;
  double c = 1.0;
  double prox_weight = 1.0;
  double ridge = 0.0;
};

double subproblem_value(const Subproblem& sp, const Vector& xi);
Vector subproblem_grad(const Subproblem& sp, const Vector& xi);

// psi and its gradient for the proximally regularized subproblem at outer
// iterate (x_k, lambda_k) with penalty c.
double psi_value(const Problem& p, const Vector& x_k, const Vector& lambda_k, double c,
                 const Vector& xi);
Vector psi_grad(const Problem& p, const Vector& x_k, const Vector& lambda_k, double c,
                const Vector& xi);

// Matrix-free application of the linearized Newton operator
//   V d = hess f(xi) d + d / c + c E^T (I - G) E d
// for a generalized Jacobian element G of prox_{phi/c} at E xi + lambda/c.
// V is symmetric positive definite with c^{-1} I <= V <= hess f +
// (c^{-1} + c ||E||^2) I, hence invertible with norm-bounded inverse.
Vector lna_apply(const Problem& p, const Vector& xi, double c, const JacobianElement& g,
                 const Vector& d);

struct CgResult {
  Vector x;
  int iters = 0;
  double residual = 0.0;  // best ||b - A x|| seen
  bool converged = false;
};

// Plain conjugate gradients from x = 0 for SPD apply, stopping when the
// residual norm falls below tol_abs; returns the best iterate seen.
CgResult cg_solve(const std::function<Vector(const Vector&)>& apply, const Vector& rhs,
                  double tol_abs, int max_iters);

struct NewtonSystemResult {
  Vector d;
  int iters = 0;
  double residual = 0.0;
  bool degraded = false;  // tolerance missed within the iteration budget
  bool fallback = false;  // direction replaced by fallback_scale * rhs
};

// Solve V d = rhs (rhs = -grad psi) by CG; if the returned direction fails the
// descent test d^T rhs > 0 it is replaced by the scaled steepest-descent
// direction fallback_scale * rhs.
NewtonSystemResult solve_newton_system(const std::function<Vector(const Vector&)>& v_apply,
                                       const Vector& rhs, double tol_abs, int max_iters,
                                       double fallback_scale);

// Backtracking line search: returns the largest tau = rho^i, i = 0, 1, ...,
// with psi(xi + tau d) <= psi(xi) + gamma tau dir_deriv, trying the unit step
// first; nullopt if max_backtracks reductions never succeed. dir_deriv must be
// negative (descent direction).
std::optional<double> armijo_search(const std::function<double(const Vector&)>& psi_fn,
                                    const Vector& xi, const Vector& d, double dir_deriv,
                                    double gamma, double rho, int max_backtracks);

// Minimize a subproblem by the linearized (semismooth) Newton iteration with
// Armijo backtracking, stopping when ||grad|| <= stop_tol. Starts from xi0 if
// given, else from sp.x_ref.
InnerResult solve_subproblem(const Subproblem& sp, double stop_tol, const InnerConfig& cfg,
                             const std::optional<Vector>& xi0 = std::nullopt);

// The proximally regularized case (prox_weight 1, no ridge), starting at x_k.
InnerResult newton_solve(const Problem& p, const Vector& x_k, const Vector& lambda_k, double c,
                         double stop_tol, const InnerConfig& cfg = {},
                         const std::optional<Vector>& xi0 = std::nullopt);

}  // namespace proxmm
