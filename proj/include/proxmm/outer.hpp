#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "proxmm/ext_real.hpp"
#include "proxmm/inner_newton.hpp"
#include "proxmm/lagrangian.hpp"
#include "proxmm/problem.hpp"

namespace proxmm {

// Penalty schedule c_k = min(c0 * factor^k, cap); factor 1 gives a constant c.
struct CSchedule {
  double c0 = 1.0;
  double factor = 1.0;
  double cap = std::numeric_limits<double>::infinity();

  static CSchedule constant(double c0);
  static CSchedule geometric(double c0, double factor, double cap);
  double at(int k) const;
  void validate() const;
};

// Inner accuracy schedule eps_k = eps0 * kappa^k (summable, so the outer
// iteration tracks the exact proximal-point sequence).
struct EpsSchedule {
  double eps0 = 1e-2;
  double kappa = 0.5;

  double at(int k) const;
  void validate() const;
};

struct OuterConfig {
  CSchedule c_schedule;
  EpsSchedule eps_schedule;
  int r = 0;  // stopping-criterion exponent, 0 or 1
  int max_outer = 100;
  double kkt_tol = 1e-8;
  InnerConfig inner;
  bool record_iterates = false;  // keep per-iteration (x, lambda) in the trace

  void validate() const;
};

enum class SolveStatus {
  Converged,      // KKT residuals below tolerance
  MaxIterations,  // outer budget exhausted; last iterate returned
  InnerStalled,   // inner line search stalled; partial trace returned
};

struct TraceRow {
  int k = 0;
  double c = 0.0;
  double eps = 0.0;
  ExtReal objective;
  double kkt_stat = 0.0;
  double kkt_feas = 0.0;
  int inner_iters = 0;
  double inner_grad_norm = 0.0;
  double wall_ms = 0.0;
  // Bookkeeping beyond the serialized columns:
  double step_norm = 0.0;       // ||(x_{k+1}, l_{k+1}) - (x_k, l_k)||
  double inner_tol = 0.0;       // realized inner stop tolerance
  bool inner_converged = true;  // inner run reached its tolerance
  bool ridge_active = false;    // convexity ridge was added to the Newton operator
};

struct ConvergenceTrace {
  std::vector<TraceRow> rows;
  SolveStatus status = SolveStatus::MaxIterations;
  // Populated only when OuterConfig::record_iterates is set.
  std::vector<Vector> x_history;
  std::vector<Vector> lambda_history;
};

struct SolveResult {
  IterateState state;
  ConvergenceTrace trace;
};

// Proximal method of multipliers: alternates the inner Newton solve of the
// proximally regularized subproblem with the first-order multiplier step. The
// inner run for iteration k stops at ||grad psi|| <= (eps_k / c_k) *
// min(1, ||step_k||^r); for r = 1 the step norm is only known afterwards, so
// the run is verified and re-solved with a tighter tolerance when needed (at
// most 5 times, factor 0.1).
SolveResult pmm_solve(const Problem& p, const OuterConfig& cfg, Vector x0, Vector lambda0);

// Classical multiplier method: same loop without the proximal term. When f is
// not strongly convex the subproblem may be merely convex, so a ridge of
// 1e-8 * c is added to the Newton operator and flagged on the trace rows.
SolveResult alm_solve(const Problem& p, const OuterConfig& cfg, Vector x0, Vector lambda0);

struct AdmmResult {
  IterateState state;
  Vector v;  // splitting variable, v ~ E x at convergence
  ConvergenceTrace trace;
};

// Alternating-direction method of multipliers on the splitting
// min f(x) + phi(v) s.t. E x = v, with fixed penalty c:
//   x+ = argmin f(x) + (c/2)||E x - v + lambda/c||^2   (CG, warm-started)
//   v+ = prox_{phi/c}(E x+ + lambda/c)
//   lambda+ = lambda + c (E x+ - v+)
// stopping when max(||E x+ - v+||, c ||E^T (v+ - v)||) <= tol.
AdmmResult admm_solve(const Problem& p, double c, int max_iters, double tol, Vector x0,
                      Vector v0, Vector lambda0);

struct FbnConfig {
  double tol = 1e-10;        // stop on the fixed-point residual norm
  int max_iters = 200;
  double gamma = 0.1;
  double rho = 0.5;
  int max_backtracks = 60;
  double delta = 1e-10;      // diagonal regularization of the Newton matrix
};

struct FbnResult {
  Vector x;
  ConvergenceTrace trace;
};

// Forward-backward truncated-Newton baseline for E = I and c greater than the
// Lipschitz constant of grad f. Solves the (nonsymmetric) system
//   (I - G (I - hess f / c) + delta I) d = -(x - prox_{phi/c}(x - grad f(x)/c))
// densely and globalizes with Armijo backtracking on the forward-backward
// envelope F_c(x) = f(x) + phi_c(x - grad f(x)/c) - ||grad f(x)||^2/(2c).
FbnResult fb_newton_solve(const Problem& p, double c, const FbnConfig& cfg = {},
                          const std::optional<Vector>& x0 = std::nullopt);

// Forward-backward envelope value at x (finite everywhere; equals the
// objective at stationary points).
double fb_envelope_value(const Problem& p, double c, const Vector& x);

}  // namespace proxmm
