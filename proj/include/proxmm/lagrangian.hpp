#pragma once

#include "proxmm/problem.hpp"
#include "proxmm/types.hpp"

namespace proxmm {

// Stationarity / feasibility residual pair for the saddle system of
// min f(x) + phi(E x). Both vanish exactly at a primal-dual solution:
//   stationarity = || grad f(x) + E^T lambda ||,
//   feasibility  = || E x - prox_{phi/c}(E x + lambda / c) ||.
// The feasibility part depends on the penalty c used to pose the prox
// residual, so reported residuals are always read together with c.
struct KktResidual {
  double stationarity = 0.0;
  double feasibility = 0.0;

  double max() const { return stationarity > feasibility ? stationarity : feasibility; }
};

// Value of the augmented Lagrangian in its envelope form,
//   L_c(x, lambda) = f(x) + phi_c(E x + lambda / c) - ||lambda||^2 / (2 c),
// where phi_c is the Moreau envelope. Finite for all arguments and concave in
// lambda, convex and differentiable in x.
double aug_lagrangian_value(const Problem& p, const IterateState& s);

// grad_x L_c(x, lambda) = grad f(x) + c E^T (w - prox_{phi/c}(w)),
// with w = E x + lambda / c.
Vector aug_lagrangian_grad_x(const Problem& p, const IterateState& s);

// First-order multiplier step at the next primal point:
//   lambda_next = lambda + c (E x_next - prox_{phi/c}(E x_next + lambda / c)).
// Equivalently lambda_next = prox_{c phi*}(lambda + c E x_next).
Vector multiplier_update(const Problem& p, const IterateState& s, const Vector& x_next);

KktResidual kkt_residual(const Problem& p, const IterateState& s);

}  // namespace proxmm
