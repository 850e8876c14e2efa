#pragma once

#include <variant>

#include "proxmm/ext_real.hpp"
#include "proxmm/operators.hpp"
#include "proxmm/prox.hpp"
#include "proxmm/types.hpp"

namespace proxmm {

// Convex smooth term f with gradient and Hessian-vector products. The closed
// set of variants keeps the Hessian constant in x, but evaluation points are
// threaded through for uniformity.
class SmoothSpec {
 public:
  struct Zero { Index n; };
  struct Quadratic {  // f(x) = (1/2) ||A x - b||^2
    Matrix a;
    Vector b;
  };

  using Node = std::variant<Zero, Quadratic>;

  static SmoothSpec zero(Index n);
  static SmoothSpec quadratic(Matrix a, Vector b);

  Index dim() const;
  double value(const Vector& x) const;
  Vector gradient(const Vector& x) const;
  Vector hessian_apply(const Vector& x, const Vector& d) const;

  // Power-iteration upper bound on the gradient's Lipschitz constant
  // (lambda_max of the Hessian); 0 for the zero term.
  double grad_lipschitz_upper() const;

  // Whether f is strongly convex (A has full column rank).
  bool is_strongly_convex() const;

  const Node& node() const { return node_; }

 private:
  explicit SmoothSpec(Node n) : node_(std::move(n)) {}
  Node node_;
};

// Composite problem  min_x  f(x) + phi(E x).
struct Problem {
  Problem(SmoothSpec f_in, LinearOperator e_in, ProxSpec phi_in);

  SmoothSpec f;
  LinearOperator e;
  ProxSpec phi;

  Index n() const { return e.domain_dim(); }
  Index m() const { return e.codomain_dim(); }
};

// Current primal-dual iterate together with the penalty parameter in force.
struct IterateState {
  Vector x;
  Vector lambda;
  double c = 1.0;
};

// f(x) + phi(E x) as an extended real.
ExtReal objective_value(const Problem& p, const Vector& x);

}  // namespace proxmm
