#pragma once

#include <variant>
#include <vector>

#include "proxmm/types.hpp"

namespace proxmm {

// Structured linear operator E : R^n -> R^m with forward and adjoint
// application and a cheap upper bound on ||E||^2. Kept matrix-free except for
// the Dense variant.
class LinearOperator {
 public:
  struct Identity { Index n; };
  struct Dense { Matrix mat; };
  // Periodic forward-difference gradient of an n x n image stored
  // column-major: rows [0, n^2) hold the vertical differences (within
  // columns), rows [n^2, 2 n^2) the horizontal ones (across columns),
  //   (D1 x)_{i + n j} = x_{(i+1 mod n) + n j} - x_{i + n j},
  //   (D2 x)_{i + n j} = x_{i + n (j+1 mod n)} - x_{i + n j}.
  struct Grad2DPeriodic { Index side; };
  struct VStack { std::vector<LinearOperator> parts; };  // common domain, stacked ranges

  using Node = std::variant<Identity, Dense, Grad2DPeriodic, VStack>;

  static LinearOperator identity(Index n);
  static LinearOperator dense(Matrix mat);
  static LinearOperator grad2d_periodic(Index side);
  static LinearOperator vstack(std::vector<LinearOperator> parts);

  Index domain_dim() const;
  Index codomain_dim() const;

  Vector apply(const Vector& x) const;          // E x
  Vector adjoint_apply(const Vector& y) const;  // E^T y

  // Upper bound on ||E||^2 = lambda_max(E^T E): power iteration on E^T E from
  // a fixed seeded start, inflated by 1.01 to absorb truncation. Returns 0 for
  // the zero operator. Deterministic for fixed iters.
  double opnorm_sq_upper(int iters = 100) const;

  const Node& node() const { return node_; }

 private:
  explicit LinearOperator(Node n) : node_(std::move(n)) {}
  Node node_;
};

}  // namespace proxmm
