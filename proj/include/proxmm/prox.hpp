#pragma once

#include <memory>
#include <tuple>
#include <variant>
#include <vector>

#include "proxmm/ext_real.hpp"
#include "proxmm/types.hpp"

namespace proxmm {

// Description of a proper closed convex function phi whose proximal operator
//
//   prox_{phi/c}(z) = argmin_u  phi(u) + (c/2) ||u - z||^2 ,   c > 0,
//
// is available in closed form, together with an element of the Clarke
// generalized Jacobian of z -> prox_{phi/c}(z).
//
// Specs are immutable values; combinators share their children.
class ProxSpec {
 public:
  static constexpr Index kAnyDim = -1;  // dim() result when any size is accepted

  struct Zero {};                         // phi = 0
  struct L1 { double weight; };           // phi(z) = weight * sum_j |z_j|
  struct GroupL21 { Index pairs; };       // phi(z) = sum_i ||(z_i, z_{i+pairs})||_2
  struct IndicatorNonpositive {};         // phi = indicator of {z : z <= 0}
  struct AffineShifted {                  // phi(z) = inner(z - shift)
    std::shared_ptr<const ProxSpec> inner;
    Vector shift;
  };
  struct Scaled {                         // phi(z) = a * inner(alpha z + beta) + b
    std::shared_ptr<const ProxSpec> inner;
    double a;      // positive outer scale
    double alpha;  // nonzero argument scale
    Vector beta;
    double b;
  };
  struct BlockSum {                       // phi(z) = sum_k spec_k(z[start_k : start_k+len_k])
    std::vector<ProxSpec> specs;
    std::vector<Index> starts;
    std::vector<Index> lens;
    Index dim;
  };

  using Node = std::variant<Zero, L1, GroupL21, IndicatorNonpositive,
                            AffineShifted, Scaled, BlockSum>;

  static ProxSpec zero();
  static ProxSpec l1(double weight);
  static ProxSpec group_l21(Index pairs);
  static ProxSpec indicator_nonpositive();
  static ProxSpec affine_shifted(ProxSpec inner, Vector shift);
  static ProxSpec scaled(ProxSpec inner, double a, double alpha, Vector beta, double b);
  // Blocks are (spec, start, len); ranges must be disjoint and cover [0, dim).
  static ProxSpec block_sum(std::vector<std::tuple<ProxSpec, Index, Index>> blocks);

  // Required argument dimension, or kAnyDim if the function accepts any size.
  Index dim() const;
  bool accepts(Index n) const;

  const Node& node() const { return node_; }

 private:
  explicit ProxSpec(Node n) : node_(std::move(n)) {}
  Node node_;
};

// Structured element G of the generalized Jacobian of prox_{phi/c} at a point.
// Always symmetric with eigenvalues in [0, 1] (prox operators of convex
// functions are firmly nonexpansive).
class JacobianElement {
 public:
  struct Diagonal { Vector entries; };
  // 2x2 blocks coupling indices (i, i+p) where p = d00.size():
  //   [ d00_i  d01_i ]
  //   [ d01_i  d11_i ]
  struct PairBlocks { Vector d00, d01, d11; };
  struct Compound {  // block-diagonal arrangement of parts at given offsets
    std::vector<JacobianElement> parts;
    std::vector<Index> starts;
    Index dim;
  };

  using Node = std::variant<Diagonal, PairBlocks, Compound>;

  static JacobianElement diagonal(Vector entries);
  static JacobianElement pair_blocks(Vector d00, Vector d01, Vector d11);
  static JacobianElement compound(std::vector<JacobianElement> parts,
                                  std::vector<Index> starts, Index dim);

  Index dim() const;
  Vector apply(const Vector& v) const;  // G v

  const Node& node() const { return node_; }

 private:
  explicit JacobianElement(Node n) : node_(std::move(n)) {}
  Node node_;
};

// phi(z) as an extended real (+infinity outside the domain).
ExtReal phi_value(const ProxSpec& spec, const Vector& z);

// prox_{phi/c}(z); requires c > 0 and a dimension-compatible z.
Vector prox_eval(const ProxSpec& spec, const Vector& z, double c);

// Moreau envelope phi_c(z) = phi(prox_{phi/c}(z)) + (c/2) ||prox_{phi/c}(z) - z||^2.
// Always finite, smooth in z with gradient c (z - prox_{phi/c}(z)).
double envelope_eval(const ProxSpec& spec, const Vector& z, double c);

// An element of the generalized Jacobian of z -> prox_{phi/c}(z). At points of
// nondifferentiability a fixed tie-break picks the minimal element (vanishing
// diagonal entry / zero pair block).
JacobianElement prox_jacobian(const ProxSpec& spec, const Vector& z, double c);

// prox_{c phi*}(z) for the convex conjugate phi*, obtained from the Moreau
// decomposition prox_{c phi*}(z) = z - c prox_{phi/c}(z / c); never evaluates
// phi* itself.
Vector conjugate_prox(const ProxSpec& spec, const Vector& z, double c);

}  // namespace proxmm
