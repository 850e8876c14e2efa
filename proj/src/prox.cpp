#include "proxmm/prox.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace proxmm {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void check_c(double c) {
  if (!(c > 0.0)) throw std::invalid_argument("prox: c must be positive");
}

void check_dim(const ProxSpec& spec, const Vector& z) {
  if (!spec.accepts(z.size()))
    throw std::invalid_argument("prox: argument dimension incompatible with spec");
}

// Soft threshold at level t >= 0: the prox of t |.|.
double soft_threshold(double s, double t) {
  return std::max(s - t, std::min(s + t, 0.0));
}

// Auxiliary scaling used by the Scaled combinator: with
// phi(z) = a psi(alpha z + beta) + b, minimizing phi(u) + (c/2)||u - z||^2 in
// u and substituting w = alpha u + beta turns the problem into the prox of psi
// at alpha z + beta with parameter c / (a alpha^2).
double scaled_inner_c(const ProxSpec::Scaled& s, double c) {
  return c / (s.a * s.alpha * s.alpha);
}

}  // namespace

// ---------------------------------------------------------------------------
// ProxSpec factories

ProxSpec ProxSpec::zero() { return ProxSpec(Node{Zero{}}); }

ProxSpec ProxSpec::l1(double weight) {
  if (!(weight > 0.0)) throw std::invalid_argument("ProxSpec::l1: weight must be positive");
  return ProxSpec(Node{L1{weight}});
}

ProxSpec ProxSpec::group_l21(Index pairs) {
  if (pairs < 1) throw std::invalid_argument("ProxSpec::group_l21: pairs must be >= 1");
  return ProxSpec(Node{GroupL21{pairs}});
}

ProxSpec ProxSpec::indicator_nonpositive() { return ProxSpec(Node{IndicatorNonpositive{}}); }

ProxSpec ProxSpec::affine_shifted(ProxSpec inner, Vector shift) {
  if (!inner.accepts(shift.size()))
    throw std::invalid_argument("ProxSpec::affine_shifted: shift dimension incompatible");
  return ProxSpec(Node{AffineShifted{std::make_shared<const ProxSpec>(std::move(inner)),
                                     std::move(shift)}});
}

ProxSpec ProxSpec::scaled(ProxSpec inner, double a, double alpha, Vector beta, double b) {
  if (!(a > 0.0)) throw std::invalid_argument("ProxSpec::scaled: a must be positive");
  if (alpha == 0.0) throw std::invalid_argument("ProxSpec::scaled: alpha must be nonzero");
  if (!inner.accepts(beta.size()))
    throw std::invalid_argument("ProxSpec::scaled: beta dimension incompatible");
  return ProxSpec(Node{Scaled{std::make_shared<const ProxSpec>(std::move(inner)), a, alpha,
                              std::move(beta), b}});
}

ProxSpec ProxSpec::block_sum(std::vector<std::tuple<ProxSpec, Index, Index>> blocks) {
  if (blocks.empty()) throw std::invalid_argument("ProxSpec::block_sum: no blocks");
  std::sort(blocks.begin(), blocks.end(),
            [](const auto& a, const auto& b) { return std::get<1>(a) < std::get<1>(b); });
  BlockSum node;
  Index expected_start = 0;
  for (auto& [spec, start, len] : blocks) {
    if (len < 1) throw std::invalid_argument("ProxSpec::block_sum: empty range");
    if (start != expected_start)
      throw std::invalid_argument("ProxSpec::block_sum: ranges must be disjoint and covering");
    if (!spec.accepts(len))
      throw std::invalid_argument("ProxSpec::block_sum: range length incompatible with spec");
    node.specs.push_back(std::move(spec));
    node.starts.push_back(start);
    node.lens.push_back(len);
    expected_start = start + len;
  }
  node.dim = expected_start;
  return ProxSpec(Node{std::move(node)});
}

Index ProxSpec::dim() const {
  return std::visit(
      Overloaded{
          [](const Zero&) { return kAnyDim; },
          [](const L1&) { return kAnyDim; },
          [](const GroupL21& g) { return 2 * g.pairs; },
          [](const IndicatorNonpositive&) { return kAnyDim; },
          [](const AffineShifted& a) { return a.shift.size(); },
          [](const Scaled& s) { return s.beta.size(); },
          [](const BlockSum& b) { return b.dim; },
      },
      node_);
}

bool ProxSpec::accepts(Index n) const {
  const Index d = dim();
  return d == kAnyDim ? n >= 0 : n == d;
}

// ---------------------------------------------------------------------------
// JacobianElement

JacobianElement JacobianElement::diagonal(Vector entries) {
  return JacobianElement(Node{Diagonal{std::move(entries)}});
}

JacobianElement JacobianElement::pair_blocks(Vector d00, Vector d01, Vector d11) {
  if (d00.size() != d01.size() || d00.size() != d11.size())
    throw std::invalid_argument("JacobianElement::pair_blocks: size mismatch");
  return JacobianElement(Node{PairBlocks{std::move(d00), std::move(d01), std::move(d11)}});
}

JacobianElement JacobianElement::compound(std::vector<JacobianElement> parts,
                                          std::vector<Index> starts, Index dim) {
  if (parts.size() != starts.size())
    throw std::invalid_argument("JacobianElement::compound: parts/starts mismatch");
  return JacobianElement(Node{Compound{std::move(parts), std::move(starts), dim}});
}

Index JacobianElement::dim() const {
  return std::visit(Overloaded{
                        [](const Diagonal& d) { return d.entries.size(); },
                        [](const PairBlocks& p) { return 2 * p.d00.size(); },
                        [](const Compound& c) { return c.dim; },
                    },
                    node_);
}

Vector JacobianElement::apply(const Vector& v) const {
  if (v.size() != dim())
    throw std::invalid_argument("JacobianElement::apply: dimension mismatch");
  return std::visit(
      Overloaded{
          [&](const Diagonal& d) -> Vector { return d.entries.cwiseProduct(v); },
          [&](const PairBlocks& p) -> Vector {
            const Index np = p.d00.size();
            Vector out(2 * np);
            for (Index i = 0; i < np; ++i) {
              out[i] = p.d00[i] * v[i] + p.d01[i] * v[i + np];
              out[i + np] = p.d01[i] * v[i] + p.d11[i] * v[i + np];
            }
            return out;
          },
          [&](const Compound& c) -> Vector {
            Vector out = Vector::Zero(c.dim);
            for (std::size_t k = 0; k < c.parts.size(); ++k) {
              const Index start = c.starts[k];
              const Index len = c.parts[k].dim();
              out.segment(start, len) = c.parts[k].apply(v.segment(start, len));
            }
            return out;
          },
      },
      node_);
}

// ---------------------------------------------------------------------------
// Operations

ExtReal phi_value(const ProxSpec& spec, const Vector& z) {
  check_dim(spec, z);
  return std::visit(
      Overloaded{
          [&](const ProxSpec::Zero&) -> ExtReal { return 0.0; },
          [&](const ProxSpec::L1& f) -> ExtReal {
            return f.weight * z.cwiseAbs().sum();
          },
          [&](const ProxSpec::GroupL21& f) -> ExtReal {
            double s = 0.0;
            for (Index i = 0; i < f.pairs; ++i) s += std::hypot(z[i], z[i + f.pairs]);
            return s;
          },
          [&](const ProxSpec::IndicatorNonpositive&) -> ExtReal {
            for (Index j = 0; j < z.size(); ++j)
              if (z[j] > 0.0) return ExtReal::infinity();
            return 0.0;
          },
          [&](const ProxSpec::AffineShifted& f) -> ExtReal {
            return phi_value(*f.inner, z - f.shift);
          },
          [&](const ProxSpec::Scaled& f) -> ExtReal {
            return phi_value(*f.inner, f.alpha * z + f.beta).scale_add(f.a, f.b);
          },
          [&](const ProxSpec::BlockSum& f) -> ExtReal {
            ExtReal total = 0.0;
            for (std::size_t k = 0; k < f.specs.size(); ++k)
              total += phi_value(f.specs[k], z.segment(f.starts[k], f.lens[k]));
            return total;
          },
      },
      spec.node());
}

Vector prox_eval(const ProxSpec& spec, const Vector& z, double c) {
  check_c(c);
  check_dim(spec, z);
  return std::visit(
      Overloaded{
          [&](const ProxSpec::Zero&) -> Vector { return z; },
          [&](const ProxSpec::L1& f) -> Vector {
            const double t = f.weight / c;
            Vector out(z.size());
            for (Index j = 0; j < z.size(); ++j) out[j] = soft_threshold(z[j], t);
            return out;
          },
          [&](const ProxSpec::GroupL21& f) -> Vector {
            const Index p = f.pairs;
            Vector out(2 * p);
            for (Index i = 0; i < p; ++i) {
              const double r = std::hypot(z[i], z[i + p]);
              if (c * r >= 1.0) {
                const double shrink = 1.0 - 1.0 / (c * r);
                out[i] = shrink * z[i];
                out[i + p] = shrink * z[i + p];
              } else {
                out[i] = 0.0;
                out[i + p] = 0.0;
              }
            }
            return out;
          },
          [&](const ProxSpec::IndicatorNonpositive&) -> Vector {
            return z.cwiseMin(0.0);
          },
          [&](const ProxSpec::AffineShifted& f) -> Vector {
            return prox_eval(*f.inner, z - f.shift, c) + f.shift;
          },
          [&](const ProxSpec::Scaled& f) -> Vector {
            const Vector w = prox_eval(*f.inner, f.alpha * z + f.beta, scaled_inner_c(f, c));
            return (w - f.beta) / f.alpha;
          },
          [&](const ProxSpec::BlockSum& f) -> Vector {
            Vector out(f.dim);
            for (std::size_t k = 0; k < f.specs.size(); ++k)
              out.segment(f.starts[k], f.lens[k]) =
                  prox_eval(f.specs[k], z.segment(f.starts[k], f.lens[k]), c);
            return out;
          },
      },
      spec.node());
}

double envelope_eval(const ProxSpec& spec, const Vector& z, double c) {
  check_c(c);
  check_dim(spec, z);
  // Combinators recurse so that the infimand is only ever evaluated at prox
  // points of base variants, which lie in their domains exactly:
  //   (a psi(alpha . + beta) + b)_c (z) = a psi_{c/(a alpha^2)}(alpha z + beta) + b,
  //   (psi(. - y))_c (z) = psi_c(z - y),
  // and block sums add up blockwise.
  return std::visit(
      Overloaded{
          [&](const ProxSpec::AffineShifted& f) {
            return envelope_eval(*f.inner, z - f.shift, c);
          },
          [&](const ProxSpec::Scaled& f) {
            return f.a * envelope_eval(*f.inner, f.alpha * z + f.beta, scaled_inner_c(f, c)) +
                   f.b;
          },
          [&](const ProxSpec::BlockSum& f) {
            double total = 0.0;
            for (std::size_t k = 0; k < f.specs.size(); ++k)
              total += envelope_eval(f.specs[k], z.segment(f.starts[k], f.lens[k]), c);
            return total;
          },
          [&](const auto&) {
            const Vector p = prox_eval(spec, z, c);
            return phi_value(spec, p).value() + 0.5 * c * (p - z).squaredNorm();
          },
      },
      spec.node());
}

JacobianElement prox_jacobian(const ProxSpec& spec, const Vector& z, double c) {
  check_c(c);
  check_dim(spec, z);
  return std::visit(
      Overloaded{
          [&](const ProxSpec::Zero&) -> JacobianElement {
            return JacobianElement::diagonal(Vector::Ones(z.size()));
          },
          [&](const ProxSpec::L1& f) -> JacobianElement {
            // Derivative of the soft threshold is 1 where |z_j| > t and 0
            // where |z_j| < t; the tie |z_j| == t takes 0.
            const double t = f.weight / c;
            Vector d(z.size());
            for (Index j = 0; j < z.size(); ++j) d[j] = std::abs(z[j]) > t ? 1.0 : 0.0;
            return JacobianElement::diagonal(d);
          },
          [&](const ProxSpec::GroupL21& f) -> JacobianElement {
            // Outside the ball c r > 1 the shrink map is differentiable with
            // Jacobian I2 - (1 / (c r^3)) [z2^2, -z1 z2; -z1 z2, z1^2] per
            // pair; inside (and on the tie c r == 1) the zero block is taken.
            const Index p = f.pairs;
            Vector d00 = Vector::Zero(p), d01 = Vector::Zero(p), d11 = Vector::Zero(p);
            for (Index i = 0; i < p; ++i) {
              const double z1 = z[i], z2 = z[i + p];
              const double r = std::hypot(z1, z2);
              if (c * r > 1.0) {
                const double s = 1.0 / (c * r * r * r);
                d00[i] = 1.0 - s * z2 * z2;
                d01[i] = s * z1 * z2;
                d11[i] = 1.0 - s * z1 * z1;
              }
            }
            return JacobianElement::pair_blocks(std::move(d00), std::move(d01), std::move(d11));
          },
          [&](const ProxSpec::IndicatorNonpositive&) -> JacobianElement {
            Vector d(z.size());
            for (Index j = 0; j < z.size(); ++j) d[j] = z[j] < 0.0 ? 1.0 : 0.0;
            return JacobianElement::diagonal(d);
          },
          [&](const ProxSpec::AffineShifted& f) -> JacobianElement {
            // prox(z) = inner_prox(z - shift) + shift, so Jacobians coincide.
            return prox_jacobian(*f.inner, z - f.shift, c);
          },
          [&](const ProxSpec::Scaled& f) -> JacobianElement {
            // prox(z) = (inner_prox(alpha z + beta) - beta) / alpha; the chain
            // rule cancels the two alpha factors.
            return prox_jacobian(*f.inner, f.alpha * z + f.beta, scaled_inner_c(f, c));
          },
          [&](const ProxSpec::BlockSum& f) -> JacobianElement {
            std::vector<JacobianElement> parts;
            parts.reserve(f.specs.size());
            for (std::size_t k = 0; k < f.specs.size(); ++k)
              parts.push_back(prox_jacobian(f.specs[k], z.segment(f.starts[k], f.lens[k]), c));
            return JacobianElement::compound(std::move(parts), f.starts, f.dim);
          },
      },
      spec.node());
}

Vector conjugate_prox(const ProxSpec& spec, const Vector& z, double c) {
  check_c(c);
  check_dim(spec, z);
  return z - c * prox_eval(spec, z / c, c);
}

}  // namespace proxmm
