#include "proxmm/operators.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "proxmm/splitmix.hpp"

namespace proxmm {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

LinearOperator LinearOperator::identity(Index n) {
  if (n < 1) throw std::invalid_argument("LinearOperator::identity: n must be >= 1");
  return LinearOperator(Node{Identity{n}});
}

LinearOperator LinearOperator::dense(Matrix mat) {
  if (mat.rows() < 1 || mat.cols() < 1)
    throw std::invalid_argument("LinearOperator::dense: empty matrix");
  return LinearOperator(Node{Dense{std::move(mat)}});
}

LinearOperator LinearOperator::grad2d_periodic(Index side) {
  if (side < 1) throw std::invalid_argument("LinearOperator::grad2d_periodic: side must be >= 1");
  return LinearOperator(Node{Grad2DPeriodic{side}});
}

LinearOperator LinearOperator::vstack(std::vector<LinearOperator> parts) {
  if (parts.empty()) throw std::invalid_argument("LinearOperator::vstack: no parts");
  const Index n = parts.front().domain_dim();
  for (const auto& p : parts)
    if (p.domain_dim() != n)
      throw std::invalid_argument("LinearOperator::vstack: domain dimensions differ");
  return LinearOperator(Node{VStack{std::move(parts)}});
}

Index LinearOperator::domain_dim() const {
  return std::visit(Overloaded{
                        [](const Identity& v) { return v.n; },
                        [](const Dense& v) { return v.mat.cols(); },
                        [](const Grad2DPeriodic& v) { return v.side * v.side; },
                        [](const VStack& v) { return v.parts.front().domain_dim(); },
                    },
                    node_);
}

Index LinearOperator::codomain_dim() const {
  return std::visit(Overloaded{
                        [](const Identity& v) { return v.n; },
                        [](const Dense& v) { return v.mat.rows(); },
                        [](const Grad2DPeriodic& v) { return 2 * v.side * v.side; },
                        [](const VStack& v) {
                          Index m = 0;
                          for (const auto& p : v.parts) m += p.codomain_dim();
                          return m;
                        },
                    },
                    node_);
}

Vector LinearOperator::apply(const Vector& x) const {
  if (x.size() != domain_dim())
    throw std::invalid_argument("LinearOperator::apply: dimension mismatch");
  return std::visit(
      Overloaded{
          [&](const Identity&) -> Vector { return x; },
          [&](const Dense& v) -> Vector { return v.mat * x; },
          [&](const Grad2DPeriodic& v) -> Vector {
            const Index n = v.side, n2 = n * n;
            Vector out(2 * n2);
            for (Index j = 0; j < n; ++j) {
              const Index jp = (j + 1 == n) ? 0 : j + 1;
              for (Index i = 0; i < n; ++i) {
                const Index ip = (i + 1 == n) ? 0 : i + 1;
                const Index idx = i + n * j;
                out[idx] = x[ip + n * j] - x[idx];
                out[n2 + idx] = x[i + n * jp] - x[idx];
              }
            }
            return out;
          },
          [&](const VStack& v) -> Vector {
            Vector out(codomain_dim());
            Index at = 0;
            for (const auto& p : v.parts) {
              out.segment(at, p.codomain_dim()) = p.apply(x);
              at += p.codomain_dim();
            }
            return out;
          },
      },
      node_);
}

Vector LinearOperator::adjoint_apply(const Vector& y) const {
  if (y.size() != codomain_dim())
    throw std::invalid_argument("LinearOperator::adjoint_apply: dimension mismatch");
  return std::visit(
      Overloaded{
          [&](const Identity&) -> Vector { return y; },
          [&](const Dense& v) -> Vector { return v.mat.transpose() * y; },
          [&](const Grad2DPeriodic& v) -> Vector {
            // Adjoint of the periodic forward difference is the negative
            // backward difference: (D^T u)_i = u_{i-1 mod n} - u_i per axis.
            const Index n = v.side, n2 = n * n;
            Vector out(n2);
            for (Index j = 0; j < n; ++j) {
              const Index jm = (j == 0) ? n - 1 : j - 1;
              for (Index i = 0; i < n; ++i) {
                const Index im = (i == 0) ? n - 1 : i - 1;
                const Index idx = i + n * j;
                out[idx] = (y[im + n * j] - y[idx]) + (y[n2 + i + n * jm] - y[n2 + idx]);
              }
            }
            return out;
          },
          [&](const VStack& v) -> Vector {
            Vector out = Vector::Zero(domain_dim());
            Index at = 0;
            for (const auto& p : v.parts) {
              out += p.adjoint_apply(y.segment(at, p.codomain_dim()));
              at += p.codomain_dim();
            }
            return out;
          },
      },
      node_);
}

double LinearOperator::opnorm_sq_upper(int iters) const {
  if (iters < 1) throw std::invalid_argument("LinearOperator::opnorm_sq_upper: iters must be >= 1");
  const Index n = domain_dim();
  SplitMix64 rng(0x5DEECE66DULL);
  Vector v(n);
  for (Index j = 0; j < n; ++j) v[j] = 2.0 * rng.next_double() - 1.0;
  const double vn = v.norm();
  if (vn == 0.0) return 0.0;
  v /= vn;
  double lambda = 0.0;
  for (int it = 0; it < iters; ++it) {
    const Vector w = adjoint_apply(apply(v));
    lambda = v.dot(w);  // Rayleigh quotient, monotone under power iteration
    const double wn = w.norm();
    if (wn == 0.0) return 0.0;
    v = w / wn;
  }
  return 1.01 * lambda;
}

}  // namespace proxmm
