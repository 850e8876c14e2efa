#include "proxmm/problem.hpp"

#include <stdexcept>
#include <utility>

#include <Eigen/QR>

namespace proxmm {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

SmoothSpec SmoothSpec::zero(Index n) {
  if (n < 1) throw std::invalid_argument("SmoothSpec::zero: n must be >= 1");
  return SmoothSpec(Node{Zero{n}});
}

SmoothSpec SmoothSpec::quadratic(Matrix a, Vector b) {
  if (a.rows() != b.size())
    throw std::invalid_argument("SmoothSpec::quadratic: A rows must match b size");
  if (a.cols() < 1) throw std::invalid_argument("SmoothSpec::quadratic: A has no columns");
  return SmoothSpec(Node{Quadratic{std::move(a), std::move(b)}});
}

Index SmoothSpec::dim() const {
  return std::visit(Overloaded{
                        [](const Zero& v) { return v.n; },
                        [](const Quadratic& v) { return v.a.cols(); },
                    },
                    node_);
}

double SmoothSpec::value(const Vector& x) const {
  if (x.size() != dim()) throw std::invalid_argument("SmoothSpec::value: dimension mismatch");
  return std::visit(Overloaded{
                        [](const Zero&) { return 0.0; },
                        [&](const Quadratic& v) { return 0.5 * (v.a * x - v.b).squaredNorm(); },
                    },
                    node_);
}

Vector SmoothSpec::gradient(const Vector& x) const {
  if (x.size() != dim()) throw std::invalid_argument("SmoothSpec::gradient: dimension mismatch");
  return std::visit(Overloaded{
                        [&](const Zero&) -> Vector { return Vector::Zero(x.size()); },
                        [&](const Quadratic& v) -> Vector {
                          return v.a.transpose() * (v.a * x - v.b);
                        },
                    },
                    node_);
}

Vector SmoothSpec::hessian_apply(const Vector& x, const Vector& d) const {
  if (x.size() != dim() || d.size() != dim())
    throw std::invalid_argument("SmoothSpec::hessian_apply: dimension mismatch");
  return std::visit(Overloaded{
                        [&](const Zero&) -> Vector { return Vector::Zero(d.size()); },
                        [&](const Quadratic& v) -> Vector {
                          return v.a.transpose() * (v.a * d);
                        },
                    },
                    node_);
}

double SmoothSpec::grad_lipschitz_upper() const {
  return std::visit(Overloaded{
                        [](const Zero&) { return 0.0; },
                        [](const Quadratic& v) {
                          return LinearOperator::dense(v.a).opnorm_sq_upper(200);
                        },
                    },
                    node_);
}

bool SmoothSpec::is_strongly_convex() const {
  return std::visit(Overloaded{
                        [](const Zero&) { return false; },
                        [](const Quadratic& v) {
                          Eigen::ColPivHouseholderQR<Matrix> qr(v.a);
                          return qr.rank() == v.a.cols();
                        },
                    },
                    node_);
}

Problem::Problem(SmoothSpec f_in, LinearOperator e_in, ProxSpec phi_in)
    : f(std::move(f_in)), e(std::move(e_in)), phi(std::move(phi_in)) {
  if (f.dim() != e.domain_dim())
    throw std::invalid_argument("Problem: smooth term and operator domain disagree");
  if (!phi.accepts(e.codomain_dim()))
    throw std::invalid_argument("Problem: phi incompatible with operator codomain");
}

ExtReal objective_value(const Problem& p, const Vector& x) {
  if (x.size() != p.n()) throw std::invalid_argument("objective_value: dimension mismatch");
  return ExtReal(p.f.value(x)) + phi_value(p.phi, p.e.apply(x));
}

}  // namespace proxmm
