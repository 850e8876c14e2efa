#include "proxmm/lagrangian.hpp"

#include <stdexcept>

namespace proxmm {

namespace {

void check_state(const Problem& p, const IterateState& s) {
  if (s.x.size() != p.n())
    throw std::invalid_argument("lagrangian: x dimension mismatch");
  if (s.lambda.size() != p.m())
    throw std::invalid_argument("lagrangian: lambda dimension mismatch");
  if (!(s.c > 0.0)) throw std::invalid_argument("lagrangian: c must be positive");
}

}  // namespace

double aug_lagrangian_value(const Problem& p, const IterateState& s) {
  check_state(p, s);
  const Vector w = p.e.apply(s.x) + s.lambda / s.c;
  return p.f.value(s.x) + envelope_eval(p.phi, w, s.c) - s.lambda.squaredNorm() / (2.0 * s.c);
}

Vector aug_lagrangian_grad_x(const Problem& p, const IterateState& s) {
  check_state(p, s);
  const Vector w = p.e.apply(s.x) + s.lambda / s.c;
  return p.f.gradient(s.x) + s.c * p.e.adjoint_apply(w - prox_eval(p.phi, w, s.c));
}

Vector multiplier_update(const Problem& p, const IterateState& s, const Vector& x_next) {
  check_state(p, s);
  if (x_next.size() != p.n())
    throw std::invalid_argument("multiplier_update: x_next dimension mismatch");
  const Vector ex = p.e.apply(x_next);
  return s.lambda + s.c * (ex - prox_eval(p.phi, ex + s.lambda / s.c, s.c));
}

KktResidual kkt_residual(const Problem& p, const IterateState& s) {
  check_state(p, s);
  const Vector ex = p.e.apply(s.x);
  KktResidual r;
  r.stationarity = (p.f.gradient(s.x) + p.e.adjoint_apply(s.lambda)).norm();
  r.feasibility = (ex - prox_eval(p.phi, ex + s.lambda / s.c, s.c)).norm();
  return r;
}

}  // namespace proxmm
