#pragma once

#include <ostream>
#include <stdexcept>

namespace proxmm {

// Extended real value: a finite double or +infinity, kept as an explicit tag so
// arithmetic never relies on IEEE inf propagation. Convex function values use
// this type; -infinity never occurs for proper convex functions.
class ExtReal {
 public:
  ExtReal() = default;
  ExtReal(double v) : finite_(true), value_(v) {}  // NOLINT: implicit by design

  static ExtReal infinity() {
    ExtReal r;
    r.finite_ = false;
    return r;
  }

  bool is_finite() const { return finite_; }

  // Finite value; throws if +infinity.
  double value() const {
    if (!finite_) throw std::logic_error("ExtReal: value() on +infinity");
    return value_;
  }

  double value_or(double inf_substitute) const { return finite_ ? value_ : inf_substitute; }

  ExtReal& operator+=(const ExtReal& o) {
    if (!o.finite_) finite_ = false;
    if (finite_) value_ += o.value_;
    return *this;
  }

  friend ExtReal operator+(ExtReal a, const ExtReal& b) { return a += b; }

  // a * x + b for a > 0 (positive scaling preserves +infinity).
  ExtReal scale_add(double a, double b) const {
    if (!finite_) return infinity();
    return ExtReal(a * value_ + b);
  }

  friend bool operator==(const ExtReal& a, const ExtReal& b) {
    if (a.finite_ != b.finite_) return false;
    return !a.finite_ || a.value_ == b.value_;
  }

  friend std::ostream& operator<<(std::ostream& os, const ExtReal& v) {
    if (v.finite_) return os << v.value_;
    return os << "inf";
  }

 private:
  bool finite_ = true;
  double value_ = 0.0;
};

}  // namespace proxmm
