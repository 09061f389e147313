#pragma once

#include <cmath>
#include <limits>
#include <ostream>

#include "pensplit/errors.hpp"

namespace pensplit {

/// Value in R ∪ {+∞}, as produced by support functions, conjugates and
/// Fitzpatrick evaluations. +∞ is an explicit tag; it never leaks into
/// vector arithmetic.
class ExtendedReal {
public:
  ExtendedReal() : value_(0.0), finite_(true) {}

  static ExtendedReal finite(double v) {
    ExtendedReal r;
    r.value_ = v;
    r.finite_ = true;
    return r;
  }
  static ExtendedReal infinity() {
    ExtendedReal r;
    r.value_ = std::numeric_limits<double>::infinity();
    r.finite_ = false;
    return r;
  }

  bool is_finite() const { return finite_; }

  /// Finite payload; throws if the value is +∞.
  double value() const {
    if (!finite_) throw UsageError("ExtendedReal: +infinity has no finite value");
    return value_;
  }

  /// Finite payload or +inf as a double (for printing / comparisons).
  double as_double() const {
    return finite_ ? value_ : std::numeric_limits<double>::infinity();
  }

  ExtendedReal operator+(const ExtendedReal& o) const {
    if (!finite_ || !o.finite_) return infinity();
    return finite(value_ + o.value_);
  }
  ExtendedReal operator-(double rhs) const {
    if (!finite_) return infinity();
    return finite(value_ - rhs);
  }

  bool operator<(double rhs) const { return finite_ && value_ < rhs; }
  bool operator<=(double rhs) const { return finite_ && value_ <= rhs; }
  bool operator>=(double rhs) const { return !finite_ || value_ >= rhs; }

  friend std::ostream& operator<<(std::ostream& os, const ExtendedReal& r) {
    if (r.finite_) return os << r.value_;
    return os << "+inf";
  }

private:
  double value_;
  bool finite_;
};

}  // namespace pensplit
