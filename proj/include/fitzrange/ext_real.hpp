#pragma once

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace fitzrange {

/// Extended real number: a finite double, +inf or -inf.
///
/// Infinities are carried as IEEE infinities so that indicator functions
/// conjugate exactly; NaN is never a valid state. Adding +inf and -inf is
/// rejected with std::domain_error rather than producing NaN.
class ExtReal {
 public:
  constexpr ExtReal() = default;
  constexpr ExtReal(double v) : v_(v) {  // NOLINT: implicit from double
    if (v != v) throw std::domain_error("ExtReal: NaN is not an extended real");
  }

  static constexpr ExtReal inf() { return ExtReal(std::numeric_limits<double>::infinity()); }
  static constexpr ExtReal neg_inf() { return ExtReal(-std::numeric_limits<double>::infinity()); }

  constexpr double value() const { return v_; }
  constexpr bool is_finite() const {
    return v_ != std::numeric_limits<double>::infinity() && v_ != -std::numeric_limits<double>::infinity();
  }
  constexpr bool is_pos_inf() const { return v_ == std::numeric_limits<double>::infinity(); }
  constexpr bool is_neg_inf() const { return v_ == -std::numeric_limits<double>::infinity(); }

  friend ExtReal operator+(ExtReal a, ExtReal b) {
    if ((a.is_pos_inf() && b.is_neg_inf()) || (a.is_neg_inf() && b.is_pos_inf()))
      throw std::domain_error("ExtReal: (+inf) + (-inf) is undefined");
    return ExtReal(a.v_ + b.v_);
  }
  friend ExtReal operator-(ExtReal a) { return ExtReal(-a.v_); }
  friend ExtReal operator-(ExtReal a, ExtReal b) { return a + (-b); }
  ExtReal& operator+=(ExtReal o) { return *this = *this + o; }

  /// Product with a finite scalar. 0 * (+-inf) is taken as 0 (the convex
  /// analysis convention for 0 * indicator).
  friend ExtReal operator*(double k, ExtReal a) {
    if (!a.is_finite() && k == 0.0) return ExtReal(0.0);
    return ExtReal(k * a.v_);
  }

  friend constexpr bool operator==(ExtReal a, ExtReal b) { return a.v_ == b.v_; }
  friend constexpr auto operator<=>(ExtReal a, ExtReal b) { return a.v_ <=> b.v_; }

  friend std::ostream& operator<<(std::ostream& os, ExtReal a) {
    if (a.is_pos_inf()) return os << "+inf";
    if (a.is_neg_inf()) return os << "-inf";
    return os << a.v_;
  }

 private:
  double v_ = 0.0;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// |a - b| <= tol, with equal infinities comparing equal.
inline bool approx_equal(ExtReal a, ExtReal b, double tol) {
  if (!a.is_finite() || !b.is_finite()) return a == b;
  return std::abs(a.value() - b.value()) <= tol;
}

inline ExtReal min(ExtReal a, ExtReal b) { return a <= b ? a : b; }
inline ExtReal max(ExtReal a, ExtReal b) { return a >= b ? a : b; }

}  // namespace fitzrange
