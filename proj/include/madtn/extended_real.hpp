#pragma once

#include <cmath>
#include <compare>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

namespace madtn {

/// Absolute tolerance, in seconds, for every time comparison in the library.
inline constexpr double kTimeTolerance = 1e-9;

/// A real number extended with -inf and +inf.
///
/// Arithmetic rules:
///   finite + finite = finite
///   +inf + x = +inf   for any x other than -inf
///   -inf + x = -inf   for any x other than +inf
///   +inf + -inf       is undefined and throws std::domain_error
///   -(+inf) = -inf, -(-inf) = +inf
/// Ordering is total: -inf < every finite < +inf.
class ExtendedReal {
 public:
  enum class Kind { NegInf, Finite, PosInf };

  constexpr ExtendedReal() = default;
  ExtendedReal(double value) : value_(value) {  // NOLINT: implicit by intent
    if (std::isnan(value)) throw std::domain_error("ExtendedReal: NaN");
    if (std::isinf(value)) {
      kind_ = value > 0 ? Kind::PosInf : Kind::NegInf;
      value_ = 0.0;
    }
  }

  static constexpr ExtendedReal pos_inf() { return ExtendedReal(Kind::PosInf); }
  static constexpr ExtendedReal neg_inf() { return ExtendedReal(Kind::NegInf); }

  constexpr Kind kind() const { return kind_; }
  constexpr bool is_finite() const { return kind_ == Kind::Finite; }
  constexpr bool is_pos_inf() const { return kind_ == Kind::PosInf; }
  constexpr bool is_neg_inf() const { return kind_ == Kind::NegInf; }

  /// Finite payload; throws for infinities.
  double value() const {
    if (!is_finite()) throw std::domain_error("ExtendedReal: value() of an infinity");
    return value_;
  }

  /// IEEE double view (infinities map to +-HUGE_VAL). Only for reporting.
  double to_double() const {
    switch (kind_) {
      case Kind::NegInf: return -std::numeric_limits<double>::infinity();
      case Kind::PosInf: return std::numeric_limits<double>::infinity();
      case Kind::Finite: break;
    }
    return value_;
  }

  constexpr ExtendedReal operator-() const {
    switch (kind_) {
      case Kind::NegInf: return pos_inf();
      case Kind::PosInf: return neg_inf();
      case Kind::Finite: break;
    }
    ExtendedReal r;
    r.value_ = -value_;
    return r;
  }

  friend ExtendedReal operator+(ExtendedReal a, ExtendedReal b) {
    if ((a.is_pos_inf() && b.is_neg_inf()) || (a.is_neg_inf() && b.is_pos_inf())) {
      throw std::domain_error("ExtendedReal: +inf + -inf is undefined");
    }
    if (a.is_pos_inf() || b.is_pos_inf()) return pos_inf();
    if (a.is_neg_inf() || b.is_neg_inf()) return neg_inf();
    return ExtendedReal(a.value_ + b.value_);
  }

  friend ExtendedReal operator-(ExtendedReal a, ExtendedReal b) { return a + (-b); }

  friend constexpr bool operator==(const ExtendedReal& a, const ExtendedReal& b) {
    return a.kind_ == b.kind_ && a.value_ == b.value_;
  }

  friend constexpr std::partial_ordering operator<=>(const ExtendedReal& a, const ExtendedReal& b) {
    if (a.kind_ != b.kind_) return static_cast<int>(a.kind_) <=> static_cast<int>(b.kind_);
    return a.value_ <=> b.value_;
  }

  std::string to_string() const {
    switch (kind_) {
      case Kind::NegInf: return "-inf";
      case Kind::PosInf: return "+inf";
      case Kind::Finite: break;
    }
    std::ostringstream out;
    out << value_;
    return out.str();
  }

 private:
  constexpr explicit ExtendedReal(Kind kind) : kind_(kind) {}

  Kind kind_ = Kind::Finite;
  double value_ = 0.0;
};

inline ExtendedReal min(ExtendedReal a, ExtendedReal b) { return b < a ? b : a; }
inline ExtendedReal max(ExtendedReal a, ExtendedReal b) { return a < b ? b : a; }

}  // namespace madtn
