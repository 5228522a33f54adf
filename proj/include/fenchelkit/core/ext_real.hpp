#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace fenchelkit {

/// Extended real in (-inf, +inf]: a finite double or an explicit +inf state.
/// Never NaN.
class ExtReal {
 public:
  constexpr ExtReal() = default;
  explicit ExtReal(double v) : value_(v) {
    if (std::isnan(v)) throw std::domain_error("ExtReal: NaN");
    if (v == std::numeric_limits<double>::infinity()) infinite_ = true;
    if (v == -std::numeric_limits<double>::infinity())
      throw std::domain_error("ExtReal: -inf is not representable");
  }

  static ExtReal infinity() {
    ExtReal r;
    r.infinite_ = true;
    r.value_ = std::numeric_limits<double>::infinity();
    return r;
  }

  bool is_infinite() const { return infinite_; }
  bool is_finite() const { return !infinite_; }

  /// Finite value; throws when infinite.
  double value() const {
    if (infinite_) throw std::domain_error("ExtReal::value on +inf");
    return value_;
  }
  /// Value as a double, mapping the infinite state to +inf.
  double as_double() const { return value_; }

  friend bool operator<=(const ExtReal& a, const ExtReal& b) {
    if (b.infinite_) return true;
    if (a.infinite_) return false;
    return a.value_ <= b.value_;
  }
  friend bool operator<(const ExtReal& a, const ExtReal& b) { return !(b <= a); }

  std::string str() const { return infinite_ ? std::string("INF") : std::to_string(value_); }

 private:
  double value_ = 0.0;
  bool infinite_ = false;
};

}  // namespace fenchelkit
