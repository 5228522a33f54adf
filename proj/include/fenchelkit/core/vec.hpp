#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace fenchelkit {

/// A point or direction in R^n for n in {1, 2}.
///
/// Used for both spatial points x in the domain and gradient-space vectors
/// (xi, zeta, z). Arithmetic between vectors of different dimension is a
/// programming error and throws.
struct Vec2N {
  std::array<double, 2> c{0.0, 0.0};
  int n = 2;

  constexpr Vec2N() = default;
  constexpr explicit Vec2N(double a) : c{a, 0.0}, n(1) {}
  constexpr Vec2N(double a, double b) : c{a, b}, n(2) {}

  static constexpr Vec2N zero(int dim) { return dim == 1 ? Vec2N(0.0) : Vec2N(0.0, 0.0); }
  static constexpr Vec2N unit(int dim, int axis) {
    Vec2N v = zero(dim);
    v.c[static_cast<std::size_t>(axis)] = 1.0;
    return v;
  }
  /// Unit vector at angle theta (2D) or sign(theta) direction (1D).
  static Vec2N direction(int dim, double theta) {
    if (dim == 1) return Vec2N(theta < 0.0 ? -1.0 : 1.0);
    return {std::cos(theta), std::sin(theta)};
  }

  constexpr double operator[](int i) const { return c[static_cast<std::size_t>(i)]; }
  constexpr double& operator[](int i) { return c[static_cast<std::size_t>(i)]; }

  bool finite() const { return std::isfinite(c[0]) && std::isfinite(c[1]); }
};

namespace detail {
inline void require_same_dim(const Vec2N& a, const Vec2N& b) {
  if (a.n != b.n) throw std::invalid_argument("Vec2N dimension mismatch");
}
}  // namespace detail

inline Vec2N operator+(Vec2N a, const Vec2N& b) {
  detail::require_same_dim(a, b);
  a.c[0] += b.c[0];
  a.c[1] += b.c[1];
  return a;
}
inline Vec2N operator-(Vec2N a, const Vec2N& b) {
  detail::require_same_dim(a, b);
  a.c[0] -= b.c[0];
  a.c[1] -= b.c[1];
  return a;
}
inline Vec2N operator-(Vec2N a) {
  a.c[0] = -a.c[0];
  a.c[1] = -a.c[1];
  return a;
}
inline Vec2N operator*(double s, Vec2N a) {
  a.c[0] *= s;
  a.c[1] *= s;
  return a;
}
inline Vec2N operator*(Vec2N a, double s) { return s * a; }
inline Vec2N operator/(Vec2N a, double s) { return (1.0 / s) * a; }
inline Vec2N& operator+=(Vec2N& a, const Vec2N& b) { return a = a + b; }
inline Vec2N& operator-=(Vec2N& a, const Vec2N& b) { return a = a - b; }

inline double dot(const Vec2N& a, const Vec2N& b) {
  detail::require_same_dim(a, b);
  return a.c[0] * b.c[0] + a.c[1] * b.c[1];
}
inline double norm(const Vec2N& a) { return std::hypot(a.c[0], a.c[1]); }

/// Projection onto the closed ball of radius r centred at the origin.
inline Vec2N project_ball(const Vec2N& v, double r) {
  const double len = norm(v);
  return len <= r ? v : (r / len) * v;
}

inline std::string to_string(const Vec2N& v) {
  std::string s = "(" + std::to_string(v.c[0]);
  if (v.n == 2) s += ", " + std::to_string(v.c[1]);
  return s + ")";
}

/// Symmetric 2x2 matrix [[a, b], [b, d]]; in 1D only `a` is used.
struct Sym2 {
  double a = 0.0, b = 0.0, d = 0.0;
  int n = 2;

  Vec2N apply(const Vec2N& v) const {
    if (n == 1) return Vec2N(a * v[0]);
    return {a * v[0] + b * v[1], b * v[0] + d * v[1]};
  }

  /// Solves M x = r; returns false if M is not positive definite.
  bool solve_spd(const Vec2N& r, Vec2N& out) const {
    if (n == 1) {
      if (!(a > 0.0) || !std::isfinite(a)) return false;
      out = Vec2N(r[0] / a);
      return true;
    }
    const double det = a * d - b * b;
    if (!(a > 0.0) || !(det > 0.0) || !std::isfinite(det)) return false;
    out = Vec2N((d * r[0] - b * r[1]) / det, (a * r[1] - b * r[0]) / det);
    return true;
  }
};

}  // namespace fenchelkit
