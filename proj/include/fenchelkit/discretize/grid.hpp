#pragma once

#include <array>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "fenchelkit/core/errors.hpp"
#include "fenchelkit/core/expression.hpp"
#include "fenchelkit/core/vec.hpp"

namespace fenchelkit {

/// Uniform grid on [0,1]^n with N cells per axis. Nodes are numbered
/// i + (N+1) j and cells i + N j, with i along x1.
class Grid {
 public:
  Grid(int n, int N) : n_(n), N_(N), h_(1.0 / N) {
    if (n != 1 && n != 2) throw ValidationError("Grid: dimension must be 1 or 2");
    if (N < 4) throw ValidationError("Grid: need N >= 4 cells per axis, got " + std::to_string(N));
  }

  int dim() const { return n_; }
  int cells_per_axis() const { return N_; }
  double h() const { return h_; }
  double cell_volume() const { return n_ == 1 ? h_ : h_ * h_; }

  std::size_t nodes() const {
    const std::size_t m = static_cast<std::size_t>(N_) + 1;
    return n_ == 1 ? m : m * m;
  }
  std::size_t cells() const {
    const std::size_t m = static_cast<std::size_t>(N_);
    return n_ == 1 ? m : m * m;
  }

  std::size_t node(int i, int j = 0) const {
    return static_cast<std::size_t>(i) + static_cast<std::size_t>(N_ + 1) * static_cast<std::size_t>(j);
  }
  std::size_t cell(int i, int j = 0) const {
    return static_cast<std::size_t>(i) + static_cast<std::size_t>(N_) * static_cast<std::size_t>(j);
  }
  std::array<int, 2> node_coords(std::size_t idx) const {
    const int m = N_ + 1;
    return {static_cast<int>(idx % static_cast<std::size_t>(m)), n_ == 1 ? 0 : static_cast<int>(idx / static_cast<std::size_t>(m))};
  }
  std::array<int, 2> cell_coords(std::size_t idx) const {
    return {static_cast<int>(idx % static_cast<std::size_t>(N_)), n_ == 1 ? 0 : static_cast<int>(idx / static_cast<std::size_t>(N_))};
  }

  Vec2N node_point(std::size_t idx) const {
    const auto [i, j] = node_coords(idx);
    return n_ == 1 ? Vec2N(i * h_) : Vec2N(i * h_, j * h_);
  }
  Vec2N cell_center(std::size_t idx) const {
    const auto [i, j] = cell_coords(idx);
    return n_ == 1 ? Vec2N((i + 0.5) * h_) : Vec2N((i + 0.5) * h_, (j + 0.5) * h_);
  }

  bool on_boundary(std::size_t idx) const {
    const auto [i, j] = node_coords(idx);
    if (i == 0 || i == N_) return true;
    return n_ == 2 && (j == 0 || j == N_);
  }

  bool operator==(const Grid& o) const { return n_ == o.n_ && N_ == o.N_; }
  bool operator!=(const Grid& o) const { return !(*this == o); }

 private:
  int n_;
  int N_;
  double h_;
};

/// Values at the grid nodes.
class ScalarField {
 public:
  explicit ScalarField(const Grid& g, double fill = 0.0) : grid_(g), v_(g.nodes(), fill) {}
  ScalarField(const Grid& g, std::vector<double> values) : grid_(g), v_(std::move(values)) {
    if (v_.size() != g.nodes())
      throw ValidationError("ScalarField: expected " + std::to_string(g.nodes()) + " values, got " +
                            std::to_string(v_.size()));
    require_finite();
  }

  static ScalarField from_expression(const Grid& g, const Expression& e) {
    ScalarField f(g);
    for (std::size_t i = 0; i < g.nodes(); ++i) f.v_[i] = e(g.node_point(i));
    f.require_finite();
    return f;
  }
  template <class Fn>
  static ScalarField from_function(const Grid& g, const Fn& fn) {
    ScalarField f(g);
    for (std::size_t i = 0; i < g.nodes(); ++i) f.v_[i] = fn(g.node_point(i));
    f.require_finite();
    return f;
  }

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return v_.size(); }
  double operator[](std::size_t i) const { return v_[i]; }
  double& operator[](std::size_t i) { return v_[i]; }
  const std::vector<double>& values() const& { return v_; }
  std::vector<double>& values() & { return v_; }
  // by value on temporaries, so `for (x : make_field().values())` is safe
  std::vector<double> values() && { return std::move(v_); }

  void require_finite() const {
    for (std::size_t i = 0; i < v_.size(); ++i)
      if (!std::isfinite(v_[i]))
        throw ValidationError("ScalarField: non-finite value at node " + std::to_string(i));
  }

 private:
  Grid grid_;
  std::vector<double> v_;
};

/// One vector per cell.
class VectorField {
 public:
  explicit VectorField(const Grid& g) : grid_(g), v_(g.cells(), Vec2N::zero(g.dim())) {}

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return v_.size(); }
  const Vec2N& operator[](std::size_t c) const { return v_[c]; }
  Vec2N& operator[](std::size_t c) { return v_[c]; }
  const std::vector<Vec2N>& values() const& { return v_; }
  std::vector<Vec2N> values() && { return std::move(v_); }

 private:
  Grid grid_;
  std::vector<Vec2N> v_;
};

inline void require_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (a != b) throw ValidationError(std::string(what) + ": grid mismatch");
}

// vector-space helpers on nodal fields

inline ScalarField operator+(ScalarField a, const ScalarField& b) {
  require_same_grid(a.grid(), b.grid(), "ScalarField +");
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  return a;
}
inline ScalarField operator-(ScalarField a, const ScalarField& b) {
  require_same_grid(a.grid(), b.grid(), "ScalarField -");
  for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
  return a;
}
inline ScalarField operator*(double s, ScalarField a) {
  for (auto& x : a.values()) x *= s;
  return a;
}

inline double max_abs(const ScalarField& a) {
  double m = 0.0;
  for (double x : a.values()) m = std::max(m, std::abs(x));
  return m;
}

/// Nodal l1 norm weighted by the cell volume, a discrete L^1 norm.
inline double l1_norm(const ScalarField& a) {
  double s = 0.0;
  for (double x : a.values()) s += std::abs(x);
  return s * a.grid().cell_volume();
}

inline double inner(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid(), b.grid(), "inner");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

/// Midpoint-rule integral of |V| over the cells: sum |V_c| h^n.
inline double l1_norm(const VectorField& V) {
  double s = 0.0;
  for (const Vec2N& v : V.values()) s += norm(v);
  return s * V.grid().cell_volume();
}

}  // namespace fenchelkit
