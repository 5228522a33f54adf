#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "fenchelkit/core/errors.hpp"
#include "fenchelkit/core/expression.hpp"
#include "fenchelkit/core/vec.hpp"

namespace fenchelkit {

/// Continuous scalar coefficient a(x), p(x), omega(x) on the closed unit
/// square (or interval).
///
/// Three kinds: a constant, a closed-form expression, or node samples on a
/// uniform grid with (bi)linear interpolation. The range [lower, upper] is
/// exact for constants and grid samples (interpolation attains its extremes
/// at nodes) and sampled on a 129^n lattice for expressions.
class CoefficientField {
 public:
  struct GridSamples {
    int n;
    int cells;  // per axis
    std::vector<double> values;  // (cells+1)^n, x1 fastest
  };

  CoefficientField() : CoefficientField(constant(0.0)) {}

  static CoefficientField constant(double v) {
    if (!std::isfinite(v)) throw ValidationError("coefficient constant must be finite");
    return CoefficientField(Data{v}, v, v, std::to_string(v));
  }

  static CoefficientField expression(const std::string& text, int n) {
    Expression e = Expression::parse(text);
    double lo = INFINITY, hi = -INFINITY;
    const int m = 128;
    const int ny = n == 2 ? m : 0;
    for (int j = 0; j <= ny; ++j)
      for (int i = 0; i <= m; ++i) {
        const Vec2N x = n == 2 ? Vec2N(double(i) / m, double(j) / m) : Vec2N(double(i) / m);
        const double v = e(x);
        if (!std::isfinite(v))
          throw ValidationError("coefficient '" + text + "' is not finite at " + to_string(x));
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    return CoefficientField(Data{std::move(e)}, lo, hi, text);
  }

  static CoefficientField samples(GridSamples g) {
    const std::size_t per_axis = static_cast<std::size_t>(g.cells) + 1;
    const std::size_t expected = g.n == 2 ? per_axis * per_axis : per_axis;
    if (g.cells < 1 || g.values.size() != expected)
      throw ValidationError("coefficient grid: expected " + std::to_string(expected) + " samples");
    for (double v : g.values)
      if (!std::isfinite(v)) throw ValidationError("coefficient grid: non-finite sample");
    const auto [lo, hi] = std::minmax_element(g.values.begin(), g.values.end());
    const double l = *lo, h = *hi;
    return CoefficientField(Data{std::make_shared<const GridSamples>(std::move(g))}, l, h,
                            "grid samples");
  }

  double operator()(const Vec2N& x) const {
    if (const double* c = std::get_if<double>(&data_)) return *c;
    if (const Expression* e = std::get_if<Expression>(&data_)) return (*e)(x);
    return interpolate(*std::get<std::shared_ptr<const GridSamples>>(data_), x);
  }

  double lower() const { return lower_; }
  double upper() const { return upper_; }
  bool is_constant() const { return std::holds_alternative<double>(data_); }
  const std::string& describe() const { return description_; }

 private:
  using Data = std::variant<double, Expression, std::shared_ptr<const GridSamples>>;

  CoefficientField(Data d, double lo, double hi, std::string desc)
      : data_(std::move(d)), lower_(lo), upper_(hi), description_(std::move(desc)) {}

  static double interpolate(const GridSamples& g, const Vec2N& x) {
    const int m = g.cells;
    auto locate = [m](double t, int& i, double& w) {
      t = std::clamp(t, 0.0, 1.0) * m;
      i = std::min(static_cast<int>(t), m - 1);
      w = t - i;
    };
    int i, j = 0;
    double wx, wy = 0.0;
    locate(x[0], i, wx);
    const std::size_t stride = static_cast<std::size_t>(m) + 1;
    auto at = [&](int a, int b) {
      return g.values[static_cast<std::size_t>(a) + stride * static_cast<std::size_t>(b)];
    };
    if (g.n == 1) return (1 - wx) * at(i, 0) + wx * at(i + 1, 0);
    locate(x[1], j, wy);
    return (1 - wy) * ((1 - wx) * at(i, j) + wx * at(i + 1, j)) +
           wy * ((1 - wx) * at(i, j + 1) + wx * at(i + 1, j + 1));
  }

  Data data_;
  double lower_, upper_;
  std::string description_;
};

}  // namespace fenchelkit
