#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "fenchelkit/core/errors.hpp"
#include "fenchelkit/core/ext_real.hpp"

namespace fenchelkit {

/// A convex piecewise-linear function of one variable given by samples.
///
/// Between nodes the function is the linear interpolant. Outside the
/// window [abscissae.front(), abscissae.back()] it continues affinely with
/// `left_slope` / `right_slope`; an infinite slope marks the function as
/// +inf on that side (the window edge is the end of the domain).
class SampledConvex1D {
 public:
  SampledConvex1D(std::vector<double> abscissae, std::vector<double> values,
                  ExtReal left_slope = ExtReal::infinity(),
                  ExtReal right_slope = ExtReal::infinity())
      : x_(std::move(abscissae)), f_(std::move(values)), left_(left_slope), right_(right_slope) {
    validate();
  }

  const std::vector<double>& abscissae() const { return x_; }
  const std::vector<double>& values() const { return f_; }
  const ExtReal& left_slope() const { return left_; }
  const ExtReal& right_slope() const { return right_; }
  std::size_t size() const { return x_.size(); }

  double chord_slope(std::size_t i) const { return (f_[i + 1] - f_[i]) / (x_[i + 1] - x_[i]); }

  ExtReal operator()(double s) const {
    if (s < x_.front()) {
      if (left_.is_infinite()) return ExtReal::infinity();
      return ExtReal(f_.front() + left_.value() * (s - x_.front()));
    }
    if (s > x_.back()) {
      if (right_.is_infinite()) return ExtReal::infinity();
      return ExtReal(f_.back() + right_.value() * (s - x_.back()));
    }
    const auto it = std::upper_bound(x_.begin(), x_.end(), s);
    std::size_t i = static_cast<std::size_t>(it - x_.begin());
    i = std::clamp<std::size_t>(i, 1, x_.size() - 1) - 1;
    const double w = (s - x_[i]) / (x_[i + 1] - x_[i]);
    return ExtReal((1 - w) * f_[i] + w * f_[i + 1]);
  }

  /// A subgradient at s (the slope of the segment containing s).
  double slope_at(double s) const {
    if (s < x_.front()) return left_.is_finite() ? left_.value() : -INFINITY;
    if (s > x_.back()) return right_.is_finite() ? right_.value() : INFINITY;
    const auto it = std::upper_bound(x_.begin(), x_.end(), s);
    std::size_t i = static_cast<std::size_t>(it - x_.begin());
    i = std::clamp<std::size_t>(i, 1, x_.size() - 1) - 1;
    return chord_slope(i);
  }

  /// Relative tolerance for chord-slope comparisons.
  static constexpr double kSlopeTol = 1e-9;

 private:
  void validate() const {
    if (x_.size() < 3 || x_.size() != f_.size())
      throw ValidationError("SampledConvex1D: need N >= 3 abscissae with matching values");
    for (std::size_t i = 0; i < x_.size(); ++i) {
      if (!std::isfinite(x_[i]) || !std::isfinite(f_[i]))
        throw ValidationError("SampledConvex1D: non-finite sample");
      if (i > 0 && !(x_[i] > x_[i - 1]))
        throw ValidationError("SampledConvex1D: abscissae must be strictly increasing");
    }
    auto tol = [](double a, double b) { return kSlopeTol * (1 + std::max(std::abs(a), std::abs(b))); };
    double prev = left_.is_finite() ? left_.value() : -INFINITY;
    for (std::size_t i = 0; i + 1 < x_.size(); ++i) {
      const double c = chord_slope(i);
      if (std::isfinite(prev) && c < prev - tol(c, prev))
        throw ValidationError("SampledConvex1D: chord slopes decrease at node " + std::to_string(i) +
                              " (input is not convex)");
      prev = c;
    }
    if (right_.is_finite() && right_.value() < prev - tol(prev, right_.value()))
      throw ValidationError("SampledConvex1D: right slope below last chord slope");
  }

  std::vector<double> x_, f_;
  ExtReal left_, right_;
};

/// Exact Legendre-Fenchel transform of the piecewise-linear function.
///
/// The conjugate of a convex piecewise-linear function is again
/// piecewise-linear: its breakpoints are the chord slopes of the input
/// (merged where equal) plus the finite boundary slopes, and its boundary
/// slopes are the window edges. Runs in O(N). Finite input slopes become
/// +inf sides of the output and vice versa, so applying the transform twice
/// returns the input nodes.
inline SampledConvex1D conjugate_1d(const SampledConvex1D& f) {
  const auto& x = f.abscissae();
  const auto& v = f.values();
  std::vector<double> s, fs;
  auto push = [&](double slope, std::size_t node) {
    const double value = slope * x[node] - v[node];
    if (!s.empty() &&
        slope - s.back() <= SampledConvex1D::kSlopeTol * (1 + std::abs(slope))) {
      // equal slopes: same breakpoint of the conjugate
      return;
    }
    s.push_back(slope);
    fs.push_back(value);
  };
  if (f.left_slope().is_finite()) push(f.left_slope().value(), 0);
  for (std::size_t i = 0; i + 1 < x.size(); ++i) push(f.chord_slope(i), i);
  if (f.right_slope().is_finite()) push(f.right_slope().value(), x.size() - 1);

  // a one- or two-piece conjugate still needs three nodes: add collinear
  // midpoints, which leave the interpolant unchanged
  while (s.size() < 3) {
    if (s.size() == 1) {
      // a single breakpoint only arises from affine input on a window
      s.push_back(s[0] + 1.0);
      fs.push_back(fs[0] + x.back());
      continue;
    }
    s.insert(s.begin() + 1, 0.5 * (s[0] + s[1]));
    fs.insert(fs.begin() + 1, 0.5 * (fs[0] + fs[1]));
  }

  const ExtReal left = f.left_slope().is_finite() ? ExtReal::infinity() : ExtReal(x.front());
  const ExtReal right = f.right_slope().is_finite() ? ExtReal::infinity() : ExtReal(x.back());
  return SampledConvex1D(std::move(s), std::move(fs), left, right);
}

/// Evaluates the conjugate max_i (s x_i - f_i) (with the affine tails) at
/// sorted query slopes by a single merge pass, O(N + M).
inline std::vector<ExtReal> conjugate_at(const SampledConvex1D& f, const std::vector<double>& slopes) {
  if (!std::is_sorted(slopes.begin(), slopes.end()))
    throw ValidationError("conjugate_at: query slopes must be sorted");
  const auto& x = f.abscissae();
  const auto& v = f.values();
  std::vector<ExtReal> out;
  out.reserve(slopes.size());
  std::size_t j = 0;
  for (double s : slopes) {
    if (f.left_slope().is_finite() && s < f.left_slope().value()) {
      out.push_back(ExtReal::infinity());
      continue;
    }
    if (f.right_slope().is_finite() && s > f.right_slope().value()) {
      out.push_back(ExtReal::infinity());
      continue;
    }
    while (j + 1 < x.size() && f.chord_slope(j) < s) ++j;
    out.push_back(ExtReal(s * x[j] - v[j]));
  }
  return out;
}

}  // namespace fenchelkit
