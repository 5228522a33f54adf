#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "fenchelkit/core/errors.hpp"
#include "fenchelkit/discretize/grid.hpp"

namespace fenchelkit {

enum class ConstraintKind { unconstrained, obstacle };

inline const char* to_string(ConstraintKind k) {
  return k == ConstraintKind::unconstrained ? "unconstrained" : "obstacle";
}

/// The discrete admissible set K: nodal fields equal to u0 on the boundary
/// and, for the obstacle kind, >= psi at the interior nodes where the
/// obstacle is active. Inactive nodes stand for psi = -inf.
class ConstraintSet {
 public:
  /// `boundary` is a full nodal field; only its boundary values are used.
  static ConstraintSet unconstrained(const ScalarField& boundary) {
    return ConstraintSet(boundary, std::nullopt, {});
  }

  static ConstraintSet with_obstacle(const ScalarField& boundary, const ScalarField& psi,
                                     std::vector<char> active = {}) {
    require_same_grid(boundary.grid(), psi.grid(), "ConstraintSet");
    if (active.empty()) active.assign(psi.size(), 1);
    if (active.size() != psi.size()) throw ValidationError("ConstraintSet: active flags size mismatch");
    return ConstraintSet(boundary, psi, std::move(active));
  }

  ConstraintKind kind() const { return psi_ ? ConstraintKind::obstacle : ConstraintKind::unconstrained; }
  const Grid& grid() const { return u0_.grid(); }
  const ScalarField& boundary_values() const { return u0_; }
  const std::optional<ScalarField>& obstacle() const { return psi_; }
  bool obstacle_active(std::size_t node) const { return psi_ && active_[node] != 0; }

  /// Boundary nodes set to u0; active interior nodes raised to psi.
  ScalarField project(ScalarField v) const {
    require_same_grid(grid(), v.grid(), "project_K");
    const Grid& g = grid();
    for (std::size_t i = 0; i < g.nodes(); ++i) {
      if (g.on_boundary(i))
        v[i] = u0_[i];
      else if (obstacle_active(i))
        v[i] = std::max(v[i], (*psi_)[i]);
    }
    return v;
  }

  bool contains(const ScalarField& v, double tol = 0.0) const {
    require_same_grid(grid(), v.grid(), "contains");
    const Grid& g = grid();
    for (std::size_t i = 0; i < g.nodes(); ++i) {
      if (g.on_boundary(i)) {
        if (std::abs(v[i] - u0_[i]) > tol) return false;
      } else if (obstacle_active(i) && v[i] < (*psi_)[i] - tol) {
        return false;
      }
    }
    return true;
  }

  /// Whether v + eta stays in K for every v in K. Directions must vanish on
  /// the boundary; with an obstacle they must be >= 0 at the active nodes.
  bool admissible_direction(const ScalarField& eta) const {
    require_same_grid(grid(), eta.grid(), "admissible_direction_check");
    const Grid& g = grid();
    for (std::size_t i = 0; i < g.nodes(); ++i)
      if (g.on_boundary(i) && eta[i] != 0.0)
        throw ValidationError("admissible_direction_check: direction is nonzero at boundary node " +
                              std::to_string(i));
    if (!psi_) return true;
    for (std::size_t i = 0; i < g.nodes(); ++i)
      if (obstacle_active(i) && eta[i] < 0.0) return false;
    return true;
  }

  /// Interior nodes where v sits on the obstacle (within tol).
  std::vector<std::size_t> contact_set(const ScalarField& v, double tol) const {
    std::vector<std::size_t> out;
    if (!psi_) return out;
    for (std::size_t i = 0; i < grid().nodes(); ++i)
      if (!grid().on_boundary(i) && obstacle_active(i) && v[i] <= (*psi_)[i] + tol) out.push_back(i);
    return out;
  }

 private:
  ConstraintSet(ScalarField u0, std::optional<ScalarField> psi, std::vector<char> active)
      : u0_(std::move(u0)), psi_(std::move(psi)), active_(std::move(active)) {
    if (!psi_) return;
    const Grid& g = grid();
    for (std::size_t i = 0; i < g.nodes(); ++i)
      if (g.on_boundary(i) && active_[i] && (*psi_)[i] > u0_[i])
        throw ValidationError("ConstraintSet: obstacle exceeds the boundary data at node " +
                              std::to_string(i) + " (psi=" + std::to_string((*psi_)[i]) +
                              " > u0=" + std::to_string(u0_[i]) + "); K would be empty");
  }

  ScalarField u0_;
  std::optional<ScalarField> psi_;
  std::vector<char> active_;
};

inline ScalarField project_K(const ConstraintSet& K, const ScalarField& v) { return K.project(v); }

inline bool admissible_direction_check(const ConstraintSet& K, const ScalarField& eta) {
  return K.admissible_direction(eta);
}

}  // namespace fenchelkit
