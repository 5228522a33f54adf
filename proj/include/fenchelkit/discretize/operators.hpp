#pragma once

#include <utility>
#include <vector>

#include "fenchelkit/core/energy.hpp"
#include "fenchelkit/core/parallel.hpp"
#include "fenchelkit/discretize/grid.hpp"
#include "fenchelkit/legendre/restricted.hpp"

namespace fenchelkit {

/// F_k bound to every cell centre of a grid, so x-only work (the gluing
/// radius and f*(k) for radial energies) is done once per cell.
class CellRestricted {
 public:
  CellRestricted(const RestrictedConjugate& Rk, const Grid& g) : grid_(g) {
    cells_.reserve(g.cells());
    for (std::size_t c = 0; c < g.cells(); ++c) cells_.push_back(Rk.bind(g.cell_center(c)));
  }

  const Grid& grid() const { return grid_; }
  double cell_value(std::size_t c, const Vec2N& xi) const { return cells_[c].value(xi); }
  RestrictedValue cell_eval(std::size_t c, const Vec2N& xi) const { return cells_[c].evaluate(xi); }

 private:
  Grid grid_;
  std::vector<LocalRestricted> cells_;
};

namespace detail {

template <class D>
double density_value(const D& d, const Grid& g, std::size_t c, const Vec2N& xi) {
  if constexpr (requires { d.cell_value(c, xi); })
    return d.cell_value(c, xi);
  else
    return d.value(g.cell_center(c), xi);
}

template <class D>
RestrictedValue density_eval(const D& d, const Grid& g, std::size_t c, const Vec2N& xi) {
  if constexpr (requires { d.cell_eval(c, xi); }) {
    return d.cell_eval(c, xi);
  } else if constexpr (requires { d.evaluate(g.cell_center(c), xi); }) {
    return d.evaluate(g.cell_center(c), xi);
  } else {
    const Vec2N x = g.cell_center(c);
    return {d.value(x, xi), d.derivative(x, xi)};
  }
}

inline Vec2N cell_gradient(const Grid& g, const ScalarField& u, std::size_t c) {
  const auto [i, j] = g.cell_coords(c);
  const double inv_h = 1.0 / g.h();
  const double u0 = u[g.node(i, j)];
  if (g.dim() == 1) return Vec2N((u[g.node(i + 1)] - u0) * inv_h);
  return {(u[g.node(i + 1, j)] - u0) * inv_h, (u[g.node(i, j + 1)] - u0) * inv_h};
}

}  // namespace detail

/// Forward differences from each cell's low corner.
inline VectorField gradient(const Grid& g, const ScalarField& u) {
  require_same_grid(g, u.grid(), "gradient");
  VectorField out(g);
  for (std::size_t c = 0; c < g.cells(); ++c) out[c] = detail::cell_gradient(g, u, c);
  return out;
}

/// Adjoint of the discrete gradient, weighted by the cell volume: the nodal
/// vector sum_c h^n sigma_c . d(grad u)_c / du. Rows of boundary nodes are
/// set to zero (Dirichlet data is fixed).
inline ScalarField gradient_adjoint(const Grid& g, const VectorField& sigma) {
  ScalarField out(g);
  const double w = g.cell_volume() / g.h();
  for (std::size_t c = 0; c < g.cells(); ++c) {
    const auto [i, j] = g.cell_coords(c);
    const Vec2N& s = sigma[c];
    if (g.dim() == 1) {
      out[g.node(i)] -= w * s[0];
      out[g.node(i + 1)] += w * s[0];
      continue;
    }
    out[g.node(i, j)] -= w * (s[0] + s[1]);
    out[g.node(i + 1, j)] += w * s[0];
    out[g.node(i, j + 1)] += w * s[1];
  }
  for (std::size_t k = 0; k < g.nodes(); ++k)
    if (g.on_boundary(k)) out[k] = 0.0;
  return out;
}

/// Midpoint rule sum_c D(x_c, (grad u)_c) h^n for an energy density, a
/// restricted conjugate or a cell-bound density. Cells are evaluated in
/// parallel and summed in index order.
template <class D>
double energy(const Grid& g, const D& density, const ScalarField& u) {
  require_same_grid(g, u.grid(), "energy");
  std::vector<double> per_cell(g.cells());
  parallel_for(g.cells(), [&](std::size_t b, std::size_t e) {
    for (std::size_t c = b; c < e; ++c)
      per_cell[c] = detail::density_value(density, g, c, detail::cell_gradient(g, u, c));
  });
  double sum = 0.0;
  for (double v : per_cell) sum += v;
  return sum * g.cell_volume();
}

/// The flux field D'(x_c, (grad u)_c).
template <class D>
VectorField flux(const Grid& g, const D& density, const ScalarField& u) {
  require_same_grid(g, u.grid(), "flux");
  VectorField sigma(g);
  parallel_for(g.cells(), [&](std::size_t b, std::size_t e) {
    for (std::size_t c = b; c < e; ++c)
      sigma[c] = detail::density_eval(density, g, c, detail::cell_gradient(g, u, c)).derivative;
  });
  return sigma;
}

/// Energy and its exact gradient with respect to the nodal values in one
/// pass; boundary rows of the gradient are zero.
template <class D>
std::pair<double, ScalarField> energy_and_gradient(const Grid& g, const D& density, const ScalarField& u) {
  require_same_grid(g, u.grid(), "energy_gradient");
  std::vector<double> per_cell(g.cells());
  VectorField sigma(g);
  parallel_for(g.cells(), [&](std::size_t b, std::size_t e) {
    for (std::size_t c = b; c < e; ++c) {
      const auto r = detail::density_eval(density, g, c, detail::cell_gradient(g, u, c));
      per_cell[c] = r.value;
      sigma[c] = r.derivative;
    }
  });
  double sum = 0.0;
  for (double v : per_cell) sum += v;
  return {sum * g.cell_volume(), gradient_adjoint(g, sigma)};
}

template <class D>
ScalarField energy_gradient(const Grid& g, const D& density, const ScalarField& u) {
  return energy_and_gradient(g, density, u).second;
}

/// sum_c h^n sigma_c . (grad eta)_c, the discrete pairing of a flux with a
/// gradient.
inline double flux_pairing(const Grid& g, const VectorField& sigma, const ScalarField& eta) {
  double s = 0.0;
  for (std::size_t c = 0; c < g.cells(); ++c) s += dot(sigma[c], detail::cell_gradient(g, eta, c));
  return s * g.cell_volume();
}

}  // namespace fenchelkit
