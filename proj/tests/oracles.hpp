#pragma once

// Independent reference computations used by the tests. They share no code
// with the library beyond the Vec2N value type.

#include <cmath>
#include <functional>
#include <numbers>
#include <utility>
#include <vector>

#include "fenchelkit/core/vec.hpp"

namespace fenchelkit::oracle {

/// sup over about 10^5 points of the closed ball B_k (2D polar lattice with
/// the boundary circle included) of xi . z - conj(z).
inline double ball_sup(const std::function<double(const Vec2N&)>& conj, const Vec2N& xi, double k,
                       int rings = 316, int spokes = 316) {
  double best = -conj(Vec2N(0.0, 0.0));
  for (int i = 1; i <= rings; ++i) {
    const double r = k * i / rings;
    for (int j = 0; j < spokes; ++j) {
      const double th = 2.0 * std::numbers::pi * j / spokes;
      const Vec2N z(r * std::cos(th), r * std::sin(th));
      best = std::max(best, dot(xi, z) - conj(z));
    }
  }
  return best;
}

/// Same in 1D over 10^5 + 1 equispaced points of [-k, k].
inline double interval_sup(const std::function<double(double)>& conj, double xi, double k,
                           int points = 100001) {
  double best = -INFINITY;
  for (int i = 0; i < points; ++i) {
    const double z = -k + 2.0 * k * i / (points - 1);
    best = std::max(best, xi * z - conj(z));
  }
  return best;
}

/// min over 10^5 + 1 equispaced s in [0, t] of f(s) + k (t - s): the
/// Lipschitz regularization inf_zeta (F(zeta) + k |xi - zeta|) of a radial
/// profile at |xi| = t, which equals the restricted conjugate.
inline double lipschitz_envelope(const std::function<double(double)>& f, double t, double k,
                                 int points = 100001) {
  double best = INFINITY;
  for (int i = 0; i < points; ++i) {
    const double s = t * i / (points - 1);
    best = std::min(best, f(s) + k * (t - s));
  }
  return best;
}

/// Tridiagonal solve (Thomas algorithm): sub a, diagonal b, super c.
inline std::vector<double> thomas(std::vector<double> a, std::vector<double> b, std::vector<double> c,
                                  std::vector<double> d) {
  const std::size_t n = b.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double m = a[i] / b[i - 1];
    b[i] -= m * c[i - 1];
    d[i] -= m * d[i - 1];
  }
  std::vector<double> x(n);
  x[n - 1] = d[n - 1] / b[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = (d[i] - c[i] * x[i + 1]) / b[i];
  return x;
}

/// Gaussian elimination with partial pivoting on a dense row-major matrix.
inline std::vector<double> dense_solve(std::vector<std::vector<double>> A, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(A[i][k]) > std::abs(A[p][k])) p = i;
    std::swap(A[k], A[p]);
    std::swap(b[k], b[p]);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double m = A[i][k] / A[k][k];
      if (m == 0.0) continue;
      for (std::size_t j = k; j < n; ++j) A[i][j] -= m * A[k][j];
      b[i] -= m * b[k];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= A[i][j] * x[j];
    x[i] = s / A[i][i];
  }
  return x;
}

/// 1D obstacle problem for the Dirichlet energy sum ((u_{i+1}-u_i)/h)^2 h / 2
/// on nodes 0..N with u_0 = left, u_N = right and u_i >= psi_i inside, by
/// the primal-dual active-set method (finite for this M-matrix). Returns
/// all N+1 nodal values.
inline std::vector<double> obstacle_1d_pdas(int N, double left, double right, const std::vector<double>& psi,
                                            std::vector<char>* contact = nullptr) {
  const double h = 1.0 / N;
  const std::size_t m = static_cast<std::size_t>(N - 1);
  std::vector<double> u(m), lambda(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) u[i] = std::max(psi[i + 1], 0.0);
  std::vector<char> active(m, 0), prev;
  for (int it = 0; it < 200; ++it) {
    for (std::size_t i = 0; i < m; ++i) active[i] = lambda[i] + (psi[i + 1] - u[i]) > 0.0;
    if (it > 0 && active == prev) break;
    prev = active;
    std::vector<double> a(m, 0.0), b(m, 0.0), c(m, 0.0), d(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      if (active[i]) {
        b[i] = 1.0;
        d[i] = psi[i + 1];
        continue;
      }
      b[i] = 2.0 / h;
      if (i > 0) a[i] = -1.0 / h;
      else d[i] += left / h;
      if (i + 1 < m) c[i] = -1.0 / h;
      else d[i] += right / h;
    }
    u = thomas(a, b, c, d);
    for (std::size_t i = 0; i < m; ++i) {
      const double ul = i > 0 ? u[i - 1] : left, ur = i + 1 < m ? u[i + 1] : right;
      lambda[i] = active[i] ? (2.0 * u[i] - ul - ur) / h : 0.0;
    }
  }
  std::vector<double> out{left};
  out.insert(out.end(), u.begin(), u.end());
  out.push_back(right);
  if (contact) {
    contact->assign(out.size(), 0);
    for (std::size_t i = 0; i < m; ++i) (*contact)[i + 1] = active[i];
  }
  return out;
}

}  // namespace fenchelkit::oracle
