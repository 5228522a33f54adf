#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "fenchelkit/core/errors.hpp"

namespace fenchelkit {

/// Stage parameters of the approximation scheme: restriction radii k_j and
/// almost-minimality levels eps_j.
struct Schedule {
  std::vector<double> k_values;
  std::vector<double> eps_values;
  int min_stages = 3;

  /// k_j = k0 growth^j and eps_j = eps0 2^-j for j = 0..J.
  static Schedule geometric(double k0 = 1.0, double growth = 2.0, int J = 20, double eps0 = 1e-6) {
    if (!(k0 > 0.0) || !(growth > 1.0) || J < 0 || !(eps0 > 0.0))
      throw ValidationError("Schedule: need k0 > 0, growth > 1, J >= 0, eps0 > 0");
    Schedule s;
    for (int j = 0; j <= J; ++j) {
      s.k_values.push_back(k0 * std::pow(growth, j));
      s.eps_values.push_back(eps0 * std::ldexp(1.0, -j));
    }
    s.validate();
    return s;
  }

  std::size_t size() const { return k_values.size(); }

  void validate() const {
    if (k_values.empty()) throw ValidationError("Schedule: no stages");
    if (k_values.size() != eps_values.size())
      throw ValidationError("Schedule: k and eps lists differ in length (" + std::to_string(k_values.size()) +
                            " vs " + std::to_string(eps_values.size()) + ")");
    for (std::size_t j = 0; j < size(); ++j) {
      if (!(k_values[j] > 0.0) || !std::isfinite(k_values[j])) throw ValidationError("Schedule: k must be positive");
      if (!(eps_values[j] > 0.0) || !std::isfinite(eps_values[j]))
        throw ValidationError("Schedule: eps must be positive");
      if (j > 0 && !(k_values[j] > k_values[j - 1])) throw ValidationError("Schedule: k must increase strictly");
      if (j > 0 && !(eps_values[j] < eps_values[j - 1])) throw ValidationError("Schedule: eps must decrease strictly");
    }
    if (min_stages < 1) throw ValidationError("Schedule: min_stages must be >= 1");
  }
};

}  // namespace fenchelkit
