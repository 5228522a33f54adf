#pragma once

#include <array>
#include <cstdint>

namespace fenchelkit {

/// Radical-inverse (Halton) low-discrepancy sequence. Deterministic: the
/// i-th point is fixed for all runs.
class Halton {
 public:
  static constexpr int kMaxDim = 6;

  /// Coordinate `dim` of point `index` in [0, 1).
  static double coord(std::uint64_t index, int dim) {
    static constexpr std::array<std::uint64_t, kMaxDim> primes{2, 3, 5, 7, 11, 13};
    const std::uint64_t base = primes[static_cast<std::size_t>(dim)];
    double f = 1.0, r = 0.0;
    // offset skips the degenerate leading points shared by all bases
    std::uint64_t i = index + 17;
    while (i > 0) {
      f /= static_cast<double>(base);
      r += f * static_cast<double>(i % base);
      i /= base;
    }
    return r;
  }
};

}  // namespace fenchelkit
