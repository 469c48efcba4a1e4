#pragma once

#include <cstddef>

namespace fgmrisk {

// Numeric knobs shared by the truncation, transform and inversion code paths.
struct NumericOptions {
  // Tail mass below which infinite weight/mass sequences are truncated.
  double trunc_eps = 1e-12;
  // Hard cap on mixed-Erlang shape support; exceeding it raises numeric_error.
  std::size_t shape_cap = std::size_t{1} << 16;
  // Hard cap on discretization grid length.
  std::size_t grid_cap = std::size_t{1} << 21;
  // Transforms never exceed 2^dft_cap_log2 points.
  int dft_cap_log2 = 24;
  // Relative tolerance for bisection-based cdf inversion.
  double bisect_tol = 1e-9;
};

}  // namespace fgmrisk
