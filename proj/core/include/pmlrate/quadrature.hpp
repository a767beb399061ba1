#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace pml {

struct QuadratureOptions {
  double abs_tol = 1e-10;
  std::size_t max_intervals = 200000;
  int max_depth = 60;
};

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t intervals = 0;
};

/**
 * Adaptive Simpson quadrature of `f` over [lo, hi], split at `breakpoints`
 * (points outside (lo, hi) are ignored). The tolerance budget is distributed
 * over the pieces in proportion to their length.
 *
 * Throws QuadratureError (carrying the partial estimate) when the interval budget is exhausted.
 */
QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double lo, double hi,
                                  std::span<const double> breakpoints = {},
                                  const QuadratureOptions& opts = {});

}  // namespace pml
