#pragma once

#include <span>
#include <vector>

namespace pml {

/// Uniform radial grid of `cells` cells on [lo, hi].
struct UniformGrid {
  double lo = 0.0;
  double hi = 1.0;
  int cells = 1;

  double spacing() const { return (hi - lo) / cells; }
  double node(int i) const { return i == cells ? hi : lo + spacing() * i; }
  std::vector<double> nodes() const;
  /// Index of the node nearest to r.
  int nearest(double r) const;
};

/**
 * Smallest cell count in [cells, 2 cells] for which every breakpoint inside (lo, hi)
 * lands on a node (to 1e-9 of a cell); falls back to `cells` when none does.
 */
int commensurate_cells(double lo, double hi, int cells, std::span<const double> breakpoints);

}  // namespace pml
