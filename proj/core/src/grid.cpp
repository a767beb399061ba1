#include "pmlrate/grid.hpp"

#include <cmath>

namespace pml {

std::vector<double> UniformGrid::nodes() const {
  std::vector<double> out(static_cast<std::size_t>(cells) + 1);
  for (int i = 0; i <= cells; ++i) out[static_cast<std::size_t>(i)] = node(i);
  return out;
}

int UniformGrid::nearest(double r) const {
  const long idx = std::lround((r - lo) / spacing());
  if (idx < 0) return 0;
  if (idx > cells) return cells;
  return static_cast<int>(idx);
}

int commensurate_cells(double lo, double hi, int cells, std::span<const double> breakpoints) {
  for (int n = cells; n <= 2 * cells; ++n) {
    const double h = (hi - lo) / n;
    bool ok = true;
    for (double b : breakpoints) {
      if (!(b > lo && b < hi)) continue;
      const double pos = (b - lo) / h;
      if (std::abs(pos - std::round(pos)) > 1e-9) {
        ok = false;
        break;
      }
    }
    if (ok) return n;
  }
  return cells;
}

}  // namespace pml
