#include "pmlrate/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "pmlrate/error.hpp"

namespace pml {

namespace {

struct Panel {
  double a, m, b;
  double fa, fm, fb;
  double whole;
  double tol;
  int depth;
};

double simpson(double a, double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

// Explicit stack instead of recursion; panels pop in left-to-right order so
// the summation order is deterministic.
QuadratureResult integrate_piece(const std::function<double(double)>& f, double a, double b,
                                 double tol, const QuadratureOptions& opts, std::size_t budget_used) {
  QuadratureResult out;
  if (b <= a) return out;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  std::vector<Panel> stack;
  stack.push_back({a, m, b, fa, fm, fb, simpson(a, b, fa, fm, fb), tol, 0});
  while (!stack.empty()) {
    Panel p = stack.back();
    stack.pop_back();
    const double lm = 0.5 * (p.a + p.m);
    const double rm = 0.5 * (p.m + p.b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = simpson(p.a, p.m, p.fa, flm, p.fm);
    const double right = simpson(p.m, p.b, p.fm, frm, p.fb);
    const double delta = left + right - p.whole;
    const bool tiny = (p.m <= p.a) || (p.b <= p.m);
    if (std::abs(delta) <= 15.0 * p.tol || p.depth >= opts.max_depth || tiny) {
      out.value += left + right + delta / 15.0;
      out.error_estimate += std::abs(delta) / 15.0;
      ++out.intervals;
      continue;
    }
    if (budget_used + out.intervals + stack.size() >= opts.max_intervals) {
      // Fold what is left into the partial estimate before reporting.
      double partial = out.value + left + right;
      for (const auto& q : stack) partial += q.whole;
      throw QuadratureError("adaptive_simpson: interval budget of " + std::to_string(opts.max_intervals) +
                                " exhausted",
                            partial, budget_used + out.intervals + stack.size() + 2);
    }
    // Push right first so the left half is processed next.
    stack.push_back({p.m, rm, p.b, p.fm, frm, p.fb, right, 0.5 * p.tol, p.depth + 1});
    stack.push_back({p.a, lm, p.m, p.fa, flm, p.fm, left, 0.5 * p.tol, p.depth + 1});
  }
  return out;
}

}  // namespace

QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double lo, double hi,
                                  std::span<const double> breakpoints, const QuadratureOptions& opts) {
  QuadratureResult total;
  if (!(hi > lo)) return total;
  std::vector<double> cuts{lo};
  for (double c : breakpoints) {
    if (c > lo && c < hi) cuts.push_back(c);
  }
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  const double length = hi - lo;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double piece_tol = opts.abs_tol * (cuts[i + 1] - cuts[i]) / length;
    try {
      const auto piece = integrate_piece(f, cuts[i], cuts[i + 1], piece_tol, opts, total.intervals);
      total.value += piece.value;
      total.error_estimate += piece.error_estimate;
      total.intervals += piece.intervals;
    } catch (const QuadratureError& e) {
      throw QuadratureError(e.what(), total.value + e.partial_estimate(), e.intervals());
    }
  }
  return total;
}

}  // namespace pml
