#include "pmlrate/tridiag.hpp"

#include <cmath>
#include <string>

#include "pmlrate/error.hpp"

namespace pml {

std::vector<cplx_ld> solve_tridiagonal(std::span<const cplx_ld> lower, std::span<const cplx_ld> diag,
                                       std::span<const cplx_ld> upper, std::span<const cplx_ld> rhs) {
  const std::size_t n = diag.size();
  if (lower.size() != n || upper.size() != n || rhs.size() != n) {
    throw std::invalid_argument("solve_tridiagonal: band sizes differ");
  }
  std::vector<cplx_ld> c(n), x(n);
  auto check = [&](const cplx_ld& pivot, std::size_t i) {
    const long double scale = std::abs(diag[i]) + std::abs(lower[i]) + std::abs(upper[i]);
    if (!(std::abs(pivot) >= 1e-14L * scale) || scale == 0.0L) {
      throw SingularSystemError("tridiagonal solve: pivot " + std::to_string(static_cast<double>(std::abs(pivot))) +
                                " at row " + std::to_string(i) + " is numerically zero");
    }
  };
  if (n == 0) return x;
  cplx_ld pivot = diag[0];
  check(pivot, 0);
  c[0] = upper[0] / pivot;
  x[0] = rhs[0] / pivot;
  for (std::size_t i = 1; i < n; ++i) {
    pivot = diag[i] - lower[i] * c[i - 1];
    check(pivot, i);
    c[i] = (i + 1 < n) ? upper[i] / pivot : cplx_ld{};
    x[i] = (rhs[i] - lower[i] * x[i - 1]) / pivot;
  }
  for (std::size_t i = n - 1; i-- > 0;) x[i] -= c[i] * x[i + 1];
  return x;
}

}  // namespace pml
