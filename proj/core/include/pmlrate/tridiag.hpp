#pragma once

#include <complex>
#include <span>
#include <vector>

namespace pml {

using cplx_ld = std::complex<long double>;

/**
 * Complex tridiagonal system  lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i]
 * solved by the Thomas algorithm in extended precision. lower[0] and upper[n-1] are ignored.
 *
 * Throws SingularSystemError when a pivot falls below 1e-14 relative to its row.
 */
std::vector<cplx_ld> solve_tridiagonal(std::span<const cplx_ld> lower, std::span<const cplx_ld> diag,
                                       std::span<const cplx_ld> upper, std::span<const cplx_ld> rhs);

}  // namespace pml
