#include "pmlrate/special.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "pmlrate/error.hpp"

namespace pml::special {

namespace {

constexpr double kEulerGamma = 0.57721566490153286060651209008240243;
constexpr double kRescaleAbove = 1e200;
constexpr double kRescaleBy = 1e-200;
constexpr double kAsymptoticFrom = 25.0;

void check_cyl(int n, double x) {
  if (n < 0 || n > kMaxCylOrder) {
    throw DomainError("bessel: order " + std::to_string(n) + " outside [0, " + std::to_string(kMaxCylOrder) + "]");
  }
  if (!(x > 0.0) || !(x <= kMaxArgument)) throw DomainError("bessel: argument outside (0, 1e4]");
}

void check_sph(int l, double x) {
  if (l < 0 || l > kMaxSphericalOrder) {
    throw DomainError("spherical bessel: order " + std::to_string(l) + " outside [0, " +
                      std::to_string(kMaxSphericalOrder) + "]");
  }
  if (!(x > 0.0) || !(x <= kMaxArgument)) throw DomainError("spherical bessel: argument outside (0, 1e4]");
}

int miller_start(int n, double x) { return n + static_cast<int>(std::ceil(1.36 * x)) + 30; }

// Unnormalized downward recurrence  j_{k-1} = (2k/x) j_k - j_{k+1}, rescaled on the fly.
// Returns J_0..J_top normalized by J0 + 2 sum J_2k = 1.
std::vector<double> miller_j(int top, double x) {
  int start = miller_start(top, x);
  if (start % 2 != 0) ++start;
  std::vector<double> j(static_cast<std::size_t>(start) + 2, 0.0);
  j[static_cast<std::size_t>(start)] = 1e-30;
  for (int k = start; k >= 1; --k) {
    const auto ku = static_cast<std::size_t>(k);
    j[ku - 1] = (2.0 * k / x) * j[ku] - j[ku + 1];
    if (std::abs(j[ku - 1]) > kRescaleAbove) {
      for (std::size_t i = ku - 1; i < j.size(); ++i) j[i] *= kRescaleBy;
    }
  }
  double sum = j[0];
  for (std::size_t k = 2; k < j.size(); k += 2) sum += 2.0 * j[k];
  for (auto& v : j) v /= sum;
  return j;
}

// Hankel asymptotic P, Q for order nu at large x.
void hankel_pq(int nu, double x, double& P, double& Q) {
  const double mu = 4.0 * nu * nu;
  P = 1.0;
  Q = 0.0;
  double term = 1.0;
  double last = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= (mu - odd * odd) / (k * 8.0 * x);
    const double mag = std::abs(term);
    if (mag > last) break;  // asymptotic series started to diverge
    // a_k enters P (k even) or Q (k odd) with alternating signs.
    const double sign = ((k / 2) % 2 == 0) ? 1.0 : -1.0;
    if (k % 2 == 0) {
      P += sign * term;
    } else {
      Q += sign * term;
    }
    if (mag < 1e-18) break;
    last = mag;
  }
}

// Y0 and Y1 at x.
void y01(double x, const std::vector<double>& j, double& y0, double& y1) {
  if (x <= kAsymptoticFrom) {
    // Neumann series over the Miller values:
    // Y0 = (2/pi)[(ln(x/2) + g) J0 - 2 sum (-1)^k J_2k / k]
    // Y1 = -Y0' = (2/pi)[(ln(x/2) + g) J1 - J0/x + sum (-1)^k (J_{2k-1} - J_{2k+1}) / k]
    const double lg = std::log(0.5 * x) + kEulerGamma;
    double s0 = 0.0, s1 = 0.0;
    for (std::size_t k = 1; 2 * k + 1 < j.size(); ++k) {
      const double sign = (k % 2 == 0) ? 1.0 : -1.0;
      s0 += sign * j[2 * k] / static_cast<double>(k);
      s1 += sign * (j[2 * k - 1] - j[2 * k + 1]) / static_cast<double>(k);
    }
    y0 = 2.0 / std::numbers::pi * (lg * j[0] - 2.0 * s0);
    y1 = 2.0 / std::numbers::pi * (lg * j[1] - j[0] / x + s1);
    return;
  }
  const double amp = std::sqrt(2.0 / (std::numbers::pi * x));
  const double s = std::sin(x), c = std::cos(x);
  double P, Q;
  // omega_0 = x - pi/4:  sin = (s - c)/sqrt2, cos = (c + s)/sqrt2
  hankel_pq(0, x, P, Q);
  y0 = amp * (P * (s - c) + Q * (c + s)) / std::numbers::sqrt2;
  // omega_1 = x - 3pi/4: sin = (-s - c)/sqrt2 ... = -(c + s)/sqrt2, cos = (s - c)/sqrt2
  hankel_pq(1, x, P, Q);
  y1 = amp * (-P * (c + s) + Q * (s - c)) / std::numbers::sqrt2;
}

}  // namespace

std::vector<double> bessel_j_sequence(int n_max, double x) {
  check_cyl(n_max, x);
  auto j = miller_j(n_max, x);
  j.resize(static_cast<std::size_t>(n_max) + 1);
  return j;
}

CylPair bessel_jy(int n, double x) {
  check_cyl(n, x);
  const auto j = miller_j(n + 1, x);
  double y_prev, y_cur;
  y01(x, j, y_prev, y_cur);  // Y0, Y1
  // Forward recurrence up to Y_{n}; keep Y_{n-1} for the derivative.
  double y_nm1 = 0.0, y_n = 0.0;
  if (n == 0) {
    y_n = y_prev;
    y_nm1 = -y_cur;  // stands in for Y_{-1} = -Y_1
  } else {
    for (int k = 1; k < n; ++k) {
      const double next = (2.0 * k / x) * y_cur - y_prev;
      y_prev = y_cur;
      y_cur = next;
    }
    y_nm1 = y_prev;
    y_n = y_cur;
  }
  const auto nu = static_cast<std::size_t>(n);
  CylPair p;
  p.n = n;
  p.x = x;
  p.J = j[nu];
  p.Y = y_n;
  if (n == 0) {
    p.Jp = -j[1];
    p.Yp = y_nm1;
  } else {
    p.Jp = j[nu - 1] - (n / x) * j[nu];
    p.Yp = y_nm1 - (n / x) * y_n;
  }
  return p;
}

std::complex<double> hankel1(int n, double x) {
  const auto p = bessel_jy(n, x);
  return {p.J, p.Y};
}

std::complex<double> hankel1_prime(int n, double x) {
  const auto p = bessel_jy(n, x);
  return {p.Jp, p.Yp};
}

double spherical_bessel_j(int l, double x) {
  check_sph(l, x);
  const double j0 = std::sin(x) / x;
  if (l == 0) return j0;
  const double j1 = std::sin(x) / (x * x) - std::cos(x) / x;
  int start = miller_start(l, x);
  std::vector<double> j(static_cast<std::size_t>(start) + 2, 0.0);
  j[static_cast<std::size_t>(start)] = 1e-30;
  for (int k = start; k >= 1; --k) {
    const auto ku = static_cast<std::size_t>(k);
    j[ku - 1] = ((2.0 * k + 1.0) / x) * j[ku] - j[ku + 1];
    if (std::abs(j[ku - 1]) > kRescaleAbove) {
      for (std::size_t i = ku - 1; i < j.size(); ++i) j[i] *= kRescaleBy;
    }
  }
  // Normalize against whichever closed form is better conditioned.
  const double scale = (std::abs(j0) >= std::abs(j1)) ? j0 / j[0] : j1 / j[1];
  return j[static_cast<std::size_t>(l)] * scale;
}

double spherical_bessel_y(int l, double x) {
  check_sph(l, x);
  double y_prev = -std::cos(x) / x;
  if (l == 0) return y_prev;
  double y_cur = -std::cos(x) / (x * x) - std::sin(x) / x;
  for (int k = 1; k < l; ++k) {
    const double next = ((2.0 * k + 1.0) / x) * y_cur - y_prev;
    y_prev = y_cur;
    y_cur = next;
  }
  return y_cur;
}

std::complex<double> spherical_hankel1(int l, double x) {
  check_sph(l, x);
  if (l == 0) return std::complex<double>(0.0, -1.0) * std::exp(std::complex<double>(0.0, x)) / x;
  if (l == 1) {
    return -std::exp(std::complex<double>(0.0, x)) * std::complex<double>(1.0, 1.0 / x) / x;
  }
  return {spherical_bessel_j(l, x), spherical_bessel_y(l, x)};
}

std::complex<double> spherical_hankel1_prime(int l, double x) {
  check_sph(l, x);
  if (l == 0) return -spherical_hankel1(1, x);
  return spherical_hankel1(l - 1, x) - ((l + 1.0) / x) * spherical_hankel1(l, x);
}

double spherical_bessel_j_prime(int l, double x) {
  check_sph(l, x);
  if (l == 0) return -spherical_bessel_j(1, x);
  return spherical_bessel_j(l - 1, x) - ((l + 1.0) / x) * spherical_bessel_j(l, x);
}

std::vector<IdentityCheck> run_identity_suite() {
  std::vector<IdentityCheck> out;

  IdentityCheck wr{"cyl_wronskian", 0.0, 1e-10, false};
  IdentityCheck rec{"cyl_recurrence", 0.0, 1e-10, false};
  constexpr int kPoints = 80;
  for (int i = 0; i < kPoints; ++i) {
    const double x = 0.5 * std::pow(400.0, static_cast<double>(i) / (kPoints - 1));
    const auto j = bessel_j_sequence(61, x);
    for (int n = 0; n <= 60; ++n) {
      const auto p = bessel_jy(n, x);
      const double w = p.J * p.Yp - p.Jp * p.Y;
      const double expect = 2.0 / (std::numbers::pi * x);
      wr.max_residual = std::max(wr.max_residual, std::abs(w - expect) / expect);
      if (n >= 1) {
        const auto nu = static_cast<std::size_t>(n);
        // Residual relative to the largest term of J_{n+1} + J_{n-1} = (2n/x) J_n.
        const double lhs = j[nu + 1] + j[nu - 1];
        const double rhs = (2.0 * n / x) * j[nu];
        const double scale = std::max({std::abs(j[nu + 1]), std::abs(j[nu - 1]), std::abs(rhs)});
        if (scale > 0.0) rec.max_residual = std::max(rec.max_residual, std::abs(lhs - rhs) / scale);
      }
    }
  }
  wr.pass = wr.max_residual <= wr.tolerance;
  rec.pass = rec.max_residual <= rec.tolerance;
  out.push_back(wr);
  out.push_back(rec);

  IdentityCheck zero{"j0_first_zero", 0.0, 1e-10, false};
  {
    double a = 2.0, b = 3.0;
    const double fa = bessel_jy(0, a).J;
    for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
      const double m = 0.5 * (a + b);
      if ((bessel_jy(0, m).J > 0.0) == (fa > 0.0)) {
        a = m;
      } else {
        b = m;
      }
    }
    const double root = 0.5 * (a + b);
    zero.max_residual = std::max(std::abs(root - 2.404825557695773),
                                 std::abs(bessel_jy(0, 2.404825557695773).J));
    zero.pass = zero.max_residual <= zero.tolerance;
  }
  out.push_back(zero);

  IdentityCheck sw{"spherical_wronskian", 0.0, 1e-10, false};
  {
    // x^2 (j_l y_{l-1} - j_{l-1} y_l) = 1
    for (int i = 0; i < kPoints; ++i) {
      const double x = 0.5 * std::pow(400.0, static_cast<double>(i) / (kPoints - 1));
      double jm = spherical_bessel_j(0, x), ym = spherical_bessel_y(0, x);
      for (int l = 1; l <= 60; ++l) {
        const double j = spherical_bessel_j(l, x), y = spherical_bessel_y(l, x);
        sw.max_residual = std::max(sw.max_residual, std::abs(x * x * (j * ym - jm * y) - 1.0));
        jm = j;
        ym = y;
      }
    }
    sw.pass = sw.max_residual <= sw.tolerance;
  }
  out.push_back(sw);
  return out;
}

}  // namespace pml::special
