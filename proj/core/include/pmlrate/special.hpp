#pragma once

#include <complex>
#include <string>
#include <vector>

namespace pml::special {

/// J_n, Y_n and their x-derivatives at one (order, argument).
struct CylPair {
  int n = 0;
  double x = 0.0;
  double J = 0.0;
  double Y = 0.0;
  double Jp = 0.0;
  double Yp = 0.0;
};

inline constexpr int kMaxCylOrder = 200;
inline constexpr double kMaxArgument = 1e4;
inline constexpr int kMaxSphericalOrder = 100;

/**
 * Cylindrical Bessel functions of integer order n in [0, 200] and real x in (0, 1e4].
 *
 * J from Miller's backward recurrence normalized by J0 + 2 sum J_2k = 1, started at
 * n + ceil(1.36 x) + 30. Y0, Y1 from the Neumann series over the same J values for
 * x <= 25 and Hankel's asymptotic expansion above, then forward recurrence.
 * Y overflows to -inf for very high order at small argument.
 */
CylPair bessel_jy(int n, double x);

/// J_0..J_{n_max}(x) in one Miller sweep.
std::vector<double> bessel_j_sequence(int n_max, double x);

std::complex<double> hankel1(int n, double x);
std::complex<double> hankel1_prime(int n, double x);

/// Spherical Bessel j_l(x), l in [0, 100], by downward recurrence normalized against j_0 or j_1.
double spherical_bessel_j(int l, double x);
/// Spherical Neumann y_l(x) by upward recurrence from the closed forms.
double spherical_bessel_y(int l, double x);

/// h^(1)_l(x) = j_l + i y_l; h0 = -i e^{ix}/x, h1 = -e^{ix}(1 + i/x)/x in closed form.
std::complex<double> spherical_hankel1(int l, double x);
/// d/dx h^(1)_l(x): h_{l-1} - (l+1)/x h_l, and -h_1 for l = 0.
std::complex<double> spherical_hankel1_prime(int l, double x);
/// d/dx j_l(x).
double spherical_bessel_j_prime(int l, double x);

struct IdentityCheck {
  std::string name;
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/**
 * Identity suite behind `special selftest`:
 * Wronskian and three-term recurrence for n <= 60, x in [0.5, 200] (log grid),
 * the first zero of J0, and the cross Wronskian of j_l, y_l for l <= 60.
 */
std::vector<IdentityCheck> run_identity_suite();

}  // namespace pml::special
