#include "oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace oracle {

namespace {

// Integral of (t - R1)^3 (R2 - t)^3 over [R1, x] by 4-point Gauss-Legendre (exact for degree 7).
double bump_integral(double R1, double R2, double x) {
  static const double nodes[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                  0.8611363115940526};
  static const double weights[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                    0.3478548451374538};
  const double half = 0.5 * (x - R1);
  const double mid = 0.5 * (x + R1);
  double s = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double t = mid + half * nodes[i];
    s += weights[i] * std::pow(t - R1, 3) * std::pow(R2 - t, 3);
  }
  return s * half;
}

struct Eval {
  std::complex<double> z;
  std::complex<double> w;
  double operator()(double t) const {
    return std::abs(std::imag(w * std::sqrt(1.0 - t / (z * z))));
  }
};

std::pair<double, double> scan(const Scaling& s, double tan_theta, double r, int n_scan) {
  const Eval g{{r, tan_theta * s.f(r)}, {1.0, tan_theta * s.df(r)}};
  const double t_max = 10.0 * std::norm(g.z);
  std::vector<double> vals(static_cast<std::size_t>(n_scan) + 1);
  for (int i = 0; i <= n_scan; ++i) vals[static_cast<std::size_t>(i)] = g(t_max * i / n_scan);

  double best_t = 0.0;
  double best = vals[0];
  // Refine every local minimum of the sampled sequence.
  for (int i = 0; i <= n_scan; ++i) {
    const double v = vals[static_cast<std::size_t>(i)];
    const bool left_ok = i == 0 || v <= vals[static_cast<std::size_t>(i - 1)];
    const bool right_ok = i == n_scan || v <= vals[static_cast<std::size_t>(i + 1)];
    if (!(left_ok && right_ok)) continue;
    double a = t_max * std::max(i - 1, 0) / n_scan;
    double b = t_max * std::min(i + 1, n_scan) / n_scan;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - gr * (b - a);
    double d = a + gr * (b - a);
    double gc = g(c);
    double gd = g(d);
    for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, t_max); ++it) {
      if (gc < gd) {
        b = d;
        d = c;
        gd = gc;
        c = b - gr * (b - a);
        gc = g(c);
      } else {
        a = c;
        c = d;
        gc = gd;
        d = a + gr * (b - a);
        gd = g(d);
      }
    }
    const double tm = 0.5 * (a + b);
    const double gm = g(tm);
    if (gm < best) {
      best = gm;
      best_t = tm;
    }
    if (v < best) {
      best = v;
      best_t = t_max * i / n_scan;
    }
  }
  return {best, best_t};
}

}  // namespace

double Scaling::f(double r) const {
  if (r <= R1) return 0.0;
  if (kind == cubic) return (r - R1) * (r - R1) * (r - R1);
  if (r >= R2) return r;
  return r * bump_integral(R1, R2, r) / bump_integral(R1, R2, R2);
}

double Scaling::df(double r) const {
  if (r <= R1) return 0.0;
  if (kind == cubic) return 3.0 * (r - R1) * (r - R1);
  if (r >= R2) return 1.0;
  const double n = bump_integral(R1, R2, R2);
  return bump_integral(R1, R2, r) / n + r * std::pow(r - R1, 3) * std::pow(R2 - r, 3) / n;
}

double phi_scan(const Scaling& s, double tan_theta, double r, int n_scan) {
  return scan(s, tan_theta, r, n_scan).first;
}

double argmin_scan(const Scaling& s, double tan_theta, double r, int n_scan) {
  return scan(s, tan_theta, r, n_scan).second;
}

double simpson(const std::function<double(double)>& g, double a, double b, long panels) {
  if (panels % 2 != 0) throw std::invalid_argument("simpson: panels must be even");
  const double h = (b - a) / static_cast<double>(panels);
  long double s = g(a) + g(b);
  for (long i = 1; i < panels; ++i) s += (i % 2 ? 4.0L : 2.0L) * g(a + h * static_cast<double>(i));
  return static_cast<double>(s * h / 3.0L);
}

long double bessel_j_series(int n, long double x) {
  const long double half = x / 2.0L;
  long double term = std::pow(half, n) / std::tgamma(static_cast<long double>(n) + 1.0L);
  long double sum = term;
  for (int m = 1; m < 400; ++m) {
    term *= -half * half / (static_cast<long double>(m) * static_cast<long double>(m + n));
    sum += term;
    if (std::abs(term) < 1e-22L * std::abs(sum) && m > half) break;
  }
  return sum;
}

std::complex<long double> spherical_hankel_rayleigh(int l, long double x) {
  using C = std::complex<long double>;
  const C i(0.0L, 1.0L);
  C sum = 0.0L;
  long double coef = 1.0L;  // (l+k)! / (k! (l-k)!)
  C ik = 1.0L;
  for (int k = 0; k <= l; ++k) {
    if (k > 0) {
      coef *= static_cast<long double>((l + k) * (l - k + 1)) / static_cast<long double>(k);
      ik *= i;
    }
    sum += ik * coef / std::pow(2.0L * x, k);
  }
  return std::pow(-i, l + 1) * std::exp(i * x) / x * sum;
}

}  // namespace oracle
