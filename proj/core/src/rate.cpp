#include "pmlrate/rate.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "pmlrate/error.hpp"
#include "pmlrate/quadrature.hpp"

namespace pml {

namespace {

using cplx = std::complex<double>;

void check_dim(int dim) {
  if (dim < 1 || dim > 3) throw DomainError("rate: dimension must be 1, 2 or 3");
}

// Integrand of the infimum, |Im(w sqrt(1 - t/z^2))|.
double phi_at(cplx w, cplx z, double t) {
  return std::abs(std::imag(w * std::sqrt(1.0 - t / (z * z))));
}

}  // namespace

double t_min(const PmlProfile& profile, double r) {
  if (r <= profile.scaling().R1()) return 0.0;
  const cplx w = profile.dz(r);
  const cplx c = std::conj(profile.z(r));
  const cplx c2 = c * c;
  if (std::imag(w * c2) <= 0.0) return 0.0;
  const cplx w2 = w * w;
  const double den = std::imag(w2 * c2);
  if (den == 0.0) return 0.0;
  const double t = std::imag(w2 * c2 * c2) / den;
  return t > 0.0 ? t : 0.0;
}

double phi(const PmlProfile& profile, int dim, double r) {
  check_dim(dim);
  if (r < 0.0) throw DomainError("phi: requires r >= 0");
  if (dim == 1) return profile.df(r);
  if (r == 0.0) throw DomainError("phi: r = 0 is singular for d >= 2");
  if (r <= profile.scaling().R1()) return 0.0;
  const double t = t_min(profile, r);
  const double cap = profile.df(r);
  if (t == 0.0) return cap;
  // t = 0 is feasible, so the infimum never exceeds f'_theta.
  return std::min(phi_at(profile.dz(r), profile.z(r), t), cap);
}

RegimeCheck phi_condition_holds(const PmlProfile& profile, double r) {
  const auto& s = profile.scaling();
  const double f = s.f(r);
  const double df = s.df(r);
  if (f == 0.0 || df == 0.0) return {false, true};
  const double rhs = r * r / (f * f) - 2.0 * r / (df * f);
  const double tan2 = profile.tan_theta() * profile.tan_theta();
  return {tan2 >= rhs, false};
}

std::vector<double> regime_boundaries(const PmlProfile& profile, double lo, double hi, int scan) {
  std::vector<double> out;
  if (!(hi > lo) || scan < 1) return out;
  auto holds = [&](double r) { return phi_condition_holds(profile, r).holds; };
  double prev_r = lo;
  bool prev = holds(lo);
  for (int i = 1; i <= scan; ++i) {
    const double r = (i == scan) ? hi : lo + (hi - lo) * i / scan;
    const bool cur = holds(r);
    if (cur != prev) {
      double a = prev_r, b = r;
      while (true) {
        const double m = 0.5 * (a + b);
        if (m <= a || m >= b) break;
        (holds(m) == prev ? a : b) = m;
      }
      out.push_back(0.5 * (a + b));
    }
    prev = cur;
    prev_r = r;
  }
  return out;
}

double integral_phi(const PmlProfile& profile, int dim, double lo, double hi, double tol) {
  check_dim(dim);
  const auto& s = profile.scaling();
  if (lo < s.R1()) throw DomainError("integral_phi: requires R1 <= lower limit");
  if (hi < lo) throw DomainError("integral_phi: requires lower limit <= upper limit");
  if (!(tol > 0.0)) throw DomainError("integral_phi: tolerance must be positive");
  if (hi == lo) return 0.0;
  if (dim == 1) {
    // Phi = f'_theta, which integrates exactly.
    return profile.f(hi) - profile.f(lo);
  }
  std::vector<double> cuts{s.R1(), s.R2()};
  for (double b : regime_boundaries(profile, lo, hi)) cuts.push_back(b);
  QuadratureOptions opts;
  opts.abs_tol = tol;
  const auto res = adaptive_simpson([&](double r) { return phi(profile, dim, r); }, lo, hi, cuts, opts);
  return res.value;
}

Theta0Result theta0(double Lambda, const ScalingFn& scaling, int dim, double R_tr, double tol) {
  check_dim(dim);
  if (!(Lambda >= 0.0)) throw DomainError("theta0: Lambda must be nonnegative");
  if (!(R_tr > scaling.R1())) throw DomainError("theta0: requires R_tr > R1");
  if (!(tol > 0.0)) throw DomainError("theta0: tolerance must be positive");
  const double lo_theta = kThetaEps;
  const double hi_theta = std::numbers::pi / 2 - kThetaEps;
  if (Lambda == 0.0) return {lo_theta, false};

  const double quad_tol = std::min(1e-12, 1e-3 * Lambda);
  auto integral = [&](double theta) {
    return integral_phi(PmlProfile(scaling, theta), dim, scaling.R1(), R_tr, quad_tol);
  };
  if (integral(hi_theta) <= Lambda) return {hi_theta, true};
  if (integral(lo_theta) > Lambda) return {lo_theta, false};

  double a = lo_theta, b = hi_theta;
  while (b - a > tol) {
    const double m = 0.5 * (a + b);
    if (m <= a || m >= b) break;
    (integral(m) <= Lambda ? a : b) = m;
  }
  return {0.5 * (a + b), false};
}

RatePrediction predicted_exponent(double k, const PmlProfile& profile, int dim, double R_tr,
                                  double Lambda, double eta) {
  if (!(k > 0.0)) throw DomainError("predicted_exponent: requires k > 0");
  if (!(eta >= 0.0 && eta < 2.0)) throw DomainError("predicted_exponent: requires 0 <= eta < 2");
  if (!(Lambda >= 0.0)) throw DomainError("predicted_exponent: Lambda must be nonnegative");
  const auto& s = profile.scaling();
  if (!(R_tr > s.R1())) throw DomainError("predicted_exponent: requires R_tr > R1");

  RatePrediction p;
  p.k = k;
  p.Lambda = Lambda;
  p.eta = eta;
  p.integral_phi = integral_phi(profile, dim, s.R1(), R_tr);
  p.exponent = k * ((2.0 - eta) * p.integral_phi - 3.0 * Lambda);
  p.bound = std::exp(-p.exponent);
  if (p.bound == 0.0) p.bound = std::numeric_limits<double>::denorm_min();
  if (!std::isfinite(p.bound)) p.bound = std::numeric_limits<double>::max();
  p.no_decay_guaranteed = p.exponent <= 0.0;
  if (Lambda > 0.0) {
    const auto th0 = theta0(Lambda, s, dim, R_tr);
    p.below_threshold = th0.saturated || profile.theta() <= th0.theta + kThetaMargin;
  }
  return p;
}

}  // namespace pml
