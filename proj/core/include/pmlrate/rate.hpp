#pragma once

#include <vector>

#include "pmlrate/scaling.hpp"

namespace pml {

/// Outcome of the closed-form test  tan^2(theta) >= r^2/f^2 - 2r/(f' f).
struct RegimeCheck {
  bool holds = false;
  /// f(r) = 0 or f'(r) = 0: the right-hand side is +inf, so `holds` is false.
  bool degenerate = false;
};

/**
 * Minimizer t_m of  t -> |Im((1 + i f'_theta) sqrt(1 - t/(r + i f_theta)^2))|  over t >= 0.
 *
 * Zero whenever Im((1 + i f'_theta)(r - i f_theta)^2) <= 0 (including r <= R1),
 * otherwise max(Im(w^2 c^2)/Im(w^2 c), 0) with w = 1 + i f'_theta, c = (r - i f_theta)^2.
 */
double t_min(const PmlProfile& profile, double r);

/**
 * Decay-rate density Phi_theta(r).
 *
 * d = 1: f'_theta(r). d >= 2: the infimum above, evaluated at t_min with the principal
 * square root. Zero for r <= R1 and never larger than f'_theta(r).
 * Throws DomainError for d outside {1,2,3}, r < 0, or r = 0 with d >= 2.
 */
double phi(const PmlProfile& profile, int dim, double r);

/// Whether the infimum defining Phi_theta(r) is attained at t = 0 (so Phi = f'_theta).
RegimeCheck phi_condition_holds(const PmlProfile& profile, double r);

/**
 * Locates the radii in (lo, hi) where phi_condition_holds changes value.
 * Scans `scan` subintervals and bisects each sign change to machine precision.
 */
std::vector<double> regime_boundaries(const PmlProfile& profile, double lo, double hi, int scan = 256);

/**
 * int_{lo}^{hi} Phi_theta(r) dr by adaptive Simpson to absolute tolerance `tol`.
 * The interval is split at R1, R2 and at every regime boundary.
 * Requires R1 <= lo <= hi; throws QuadratureError if subdivision is exhausted.
 */
double integral_phi(const PmlProfile& profile, int dim, double lo, double hi, double tol = 1e-10);

struct Theta0Result {
  double theta = kThetaEps;
  /// Lambda exceeds the integral even at the steepest admissible angle.
  bool saturated = false;
};

/**
 * Threshold angle sup{theta : int_{R1}^{R_tr} Phi_theta <= Lambda}, by bisection on
 * [kThetaEps, pi/2 - kThetaEps]. Lambda = 0 returns kThetaEps.
 */
Theta0Result theta0(double Lambda, const ScalingFn& scaling, int dim, double R_tr, double tol = 1e-10);

/// Predicted error exponent  k((2 - eta) int Phi - 3 Lambda)  and the bound exp(-exponent).
struct RatePrediction {
  double k = 0.0;
  double integral_phi = 0.0;
  double Lambda = 0.0;
  double eta = 0.0;
  double exponent = 0.0;
  double bound = 1.0;
  /// exponent <= 0: the estimate gives no smallness.
  bool no_decay_guaranteed = false;
  /// theta does not exceed theta0 + margin; the estimate is outside its hypotheses.
  bool below_threshold = false;
};

/// Angle margin above theta0 used for the `below_threshold` warning.
inline constexpr double kThetaMargin = 1e-2;

/**
 * Requires k > 0 and 0 <= eta < 2 (eta = 0 records the sharp limiting exponent).
 */
RatePrediction predicted_exponent(double k, const PmlProfile& profile, int dim, double R_tr,
                                  double Lambda, double eta);

}  // namespace pml
