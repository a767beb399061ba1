#pragma once

#include <complex>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace pml {

enum class ScalingKind { cubic, poly8, linear_tail_custom };

std::string_view to_string(ScalingKind kind);

/// One tabulated point of a user-supplied scaling function.
struct ScalingSample {
  double r;
  double f;
  double df;
};

/**
 * Radial scaling function f(r) driving the complex stretch r -> r + i tan(theta) f(r).
 *
 * f and f' vanish identically for r <= R1 and f' >= 0 everywhere.
 *  - cubic:  f(r) = (r - R1)^3 for r > R1, on all of [0, inf). R2 only labels the
 *            window; f(r) = r beyond R2 does NOT hold.
 *  - poly8:  f(r) = r I(r), I the normalized integral of (t-R1)^3 (R2-t)^3 over
 *            [R1, r]; f(r) = r exactly for r >= R2.
 *  - linear_tail_custom: monotone cubic Hermite through user samples, continued
 *            linearly past the last sample. Experimental: no C^3 guarantee.
 *
 * Immutable; copies share the tabulated data of custom functions.
 */
class ScalingFn {
 public:
  static ScalingFn make(ScalingKind kind, double R1, double R2);
  /// Samples must be strictly increasing in r, start with f = f' = 0 and be nondecreasing in f.
  static ScalingFn custom(std::vector<ScalingSample> samples);
  /// Parses `cubic:R1:R2`, `poly8:R1:R2` or `custom:<path>` (CSV rows r,f,df).
  static ScalingFn parse(std::string_view spec);

  double f(double r) const;
  double df(double r) const;

  ScalingKind kind() const noexcept { return kind_; }
  double R1() const noexcept { return R1_; }
  double R2() const noexcept { return R2_; }

  /// True when f(r) = r for r >= R2 holds (poly8 only).
  bool has_linear_tail() const noexcept { return kind_ == ScalingKind::poly8; }
  bool experimental() const noexcept { return kind_ == ScalingKind::linear_tail_custom; }

  /// poly8: the constant  int_{R1}^{R2} (t-R1)^3 (R2-t)^3 dt = (R2-R1)^7 / 140. Zero otherwise.
  double normalization() const noexcept { return norm_; }

  /// Round-trippable spec string (`poly8:3:5`, ...).
  std::string spec() const;

 private:
  struct Table;

  ScalingFn(ScalingKind kind, double R1, double R2);

  ScalingKind kind_;
  double R1_;
  double R2_;
  double norm_ = 0.0;
  std::string source_;
  std::shared_ptr<const Table> table_;
};

/// Angles are kept inside [kThetaEps, pi/2 - kThetaEps] before any trigonometry.
inline constexpr double kThetaEps = 1e-3;

/// Clamps an angle into the supported window.
double clamp_theta(double theta) noexcept;

/**
 * A scaling function together with a scaling angle: f_theta = tan(theta) f.
 */
class PmlProfile {
 public:
  /// theta in radians, clamped to [kThetaEps, pi/2 - kThetaEps].
  PmlProfile(ScalingFn scaling, double theta);

  /// Builds a profile from tan(theta) directly, bypassing the angle clamp.
  /// Used for the no-absorption control (tan(theta) = 1e-8) and steep-angle probes.
  static PmlProfile with_tan(ScalingFn scaling, double tan_theta);

  const ScalingFn& scaling() const noexcept { return scaling_; }
  double theta() const noexcept { return theta_; }
  double tan_theta() const noexcept { return tan_; }

  double f(double r) const { return tan_ * scaling_.f(r); }
  double df(double r) const { return tan_ * scaling_.df(r); }

  /// Complex radius r + i f_theta(r).
  std::complex<double> z(double r) const { return {r, f(r)}; }
  /// Stretch factor dz/dr = 1 + i f'_theta(r).
  std::complex<double> dz(double r) const { return {1.0, df(r)}; }

  /// Absorption coefficient f_theta(r)/r of the r(1 + i sigma) convention. Throws at r = 0.
  double sigma_tilde(double r) const;

 private:
  PmlProfile(ScalingFn scaling, double theta, double tan_theta);

  ScalingFn scaling_;
  double theta_;
  double tan_;
};

}  // namespace pml
