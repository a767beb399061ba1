#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "pmlrate/error.hpp"
#include "pmlrate/solver.hpp"

namespace {

using namespace pml;
constexpr double kPi = std::numbers::pi;
const cplx I{0.0, 1.0};

PmlProfile cubic_profile(double theta = kPi / 4) { return {ScalingFn::make(ScalingKind::cubic, 3.0, 6.0), theta}; }

// Exact solution of the scaled 1D problem, built here from z(r) alone.
cplx exact_1d(double k, const PmlProfile& p, double R_tr, cplx bc, double r) {
  const cplx R = std::exp(2.0 * I * k * p.z(R_tr));
  const cplx A = bc / (1.0 - R);
  return A * std::exp(I * k * p.z(r)) - A * R * std::exp(-I * k * p.z(r));
}

double max_rel_error(const GridSolution& s, double k, const PmlProfile& p, double R_tr, cplx bc) {
  double e = 0.0;
  for (std::size_t i = 0; i < s.radii.size(); ++i) {
    e = std::max(e, std::abs(s.values[i] - exact_1d(k, p, R_tr, bc, s.radii[i])));
  }
  return e / std::abs(bc);
}

TEST(ClosedForm1D, Coefficients) {
  const auto p = cubic_profile();
  const cplx bc{0.3, -1.2};
  const auto sol = solve_1d_closed_form(40.0, p, 3.5, bc);
  EXPECT_NEAR(std::abs(sol.reflection), std::exp(-10.0), 1e-18);
  EXPECT_LT(std::abs(sol.A - bc / (1.0 - sol.reflection)), 1e-15);
  EXPECT_LT(std::abs(sol.B + sol.A * sol.reflection), 1e-18);
  EXPECT_LT(std::abs(sol(p, 0.0) - bc), 1e-15);
  EXPECT_LT(std::abs(sol(p, 3.5)), 1e-15);
  for (double r : {0.5, 2.0, 3.2, 3.4}) EXPECT_LT(std::abs(sol(p, r) - exact_1d(40.0, p, 3.5, bc, r)), 1e-14);
}

TEST(ClosedForm1D, NoAbsorptionReflectsFully) {
  const auto p = PmlProfile::with_tan(ScalingFn::make(ScalingKind::cubic, 3.0, 6.0), 1e-8);
  const auto sol = solve_1d_closed_form(10.0, p, 3.5, 1.0);
  EXPECT_NEAR(std::abs(sol.B / sol.A), 1.0, 1e-6);
}

TEST(ClosedForm1D, ResonantTruncationThrows) {
  const auto p = PmlProfile::with_tan(ScalingFn::make(ScalingKind::cubic, 3.0, 6.0), 1e-15);
  const double k = 4.0 * kPi / 3.5;  // 2 k R_tr = 8 pi
  EXPECT_THROW(solve_1d_closed_form(k, p, 3.5, 1.0), SingularSystemError);
  EXPECT_THROW(solve_1d_closed_form(0.0, cubic_profile(), 3.5, 1.0), DomainError);
}

TEST(ClosedForm1D, SharpnessEnvelope) {
  const auto p = cubic_profile();
  for (double k : {20.0, 30.0, 40.0, 60.0, 80.0}) {
    const auto sol = solve_1d_closed_form(k, p, 3.5, 1.0);
    const auto err = sup_error_1d(sol, p, 3.0, 1000001);
    const double q = std::exp(-2.0 * k * 0.125);
    EXPECT_NEAR(err.predicted, 2.0 * std::abs(sol.reflection) / std::abs(1.0 - sol.reflection), 1e-15);
    // Additive slack: the error is a difference of O(1) values, so it carries ~1e-15 roundoff.
    EXPECT_GE(err.err_sup, err.predicted * (1.0 - q) - 1e-15);
    EXPECT_LE(err.err_sup, err.predicted * (1.0 + q) + 1e-15);
    const double ratio = err.err_sup / (2.0 * q);
    EXPECT_GE(ratio, 0.9) << k;
    EXPECT_LE(ratio, 1.12) << k;
  }
}

TEST(ClosedForm1D, SupErrorIndependentOfBoundaryValue) {
  const auto p = cubic_profile();
  const auto e1 = sup_error_1d(solve_1d_closed_form(20.0, p, 3.5, 1.0), p, 3.0);
  const auto e2 = sup_error_1d(solve_1d_closed_form(20.0, p, 3.5, cplx{0.0, 5.0}), p, 3.0);
  EXPECT_NEAR(e1.err_sup, e2.err_sup, 1e-14);
}

TEST(FiniteDifference1D, InactiveScalingIsStandingWave) {
  // R_tr below R1: plain v'' + k^2 v = 0, v(0) = bc, v(R_tr) = 0.
  const auto p = cubic_profile();
  const double k = 7.0, R = 2.5;
  std::vector<double> errs;
  for (int n : {200, 400, 800, 1600}) {
    const auto s = solve_1d_fd(k, p, R, n, 1.0);
    double e = 0.0;
    for (std::size_t i = 0; i < s.radii.size(); ++i) {
      e = std::max(e, std::abs(s.values[i] - std::sin(k * (R - s.radii[i])) / std::sin(k * R)));
    }
    errs.push_back(e);
  }
  EXPECT_LT(errs.back(), 1e-4);
  for (std::size_t i = 1; i < errs.size(); ++i) {
    EXPECT_GE(errs[i - 1] / errs[i], 3.2);
    EXPECT_LE(errs[i - 1] / errs[i], 4.8);
  }
}

TEST(FiniteDifference1D, SecondOrderAgainstClosedForm) {
  const auto p = cubic_profile();
  std::vector<double> errs;
  for (int n : {500, 1000, 2000, 4000}) errs.push_back(max_rel_error(solve_1d_fd(10.0, p, 4.0, n, 1.0), 10.0, p, 4.0, 1.0));
  for (std::size_t i = 1; i < errs.size(); ++i) {
    const double ratio = errs[i - 1] / errs[i];
    EXPECT_GE(ratio, 3.2) << i;
    EXPECT_LE(ratio, 4.8) << i;
  }
}

TEST(FiniteDifference1D, BoundaryValuesAndZeroData) {
  const auto p = cubic_profile();
  const auto s = solve_1d_fd(10.0, p, 3.5, 64, cplx{2.0, 1.0});
  EXPECT_EQ(s.values.front(), cplx(2.0, 1.0));
  EXPECT_EQ(s.values.back(), cplx(0.0, 0.0));
  EXPECT_EQ(s.radii.size(), 65u);
  const auto z = solve_1d_fd(10.0, p, 3.5, 64, 0.0);
  for (const auto& v : z.values) EXPECT_EQ(v, cplx(0.0, 0.0));
  EXPECT_THROW(solve_1d_fd(10.0, p, 3.5, 8, 1.0), DomainError);
}

TEST(FiniteDifference1D, HighFrequencyAccuracy) {
  // The phase error of a second-order scheme is about k L (kh)^2 / 24.
  const auto p = cubic_profile();
  const double e8000 = max_rel_error(solve_1d_fd(40.0, p, 3.5, 8000, 1.0), 40.0, p, 3.5, 1.0);
  const double h = 3.5 / 8000;
  EXPECT_LE(e8000, 1.5 * 40.0 * 3.5 * std::pow(40.0 * h, 2) / 24.0);
  const double fine = max_rel_error(solve_1d_fd(40.0, p, 3.5, 512000, 1.0), 40.0, p, 3.5, 1.0);
  EXPECT_LE(fine, 1e-6);
}

TEST(FiniteDifference1D, IntervalVariant) {
  const auto p = cubic_profile();
  const auto s = solve_1d_fd_interval(10.0, p, 1.0, 4.0, 2000, 1.0);
  EXPECT_EQ(s.radii.front(), 1.0);
  // Shifting the left end only translates the exact solution.
  const cplx R = std::exp(2.0 * I * 10.0 * p.z(4.0));
  const cplx A = 1.0 / (std::exp(I * 10.0) - R * std::exp(-I * 10.0));
  double e = 0.0;
  for (std::size_t i = 0; i < s.radii.size(); ++i) {
    const cplx ex = A * (std::exp(I * 10.0 * p.z(s.radii[i])) - R * std::exp(-I * 10.0 * p.z(s.radii[i])));
    e = std::max(e, std::abs(s.values[i] - ex));
  }
  EXPECT_LT(e, 1e-3);
}

}  // namespace
