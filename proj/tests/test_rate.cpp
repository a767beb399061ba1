#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracle.hpp"
#include "pmlrate/error.hpp"
#include "pmlrate/rate.hpp"

namespace {

using namespace pml;
constexpr double kPi = std::numbers::pi;

ScalingFn cubic36() { return ScalingFn::make(ScalingKind::cubic, 3.0, 6.0); }
ScalingFn poly835() { return ScalingFn::make(ScalingKind::poly8, 3.0, 5.0); }
oracle::Scaling ocubic36{oracle::Scaling::cubic, 3.0, 6.0};
oracle::Scaling opoly835{oracle::Scaling::poly8, 3.0, 5.0};

TEST(Phi, ZeroInsideR1) {
  for (auto s : {cubic36(), poly835()}) {
    const PmlProfile p(s, kPi / 4);
    for (double r : {0.1, 1.0, 2.5, 3.0}) {
      EXPECT_EQ(phi(p, 2, r), 0.0);
      EXPECT_EQ(phi(p, 3, r), 0.0);
      EXPECT_EQ(phi(p, 1, r), 0.0);
    }
  }
}

TEST(Phi, LinearTailEqualsTanTheta) {
  const PmlProfile p(poly835(), kPi / 4);
  for (double r : {5.0, 5.2, 6.0, 9.5}) EXPECT_NEAR(phi(p, 2, r), 1.0, 1e-12);
}

TEST(Phi, OneDimensionalIsDerivative) {
  const PmlProfile p(cubic36(), kPi / 4);
  EXPECT_NEAR(phi(p, 1, 4.0), 3.0, 1e-14);
}

TEST(Phi, MatchesScanAtReferencePoint) {
  const PmlProfile p(cubic36(), kPi / 8);
  EXPECT_NEAR(phi(p, 2, 3.7), oracle::phi_scan(ocubic36, std::tan(kPi / 8), 3.7), 1e-10);
}

TEST(Phi, DomainErrors) {
  const PmlProfile p(cubic36(), kPi / 4);
  EXPECT_THROW(phi(p, 0, 4.0), DomainError);
  EXPECT_THROW(phi(p, 4, 4.0), DomainError);
  EXPECT_THROW(phi(p, 2, -1.0), DomainError);
  EXPECT_THROW(phi(p, 2, 0.0), DomainError);
  EXPECT_NO_THROW(phi(p, 1, 0.0));
}

TEST(Phi, OracleGrid50x50) {
  for (const auto& [s, o] : {std::pair{cubic36(), ocubic36}, std::pair{poly835(), opoly835}}) {
    double worst = 0.0;
    for (int i = 1; i <= 50; ++i) {
      const double r = 3.0 + 3.0 * i / 50.0;
      for (int j = 0; j < 50; ++j) {
        const double th = 0.1 + (kPi / 2 - 0.2) * j / 49.0;
        const PmlProfile p(s, th);
        worst = std::max(worst, std::abs(phi(p, 2, r) - oracle::phi_scan(o, p.tan_theta(), r)));
      }
    }
    EXPECT_LE(worst, 1e-10) << s.spec();
  }
}

TEST(Phi, NeverExceedsStretchDerivative) {
  std::mt19937 gen(7);
  std::uniform_real_distribution<double> rd(0.01, 8.0), td(0.0, kPi / 2);
  for (auto s : {cubic36(), poly835()}) {
    for (int n = 0; n < 2000; ++n) {
      const PmlProfile p(s, td(gen));
      const double r = rd(gen);
      EXPECT_LE(phi(p, 2, r), p.df(r) + 1e-12);
      EXPECT_GE(phi(p, 2, r), 0.0);
    }
  }
}

TEST(TMin, MatchesScanArgmin) {
  const PmlProfile p(cubic36(), kPi / 8);
  const double t = t_min(p, 3.5);
  EXPECT_NEAR(t, oracle::argmin_scan(ocubic36, p.tan_theta(), 3.5, 10000), 1e-6 * std::max(1.0, t));
}

TEST(TMin, ZeroOnLinearTailAndUnderCondition) {
  for (double th : {0.2, 0.8, 1.4}) {
    const PmlProfile p(poly835(), th);
    EXPECT_EQ(t_min(p, 5.5), 0.0);
  }
  const auto steep = PmlProfile::with_tan(cubic36(), 30.0);
  ASSERT_TRUE(phi_condition_holds(steep, 3.5).holds);
  EXPECT_EQ(t_min(steep, 3.5), 0.0);
}

TEST(TMin, ContinuousAcrossRegimeBoundary) {
  for (auto s : {cubic36(), poly835()}) {
    for (double th : {kPi / 8, kPi / 4, 3 * kPi / 8}) {
      const PmlProfile p(s, th);
      for (double b : regime_boundaries(p, 3.0 + 1e-6, 6.0)) {
        EXPECT_LE(std::abs(t_min(p, b - 1e-9) - t_min(p, b + 1e-9)), 1e-6) << s.spec() << " r=" << b;
        EXPECT_LE(std::abs(phi(p, 2, b - 1e-9) - phi(p, 2, b + 1e-9)), 1e-6);
      }
    }
  }
}

TEST(Condition, LinearTailHolds) {
  const PmlProfile p(poly835(), 0.05);
  EXPECT_TRUE(phi_condition_holds(p, 5.5).holds);
}

TEST(Condition, FailsJustAboveR1AtSmallAngle) {
  const PmlProfile p(cubic36(), 0.1);
  EXPECT_FALSE(phi_condition_holds(p, 3.05).holds);
}

TEST(Condition, DegenerateBelowR1) {
  const PmlProfile p(cubic36(), 0.5);
  const auto c = phi_condition_holds(p, 2.0);
  EXPECT_FALSE(c.holds);
  EXPECT_TRUE(c.degenerate);
}

TEST(Condition, ImpliesPhiEqualsDerivative) {
  const PmlProfile at80(cubic36(), 80.0 * kPi / 180.0);
  if (phi_condition_holds(at80, 3.5).holds) {
    EXPECT_NEAR(phi(at80, 2, 3.5), at80.df(3.5), 1e-12);
  }
  const auto steep = PmlProfile::with_tan(cubic36(), 30.0);
  ASSERT_TRUE(phi_condition_holds(steep, 3.5).holds);
  EXPECT_NEAR(phi(steep, 2, 3.5), steep.df(3.5), 1e-12 * steep.df(3.5));
  for (auto s : {cubic36(), poly835()}) {
    for (int j = 0; j < 30; ++j) {
      const PmlProfile p(s, 0.05 + 1.45 * j / 29.0);
      for (int i = 1; i <= 60; ++i) {
        const double r = 3.0 + 3.0 * i / 60.0;
        if (phi_condition_holds(p, r).holds) {
          EXPECT_NEAR(phi(p, 2, r), p.df(r), 1e-12 * std::max(1.0, p.df(r)));
        }
      }
    }
  }
}

// Structural properties of the rate density.

TEST(PhiProperties, PositiveLowerBoundAwayFromR1) {
  const double delta = 0.2;
  for (auto s : {cubic36(), poly835()}) {
    double lo = 1e300;
    for (int j = 0; j < 40; ++j) {
      const PmlProfile p(s, delta + (kPi / 2 - 2 * delta) * j / 39.0);
      for (int i = 0; i <= 80; ++i) {
        const double r = s.R1() + delta + (6.0 - s.R1() - delta) * i / 80.0;
        lo = std::min(lo, phi(p, 2, r) / p.tan_theta());
      }
    }
    EXPECT_GT(lo, 1e-3) << s.spec();
  }
}

TEST(PhiProperties, ExactTanThetaOnLinearTail) {
  for (int j = 0; j < 20; ++j) {
    const PmlProfile p(poly835(), 0.05 + 1.45 * j / 19.0);
    for (int i = 0; i <= 50; ++i) {
      const double r = 5.0 + 4.0 * i / 50.0;
      EXPECT_LE(std::abs(phi(p, 2, r) - p.tan_theta()), 1e-12);
      EXPECT_LE(std::abs(phi(p, 3, r) - p.tan_theta()), 1e-12);
    }
  }
}

TEST(PhiProperties, ConditionEventuallyHoldsForSteepAngles) {
  // For each delta, some tan(theta) on the ladder makes the condition hold on [R1 + delta, R_tr]
  // for that and every steeper sampled angle.
  for (auto s : {cubic36(), poly835()}) {
    for (double delta : {0.1, 0.5}) {
      std::vector<double> tans;
      for (int e = 0; e <= 60; ++e) tans.push_back(std::pow(10.0, e / 10.0));
      std::vector<bool> all_hold;
      for (double tn : tans) {
        const auto p = PmlProfile::with_tan(s, tn);
        bool ok = true;
        for (int i = 0; i <= 200 && ok; ++i) {
          const double r = s.R1() + delta + (6.0 - s.R1() - delta) * i / 200.0;
          ok = phi_condition_holds(p, r).holds;
        }
        all_hold.push_back(ok);
      }
      std::size_t first = all_hold.size();
      for (std::size_t i = all_hold.size(); i-- > 0 && all_hold[i];) first = i;
      EXPECT_LT(first, all_hold.size()) << s.spec() << " delta=" << delta;
      EXPECT_TRUE(all_hold.back());
    }
  }
}

TEST(PhiProperties, HolderHalfContinuity) {
  // Sampled modulus of continuity with exponent 1/2; refining the grid must not blow up L.
  auto fitted_L = [](const ScalingFn& s, int n) {
    double L = 0.0;
    const double r0 = s.R1() + 0.2, r1 = 6.0, t0 = 0.2, t1 = kPi / 2 - 0.2;
    for (int j = 0; j < n; ++j) {
      const double th = t0 + (t1 - t0) * j / (n - 1.0);
      const double th2 = th + (t1 - t0) / (n - 1.0);
      const PmlProfile p(s, th), q(s, std::min(th2, t1));
      for (int i = 0; i + 1 < n; ++i) {
        const double r = r0 + (r1 - r0) * i / (n - 1.0);
        const double r2 = r0 + (r1 - r0) * (i + 1) / (n - 1.0);
        const double v = phi(p, 2, r);
        L = std::max(L, std::abs(phi(p, 2, r2) - v) / std::sqrt(r2 - r));
        L = std::max(L, std::abs(phi(q, 2, r) - v) / std::sqrt(std::abs(q.theta() - th) + 1e-300));
        L = std::max(L, std::abs(phi(q, 2, r2) - v) / std::sqrt(r2 - r + std::abs(q.theta() - th)));
      }
    }
    return L;
  };
  for (auto s : {cubic36(), poly835()}) {
    const double coarse = fitted_L(s, 40);
    const double fine = fitted_L(s, 160);
    EXPECT_TRUE(std::isfinite(coarse));
    EXPECT_TRUE(std::isfinite(fine));
    EXPECT_LE(fine, 2.0 * coarse) << s.spec();
  }
}

TEST(IntegralPhi, MonotoneInTheta) {
  for (auto s : {cubic36(), poly835()}) {
    for (int d : {1, 2, 3}) {
      double prev = -1.0;
      for (int j = 0; j < 25; ++j) {
        const PmlProfile p(s, 0.01 + 1.55 * j / 24.0);
        const double v = integral_phi(p, d, 3.0, 5.5);
        EXPECT_GT(v, prev);
        prev = v;
      }
    }
  }
}

TEST(IntegralPhi, LinearTailIsTwoTanTheta) {
  for (double th : {kPi / 8, kPi / 4, 1.2}) {
    const PmlProfile p(poly835(), th);
    EXPECT_NEAR(integral_phi(p, 2, 5.0, 7.0), 2.0 * p.tan_theta(), 1e-9);
  }
}

TEST(IntegralPhi, EmptyInterval) {
  EXPECT_EQ(integral_phi(PmlProfile(cubic36(), 0.7), 2, 3.0, 3.0), 0.0);
}

TEST(IntegralPhi, MatchesSimpsonOfScan) {
  const double tn = std::tan(kPi / 8);
  const PmlProfile p(cubic36(), kPi / 8);
  const double ref = oracle::simpson([&](double r) { return oracle::phi_scan(ocubic36, tn, r, 64); }, 3.0, 3.8, 200000);
  EXPECT_NEAR(integral_phi(p, 2, 3.0, 3.8), ref, 1e-8);
}

TEST(IntegralPhi, OneDimensionalIsStretchIncrement) {
  const PmlProfile p(cubic36(), kPi / 4);
  EXPECT_NEAR(integral_phi(p, 1, 3.0, 3.5), 0.125, 1e-15);
}

TEST(IntegralPhi, RejectsBadLimits) {
  const PmlProfile p(cubic36(), kPi / 4);
  EXPECT_THROW(integral_phi(p, 2, 2.0, 4.0), DomainError);
  EXPECT_THROW(integral_phi(p, 2, 4.0, 3.5), DomainError);
}

TEST(Theta0, ZeroLambdaGivesEpsilon) {
  EXPECT_EQ(theta0(0.0, cubic36(), 2, 4.0).theta, kThetaEps);
}

TEST(Theta0, FixedPointAtQuarterPi) {
  const double L = integral_phi(PmlProfile(cubic36(), kPi / 4), 2, 3.0, 4.0);
  EXPECT_NEAR(theta0(L, cubic36(), 2, 4.0, 1e-10).theta, kPi / 4, 1e-9);
}

TEST(Theta0, SelfConsistentForPoly8) {
  const auto res = theta0(1.0, poly835(), 2, 7.0, 1e-12);
  EXPECT_FALSE(res.saturated);
  EXPECT_NEAR(integral_phi(PmlProfile(poly835(), res.theta), 2, 3.0, 7.0), 1.0, 1e-8);
}

TEST(Theta0, Saturates) {
  const auto res = theta0(1e6, poly835(), 2, 7.0);
  EXPECT_TRUE(res.saturated);
  EXPECT_DOUBLE_EQ(res.theta, kPi / 2 - kThetaEps);
}

TEST(Prediction, OneDimensionalSharpExponent) {
  const auto p = predicted_exponent(40.0, PmlProfile(cubic36(), kPi / 4), 1, 3.5, 0.0, 0.0);
  EXPECT_NEAR(p.exponent, 10.0, 1e-12);
  EXPECT_NEAR(p.bound, std::exp(-10.0), 1e-18);
}

TEST(Prediction, ComposesIntegral) {
  const PmlProfile prof(poly835(), kPi / 4);
  const double I = integral_phi(prof, 2, 3.0, 6.0);
  const auto p = predicted_exponent(50.0, prof, 2, 6.0, 0.0, 0.1);
  EXPECT_NEAR(p.integral_phi, I, 1e-12);
  EXPECT_NEAR(p.exponent, 1.9 * 50.0 * I, 1e-9);
  EXPECT_FALSE(p.no_decay_guaranteed);
  EXPECT_FALSE(p.below_threshold);
}

TEST(Prediction, FlagsNoDecayAndThreshold) {
  const auto p = predicted_exponent(10.0, PmlProfile(cubic36(), kPi / 4), 2, 3.5, 5.0, 0.1);
  EXPECT_TRUE(p.no_decay_guaranteed);
  EXPECT_TRUE(p.below_threshold);
  EXPECT_GT(p.bound, 1.0);
  EXPECT_TRUE(std::isfinite(p.bound));
}

TEST(Prediction, RejectsBadArguments) {
  const PmlProfile prof(cubic36(), kPi / 4);
  EXPECT_THROW(predicted_exponent(0.0, prof, 2, 4.0, 0.0, 0.1), DomainError);
  EXPECT_THROW(predicted_exponent(1.0, prof, 2, 4.0, 0.0, 2.0), DomainError);
  EXPECT_THROW(predicted_exponent(1.0, prof, 2, 4.0, -1.0, 0.1), DomainError);
  EXPECT_THROW(predicted_exponent(1.0, prof, 2, 2.0, 0.0, 0.1), DomainError);
}

}  // namespace
