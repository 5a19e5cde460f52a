#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "rabi/contfrac.hpp"
#include "rabi/errors.hpp"

using namespace rabi;

namespace {

struct NanAt {
  int bad;
  double a(int n) const { return n == bad ? std::numeric_limits<double>::quiet_NaN() : 3.0; }
  double b(int) const { return 2.0; }
};

// Random (model, sector, E) away from poles.
struct Sample {
  ModelParams model;
  Sector sector;
  double energy;
};

Sample random_sample(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int kind = static_cast<int>(u(rng) * 3.0) % 3;
  Sample s{{}, Sector::trivial(), 0.0};
  s.model.omega = 0.5 + u(rng);
  s.model.delta = u(rng);
  switch (kind) {
    case 0:
      s.model.kind = ModelKind::TwoPhoton;
      s.model.g = (0.02 + 0.43 * u(rng)) * s.model.omega * (u(rng) < 0.5 ? -1 : 1);
      s.sector = Sector::q(u(rng) < 0.5 ? 1 : 3);
      break;
    case 1:
      s.model.kind = ModelKind::TwoMode;
      s.model.g = (0.02 + 0.9 * u(rng)) * s.model.omega;
      s.sector = Sector::kappa(1 + static_cast<int>(u(rng) * 4));
      break;
    default:
      s.model.kind = ModelKind::DrivenRabi;
      s.model.g = (0.05 + 1.5 * u(rng)) * s.model.omega;
      s.model.drive = u(rng) - 0.5;
      break;
  }
  const RecurrenceModel rec(s.model, s.sector);
  do {
    s.energy = -1.0 + 8.0 * u(rng);
  } while (rec.distance_to_pole(s.energy) < 1e-3);
  return s;
}

}  // namespace

TEST(ContinuedFraction, ConstantCoefficients) {
  const auto v = eval_continued_fraction(ConstantCoeffs{3.0, 2.0}, 0);
  EXPECT_TRUE(v.converged);
  EXPECT_NEAR(v.value, -1.0, 1e-12);
  EXPECT_LE(v.residual, 1e-12);
  const auto w = eval_continued_fraction(ConstantCoeffs{2.5, 1.0}, 0);
  EXPECT_NEAR(w.value, -0.5, 1e-12);
  // F = R_0 + a(0) for the surrogate
  EXPECT_NEAR(v.value + 3.0, 2.0, 1e-12);
}

TEST(ContinuedFraction, ConstantCoefficientFamily) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(0.1, 5.0);
  for (int i = 0; i < 100; ++i) {
    const double b = u(rng);
    const double a = 2.0 * std::sqrt(b) * (1.05 + u(rng));
    const double exact = -(a - std::sqrt(a * a - 4 * b)) / 2;
    EXPECT_NEAR(eval_continued_fraction(ConstantCoeffs{a, b}, 3).value, exact, 1e-12);
    EXPECT_NEAR(backward_recursion_ratio(ConstantCoeffs{a, b}, 0, 400), exact, 1e-12);
  }
}

TEST(ContinuedFraction, BackwardRecursionConstant) {
  EXPECT_NEAR(backward_recursion_ratio(ConstantCoeffs{3.0, 2.0}, 0, 200), -1.0, 1e-12);
  EXPECT_NEAR(backward_recursion_ratio(ConstantCoeffs{2.5, 1.0}, 0, 200), -0.5, 1e-12);
  EXPECT_THROW(backward_recursion_ratio(ConstantCoeffs{3.0, 2.0}, 5, 10), Error);
}

TEST(ContinuedFraction, Preconditions) {
  CFOptions bad;
  bad.rel_tol = 0.0;
  EXPECT_THROW(eval_continued_fraction(ConstantCoeffs{3, 2}, 0, bad), Error);
  bad = {};
  bad.max_depth = 4;
  EXPECT_THROW(eval_continued_fraction(ConstantCoeffs{3, 2}, 0, bad), Error);
  try {
    eval_continued_fraction(NanAt{5}, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::CoefficientPole);
  }
}

TEST(ContinuedFraction, NonConvergenceIsAFlag) {
  // a^2 < 4b: no minimal solution, the convergents oscillate
  CFOptions o;
  o.max_depth = 4096;
  const auto v = eval_continued_fraction(ConstantCoeffs{1.0, 1.0}, 0, o);
  EXPECT_FALSE(v.converged);
  EXPECT_EQ(v.depth, 4096);
}

TEST(ContinuedFraction, TwoPhotonExample) {
  const ThreeTermCoeffs c({ModelKind::TwoPhoton, 1.0, 0.5, 0.2, 0.0}, Sector::q(1), 0.0);
  const auto v = eval_continued_fraction(c, 0);
  EXPECT_TRUE(v.converged);
  EXPECT_LE(v.depth, 1024);
  EXPECT_TRUE(std::isfinite(v.value));
  const double back = backward_recursion_ratio(c, 0, 2000);
  EXPECT_NEAR(back, v.value, 1e-12 * std::max(1.0, std::abs(v.value)));
}

TEST(ContinuedFraction, EvaluatorsAgreeOnRandomSamples) {
  std::mt19937 rng(2024);
  for (int i = 0; i < 300; ++i) {
    const Sample s = random_sample(rng);
    const ThreeTermCoeffs c(s.model, s.sector, s.energy);
    for (int start : {0, 3}) {
      const auto v = eval_continued_fraction(c, start);
      ASSERT_TRUE(v.converged);
      const double back = backward_recursion_ratio(c, start, 4096);
      EXPECT_LE(std::abs(back - v.value), 1e-9 * std::max(1.0, std::abs(v.value)))
          << to_string(s.model.kind) << " g=" << s.model.g << " E=" << s.energy;
    }
  }
}

TEST(ContinuedFraction, DepthMonotonicity) {
  // residual at depth N vs 2N for N >= 256 on converged instances
  std::mt19937 rng(99);
  int total = 0;
  int monotone = 0;
  for (int i = 0; i < 200; ++i) {
    const Sample s = random_sample(rng);
    const ThreeTermCoeffs c(s.model, s.sector, s.energy);
    CFOptions o;
    o.rel_tol = 1e-300;  // never stop early: record the raw residual per depth
    double prev = -1.0;
    bool ok = true;
    for (int depth : {512, 1024, 2048}) {
      o.max_depth = depth;
      o.initial_depth = depth / 2;
      const auto v = eval_continued_fraction(c, 0, o);
      // Lentz products accumulate rounding with depth, so once converged the
      // residual is a slowly growing random walk; below this floor it is noise
      const double floor = 1e-13 * std::max(1.0, std::abs(v.value));
      if (prev >= 0.0 && v.residual > std::max(prev, floor)) ok = false;
      prev = v.residual;
    }
    ++total;
    if (ok) ++monotone;
  }
  EXPECT_GE(monotone, 0.95 * total);
}

TEST(ContinuedFraction, MinimalRatioAsymptotics) {
  const ThreeTermCoeffs tp({ModelKind::TwoPhoton, 1.0, 0.3, 0.2, 0.0}, Sector::q(1), 0.1);
  auto r = minimal_ratio_sequence(tp, 1990, 2000);
  ASSERT_EQ(r.size(), 11u);
  EXPECT_NEAR(2000 * r.back() / 0.2, 1.0, 0.01);
  const ThreeTermCoeffs tm({ModelKind::TwoMode, 1.0, 0.3, 0.5, 0.0}, Sector::kappa(1), 0.1);
  r = minimal_ratio_sequence(tm, 1999, 2000);
  EXPECT_NEAR(2000 * r.back() / 0.5, 1.0, 0.01);
  const ThreeTermCoeffs dr({ModelKind::DrivenRabi, 1.0, 0.3, 0.5, 0.1}, Sector::trivial(), 0.1);
  r = minimal_ratio_sequence(dr, 1999, 2000);
  EXPECT_NEAR(2000 * r.back() / 1.0, 1.0, 0.01);
  r = minimal_ratio_sequence(ConstantCoeffs{3.0, 2.0}, 0, 5);
  for (double x : r) EXPECT_NEAR(x, -1.0, 1e-12);
  EXPECT_THROW(minimal_ratio_sequence(ConstantCoeffs{3.0, 2.0}, 4, 4), Error);
}
