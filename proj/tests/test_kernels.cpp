#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "viscobem/error.hpp"
#include "viscobem/kernels.hpp"

using namespace viscobem;

namespace {

// mu = 1, nu = 0.25
const Material kUnit{2.5, 0.25};

std::mt19937 rng(1234);

Vec2 random_point(double scale = 3.0) {
  std::uniform_real_distribution<double> d(-scale, scale);
  return {d(rng), d(rng)};
}

Vec2 random_unit() {
  std::uniform_real_distribution<double> d(0.0, 2.0 * oracle::pi);
  const double a = d(rng);
  return {std::cos(a), std::sin(a)};
}

/// Stress (xx, yy, xy) at xi of the displacement field f(xi), by central differences.
template <class F>
Stress stress_of_field(F&& f, const Vec2& xi, const Material& mat, double h = 1e-5) {
  Mat2 grad;
  for (int k = 0; k < 2; ++k) {
    Vec2 d = Vec2::Zero();
    d(k) = h;
    grad.col(k) = (f(xi + d) - f(xi - d)) / (2.0 * h);
  }
  return oracle::plane_strain_stress({grad(0, 0), grad(1, 1), 0.5 * (grad(0, 1) + grad(1, 0))}, mat.E, mat.nu);
}

}  // namespace

TEST(KelvinU, WorkedValue) {
  const Mat2 U = kelvin_U(Vec2(1.0, 0.0), Vec2::Zero(), kUnit);
  EXPECT_NEAR(U(0, 0), 1.0 / (6.0 * oracle::pi), 1e-15);
  EXPECT_NEAR(U(0, 0), 0.0530516, 1e-7);
  EXPECT_EQ(U(0, 1), 0.0);
  EXPECT_EQ(U(1, 0), 0.0);
  EXPECT_NEAR(U(1, 1), 0.0, 1e-17);
}

TEST(KelvinU, MatchesIndependentFormula) {
  for (int i = 0; i < 50; ++i) {
    const Vec2 x = random_point(), y = random_point();
    const Material m{std::uniform_real_distribution<double>(1.0, 100.0)(rng),
                     std::uniform_real_distribution<double>(0.0, 0.45)(rng)};
    const Mat2 ref = oracle::kelvin_displacement(x, y, m.E, m.nu);
    EXPECT_LT((kelvin_U(x, y, m) - ref).norm(), 1e-13 * (1.0 + ref.norm()));
  }
}

TEST(KelvinU, ReciprocityFor100Pairs) {
  for (int i = 0; i < 100; ++i) {
    const Vec2 x = random_point(), y = random_point();
    const Mat2 a = kelvin_U(x, y, kUnit);
    EXPECT_LT((a - kelvin_U(y, x, kUnit).transpose()).norm(), 1e-15 * (1.0 + a.norm()));
    EXPECT_EQ(a(0, 1), a(1, 0));
  }
}

TEST(KelvinU, ScalingShiftsDiagonalOnly) {
  const double nu = 0.3, lambda = 3.7;
  const Material m{2.0 * (1.0 + nu), nu};  // mu = 1
  const Vec2 x(0.3, -1.2), y(1.1, 0.4);
  const Mat2 d = kelvin_U(lambda * x, lambda * y, m) - kelvin_U(x, y, m);
  const double shift = -(3.0 - 4.0 * nu) * std::log(lambda) / (8.0 * oracle::pi * (1.0 - nu));
  EXPECT_NEAR(d(0, 0), shift, 1e-14);
  EXPECT_NEAR(d(1, 1), shift, 1e-14);
  EXPECT_NEAR(d(0, 1), 0.0, 1e-15);
  EXPECT_NEAR(d(1, 0), 0.0, 1e-15);
}

TEST(KelvinU, SourcePointIsSingular) {
  try {
    kelvin_U(Vec2(1.0, 2.0), Vec2(1.0, 2.0), kUnit);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingularEvaluation);
  }
}

TEST(KelvinT, WorkedValue) {
  const Mat2 T = kelvin_T(Vec2(1.0, 0.0), Vec2::Zero(), Vec2(1.0, 0.0), kUnit);
  EXPECT_NEAR(T(0, 0), -2.5 / (3.0 * oracle::pi), 1e-15);
  EXPECT_NEAR(T(1, 1), -0.5 / (3.0 * oracle::pi), 1e-15);
  EXPECT_NEAR(T(0, 0), -0.26526, 1e-5);
  EXPECT_NEAR(T(1, 1), -0.05305, 1e-5);
  EXPECT_NEAR(T(0, 1), 0.0, 1e-17);
  EXPECT_NEAR(T(1, 0), 0.0, 1e-17);
}

TEST(KelvinT, DoublingDistanceHalvesEntries) {
  for (int i = 0; i < 20; ++i) {
    const Vec2 y = random_point(), r = random_point(), n = random_unit();
    const Mat2 a = kelvin_T(y + r, y, n, kUnit);
    const Mat2 b = kelvin_T(y + 2.0 * r, y, n, kUnit);
    EXPECT_LT((b - 0.5 * a).norm(), 1e-14 * a.norm());
  }
}

TEST(KelvinT, TangentNormalLeavesAntisymmetricPart) {
  const double nu = 0.25;
  const Vec2 r(0.6, 0.8);
  const Vec2 n(-0.8, 0.6);
  const Mat2 T = kelvin_T(r, Vec2::Zero(), n, kUnit);
  EXPECT_NEAR(T(0, 0), 0.0, 1e-15);
  EXPECT_NEAR(T(1, 1), 0.0, 1e-15);
  EXPECT_NEAR(T(0, 1), -T(1, 0), 1e-15);
  const double expected = -(1.0 - 2.0 * nu) * (r.x() * n.y() - r.y() * n.x()) / (4.0 * oracle::pi * (1.0 - nu));
  EXPECT_NEAR(T(0, 1), expected, 1e-15);
}

TEST(KelvinT, AgreesWithDifferentiatedDisplacementKernel) {
  for (int i = 0; i < 20; ++i) {
    const Vec2 x = random_point(), y = random_point(), n = random_unit();
    if ((x - y).norm() < 0.3) continue;
    const Material m{30.0, 0.3};
    const Mat2 ref = oracle::traction_by_differences(x, y, n, m.E, m.nu);
    EXPECT_LT((kelvin_T(x, y, n, m) - ref).norm(), 1e-7 * ref.norm());
  }
}

TEST(KelvinT, ContourIntegralGivesFreeTerm) {
  const Material m{7.0, 0.33};
  // Ellipse around the origin, normals outward.
  const double a = 1.3, b = 0.7;
  auto contour = [&](const Vec2& xi) {
    Mat2 sum = Mat2::Zero();
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        sum(i, j) = oracle::integrate(
            [&](double th) {
              const Vec2 x(a * std::cos(th), b * std::sin(th));
              const Vec2 dx(-a * std::sin(th), b * std::cos(th));
              const Vec2 n = Vec2(dx.y(), -dx.x()).normalized();
              return kelvin_T(x, xi, n, m)(i, j) * dx.norm();
            },
            0.0, 2.0 * oracle::pi, 400);
      }
    }
    return sum;
  };
  EXPECT_LT((contour(Vec2(0.2, -0.1)) + Mat2::Identity()).norm(), 1e-8);
  EXPECT_LT((contour(Vec2(-0.9, 0.3)) + Mat2::Identity()).norm(), 1e-8);
  EXPECT_LT(contour(Vec2(2.0, 1.0)).norm(), 1e-8);
}

TEST(KelvinT, BadNormalIsRejected) {
  try {
    kelvin_T(Vec2(1.0, 0.0), Vec2::Zero(), Vec2(1.0, 1e-5), kUnit);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidNormal);
  }
  EXPECT_THROW(kelvin_T(Vec2::Zero(), Vec2::Zero(), Vec2(1.0, 0.0), kUnit), Error);
}

TEST(KelvinD, IsTheStressOfTheDisplacementKernel) {
  const Material m{11.0, 0.2};
  for (int i = 0; i < 10; ++i) {
    const Vec2 x = random_point(), xi = random_point();
    if ((x - xi).norm() < 0.5) continue;
    const StressBlock D = kelvin_D(x, xi, m);
    for (int k = 0; k < 2; ++k) {
      const Stress ref = stress_of_field([&](const Vec2& p) -> Vec2 { return kelvin_U(x, p, m).col(k); }, xi, m);
      EXPECT_LT((D.col(k) - ref).norm(), 1e-7 * ref.norm()) << "k=" << k;
    }
  }
}

TEST(KelvinS, IsTheStressOfTheTransposedTractionKernel) {
  const Material m{11.0, 0.2};
  for (int i = 0; i < 10; ++i) {
    const Vec2 x = random_point(), xi = random_point(), n = random_unit();
    if ((x - xi).norm() < 0.5) continue;
    const StressBlock S = kelvin_S(x, xi, n, m);
    for (int k = 0; k < 2; ++k) {
      const Stress ref =
          stress_of_field([&](const Vec2& p) -> Vec2 { return kelvin_T(x, p, n, m).row(k).transpose(); }, xi, m);
      EXPECT_LT((S.col(k) - ref).norm(), 1e-6 * ref.norm()) << "k=" << k;
    }
  }
}
