#include "viscobem/kernels.hpp"

#include <cmath>
#include <numbers>

#include "viscobem/error.hpp"

namespace viscobem {

namespace {

constexpr double pi = std::numbers::pi;

double checked_distance(const Vec2& d) {
  const double r = d.norm();
  if (!(r > 0.0)) throw Error(ErrorCode::SingularEvaluation, "kernel evaluated at its source point");
  return r;
}

}  // namespace

Mat2 kelvin_U(const Vec2& x, const Vec2& xi, const Material& mat) {
  const Vec2 d = x - xi;
  const double r = checked_distance(d);
  const Vec2 g = d / r;
  const double nu = mat.nu;
  const double c = 1.0 / (8.0 * pi * mat.shear_modulus() * (1.0 - nu));
  return c * ((3.0 - 4.0 * nu) * std::log(1.0 / r) * Mat2::Identity() + g * g.transpose());
}

Mat2 kelvin_T(const Vec2& x, const Vec2& xi, const Vec2& n, const Material& mat) {
  if (std::abs(n.norm() - 1.0) > 1e-12) throw Error(ErrorCode::InvalidNormal, "kernel normal is not a unit vector");
  const Vec2 d = x - xi;
  const double r = checked_distance(d);
  const Vec2 g = d / r;
  const double nu = mat.nu;
  const double drdn = g.dot(n);
  const double k = 1.0 - 2.0 * nu;
  const Mat2 sym = drdn * (k * Mat2::Identity() + 2.0 * g * g.transpose());
  const Mat2 anti = k * (g * n.transpose() - n * g.transpose());
  return -(sym + anti) / (4.0 * pi * (1.0 - nu) * r);
}

StressBlock kelvin_D(const Vec2& x, const Vec2& xi, const Material& mat) {
  const Vec2 d = x - xi;
  const double r = checked_distance(d);
  const Vec2 g = d / r;
  const double nu = mat.nu;
  const double c = 1.0 / (4.0 * pi * (1.0 - nu) * r);
  const double k = 1.0 - 2.0 * nu;
  auto delta = [](int a, int b) { return a == b ? 1.0 : 0.0; };
  StressBlock out;
  static constexpr int I[3] = {0, 1, 0};
  static constexpr int J[3] = {0, 1, 1};
  for (int row = 0; row < 3; ++row) {
    const int i = I[row], j = J[row];
    for (int kk = 0; kk < 2; ++kk) {
      out(row, kk) = c * (k * (delta(kk, i) * g(j) + delta(kk, j) * g(i) - delta(i, j) * g(kk)) +
                          2.0 * g(i) * g(j) * g(kk));
    }
  }
  return out;
}

StressBlock kelvin_S(const Vec2& x, const Vec2& xi, const Vec2& n, const Material& mat) {
  const Vec2 d = x - xi;
  const double r = checked_distance(d);
  const Vec2 g = d / r;
  const double nu = mat.nu;
  const double drdn = g.dot(n);
  const double c = mat.shear_modulus() / (2.0 * pi * (1.0 - nu) * r * r);
  const double k = 1.0 - 2.0 * nu;
  auto delta = [](int a, int b) { return a == b ? 1.0 : 0.0; };
  StressBlock out;
  static constexpr int I[3] = {0, 1, 0};
  static constexpr int J[3] = {0, 1, 1};
  for (int row = 0; row < 3; ++row) {
    const int i = I[row], j = J[row];
    for (int kk = 0; kk < 2; ++kk) {
      const double a = 2.0 * drdn *
                       (k * delta(i, j) * g(kk) + nu * (delta(i, kk) * g(j) + delta(j, kk) * g(i)) -
                        4.0 * g(i) * g(j) * g(kk));
      const double b = 2.0 * nu * (n(i) * g(j) * g(kk) + n(j) * g(i) * g(kk));
      const double e = k * (2.0 * n(kk) * g(i) * g(j) + n(j) * delta(i, kk) + n(i) * delta(j, kk));
      const double f = (1.0 - 4.0 * nu) * n(kk) * delta(i, j);
      out(row, kk) = c * (a + b + e - f);
    }
  }
  return out;
}

}  // namespace viscobem
