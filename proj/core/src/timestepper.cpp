#include "viscobem/timestepper.hpp"

#include <cmath>

#include "viscobem/error.hpp"

namespace viscobem {

StepCoeffs step_coefficients(const RheologyCoeffs& r, double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw Error(ErrorCode::Configuration, "time step must be positive");
  const double A = r.xi2 + tau * r.xi1 + tau * tau * r.xi0;
  if (A == 0.0) throw Error(ErrorCode::DegenerateRheology, "xi2 + tau xi1 + tau^2 xi0 vanishes");
  StepCoeffs c;
  c.a0 = (r.chi2 + tau * r.chi1 + tau * tau * r.chi0) / A;
  c.a1 = (2.0 * r.chi2 + tau * r.chi1) / A;
  c.a2 = r.chi2 / A;
  c.d1 = (2.0 * r.xi2 + tau * r.xi1) / A;
  c.d2 = r.xi2 / A;
  if (c.a0 == 0.0) throw Error(ErrorCode::NonInvertibleTransform, "a0 vanishes; displacement cannot be recovered");
  return c;
}

double transform_dirichlet(const StepCoeffs& c, double w, double u1, double u2) {
  return c.a0 * w - c.a1 * u1 + c.a2 * u2;
}

double transform_neumann(const StepCoeffs& c, double g, double p1, double p2) {
  return g - c.d1 * p1 + c.d2 * p2;
}

double recover_displacement(const StepCoeffs& c, double v, double u1, double u2) {
  return (v + c.a1 * u1 - c.a2 * u2) / c.a0;
}

double recover_traction(const StepCoeffs& c, double t, double p1, double p2) {
  return t + c.d1 * p1 - c.d2 * p2;
}

double kv_transform_dirichlet(double chi, double tau, double w, double w_prev) {
  return ((chi + tau) / tau) * w - (chi / tau) * w_prev;
}

double kv_recover_displacement(double chi, double tau, double v, double u_prev) {
  return (tau * v + chi * u_prev) / (tau + chi);
}

Vector transform_dirichlet(const StepCoeffs& c, const Vector& w, const Vector& u1, const Vector& u2) {
  return c.a0 * w - c.a1 * u1 + c.a2 * u2;
}

Vector transform_neumann(const StepCoeffs& c, const Vector& g, const Vector& p1, const Vector& p2) {
  return g - c.d1 * p1 + c.d2 * p2;
}

Vector recover_displacement(const StepCoeffs& c, const Vector& v, const Vector& u1,
                            const Vector& u2) {
  return (v + c.a1 * u1 - c.a2 * u2) / c.a0;
}

Vector recover_traction(const StepCoeffs& c, const Vector& t, const Vector& p1, const Vector& p2) {
  return t + c.d1 * p1 - c.d2 * p2;
}

}  // namespace viscobem
