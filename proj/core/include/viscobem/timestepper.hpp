#pragma once

#include <optional>

#include "viscobem/model.hpp"
#include "viscobem/types.hpp"

namespace viscobem {

/// Per-step scalars of the implicit Euler discretisation of
///   xi2 s'' + xi1 s' + xi0 s = C e(chi2 u'' + chi1 u' + chi0 u).
/// With A = xi2 + tau xi1 + tau^2 xi0:
///   v = a0 u^k - a1 u^{k-1} + a2 u^{k-2}
///   s^k = C e(v) + d1 s^{k-1} - d2 s^{k-2}
struct StepCoeffs {
  double a0 = 1.0;
  double a1 = 0.0;
  double a2 = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;

  bool has_stress_memory() const { return d1 != 0.0 || d2 != 0.0; }
};

StepCoeffs step_coefficients(const RheologyCoeffs& r, double tau);

/// Which recursion the time loop uses for a region.
enum class TransformPath {
  General,
  KelvinVoigt,
  Auto,  ///< KelvinVoigt when the coefficients allow it
};

// Scalar forms, applied componentwise by the time loop. The Dirichlet
// transform takes the displacement history, which equals the prescribed
// data on the Dirichlet boundary.
double transform_dirichlet(const StepCoeffs& c, double w, double u1, double u2);
double transform_neumann(const StepCoeffs& c, double g, double p1, double p2);
double recover_displacement(const StepCoeffs& c, double v, double u1, double u2);
double recover_traction(const StepCoeffs& c, double t, double p1, double p2);

/// Kelvin-Voigt forms: v = ((chi + tau) w - chi w_prev) / tau and
/// u = (tau v + chi u_prev) / (tau + chi).
double kv_transform_dirichlet(double chi, double tau, double w, double w_prev);
double kv_recover_displacement(double chi, double tau, double v, double u_prev);

/// Vector versions.
Vector transform_dirichlet(const StepCoeffs& c, const Vector& w, const Vector& u1, const Vector& u2);
Vector transform_neumann(const StepCoeffs& c, const Vector& g, const Vector& p1, const Vector& p2);
Vector recover_displacement(const StepCoeffs& c, const Vector& v, const Vector& u1,
                            const Vector& u2);
Vector recover_traction(const StepCoeffs& c, const Vector& t, const Vector& p1, const Vector& p2);

/// Last two steps of one field.
struct TwoStepHistory {
  Vector prev;   ///< step k-1
  Vector prev2;  ///< step k-2

  explicit TwoStepHistory(Eigen::Index n = 0) : prev(Vector::Zero(n)), prev2(Vector::Zero(n)) {}
  void push(const Vector& current) {
    prev2 = prev;
    prev = current;
  }
};

/// Per-region histories of boundary displacements (nodal) and physical
/// tractions (element-end slots), in the node frames used by the solver.
struct History {
  TwoStepHistory u;
  TwoStepHistory p;
  int step = 0;
};

}  // namespace viscobem
