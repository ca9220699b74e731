#pragma once

#include <vector>

#include "viscobem/mixed_system.hpp"
#include "viscobem/timestepper.hpp"

namespace viscobem {

/// min 1/2 x'Kx + c'x + offset  subject to  x <= b, together with the
/// unsymmetrised complementarity system it approximates:
///   x <= b,  lambda = A x + f <= 0,  lambda_i (x_i - b_i) = 0,
/// where lambda_i is the contact traction at node i times its tributary length.
/// K = (A + A') / 2. When A is empty only the QP is solved.
struct ContactQP {
  Matrix K;
  Vector c;
  Vector b;
  double offset = 0.0;
  Matrix A;
  Vector f;
  double asymmetry = 0.0;  ///< |A - A'| / |A| (Frobenius)

  double energy(const Vector& x) const { return 0.5 * x.dot(K * x) + c.dot(x) + offset; }
};

struct QpOptions {
  int max_iterations = 0;  ///< 0 means 10 m
};

struct QpResult {
  Vector x;
  Vector lambda;  ///< multipliers on the active set, zero elsewhere (<= 0 at a solution)
  std::vector<char> active;
  int iterations = 0;         ///< QP iterations
  int polish_iterations = 0;  ///< exchange steps on the unsymmetrised system
};

/// Primal active-set method on (K, c) started from the feasible point
/// min(0, b). Constraints enter and leave one at a time; ties go to the
/// lowest index. Positive semidefinite K is handled by stepping along
/// null-space descent directions; an unbounded problem is reported as
/// ill-posed. If A is present, the active set is then corrected by single
/// exchanges until (A, f) satisfies the complementarity conditions, and
/// lambda = A x + f.
QpResult solve_qp(const ContactQP& qp, const QpOptions& opt = {});

struct KktReport {
  double primal = 0.0;           ///< max(x - b, 0)
  double dual = 0.0;             ///< max(lambda, 0)
  double complementarity = 0.0;  ///< max |lambda_i (x_i - b_i)|
  double stationarity = 0.0;     ///< |Kx + c - lambda|_inf
  double x_scale = 1.0;
  double force_scale = 1.0;

  /// All residuals below tol times their natural scale.
  bool within(double tol) const;
};

KktReport kkt_check(const ContactQP& qp, const Vector& x, const Vector& lambda);

/// b_i = ((tau + chi) / tau) g0_i - (chi / tau) un_prev_i (Kelvin-Voigt).
Vector contact_bounds(double chi, double tau, const Vector& un_prev, const Vector& g0);

/// General form b = a0 g0 - a1 un1 + a2 un2, so that the recovered u.d <= g0.
Vector contact_bounds(const StepCoeffs& c, const Vector& un1, const Vector& un2, const Vector& g0);

/// Slot-sized weights w with  sum_s t_s . w_s = int_Gamma t . v dS  for
/// linear t (element ends) and v (nodes), both in node frames. The lumped
/// variant applies the trapezoidal rule on each element.
Vector boundary_pairing_weights(const RegionLayout& region, const Vector& v, bool lumped = false);

/// int_Gamma t . v dS over one region.
double boundary_pairing(const RegionLayout& region, const Vector& t, const Vector& v, bool lumped = false);

/// Response of all boundary fields to the contact displacements:
/// v = v0 + V x, t = t0 + T x per region. The energy uses the lumped pairing
/// B, so that A' = T' B V and A x + f is the nodal contact traction times the
/// tributary length.
class ContactOperator {
 public:
  ContactOperator() = default;
  explicit ContactOperator(const MixedSystem& system);

  int size() const { return static_cast<int>(A_.rows()); }
  const Matrix& A() const { return A_; }
  const Matrix& K() const { return K_; }
  double asymmetry() const { return asymmetry_; }
  /// Tributary length of each contact node.
  const Vector& weights() const { return w_; }
  const std::vector<Matrix>& V() const { return V_; }
  const std::vector<Matrix>& T() const { return T_; }

  /// QP for one step. `base` are the fields for x = 0, `known` the
  /// transformed prescribed data (Neumann slots enter the load term).
  ContactQP condense(const MixedSystem& system, const std::vector<RegionValues>& base,
                     const std::vector<RegionValues>& known, const Vector& b) const;

  /// 1/2 int t.v - int_{Gamma_N} t_known . v evaluated on full fields
  /// with the lumped pairing.
  static double energy(const MixedSystem& system, const std::vector<RegionValues>& fields,
                       const std::vector<RegionValues>& known);

 private:
  std::vector<Matrix> V_, T_, BV_;
  Matrix A_, K_;
  Vector w_;
  double asymmetry_ = 0.0;
};

/// Sum of lengths of contact elements whose two nodes are both active.
double contact_zone_length(const MixedSystem& system, const std::vector<char>& active);

}  // namespace viscobem
