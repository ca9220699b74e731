#pragma once

#include <vector>

#include "viscobem/assembly.hpp"
#include "viscobem/mixed_system.hpp"

namespace viscobem {

class Simulation;
struct StepState;

/// Node-frame vectors to global x/y components.
Vector nodes_to_global(const RegionLayout& region, const Vector& v);
Vector slots_to_global(const RegionLayout& region, const Vector& t);

struct InteriorPointInfo {
  Vec2 x = Vec2::Zero();
  int region = 0;  ///< index into MixedSystem::regions
  bool near_boundary = false;
};

/// Locates points; throws OutOfDomain for points outside every region or on
/// the boundary. Points closer than 0.1 element lengths to the boundary are
/// flagged near_boundary.
std::vector<InteriorPointInfo> locate_points(const Mesh& mesh, const MixedSystem& system,
                                             const std::vector<Vec2>& points);

/// Precomputed interior representation for a set of points of one region:
///   u(xi)     = sum U t - sum T' v
///   sigma(xi) = sum D t - sum S v
/// acting directly on node-frame boundary vectors.
class InteriorOperator {
 public:
  InteriorOperator() = default;
  InteriorOperator(const Mesh& mesh, const RegionLayout& region, const std::vector<Vec2>& points,
                   const QuadratureOptions& opt = {});

  int size() const { return static_cast<int>(points_.size()); }
  /// 2P displacements (x, y per point).
  Vector displacement(const Vector& v, const Vector& t) const { return Gu_ * t - Hu_ * v; }
  /// 3P stresses (xx, yy, xy per point).
  Vector stress(const Vector& v, const Vector& t) const { return Ds_ * t - Ss_ * v; }

 private:
  std::vector<Vec2> points_;
  Matrix Gu_, Hu_, Ds_, Ss_;
};

/// Displacement and stress of an elastostatic boundary solution (x/y
/// components, v nodal and t per element end) at interior points.
struct InteriorFields {
  std::vector<Vec2> u;
  std::vector<Stress> sigma;
  std::vector<char> near_boundary;
};
InteriorFields interior_fields(const Mesh& mesh, const BemSystem& bem, const Vector& v_xy,
                               const Vector& t_xy, const std::vector<Vec2>& points);

/// Elastic part of the tractions of Kelvin-Voigt regions:
///   t_el^k = (tau t(e(v^k)) + chi t_el^{k-1}) / (tau + chi),  viscous = p - t_el.
class ElasticSplit {
 public:
  ElasticSplit() = default;
  /// Starts from the elastic tractions of the initial displacement.
  ElasticSplit(const Simulation& sim);

  void update(const StepState& state);
  /// Elastic tractions per region (slot vectors, node frames).
  const std::vector<Vector>& elastic() const { return elastic_; }
  const std::vector<Vector>& previous() const { return previous_; }
  std::vector<Vector> viscous(const StepState& state) const;

 private:
  std::vector<double> chi_;
  double tau_ = 1.0;
  std::vector<Vector> elastic_, previous_;
};

struct EnergyRow {
  int step = 0;
  double time = 0.0;
  double stored = 0.0;
  double dissipated = 0.0;
  double work = 0.0;            ///< rectangle rule with the current load
  double work_trapezoid = 0.0;  ///< trapezoidal rule in time
  double slack = 0.0;           ///< E(u0) + work - stored - dissipated
};

/// Discrete energy balance of Kelvin-Voigt cases, evaluated on the boundary:
/// stored = 1/2 int t_el . u, dissipation increments (chi/tau) int dt_el . du,
/// work increments int_{Gamma_N} g^k . du.
class EnergyLedger {
 public:
  explicit EnergyLedger(const Simulation& sim);

  void update(const StepState& state);
  const std::vector<EnergyRow>& rows() const { return rows_; }
  /// slack >= -tol * (largest term so far) at every recorded step.
  bool inequality_holds(double tol = 1e-10) const;
  double min_relative_slack() const;

 private:
  const Simulation* sim_;
  ElasticSplit split_;
  std::vector<EnergyRow> rows_;
  std::vector<Vector> u_prev_, g_prev_;
};

/// Accumulated dissipation density sum (chi/tau) dsigma_el : C^-1 dsigma_el at
/// the interior points of a simulation (Kelvin-Voigt only).
class DissipationField {
 public:
  explicit DissipationField(const Simulation& sim);
  void update(const StepState& state);
  const Vector& density() const { return density_; }

 private:
  const Simulation* sim_;
  Vector sigma_el_;
  Vector density_;
};

/// Resultant forces of the physical tractions (and of their elastic part) per
/// bc-group, in x/y.
struct GroupForce {
  int group = 0;
  Vec2 total = Vec2::Zero();
  Vec2 elastic = Vec2::Zero();
};
std::vector<GroupForce> group_forces(const Mesh& mesh, const MixedSystem& system,
                                     const std::vector<Vector>& p,
                                     const std::vector<Vector>* elastic = nullptr);

}  // namespace viscobem
