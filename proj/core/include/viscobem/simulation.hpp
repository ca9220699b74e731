#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "viscobem/contact.hpp"
#include "viscobem/mixed_system.hpp"
#include "viscobem/postprocess.hpp"
#include "viscobem/timestepper.hpp"

namespace viscobem {

struct SimulationOptions {
  double tau = 1.0;
  double total_time = 1.0;
  TransformPath path = TransformPath::Auto;
  QuadratureOptions quadrature;
  QpOptions qp;
};

/// Number of steps T / tau; throws a configuration error unless it is a
/// positive integer.
int step_count(double total_time, double tau);

/// Boundary fields of one region at one step, in node frames.
struct RegionStep {
  Vector u;  ///< physical displacements (2N)
  Vector v;  ///< auxiliary displacements (2N)
  Vector p;  ///< physical tractions (4E)
  Vector t;  ///< auxiliary tractions t(e(v)) (4E)
};

struct ContactStep {
  QpResult qp;
  Vector b;
  KktReport kkt;
  double asymmetry = 0.0;
  double energy = 0.0;
  double zone_length = 0.0;
};

struct StepState {
  int step = 0;
  double time = 0.0;
  std::vector<RegionStep> regions;
  std::vector<RegionValues> data;   ///< prescribed data at this time (untransformed)
  std::vector<RegionValues> known;  ///< transformed prescribed data
  Vector interior_u;                ///< 2P physical displacements
  Vector interior_v;                ///< 2P auxiliary displacements
  Vector interior_sigma;            ///< 3P physical stresses
  Vector interior_sigma_aux;        ///< 3P stresses C e(v)
  std::optional<ContactStep> contact;
  double residual = 0.0;  ///< |Az - b| / |b| of the linear solve
};

/// Time loop of one case. The boundary system is assembled and factorised
/// once; each step transforms the data, solves, optionally solves the
/// contact problem and recovers the physical fields.
class Simulation {
 public:
  Simulation(const Model& model, const SimulationOptions& options);

  const Model& model() const { return *model_; }
  const SimulationOptions& options() const { return options_; }
  const MixedSystem& system() const { return system_; }
  const std::vector<StepCoeffs>& coeffs() const { return system_.coeffs; }
  /// Resolved transform per region.
  const std::vector<TransformPath>& paths() const { return paths_; }
  /// Kelvin-Voigt relaxation time per region (empty optional otherwise).
  const std::vector<std::optional<double>>& kv_times() const { return kv_; }
  int num_steps() const { return steps_; }

  /// Registers interior points (probes and snapshot grids) before stepping.
  void set_interior_points(const std::vector<Vec2>& points);
  const std::vector<InteriorPointInfo>& interior_points() const { return points_; }

  const StepState& state() const { return state_; }
  const StepState& step();
  void run(const std::function<void(const StepState&)>& observer = {});
  bool finished() const { return state_.step >= steps_; }

 private:
  void interior_initial();

  const Model* model_;
  SimulationOptions options_;
  MixedSystem system_;
  ContactOperator contact_op_;
  std::vector<TransformPath> paths_;
  std::vector<std::optional<double>> kv_;
  int steps_ = 0;
  std::vector<History> history_;
  std::vector<InteriorPointInfo> points_;
  std::vector<InteriorOperator> interior_ops_;
  std::vector<std::vector<int>> region_points_;
  TwoStepHistory iu_, isig_;
  StepState state_;
};

struct BoundaryProbe {
  std::string name;
  int node = 0;  ///< global node id
};

struct InteriorProbe {
  std::string name;
  Vec2 point = Vec2::Zero();
};

struct BoundarySample {
  int step = 0;
  double time = 0.0;
  std::string probe;
  Vec2 u, v, p;
};

struct InteriorSample {
  int step = 0;
  double time = 0.0;
  std::string probe;
  Vec2 u, v;
  Stress sigma;
};

struct TimeSeries {
  std::vector<BoundarySample> boundary;
  std::vector<InteriorSample> interior;
};

/// Displacement, auxiliary displacement and mean element-end traction of a
/// boundary node in x/y (first region containing the node).
BoundarySample sample_boundary(const Simulation& sim, const StepState& state, const BoundaryProbe& probe);

/// Runs the whole loop and collects probe samples for steps 1..T/tau.
/// Interior probes must be the first points registered on the simulation.
TimeSeries run_time_loop(const Model& model, const SimulationOptions& options,
                         const std::vector<BoundaryProbe>& boundary_probes,
                         const std::vector<InteriorProbe>& interior_probes);

}  // namespace viscobem
