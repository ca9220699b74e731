#pragma once

#include <array>
#include <vector>

#include <Eigen/LU>

#include "viscobem/assembly.hpp"
#include "viscobem/model.hpp"
#include "viscobem/timestepper.hpp"

namespace viscobem {

enum class DofKind { Dirichlet, Neumann, Contact, Interface };

/// A prescribed value k0 * g0(t) + k1 * g1(t), where g_c is component c of a
/// boundary condition (value times its load program).
struct KnownSource {
  int bc = -1;  ///< index into Model::boundary; -1 means identically zero
  double k0 = 0.0;
  double k1 = 0.0;

  double evaluate(const Model& model, double t) const;
};

/// Classification of one region node. Displacement and traction components
/// are taken along the columns of `frame` (identity except at contact nodes,
/// where column 0 is the contact direction).
struct NodeLayout {
  Mat2 frame = Mat2::Identity();
  std::array<DofKind, 2> kind{DofKind::Neumann, DofKind::Neumann};
  std::array<KnownSource, 2> dirichlet{};
  int contact = -1;  ///< index into MixedSystem::contact
};

/// One element end. Its traction is expressed in the frame of its node.
struct SlotLayout {
  std::array<bool, 2> known{true, true};
  std::array<KnownSource, 2> value{};
};

struct RegionLayout {
  BemSystem bem;
  RheologyCoeffs rheology;
  std::vector<NodeLayout> node;  ///< per local node
  std::vector<SlotLayout> slot;  ///< per local element end, index 2*element + end
  Matrix Hf;                     ///< H in node frames
  Matrix Gf;                     ///< G in node frames
  std::vector<int> disp_col;     ///< per node-dir, unknown displacement column or -1
  std::vector<int> trac_col;     ///< per node-dir, unknown shared traction column or -1
  int row_offset = 0;

  int slot_node(int s) const { return bem.element_nodes[s / 2][s % 2]; }
};

struct ContactNode {
  int region = 0;
  int local_node = 0;
  int global_node = 0;
  Vec2 direction = Vec2::Zero();  ///< unit vector toward the obstacle
  double gap = 0.0;
  double arc = 0.0;  ///< arc-length coordinate along the contact group
};

/// Node pair glued across an interface.
struct InterfacePair {
  int region_a = 0, node_a = 0;  ///< region index (into MixedSystem::regions), local node
  int region_b = 0, node_b = 0;
};

enum class InterfaceRowType { Compatibility, Equilibrium };

struct InterfaceRow {
  int pair = 0;
  int dir = 0;
  InterfaceRowType type = InterfaceRowType::Compatibility;
  int row = 0;
};

/// Known data and solution of one region at one step (node-frame components).
struct RegionValues {
  Vector v;  ///< 2N nodal displacements (auxiliary)
  Vector t;  ///< 4E element-end tractions (auxiliary)
};

/// Mixed boundary-value system of all regions plus interface rows. The
/// matrix does not depend on time, so it is factorised once.
class MixedSystem {
 public:
  std::vector<RegionLayout> regions;
  std::vector<ContactNode> contact;
  std::vector<InterfacePair> pairs;
  std::vector<InterfaceRow> interface_rows;
  std::vector<StepCoeffs> coeffs;  ///< per region

  int size() const { return size_; }
  const Matrix& matrix() const { return A_; }
  double rcond() const { return rcond_; }

  /// Right-hand side for known values: `known[r].v` holds transformed
  /// Dirichlet values (other entries ignored), `known[r].t` transformed
  /// Neumann slot values; `interface_rhs` is indexed like interface_rows.
  Vector rhs(const std::vector<RegionValues>& known, const Vector& interface_rhs) const;

  Vector solve(const Vector& rhs) const { return lu_.solve(rhs); }

  /// Columns: response of the unknown vector to a unit auxiliary
  /// displacement at each contact node along its contact direction.
  const Matrix& contact_response() const { return Z_; }

  /// Full boundary fields from the unknown vector, the known values and the
  /// contact displacements.
  std::vector<RegionValues> extract(const Vector& z, const std::vector<RegionValues>& known,
                                    const Vector& contact_values) const;

  friend MixedSystem build_mixed_system(const Model& model, std::vector<BemSystem> systems,
                                        std::vector<StepCoeffs> coeffs);

 private:
  int size_ = 0;
  Matrix A_;
  Eigen::PartialPivLU<Matrix> lu_;
  Matrix Z_;
  double rcond_ = 0.0;
};

/// Classifies every node-direction of a region (Dirichlet > Interface >
/// Contact > Neumann), chooses node frames and marks known traction slots.
RegionLayout classify_region(const Model& model, BemSystem bem,
                             const std::vector<int>& interface_groups,
                             std::vector<ContactNode>& contact, int region_index);

/// Builds and factorises the global system. `systems` holds one assembled
/// region each (rigid-body diagonal applied); `coeffs` the matching step
/// coefficients (used by interface rows).
MixedSystem build_mixed_system(const Model& model, std::vector<BemSystem> systems,
                               std::vector<StepCoeffs> coeffs);

/// Values of the prescribed data at time t in node frames: Dirichlet values in
/// `v`, known Neumann slot values in `t`, zero elsewhere.
std::vector<RegionValues> boundary_data(const Model& model, const MixedSystem& system, double t);

}  // namespace viscobem
