#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "viscobem/types.hpp"

namespace viscobem {

// ---------------------------------------------------------------------------
// Mesh
// ---------------------------------------------------------------------------

/// Linear boundary element. The region interior lies to the left of n1 -> n2,
/// so the outward normal is the tangent rotated clockwise.
struct Element {
  int n1 = 0;
  int n2 = 0;
  int region = 0;
  int group = 0;
};

struct Mesh {
  std::vector<Vec2> nodes;
  std::vector<Element> elements;
  /// Boundary-condition group names indexed by group id.
  std::vector<std::string> group_names;

  int num_nodes() const { return static_cast<int>(nodes.size()); }
  int num_elements() const { return static_cast<int>(elements.size()); }

  /// Group id for a name, or -1.
  int group_id(std::string_view name) const;
  std::string group_name(int id) const;

  double element_length(int e) const;
  Vec2 element_tangent(int e) const;
  Vec2 element_normal(int e) const;
  double bbox_diagonal() const;

  /// Sorted, unique region ids.
  std::vector<int> region_ids() const;
  /// Element ids of one region, in mesh order.
  std::vector<int> region_elements(int region) const;
  /// Node ids touched by one region, in first-appearance order.
  std::vector<int> region_nodes(int region) const;
  /// Closed loops of one region as ordered element lists.
  std::vector<std::vector<int>> region_loops(int region) const;
  /// Signed area enclosed by a loop (positive for counter-clockwise).
  double loop_signed_area(const std::vector<int>& loop) const;
};

/// Signed polygon area of a region: sum over its loops.
double region_area(const Mesh& mesh, int region);

/// Winding-number test against all loops of a region.
bool point_in_region(const Mesh& mesh, int region, const Vec2& p);

/// Distance from a point to the nearest element of a region, together with
/// the length of that element.
std::pair<double, double> distance_to_boundary(const Mesh& mesh, int region,
                                               const Vec2& p);

// ---------------------------------------------------------------------------
// Material and rheology
// ---------------------------------------------------------------------------

/// Isotropic elastic moduli, always used in plane strain.
struct Material {
  double E = 1.0;
  double nu = 0.0;

  double shear_modulus() const { return E / (2.0 * (1.0 + nu)); }
  double lame_lambda() const { return E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu)); }

  /// Plane-strain stress from in-plane strain (exx, eyy, exy).
  Stress stress_from_strain(const Eigen::Vector3d& strain) const;
  /// Plane-strain in-plane strain (exx, eyy, exy) from stress.
  Eigen::Vector3d strain_from_stress(const Stress& stress) const;
  /// sigma : C^{-1} sigma, i.e. C e : e for the strain generating sigma.
  double energy_product(const Stress& a, const Stress& b) const;
};

/// Coefficients of  xi2 s'' + xi1 s' + xi0 s = C e(chi2 u'' + chi1 u' + chi0 u).
struct RheologyCoeffs {
  double chi0 = 1.0;
  double chi1 = 0.0;
  double chi2 = 0.0;
  double xi0 = 1.0;
  double xi1 = 0.0;
  double xi2 = 0.0;
  std::string preset = "custom";

  std::array<double, 3> chi() const { return {chi0, chi1, chi2}; }
  std::array<double, 3> xi() const { return {xi0, xi1, xi2}; }
};

/// Named parameters of the spring-dashpot presets. `chi` is the relaxation
/// time of the primary dashpot, `alpha` scales the series spring and `mu2`
/// is the relaxation time of the secondary dashpot.
struct RheologyParams {
  std::optional<double> chi;
  std::optional<double> alpha;
  std::optional<double> mu2;
};

/// Names accepted by rheology_preset.
const std::vector<std::string>& rheology_preset_names();

/// Builds the coefficient tuple of a named model. Presets are normalised to
/// xi0 = 1 (every preset in the catalogue has xi0 present).
RheologyCoeffs rheology_preset(std::string_view name, const RheologyParams& params = {});

/// Relaxation time chi if the coefficients describe a Kelvin-Voigt solid
/// (chi0 == xi0 > 0 and chi2 == xi1 == xi2 == 0); Hooke gives 0.
std::optional<double> kelvin_voigt_time(const RheologyCoeffs& r);

/// Diagnostics for a coefficient tuple (empty when valid).
std::vector<std::string> rheology_diagnostics(const RheologyCoeffs& r);

struct RegionMaterial {
  int region = 0;
  Material material;
  RheologyCoeffs rheology;
};

// ---------------------------------------------------------------------------
// Loads and boundary conditions
// ---------------------------------------------------------------------------

/// Piecewise-linear multiplier of time. A repeated breakpoint time encodes a
/// jump: sampling exactly at the jump returns the left limit.
class LoadProgram {
 public:
  LoadProgram() = default;
  explicit LoadProgram(std::vector<std::pair<double, double>> breakpoints);

  double operator()(double t) const;
  const std::vector<std::pair<double, double>>& breakpoints() const { return points_; }

 private:
  std::vector<std::pair<double, double>> points_;
};

enum class BcKind { Dirichlet, Neumann };

/// Global: components are x/y. NormalTangential: components are along the
/// element outward normal and the element direction n1 -> n2.
enum class BcFrame { Global, NormalTangential };

struct BcComponent {
  BcKind kind = BcKind::Neumann;
  double value = 0.0;
  /// Load program name; empty means a constant multiplier of one.
  std::string program;
};

/// Rigid plane obstacle; `normal` is the unit normal pointing toward the body.
struct Obstacle {
  Vec2 point = Vec2::Zero();
  Vec2 normal = Vec2(0.0, 1.0);
};

/// Frictionless unilateral contact. With an obstacle, the contact direction
/// is -obstacle.normal and the initial gap is measured to the plane; without
/// one, the direction is the nodal outward normal and the gap is `gap`.
struct ContactCondition {
  std::optional<Obstacle> obstacle;
  double gap = 0.0;
};

struct BoundaryCondition {
  std::string group;
  BcFrame frame = BcFrame::Global;
  std::array<BcComponent, 2> components{};
  std::optional<ContactCondition> contact;

  static BoundaryCondition fixed(std::string group);
  static BoundaryCondition traction(std::string group, BcFrame frame, double c0, double c1,
                                    std::string program = {});
};

/// Two bc-groups (in different regions) glued node to node.
struct InterfaceSpec {
  std::string group_a;
  std::string group_b;
};

/// u(x) = offset + gradient * x.
struct AffineField {
  Vec2 offset = Vec2::Zero();
  Mat2 gradient = Mat2::Zero();

  Vec2 operator()(const Vec2& x) const { return offset + gradient * x; }
  bool is_zero() const { return offset.isZero(0.0) && gradient.isZero(0.0); }
  Eigen::Vector3d strain() const {
    return {gradient(0, 0), gradient(1, 1), 0.5 * (gradient(0, 1) + gradient(1, 0))};
  }
};

struct Model {
  Mesh mesh;
  std::vector<RegionMaterial> regions;
  std::vector<BoundaryCondition> boundary;
  std::vector<InterfaceSpec> interfaces;
  std::map<std::string, LoadProgram> programs;
  /// Nonzero only for Kelvin-Voigt regions.
  AffineField initial_displacement;

  const RegionMaterial& region(int id) const;
  /// Program by name; empty name gives the constant program.
  const LoadProgram& program(const std::string& name) const;
  /// Boundary condition for a group, or nullptr for a traction-free group.
  const BoundaryCondition* condition(int group) const;
};

std::vector<std::string> validate_mesh(const Mesh& mesh);

/// Returns one diagnostic per violated invariant; empty when the model is valid.
std::vector<std::string> validate_model(const Mesh& mesh,
                                        const std::vector<RegionMaterial>& materials,
                                        const std::vector<BoundaryCondition>& bcs);
std::vector<std::string> validate_model(const Model& model);

// ---------------------------------------------------------------------------
// Mesh generators
// ---------------------------------------------------------------------------

/// Axis-aligned rectangle [x0, x0+L] x [y0, y0+h]; groups bottom, right, top, left.
struct RectangleSpec {
  double length = 1.0;
  double height = 1.0;
  int nx = 1;
  int ny = 1;
  Vec2 origin = Vec2::Zero();
};

/// Quarter of a disk centred at the origin occupying x >= 0, y <= 0. Groups:
/// contact (arc of angle phi next to the pole (0,-r)), free_arc, loaded
/// (the segment y = 0) and symmetry (the segment x = 0).
struct QuarterDiskSpec {
  double radius = 0.75;
  double contact_angle_deg = 13.5;
  int n_contact = 60;
  int n_arc = 170;
  int n_straight = 20;
};

/// Two rectangles [0,L]x[0,h0] (region 0) and [0,L]x[h0,h0+h1] (region 1)
/// with coincident but distinct nodes on the shared edge. Groups:
/// bottom, right0, interface0, left0, interface1, right1, top, left1.
struct StackedRectanglesSpec {
  double length = 1.0;
  double height0 = 0.5;
  double height1 = 0.5;
  int nx = 4;
  int ny0 = 2;
  int ny1 = 2;
};

using ShapeSpec = std::variant<RectangleSpec, QuarterDiskSpec, StackedRectanglesSpec>;

Mesh generate_mesh(const ShapeSpec& shape);

}  // namespace viscobem
