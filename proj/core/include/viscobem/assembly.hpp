#pragma once

#include <vector>

#include "viscobem/kernels.hpp"
#include "viscobem/model.hpp"
#include "viscobem/types.hpp"

namespace viscobem {

struct QuadratureOptions {
  int gauss_points = 8;
  /// Subdivide while distance / sub-element length is below this ratio.
  double subdivision_ratio = 2.0;
  int max_depth = 16;
};

/// Influence of one element on one collocation point. Columns are
/// (node1 x, node1 y, node2 x, node2 y); row i is the identity written for a
/// unit force in direction i at the collocation point.
struct InfluencePair {
  Eigen::Matrix<double, 2, 4> hblock = Eigen::Matrix<double, 2, 4>::Zero();
  Eigen::Matrix<double, 2, 4> gblock = Eigen::Matrix<double, 2, 4>::Zero();
};

/// Integrates the kernels against the linear shape functions of element `e`.
/// When xi coincides with an element node the log part of G is integrated
/// analytically and the H column of that node is left zero (it belongs to the
/// rigid-body diagonal).
InfluencePair element_influence(const Vec2& xi, const Mesh& mesh, int e, const Material& mat,
                                const QuadratureOptions& opt = {});

/// Stress influence at an interior point: sigma = dblock * t_slots - sblock * u_nodes.
struct StressInfluence {
  Eigen::Matrix<double, 3, 4> dblock = Eigen::Matrix<double, 3, 4>::Zero();
  Eigen::Matrix<double, 3, 4> sblock = Eigen::Matrix<double, 3, 4>::Zero();
};

StressInfluence element_stress_influence(const Vec2& xi, const Mesh& mesh, int e,
                                         const Material& mat, const QuadratureOptions& opt = {});

/// Collocation matrices of one region. Displacements are nodal (column
/// 2*local_node + dir). Tractions live on element ends so that corners can
/// carry two different tractions: G column 4*local_element + 2*end + dir.
struct BemSystem {
  int region = 0;
  Material material;
  std::vector<int> nodes;     ///< global node id per local node
  std::vector<int> elements;  ///< global element id per local element
  std::vector<std::array<int, 2>> element_nodes;  ///< local node ids per local element
  std::vector<double> lengths;                    ///< per local element
  Matrix H;
  Matrix G;

  int num_nodes() const { return static_cast<int>(nodes.size()); }
  int num_elements() const { return static_cast<int>(elements.size()); }
  /// Local index of a global node, or -1.
  int local_node(int global) const;

  /// G with the two end slots of every node summed: the 2N x 2N matrix for
  /// tractions that are continuous at nodes.
  Matrix nodal_G() const;
};

/// Fills H (without its diagonal blocks) and G by collocation at every node.
BemSystem assemble_HG(const Mesh& mesh, int region, const Material& mat,
                      const QuadratureOptions& opt = {});

/// Sets each diagonal 2x2 block of H to minus the sum of the other blocks in
/// its block row (rigid translation gives zero traction).
void rigid_body_diagonal(BemSystem& system);

/// assemble_HG followed by rigid_body_diagonal.
BemSystem assemble_region(const Mesh& mesh, int region, const Material& mat,
                          const QuadratureOptions& opt = {});

}  // namespace viscobem
