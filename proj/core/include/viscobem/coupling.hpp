#pragma once

#include <vector>

#include "viscobem/mixed_system.hpp"
#include "viscobem/timestepper.hpp"

namespace viscobem {

/// Matches the nodes of every declared interface by coordinates (tolerance
/// 1e-10 times the mesh size). Throws a configuration error for unpaired nodes.
std::vector<InterfacePair> pair_interface_nodes(const Model& model,
                                                const std::vector<RegionLayout>& regions);

/// Rows needed per pair and direction: compatibility unless both sides are
/// Dirichlet, equilibrium when neither side is.
std::vector<InterfaceRow> plan_interface_rows(const std::vector<RegionLayout>& regions,
                                              const std::vector<InterfacePair>& pairs,
                                              int first_row);

/// Writes the interface rows of the global matrix. Compatibility of the
/// physical displacements u = v / a0 + (a1 u1 - a2 u2) / a0 on both sides:
///   v^a / a0^a - v^b / a0^b = h^b - h^a,
/// equilibrium of the physical tractions p = t + d1 p1 - d2 p2:
///   t^a + t^b = -(d1 p1 - d2 p2)^a - (d1 p1 - d2 p2)^b.
void fill_interface_rows(Matrix& A, const MixedSystem& system);

/// History part of the interface right-hand side, indexed like interface_rows.
Vector interface_rhs(const MixedSystem& system, const std::vector<History>& history);

/// One slot index whose traction is the shared unknown of a node-direction, or -1.
int representative_slot(const RegionLayout& region, int local_node, int dir);

/// Largest mismatch of physical displacements over all pairs, relative to
/// the largest displacement magnitude (0 when everything is zero).
double interface_displacement_gap(const MixedSystem& system, const std::vector<Vector>& u);

/// Largest |p^a + p^b| over equilibrium rows, relative to the largest traction.
double interface_traction_residual(const MixedSystem& system, const std::vector<Vector>& p);

}  // namespace viscobem
