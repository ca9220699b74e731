#include "viscobem/coupling.hpp"

#include <cmath>
#include <set>

#include "viscobem/error.hpp"

namespace viscobem {

namespace {

// Region index (into `regions`) and local nodes of the elements of a group.
std::pair<int, std::vector<int>> group_nodes(const Model& model, const std::vector<RegionLayout>& regions,
                                             const std::string& name) {
  const int g = model.mesh.group_id(name);
  for (std::size_t r = 0; r < regions.size(); ++r) {
    const auto& bem = regions[r].bem;
    std::set<int> nodes;
    for (int le = 0; le < bem.num_elements(); ++le) {
      if (model.mesh.elements[bem.elements[le]].group != g) continue;
      nodes.insert(bem.element_nodes[le][0]);
      nodes.insert(bem.element_nodes[le][1]);
    }
    if (!nodes.empty()) return {static_cast<int>(r), {nodes.begin(), nodes.end()}};
  }
  throw Error(ErrorCode::Configuration, "interface group '" + name + "' has no elements");
}

}  // namespace

std::vector<InterfacePair> pair_interface_nodes(const Model& model,
                                                const std::vector<RegionLayout>& regions) {
  std::vector<InterfacePair> pairs;
  const double tol = 1e-10 * model.mesh.bbox_diagonal();
  for (const auto& itf : model.interfaces) {
    const auto [ra, na] = group_nodes(model, regions, itf.group_a);
    const auto [rb, nb] = group_nodes(model, regions, itf.group_b);
    if (ra == rb) throw Error(ErrorCode::Configuration, "interface groups lie in the same region");
    std::vector<char> used(nb.size(), 0);
    for (int a : na) {
      const Vec2& xa = model.mesh.nodes[regions[ra].bem.nodes[a]];
      int match = -1;
      for (std::size_t j = 0; j < nb.size(); ++j) {
        if (!used[j] && (model.mesh.nodes[regions[rb].bem.nodes[nb[j]]] - xa).norm() <= tol) {
          match = static_cast<int>(j);
          break;
        }
      }
      if (match < 0) {
        throw Error(ErrorCode::Configuration,
                    "unpaired interface node #" + std::to_string(regions[ra].bem.nodes[a]));
      }
      used[match] = 1;
      pairs.push_back({ra, a, rb, nb[match]});
    }
    for (std::size_t j = 0; j < nb.size(); ++j) {
      if (!used[j]) {
        throw Error(ErrorCode::Configuration,
                    "unpaired interface node #" + std::to_string(regions[rb].bem.nodes[nb[j]]));
      }
    }
  }
  return pairs;
}

std::vector<InterfaceRow> plan_interface_rows(const std::vector<RegionLayout>& regions,
                                              const std::vector<InterfacePair>& pairs, int first_row) {
  std::vector<InterfaceRow> rows;
  int row = first_row;
  for (int p = 0; p < static_cast<int>(pairs.size()); ++p) {
    const auto& pr = pairs[p];
    for (int d = 0; d < 2; ++d) {
      const bool da = regions[pr.region_a].node[pr.node_a].kind[d] == DofKind::Dirichlet;
      const bool db = regions[pr.region_b].node[pr.node_b].kind[d] == DofKind::Dirichlet;
      if (!(da && db)) rows.push_back({p, d, InterfaceRowType::Compatibility, row++});
      if (!da && !db) rows.push_back({p, d, InterfaceRowType::Equilibrium, row++});
    }
  }
  return rows;
}

void fill_interface_rows(Matrix& A, const MixedSystem& sys) {
  for (const auto& ir : sys.interface_rows) {
    const auto& p = sys.pairs[ir.pair];
    const auto& La = sys.regions[p.region_a];
    const auto& Lb = sys.regions[p.region_b];
    const int nda = 2 * p.node_a + ir.dir, ndb = 2 * p.node_b + ir.dir;
    if (ir.type == InterfaceRowType::Compatibility) {
      if (La.disp_col[nda] >= 0) A(ir.row, La.disp_col[nda]) += 1.0 / sys.coeffs[p.region_a].a0;
      if (Lb.disp_col[ndb] >= 0) A(ir.row, Lb.disp_col[ndb]) -= 1.0 / sys.coeffs[p.region_b].a0;
    } else {
      A(ir.row, La.trac_col[nda]) += 1.0;
      A(ir.row, Lb.trac_col[ndb]) += 1.0;
    }
  }
}

int representative_slot(const RegionLayout& region, int local_node, int dir) {
  for (int s = 0; s < static_cast<int>(region.slot.size()); ++s) {
    if (region.slot_node(s) == local_node && !region.slot[s].known[dir]) return s;
  }
  return -1;
}

Vector interface_rhs(const MixedSystem& sys, const std::vector<History>& history) {
  Vector out = Vector::Zero(static_cast<Eigen::Index>(sys.interface_rows.size()));
  for (std::size_t i = 0; i < sys.interface_rows.size(); ++i) {
    const auto& ir = sys.interface_rows[i];
    const auto& p = sys.pairs[ir.pair];
    const auto& ca = sys.coeffs[p.region_a];
    const auto& cb = sys.coeffs[p.region_b];
    const auto& ha = history[p.region_a];
    const auto& hb = history[p.region_b];
    if (ir.type == InterfaceRowType::Compatibility) {
      const int nda = 2 * p.node_a + ir.dir, ndb = 2 * p.node_b + ir.dir;
      const double h_a = (ca.a1 * ha.u.prev(nda) - ca.a2 * ha.u.prev2(nda)) / ca.a0;
      const double h_b = (cb.a1 * hb.u.prev(ndb) - cb.a2 * hb.u.prev2(ndb)) / cb.a0;
      out(static_cast<Eigen::Index>(i)) = h_b - h_a;
    } else {
      const int sa = 2 * representative_slot(sys.regions[p.region_a], p.node_a, ir.dir) + ir.dir;
      const int sb = 2 * representative_slot(sys.regions[p.region_b], p.node_b, ir.dir) + ir.dir;
      out(static_cast<Eigen::Index>(i)) = -(ca.d1 * ha.p.prev(sa) - ca.d2 * ha.p.prev2(sa)) -
                                          (cb.d1 * hb.p.prev(sb) - cb.d2 * hb.p.prev2(sb));
    }
  }
  return out;
}

double interface_displacement_gap(const MixedSystem& sys, const std::vector<Vector>& u) {
  double scale = 0.0, gap = 0.0;
  for (const auto& v : u) scale = std::max(scale, v.cwiseAbs().maxCoeff());
  for (const auto& p : sys.pairs) {
    for (int d = 0; d < 2; ++d) {
      gap = std::max(gap, std::abs(u[p.region_a](2 * p.node_a + d) - u[p.region_b](2 * p.node_b + d)));
    }
  }
  return scale > 0.0 ? gap / scale : gap;
}

double interface_traction_residual(const MixedSystem& sys, const std::vector<Vector>& p) {
  double scale = 0.0, res = 0.0;
  for (const auto& v : p) {
    if (v.size() > 0) scale = std::max(scale, v.cwiseAbs().maxCoeff());
  }
  for (const auto& ir : sys.interface_rows) {
    if (ir.type != InterfaceRowType::Equilibrium) continue;
    const auto& pr = sys.pairs[ir.pair];
    const int sa = 2 * representative_slot(sys.regions[pr.region_a], pr.node_a, ir.dir) + ir.dir;
    const int sb = 2 * representative_slot(sys.regions[pr.region_b], pr.node_b, ir.dir) + ir.dir;
    res = std::max(res, std::abs(p[pr.region_a](sa) + p[pr.region_b](sb)));
  }
  return scale > 0.0 ? res / scale : res;
}

}  // namespace viscobem
