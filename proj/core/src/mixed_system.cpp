#include "viscobem/mixed_system.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>

#include "viscobem/coupling.hpp"
#include "viscobem/error.hpp"

namespace viscobem {

double KnownSource::evaluate(const Model& model, double t) const {
  if (bc < 0) return 0.0;
  const auto& c = model.boundary[bc].components;
  double out = 0.0;
  if (k0 != 0.0) out += k0 * c[0].value * model.program(c[0].program)(t);
  if (k1 != 0.0) out += k1 * c[1].value * model.program(c[1].program)(t);
  return out;
}

namespace {

int bc_index(const Model& model, int group) {
  const std::string name = model.mesh.group_name(group);
  for (std::size_t i = 0; i < model.boundary.size(); ++i) {
    if (model.boundary[i].group == name) return static_cast<int>(i);
  }
  return -1;
}

std::string node_label(const BemSystem& bem, int local) {
  return "node #" + std::to_string(bem.nodes[local]);
}

}  // namespace

RegionLayout classify_region(const Model& model, BemSystem bem,
                             const std::vector<int>& interface_groups,
                             std::vector<ContactNode>& contact, int region_index) {
  const Mesh& mesh = model.mesh;
  RegionLayout L;
  L.bem = std::move(bem);
  L.rheology = model.region(L.bem.region).rheology;
  const int N = L.bem.num_nodes();
  const int E = L.bem.num_elements();
  L.node.resize(N);
  L.slot.resize(2 * E);

  std::vector<std::vector<std::pair<int, int>>> adj(N);
  for (int le = 0; le < E; ++le) {
    for (int a = 0; a < 2; ++a) adj[L.bem.element_nodes[le][a]].emplace_back(le, a);
  }
  auto is_interface = [&](int group) {
    return std::find(interface_groups.begin(), interface_groups.end(), group) != interface_groups.end();
  };

  // Arc coordinate along contact groups, following element order.
  std::map<int, double> arc;
  for (int le = 0; le < E; ++le) {
    const int e = L.bem.elements[le];
    const int bi = bc_index(model, mesh.elements[e].group);
    if (bi < 0 || !model.boundary[bi].contact) continue;
    const int n1 = mesh.elements[e].n1, n2 = mesh.elements[e].n2;
    if (!arc.count(n1)) arc[n1] = 0.0;
    arc[n2] = arc[n1] + mesh.element_length(e);
  }

  for (int n = 0; n < N; ++n) {
    const Vec2& x = mesh.nodes[L.bem.nodes[n]];
    std::array<bool, 2> dirichlet{false, false};
    std::array<KnownSource, 2> src{};
    bool itf = false;
    int contact_bc = -1;
    Vec2 normal_sum = Vec2::Zero();
    for (const auto& [le, a] : adj[n]) {
      const int e = L.bem.elements[le];
      const int group = mesh.elements[e].group;
      if (is_interface(group)) {
        itf = true;
        continue;
      }
      const int bi = bc_index(model, group);
      if (bi < 0) continue;
      const auto& bc = model.boundary[bi];
      if (bc.contact) {
        contact_bc = bi;
        normal_sum += mesh.element_normal(e);
        continue;
      }
      for (int c = 0; c < 2; ++c) {
        if (bc.components[c].kind != BcKind::Dirichlet) continue;
        if (bc.frame != BcFrame::Global) {
          throw Error(ErrorCode::UnsupportedConfiguration,
                      "Dirichlet data must be given in the global frame (group '" + bc.group + "')");
        }
        if (!dirichlet[c]) {
          dirichlet[c] = true;
          src[c] = {bi, c == 0 ? 1.0 : 0.0, c == 1 ? 1.0 : 0.0};
        }
      }
    }
    NodeLayout& nl = L.node[n];
    if (contact_bc >= 0 && itf) {
      throw Error(ErrorCode::UnsupportedConfiguration,
                  "contact and interface meet at " + node_label(L.bem, n));
    }
    if (contact_bc >= 0 && !(dirichlet[0] && dirichlet[1])) {
      const auto& cc = *model.boundary[contact_bc].contact;
      Vec2 d;
      double gap;
      if (cc.obstacle) {
        d = -cc.obstacle->normal.normalized();
        gap = (x - cc.obstacle->point).dot(cc.obstacle->normal.normalized());
      } else {
        d = normal_sum.normalized();
        gap = cc.gap;
      }
      nl.frame.col(0) = d;
      nl.frame.col(1) = rotate90(d);
      nl.kind[0] = DofKind::Contact;
      nl.kind[1] = DofKind::Neumann;
      for (int j = 0; j < 2; ++j) {
        if (!dirichlet[j]) continue;
        if (std::abs(d(j)) > 1e-9) {
          throw Error(ErrorCode::UnsupportedConfiguration,
                      "contact direction at " + node_label(L.bem, n) +
                          " is not orthogonal to its Dirichlet direction");
        }
        const double s = rotate90(d)(j) > 0.0 ? 1.0 : -1.0;
        nl.kind[1] = DofKind::Dirichlet;
        nl.dirichlet[1] = {src[j].bc, s * src[j].k0, s * src[j].k1};
      }
      nl.contact = static_cast<int>(contact.size());
      const int g = L.bem.nodes[n];
      contact.push_back({region_index, n, g, d, gap, arc.count(g) ? arc[g] : 0.0});
    } else {
      for (int j = 0; j < 2; ++j) {
        nl.kind[j] = dirichlet[j] ? DofKind::Dirichlet : itf ? DofKind::Interface : DofKind::Neumann;
        nl.dirichlet[j] = src[j];
      }
    }
  }

  for (int le = 0; le < E; ++le) {
    const int e = L.bem.elements[le];
    const int group = mesh.elements[e].group;
    const int bi = is_interface(group) ? -1 : bc_index(model, group);
    const Vec2 ne = mesh.element_normal(e);
    const Vec2 te = mesh.element_tangent(e);
    for (int a = 0; a < 2; ++a) {
      const int n = L.bem.element_nodes[le][a];
      SlotLayout& sl = L.slot[2 * le + a];
      for (int d = 0; d < 2; ++d) {
        const Vec2 axis = L.node[n].frame.col(d);
        if (is_interface(group)) {
          sl.known[d] = false;
        } else if (bi < 0) {
          sl.known[d] = true;
        } else if (model.boundary[bi].contact) {
          sl.known[d] = L.node[n].contact >= 0 && d == 1;
        } else {
          const auto& bc = model.boundary[bi];
          if (bc.frame == BcFrame::NormalTangential) {
            sl.known[d] = true;
            sl.value[d] = {bi, axis.dot(ne), axis.dot(te)};
          } else {
            bool known = true;
            double k[2] = {0.0, 0.0};
            for (int c = 0; c < 2; ++c) {
              if (std::abs(axis(c)) <= 1e-12) continue;
              if (bc.components[c].kind == BcKind::Dirichlet) known = false;
              k[c] = axis(c);
            }
            sl.known[d] = known;
            if (known) sl.value[d] = {bi, k[0], k[1]};
          }
        }
      }
    }
  }

  // Every constrained node-direction needs a traction unknown, every free one none.
  std::vector<int> unknown(2 * N, 0);
  for (int s = 0; s < 2 * E; ++s) {
    for (int d = 0; d < 2; ++d) {
      if (!L.slot[s].known[d]) ++unknown[2 * L.slot_node(s) + d];
    }
  }
  for (int n = 0; n < N; ++n) {
    for (int d = 0; d < 2; ++d) {
      const bool free = L.node[n].kind[d] == DofKind::Neumann;
      if (free && unknown[2 * n + d] > 0) {
        throw Error(ErrorCode::UnsupportedConfiguration,
                    "boundary conditions at " + node_label(L.bem, n) +
                        " leave a traction component undetermined");
      }
      if (!free && unknown[2 * n + d] == 0) {
        throw Error(ErrorCode::UnsupportedConfiguration,
                    "boundary conditions at " + node_label(L.bem, n) + " overdetermine the tractions");
      }
    }
  }

  const int n2 = 2 * N;
  L.Hf = L.bem.H;
  L.Gf = L.bem.G;
  for (int n = 0; n < N; ++n) {
    if (L.node[n].frame.isIdentity(0.0)) continue;
    L.Hf.middleCols(2 * n, 2) = L.bem.H.middleCols(2 * n, 2) * L.node[n].frame;
  }
  for (int s = 0; s < 2 * E; ++s) {
    const Mat2& R = L.node[L.slot_node(s)].frame;
    if (R.isIdentity(0.0)) continue;
    L.Gf.middleCols(2 * s, 2) = L.bem.G.middleCols(2 * s, 2) * R;
  }
  L.disp_col.assign(n2, -1);
  L.trac_col.assign(n2, -1);
  return L;
}

MixedSystem build_mixed_system(const Model& model, std::vector<BemSystem> systems,
                               std::vector<StepCoeffs> coeffs) {
  if (systems.size() != coeffs.size()) {
    throw std::invalid_argument("one set of step coefficients per region is required");
  }
  MixedSystem sys;
  sys.coeffs = std::move(coeffs);

  std::vector<int> interface_groups;
  for (const auto& itf : model.interfaces) {
    for (const auto& name : {itf.group_a, itf.group_b}) {
      const int g = model.mesh.group_id(name);
      if (g < 0) throw Error(ErrorCode::Configuration, "unknown interface group '" + name + "'");
      interface_groups.push_back(g);
    }
  }
  for (std::size_t r = 0; r < systems.size(); ++r) {
    sys.regions.push_back(classify_region(model, std::move(systems[r]), interface_groups, sys.contact,
                                          static_cast<int>(r)));
  }
  sys.pairs = pair_interface_nodes(model, sys.regions);

  // A Dirichlet or contact condition is needed in every coupled cluster of regions.
  const int R = static_cast<int>(sys.regions.size());
  std::vector<int> cluster(R);
  for (int r = 0; r < R; ++r) cluster[r] = r;
  std::function<int(int)> find = [&](int r) { return cluster[r] == r ? r : cluster[r] = find(cluster[r]); };
  for (const auto& p : sys.pairs) cluster[find(p.region_a)] = find(p.region_b);
  std::set<int> anchored;
  for (int r = 0; r < R; ++r) {
    for (const auto& nl : sys.regions[r].node) {
      for (auto k : nl.kind) {
        if (k == DofKind::Dirichlet || k == DofKind::Contact) anchored.insert(find(r));
      }
    }
  }
  for (int r = 0; r < R; ++r) {
    if (!anchored.count(find(r))) {
      throw Error(ErrorCode::UnsupportedConfiguration,
                  "region " + std::to_string(sys.regions[r].bem.region) +
                      " has no Dirichlet or contact condition (pure traction problems are not supported)");
    }
  }

  int col = 0, row = 0;
  for (auto& L : sys.regions) {
    L.row_offset = row;
    row += 2 * L.bem.num_nodes();
    for (int nd = 0; nd < 2 * L.bem.num_nodes(); ++nd) {
      switch (L.node[nd / 2].kind[nd % 2]) {
        case DofKind::Neumann: L.disp_col[nd] = col++; break;
        case DofKind::Interface:
          L.disp_col[nd] = col++;
          L.trac_col[nd] = col++;
          break;
        case DofKind::Dirichlet:
        case DofKind::Contact: L.trac_col[nd] = col++; break;
      }
    }
  }
  sys.interface_rows = plan_interface_rows(sys.regions, sys.pairs, row);
  row += static_cast<int>(sys.interface_rows.size());
  if (row != col) {
    throw Error(ErrorCode::IllPosed, "mixed system is not square (" + std::to_string(row) + " equations, " +
                                         std::to_string(col) + " unknowns)");
  }
  sys.size_ = row;

  sys.A_ = Matrix::Zero(row, col);
  for (const auto& L : sys.regions) {
    const int n2 = 2 * L.bem.num_nodes();
    for (int nd = 0; nd < n2; ++nd) {
      if (L.disp_col[nd] >= 0) sys.A_.col(L.disp_col[nd]).segment(L.row_offset, n2) += L.Hf.col(nd);
    }
    for (int s = 0; s < static_cast<int>(L.slot.size()); ++s) {
      for (int d = 0; d < 2; ++d) {
        if (L.slot[s].known[d]) continue;
        const int tc = L.trac_col[2 * L.slot_node(s) + d];
        sys.A_.col(tc).segment(L.row_offset, n2) -= L.Gf.col(2 * s + d);
      }
    }
  }
  fill_interface_rows(sys.A_, sys);

  sys.lu_.compute(sys.A_);
  sys.rcond_ = sys.lu_.rcond();
  if (!(sys.rcond_ > 1e-14)) {
    throw Error(ErrorCode::IllPosed, "mixed boundary system is singular (reciprocal condition " +
                                         std::to_string(sys.rcond_) + ")");
  }

  const int m = static_cast<int>(sys.contact.size());
  if (m > 0) {
    Matrix B = Matrix::Zero(row, m);
    for (int k = 0; k < m; ++k) {
      const auto& cn = sys.contact[k];
      const auto& L = sys.regions[cn.region];
      B.col(k).segment(L.row_offset, 2 * L.bem.num_nodes()) = -L.Hf.col(2 * cn.local_node);
    }
    sys.Z_ = sys.lu_.solve(B);
  }
  return sys;
}

Vector MixedSystem::rhs(const std::vector<RegionValues>& known, const Vector& interface_rhs) const {
  Vector b = Vector::Zero(size_);
  for (std::size_t r = 0; r < regions.size(); ++r) {
    const auto& L = regions[r];
    const int n2 = 2 * L.bem.num_nodes();
    Vector q = Vector::Zero(n2);
    for (int nd = 0; nd < n2; ++nd) {
      if (L.node[nd / 2].kind[nd % 2] == DofKind::Dirichlet) q(nd) = known[r].v(nd);
    }
    Vector t = Vector::Zero(2 * static_cast<Eigen::Index>(L.slot.size()));
    for (int s = 0; s < static_cast<int>(L.slot.size()); ++s) {
      for (int d = 0; d < 2; ++d) {
        if (L.slot[s].known[d]) t(2 * s + d) = known[r].t(2 * s + d);
      }
    }
    b.segment(L.row_offset, n2) = -L.Hf * q + L.Gf * t;
  }
  for (std::size_t i = 0; i < interface_rows.size(); ++i) {
    const auto& ir = interface_rows[i];
    double value = interface_rhs.size() > 0 ? interface_rhs(static_cast<Eigen::Index>(i)) : 0.0;
    if (ir.type == InterfaceRowType::Compatibility) {
      const auto& p = pairs[ir.pair];
      const int nda = 2 * p.node_a + ir.dir, ndb = 2 * p.node_b + ir.dir;
      if (regions[p.region_a].node[p.node_a].kind[ir.dir] == DofKind::Dirichlet) {
        value -= known[p.region_a].v(nda) / coeffs[p.region_a].a0;
      }
      if (regions[p.region_b].node[p.node_b].kind[ir.dir] == DofKind::Dirichlet) {
        value += known[p.region_b].v(ndb) / coeffs[p.region_b].a0;
      }
    }
    b(ir.row) = value;
  }
  return b;
}

std::vector<RegionValues> MixedSystem::extract(const Vector& z, const std::vector<RegionValues>& known,
                                               const Vector& contact_values) const {
  std::vector<RegionValues> out(regions.size());
  for (std::size_t r = 0; r < regions.size(); ++r) {
    const auto& L = regions[r];
    const int n2 = 2 * L.bem.num_nodes();
    auto& o = out[r];
    o.v = Vector::Zero(n2);
    o.t = Vector::Zero(2 * static_cast<Eigen::Index>(L.slot.size()));
    for (int nd = 0; nd < n2; ++nd) {
      const auto& nl = L.node[nd / 2];
      switch (nl.kind[nd % 2]) {
        case DofKind::Dirichlet: o.v(nd) = known[r].v(nd); break;
        case DofKind::Contact: o.v(nd) = contact_values(nl.contact); break;
        default: o.v(nd) = z(L.disp_col[nd]); break;
      }
    }
    for (int s = 0; s < static_cast<int>(L.slot.size()); ++s) {
      for (int d = 0; d < 2; ++d) {
        o.t(2 * s + d) = L.slot[s].known[d] ? known[r].t(2 * s + d) : z(L.trac_col[2 * L.slot_node(s) + d]);
      }
    }
  }
  return out;
}

std::vector<RegionValues> boundary_data(const Model& model, const MixedSystem& system, double t) {
  std::vector<RegionValues> out(system.regions.size());
  for (std::size_t r = 0; r < system.regions.size(); ++r) {
    const auto& L = system.regions[r];
    auto& o = out[r];
    o.v = Vector::Zero(2 * L.bem.num_nodes());
    o.t = Vector::Zero(2 * static_cast<Eigen::Index>(L.slot.size()));
    for (int n = 0; n < L.bem.num_nodes(); ++n) {
      for (int d = 0; d < 2; ++d) {
        if (L.node[n].kind[d] == DofKind::Dirichlet) o.v(2 * n + d) = L.node[n].dirichlet[d].evaluate(model, t);
      }
    }
    for (int s = 0; s < static_cast<int>(L.slot.size()); ++s) {
      for (int d = 0; d < 2; ++d) {
        if (L.slot[s].known[d]) o.t(2 * s + d) = L.slot[s].value[d].evaluate(model, t);
      }
    }
  }
  return out;
}

}  // namespace viscobem
