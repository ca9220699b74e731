#include "viscobem/postprocess.hpp"

#include <cmath>
#include <map>

#include "viscobem/contact.hpp"
#include "viscobem/error.hpp"
#include "viscobem/simulation.hpp"

namespace viscobem {

Vector nodes_to_global(const RegionLayout& L, const Vector& v) {
  Vector out(v.size());
  for (int n = 0; n < L.bem.num_nodes(); ++n) out.segment<2>(2 * n) = L.node[n].frame * v.segment<2>(2 * n);
  return out;
}

Vector slots_to_global(const RegionLayout& L, const Vector& t) {
  Vector out(t.size());
  for (int s = 0; s < static_cast<int>(L.slot.size()); ++s) {
    out.segment<2>(2 * s) = L.node[L.slot_node(s)].frame * t.segment<2>(2 * s);
  }
  return out;
}

std::vector<InteriorPointInfo> locate_points(const Mesh& mesh, const MixedSystem& sys,
                                             const std::vector<Vec2>& points) {
  std::vector<InteriorPointInfo> out;
  const double tol = 1e-12 * mesh.bbox_diagonal();
  for (const auto& x : points) {
    int found = -1;
    for (std::size_t r = 0; r < sys.regions.size(); ++r) {
      if (point_in_region(mesh, sys.regions[r].bem.region, x)) {
        found = static_cast<int>(r);
        break;
      }
    }
    if (found < 0) {
      throw Error(ErrorCode::OutOfDomain, "point (" + std::to_string(x.x()) + ", " + std::to_string(x.y()) +
                                              ") lies outside the domain");
    }
    const auto [dist, len] = distance_to_boundary(mesh, sys.regions[found].bem.region, x);
    if (dist <= tol) {
      throw Error(ErrorCode::OutOfDomain, "point (" + std::to_string(x.x()) + ", " + std::to_string(x.y()) +
                                              ") lies on the boundary");
    }
    out.push_back({x, found, dist < 0.1 * len});
  }
  return out;
}

InteriorOperator::InteriorOperator(const Mesh& mesh, const RegionLayout& L, const std::vector<Vec2>& points,
                                   const QuadratureOptions& opt)
    : points_(points) {
  const Eigen::Index P = static_cast<Eigen::Index>(points.size());
  const int N = L.bem.num_nodes(), E = L.bem.num_elements();
  Gu_ = Matrix::Zero(2 * P, 4 * E);
  Hu_ = Matrix::Zero(2 * P, 2 * N);
  Ds_ = Matrix::Zero(3 * P, 4 * E);
  Ss_ = Matrix::Zero(3 * P, 2 * N);
  const Material& mat = L.bem.material;
  for (Eigen::Index i = 0; i < P; ++i) {
    for (int le = 0; le < E; ++le) {
      const int e = L.bem.elements[le];
      const InfluencePair ip = element_influence(points[i], mesh, e, mat, opt);
      const StressInfluence si = element_stress_influence(points[i], mesh, e, mat, opt);
      for (int a = 0; a < 2; ++a) {
        const int n = L.bem.element_nodes[le][a];
        const Mat2& R = L.node[n].frame;
        Gu_.block<2, 2>(2 * i, 4 * le + 2 * a) = ip.gblock.block<2, 2>(0, 2 * a) * R;
        Hu_.block<2, 2>(2 * i, 2 * n) += ip.hblock.block<2, 2>(0, 2 * a) * R;
        Ds_.block<3, 2>(3 * i, 4 * le + 2 * a) = si.dblock.block<3, 2>(0, 2 * a) * R;
        Ss_.block<3, 2>(3 * i, 2 * n) += si.sblock.block<3, 2>(0, 2 * a) * R;
      }
    }
  }
}

InteriorFields interior_fields(const Mesh& mesh, const BemSystem& bem, const Vector& v_xy,
                               const Vector& t_xy, const std::vector<Vec2>& points) {
  InteriorFields out;
  const double tol = 1e-12 * mesh.bbox_diagonal();
  for (const auto& x : points) {
    if (!point_in_region(mesh, bem.region, x)) {
      throw Error(ErrorCode::OutOfDomain, "interior point lies outside the region");
    }
    const auto [dist, len] = distance_to_boundary(mesh, bem.region, x);
    if (dist <= tol) throw Error(ErrorCode::OutOfDomain, "interior point lies on the boundary");
    Vec2 u = Vec2::Zero();
    Stress s = Stress::Zero();
    for (int le = 0; le < bem.num_elements(); ++le) {
      const InfluencePair ip = element_influence(x, mesh, bem.elements[le], bem.material);
      const StressInfluence si = element_stress_influence(x, mesh, bem.elements[le], bem.material);
      for (int a = 0; a < 2; ++a) {
        const int n = bem.element_nodes[le][a];
        const Vec2 tv = t_xy.segment<2>(4 * le + 2 * a);
        const Vec2 vv = v_xy.segment<2>(2 * n);
        u += ip.gblock.block<2, 2>(0, 2 * a) * tv - ip.hblock.block<2, 2>(0, 2 * a) * vv;
        s += si.dblock.block<3, 2>(0, 2 * a) * tv - si.sblock.block<3, 2>(0, 2 * a) * vv;
      }
    }
    out.u.push_back(u);
    out.sigma.push_back(s);
    out.near_boundary.push_back(dist < 0.1 * len);
  }
  return out;
}

// ---------------------------------------------------------------------------

ElasticSplit::ElasticSplit(const Simulation& sim) : tau_(sim.options().tau) {
  const auto& sys = sim.system();
  const Mesh& mesh = sim.model().mesh;
  for (std::size_t r = 0; r < sys.regions.size(); ++r) {
    if (!sim.kv_times()[r]) {
      throw Error(ErrorCode::UnsupportedRheology, "the elastic/viscous split is defined for Kelvin-Voigt only");
    }
    chi_.push_back(*sim.kv_times()[r]);
    const auto& L = sys.regions[r];
    const Stress s0 = L.bem.material.stress_from_strain(sim.model().initial_displacement.strain());
    Mat2 sigma;
    sigma << s0(0), s0(2), s0(2), s0(1);
    Vector el(2 * static_cast<Eigen::Index>(L.slot.size()));
    for (int sl = 0; sl < static_cast<int>(L.slot.size()); ++sl) {
      const Vec2 n = mesh.element_normal(L.bem.elements[sl / 2]);
      el.segment<2>(2 * sl) = L.node[L.slot_node(sl)].frame.transpose() * (sigma * n);
    }
    elastic_.push_back(el);
  }
  previous_ = elastic_;
}

void ElasticSplit::update(const StepState& state) {
  previous_ = elastic_;
  for (std::size_t r = 0; r < elastic_.size(); ++r) {
    elastic_[r] = (tau_ * state.regions[r].t + chi_[r] * previous_[r]) / (tau_ + chi_[r]);
  }
}

std::vector<Vector> ElasticSplit::viscous(const StepState& state) const {
  std::vector<Vector> out;
  for (std::size_t r = 0; r < elastic_.size(); ++r) out.push_back(state.regions[r].p - elastic_[r]);
  return out;
}

namespace {

Vector known_part(const RegionLayout& L, const Vector& t) {
  Vector out = Vector::Zero(t.size());
  for (int s = 0; s < static_cast<int>(L.slot.size()); ++s) {
    for (int d = 0; d < 2; ++d) {
      if (L.slot[s].known[d]) out(2 * s + d) = t(2 * s + d);
    }
  }
  return out;
}

}  // namespace

EnergyLedger::EnergyLedger(const Simulation& sim) : sim_(&sim), split_(sim) {
  const auto& sys = sim.system();
  const auto& st = sim.state();
  EnergyRow row;
  row.step = st.step;
  row.time = st.time;
  for (std::size_t r = 0; r < sys.regions.size(); ++r) {
    row.stored += 0.5 * boundary_pairing(sys.regions[r], split_.elastic()[r], st.regions[r].u);
    u_prev_.push_back(st.regions[r].u);
    g_prev_.push_back(known_part(sys.regions[r], st.data[r].t));
  }
  row.slack = 0.0;
  rows_.push_back(row);
}

void EnergyLedger::update(const StepState& state) {
  split_.update(state);
  const auto& sys = sim_->system();
  const double tau = sim_->options().tau;
  EnergyRow row = rows_.back();
  row.step = state.step;
  row.time = state.time;
  row.stored = 0.0;
  for (std::size_t r = 0; r < sys.regions.size(); ++r) {
    const auto& L = sys.regions[r];
    const double chi = *sim_->kv_times()[r];
    const Vector du = state.regions[r].u - u_prev_[r];
    const Vector dt = split_.elastic()[r] - split_.previous()[r];
    const Vector g = known_part(L, state.data[r].t);
    const Vector w = boundary_pairing_weights(L, du);
    row.stored += 0.5 * boundary_pairing(L, split_.elastic()[r], state.regions[r].u);
    row.dissipated += (chi / tau) * dt.dot(w);
    row.work += g.dot(w);
    row.work_trapezoid += 0.5 * (g + g_prev_[r]).dot(w);
    u_prev_[r] = state.regions[r].u;
    g_prev_[r] = g;
  }
  row.slack = rows_.front().stored + row.work - row.stored - row.dissipated;
  rows_.push_back(row);
}

double EnergyLedger::min_relative_slack() const {
  double worst = std::numeric_limits<double>::infinity();
  const double e0 = std::abs(rows_.front().stored);
  for (const auto& r : rows_) {
    const double scale = std::max({e0, std::abs(r.stored), std::abs(r.dissipated), std::abs(r.work)});
    if (scale > 0.0) worst = std::min(worst, r.slack / scale);
  }
  return std::isfinite(worst) ? worst : 0.0;
}

bool EnergyLedger::inequality_holds(double tol) const { return min_relative_slack() >= -tol; }

DissipationField::DissipationField(const Simulation& sim) : sim_(&sim) {
  for (const auto& kv : sim.kv_times()) {
    if (!kv) throw Error(ErrorCode::UnsupportedRheology, "dissipated energy is defined for Kelvin-Voigt only");
  }
  sigma_el_ = sim.state().interior_sigma;
  density_ = Vector::Zero(static_cast<Eigen::Index>(sim.interior_points().size()));
}

void DissipationField::update(const StepState& state) {
  const double tau = sim_->options().tau;
  const auto& pts = sim_->interior_points();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const int r = pts[i].region;
    const double chi = *sim_->kv_times()[r];
    const Eigen::Index o = 3 * static_cast<Eigen::Index>(i);
    const Stress old = sigma_el_.segment<3>(o);
    const Stress now = (tau * state.interior_sigma_aux.segment<3>(o) + chi * old) / (tau + chi);
    const Stress d = now - old;
    density_(static_cast<Eigen::Index>(i)) +=
        (chi / tau) * sim_->system().regions[r].bem.material.energy_product(d, d);
    sigma_el_.segment<3>(o) = now;
  }
}

std::vector<GroupForce> group_forces(const Mesh& mesh, const MixedSystem& sys, const std::vector<Vector>& p,
                                     const std::vector<Vector>* elastic) {
  std::map<int, GroupForce> acc;
  for (std::size_t r = 0; r < sys.regions.size(); ++r) {
    const auto& L = sys.regions[r];
    for (int le = 0; le < L.bem.num_elements(); ++le) {
      const int g = mesh.elements[L.bem.elements[le]].group;
      auto& f = acc[g];
      f.group = g;
      const double h = 0.5 * L.bem.lengths[le];
      for (int a = 0; a < 2; ++a) {
        const int s = 2 * le + a;
        const Mat2& R = L.node[L.slot_node(s)].frame;
        f.total += h * (R * p[r].segment<2>(2 * s));
        if (elastic) f.elastic += h * (R * (*elastic)[r].segment<2>(2 * s));
      }
    }
  }
  std::vector<GroupForce> out;
  for (auto& [g, f] : acc) {
    if (!elastic) f.elastic = Vec2::Constant(std::numeric_limits<double>::quiet_NaN());
    out.push_back(f);
  }
  return out;
}

}  // namespace viscobem
