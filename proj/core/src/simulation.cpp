#include "viscobem/simulation.hpp"

#include <cmath>
#include <sstream>

#include "viscobem/coupling.hpp"
#include "viscobem/error.hpp"

namespace viscobem {

int step_count(double total_time, double tau) {
  if (!(tau > 0.0) || !(total_time > 0.0) || !std::isfinite(tau) || !std::isfinite(total_time)) {
    throw Error(ErrorCode::Configuration, "T and tau must be positive");
  }
  const double ratio = total_time / tau;
  const double n = std::round(ratio);
  if (n < 1.0 || std::abs(ratio - n) > 1e-9 * std::max(1.0, ratio)) {
    throw Error(ErrorCode::Configuration, "T/tau must be an integer");
  }
  return static_cast<int>(n);
}

namespace {

Vector frame_components(const RegionLayout& L, const Mesh& mesh, const AffineField& field) {
  Vector out(2 * L.bem.num_nodes());
  for (int n = 0; n < L.bem.num_nodes(); ++n) {
    out.segment<2>(2 * n) = L.node[n].frame.transpose() * field(mesh.nodes[L.bem.nodes[n]]);
  }
  return out;
}

}  // namespace

Simulation::Simulation(const Model& model, const SimulationOptions& options)
    : model_(&model), options_(options) {
  if (const auto diag = validate_model(model); !diag.empty()) {
    std::ostringstream msg;
    for (std::size_t i = 0; i < diag.size(); ++i) msg << (i ? "; " : "") << diag[i];
    throw Error(ErrorCode::Configuration, msg.str());
  }
  steps_ = step_count(options.total_time, options.tau);

  std::vector<BemSystem> systems;
  std::vector<StepCoeffs> coeffs;
  for (int region : model.mesh.region_ids()) {
    const auto& rm = model.region(region);
    systems.push_back(assemble_region(model.mesh, region, rm.material, options.quadrature));
    coeffs.push_back(step_coefficients(rm.rheology, options.tau));
    const auto kv = kelvin_voigt_time(rm.rheology);
    kv_.push_back(kv);
    TransformPath path = options.path;
    if (path == TransformPath::Auto) path = kv ? TransformPath::KelvinVoigt : TransformPath::General;
    if (path == TransformPath::KelvinVoigt && !kv) {
      throw Error(ErrorCode::UnsupportedRheology,
                  "the Kelvin-Voigt transform needs Kelvin-Voigt coefficients (region " +
                      std::to_string(region) + ")");
    }
    paths_.push_back(path);
  }
  system_ = build_mixed_system(model, std::move(systems), std::move(coeffs));
  if (!system_.contact.empty()) {
    for (const auto& cn : system_.contact) {
      if (system_.coeffs[cn.region].has_stress_memory()) {
        throw Error(ErrorCode::UnsupportedRheology,
                    "contact requires a rheology without stress memory (xi1 = xi2 = 0)");
      }
    }
    contact_op_ = ContactOperator(system_);
  }

  const std::size_t R = system_.regions.size();
  history_.resize(R);
  state_.regions.resize(R);
  for (std::size_t r = 0; r < R; ++r) {
    const auto& L = system_.regions[r];
    const Eigen::Index n2 = 2 * L.bem.num_nodes();
    const Eigen::Index s2 = 2 * static_cast<Eigen::Index>(L.slot.size());
    const Vector u0 = frame_components(L, model.mesh, model.initial_displacement);
    history_[r].u = TwoStepHistory(n2);
    history_[r].u.prev = u0;
    history_[r].u.prev2 = u0;
    history_[r].p = TwoStepHistory(s2);
    state_.regions[r] = {u0, u0, Vector::Zero(s2), Vector::Zero(s2)};
  }
  state_.data = boundary_data(model, system_, 0.0);
  state_.known = state_.data;
  interior_initial();
}

void Simulation::set_interior_points(const std::vector<Vec2>& points) {
  if (state_.step != 0) throw std::logic_error("interior points must be registered before stepping");
  points_ = locate_points(model_->mesh, system_, points);
  const std::size_t R = system_.regions.size();
  region_points_.assign(R, {});
  for (int i = 0; i < static_cast<int>(points_.size()); ++i) region_points_[points_[i].region].push_back(i);
  interior_ops_.clear();
  for (std::size_t r = 0; r < R; ++r) {
    std::vector<Vec2> pts;
    for (int i : region_points_[r]) pts.push_back(points_[i].x);
    interior_ops_.emplace_back(model_->mesh, system_.regions[r], pts, options_.quadrature);
  }
  interior_initial();
}

void Simulation::interior_initial() {
  const Eigen::Index P = static_cast<Eigen::Index>(points_.size());
  state_.interior_u = Vector::Zero(2 * P);
  state_.interior_sigma = Vector::Zero(3 * P);
  for (Eigen::Index i = 0; i < P; ++i) {
    const auto& pt = points_[i];
    state_.interior_u.segment<2>(2 * i) = model_->initial_displacement(pt.x);
    if (kv_[pt.region]) {
      const auto& mat = system_.regions[pt.region].bem.material;
      state_.interior_sigma.segment<3>(3 * i) = mat.stress_from_strain(model_->initial_displacement.strain());
    }
  }
  state_.interior_v = state_.interior_u;
  state_.interior_sigma_aux = state_.interior_sigma;
  iu_ = TwoStepHistory(2 * P);
  iu_.prev = iu_.prev2 = state_.interior_u;
  isig_ = TwoStepHistory(3 * P);
}

const StepState& Simulation::step() {
  if (finished()) throw std::logic_error("simulation already finished");
  const int k = state_.step + 1;
  const double tau = options_.tau;
  const double t = k * tau;
  const std::size_t R = system_.regions.size();

  StepState next;
  next.step = k;
  next.time = t;
  next.data = boundary_data(*model_, system_, t);
  next.known = next.data;
  for (std::size_t r = 0; r < R; ++r) {
    const auto& L = system_.regions[r];
    const auto& c = system_.coeffs[r];
    const auto& h = history_[r];
    const bool kv = paths_[r] == TransformPath::KelvinVoigt;
    const double chi = kv ? *kv_[r] : 0.0;
    auto& kn = next.known[r];
    for (int nd = 0; nd < kn.v.size(); ++nd) {
      if (L.node[nd / 2].kind[nd % 2] != DofKind::Dirichlet) continue;
      const double w = next.data[r].v(nd);
      kn.v(nd) = kv ? kv_transform_dirichlet(chi, tau, w, h.u.prev(nd))
                    : transform_dirichlet(c, w, h.u.prev(nd), h.u.prev2(nd));
    }
    if (!kv) {
      for (int s = 0; s < static_cast<int>(L.slot.size()); ++s) {
        for (int d = 0; d < 2; ++d) {
          const int i = 2 * s + d;
          if (L.slot[s].known[d]) kn.t(i) = transform_neumann(c, next.data[r].t(i), h.p.prev(i), h.p.prev2(i));
        }
      }
    }
  }

  const Vector irhs = interface_rhs(system_, history_);
  const Vector b = system_.rhs(next.known, irhs);
  Vector z = system_.solve(b);
  {
    const double bn = b.norm();
    const double rn = (system_.matrix() * z - b).norm();
    next.residual = bn > 0.0 ? rn / bn : rn;
  }

  std::vector<RegionValues> fields;
  const int m = static_cast<int>(system_.contact.size());
  if (m > 0) {
    const auto base = system_.extract(z, next.known, Vector::Zero(m));
    Vector bound(m);
    for (int i = 0; i < m; ++i) {
      const auto& cn = system_.contact[i];
      const auto& h = history_[cn.region];
      const int nd = 2 * cn.local_node;
      const auto& c = system_.coeffs[cn.region];
      if (paths_[cn.region] == TransformPath::KelvinVoigt) {
        const double chi = *kv_[cn.region];
        bound(i) = ((tau + chi) / tau) * cn.gap - (chi / tau) * h.u.prev(nd);
      } else {
        bound(i) = c.a0 * cn.gap - c.a1 * h.u.prev(nd) + c.a2 * h.u.prev2(nd);
      }
    }
    const ContactQP qp = contact_op_.condense(system_, base, next.known, bound);
    ContactStep cs;
    cs.qp = solve_qp(qp, options_.qp);
    cs.b = bound;
    cs.kkt = kkt_check(qp, cs.qp.x, cs.qp.lambda);
    cs.asymmetry = qp.asymmetry;
    cs.energy = qp.energy(cs.qp.x);
    cs.zone_length = contact_zone_length(system_, cs.qp.active);
    z += system_.contact_response() * cs.qp.x;
    fields = system_.extract(z, next.known, cs.qp.x);
    next.contact = std::move(cs);
  } else {
    fields = system_.extract(z, next.known, Vector());
  }

  next.regions.resize(R);
  for (std::size_t r = 0; r < R; ++r) {
    const auto& c = system_.coeffs[r];
    const auto& h = history_[r];
    auto& rs = next.regions[r];
    rs.v = std::move(fields[r].v);
    rs.t = std::move(fields[r].t);
    if (paths_[r] == TransformPath::KelvinVoigt) {
      const double chi = *kv_[r];
      rs.u.resize(rs.v.size());
      for (Eigen::Index i = 0; i < rs.v.size(); ++i) rs.u(i) = kv_recover_displacement(chi, tau, rs.v(i), h.u.prev(i));
      rs.p = rs.t;
    } else {
      rs.u.resize(rs.v.size());
      for (Eigen::Index i = 0; i < rs.v.size(); ++i) rs.u(i) = recover_displacement(c, rs.v(i), h.u.prev(i), h.u.prev2(i));
      rs.p.resize(rs.t.size());
      for (Eigen::Index i = 0; i < rs.t.size(); ++i) rs.p(i) = recover_traction(c, rs.t(i), h.p.prev(i), h.p.prev2(i));
    }
  }

  const Eigen::Index P = static_cast<Eigen::Index>(points_.size());
  next.interior_v = Vector::Zero(2 * P);
  next.interior_u = Vector::Zero(2 * P);
  next.interior_sigma_aux = Vector::Zero(3 * P);
  next.interior_sigma = Vector::Zero(3 * P);
  for (std::size_t r = 0; r < R && P > 0; ++r) {
    if (region_points_[r].empty()) continue;
    const Vector uv = interior_ops_[r].displacement(next.regions[r].v, next.regions[r].t);
    const Vector sv = interior_ops_[r].stress(next.regions[r].v, next.regions[r].t);
    const auto& c = system_.coeffs[r];
    const bool kv = paths_[r] == TransformPath::KelvinVoigt;
    for (std::size_t j = 0; j < region_points_[r].size(); ++j) {
      const int i = region_points_[r][j];
      for (int d = 0; d < 2; ++d) {
        const double v = uv(2 * j + d);
        next.interior_v(2 * i + d) = v;
        next.interior_u(2 * i + d) = kv ? kv_recover_displacement(*kv_[r], tau, v, iu_.prev(2 * i + d))
                                        : recover_displacement(c, v, iu_.prev(2 * i + d), iu_.prev2(2 * i + d));
      }
      for (int d = 0; d < 3; ++d) {
        const double s = sv(3 * j + d);
        next.interior_sigma_aux(3 * i + d) = s;
        next.interior_sigma(3 * i + d) = s + c.d1 * isig_.prev(3 * i + d) - c.d2 * isig_.prev2(3 * i + d);
      }
    }
  }

  for (std::size_t r = 0; r < R; ++r) {
    history_[r].u.push(next.regions[r].u);
    history_[r].p.push(next.regions[r].p);
    history_[r].step = k;
  }
  iu_.push(next.interior_u);
  isig_.push(next.interior_sigma);
  state_ = std::move(next);
  return state_;
}

void Simulation::run(const std::function<void(const StepState&)>& observer) {
  while (!finished()) {
    const StepState& s = step();
    if (observer) observer(s);
  }
}

BoundarySample sample_boundary(const Simulation& sim, const StepState& state, const BoundaryProbe& probe) {
  const auto& sys = sim.system();
  for (std::size_t r = 0; r < sys.regions.size(); ++r) {
    const auto& L = sys.regions[r];
    const int n = L.bem.local_node(probe.node);
    if (n < 0) continue;
    BoundarySample s;
    s.step = state.step;
    s.time = state.time;
    s.probe = probe.name;
    const Mat2& R = L.node[n].frame;
    s.u = R * state.regions[r].u.segment<2>(2 * n);
    s.v = R * state.regions[r].v.segment<2>(2 * n);
    Vec2 sum = Vec2::Zero();
    int count = 0;
    for (int sl = 0; sl < static_cast<int>(L.slot.size()); ++sl) {
      if (L.slot_node(sl) != n) continue;
      sum += R * state.regions[r].p.segment<2>(2 * sl);
      ++count;
    }
    s.p = count > 0 ? Vec2(sum / count) : Vec2::Zero();
    return s;
  }
  throw Error(ErrorCode::Configuration, "probe node #" + std::to_string(probe.node) + " is not a mesh node");
}

TimeSeries run_time_loop(const Model& model, const SimulationOptions& options,
                         const std::vector<BoundaryProbe>& boundary_probes,
                         const std::vector<InteriorProbe>& interior_probes) {
  Simulation sim(model, options);
  std::vector<Vec2> pts;
  for (const auto& p : interior_probes) pts.push_back(p.point);
  if (!pts.empty()) sim.set_interior_points(pts);
  TimeSeries ts;
  sim.run([&](const StepState& s) {
    for (const auto& p : boundary_probes) ts.boundary.push_back(sample_boundary(sim, s, p));
    for (std::size_t i = 0; i < interior_probes.size(); ++i) {
      InteriorSample is;
      is.step = s.step;
      is.time = s.time;
      is.probe = interior_probes[i].name;
      is.u = s.interior_u.segment<2>(2 * static_cast<Eigen::Index>(i));
      is.v = s.interior_v.segment<2>(2 * static_cast<Eigen::Index>(i));
      is.sigma = s.interior_sigma.segment<3>(3 * static_cast<Eigen::Index>(i));
      ts.interior.push_back(is);
    }
  });
  return ts;
}

}  // namespace viscobem
