#include "viscobem/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>
#include <unordered_map>

#include "viscobem/error.hpp"

namespace viscobem {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidGeometry: return "invalid-geometry";
    case ErrorCode::InvalidMaterial: return "invalid-material";
    case ErrorCode::InvalidRheology: return "invalid-rheology";
    case ErrorCode::SingularEvaluation: return "singular-evaluation";
    case ErrorCode::InvalidNormal: return "invalid-normal";
    case ErrorCode::UnsupportedConfiguration: return "unsupported-configuration";
    case ErrorCode::DegenerateRheology: return "degenerate-rheology";
    case ErrorCode::NonInvertibleTransform: return "non-invertible-transform";
    case ErrorCode::Configuration: return "configuration";
    case ErrorCode::IllPosed: return "ill-posed-configuration";
    case ErrorCode::NonConvergence: return "non-convergence";
    case ErrorCode::OutOfDomain: return "out-of-domain";
    case ErrorCode::UnsupportedRheology: return "unsupported-rheology";
    case ErrorCode::SingularSystem: return "singular-system";
    case ErrorCode::Io: return "io";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Mesh
// ---------------------------------------------------------------------------

int Mesh::group_id(std::string_view name) const {
  for (std::size_t i = 0; i < group_names.size(); ++i) {
    if (group_names[i] == name) return static_cast<int>(i);
  }
  return -1;
}

std::string Mesh::group_name(int id) const {
  if (id >= 0 && id < static_cast<int>(group_names.size()) && !group_names[id].empty()) {
    return group_names[id];
  }
  return std::to_string(id);
}

double Mesh::element_length(int e) const {
  const auto& el = elements[e];
  return (nodes[el.n2] - nodes[el.n1]).norm();
}

Vec2 Mesh::element_tangent(int e) const {
  const auto& el = elements[e];
  return (nodes[el.n2] - nodes[el.n1]).normalized();
}

Vec2 Mesh::element_normal(int e) const {
  const Vec2 t = element_tangent(e);
  return {t.y(), -t.x()};
}

double Mesh::bbox_diagonal() const {
  if (nodes.empty()) return 0.0;
  Vec2 lo = nodes.front(), hi = nodes.front();
  for (const auto& p : nodes) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  return (hi - lo).norm();
}

std::vector<int> Mesh::region_ids() const {
  std::set<int> ids;
  for (const auto& e : elements) ids.insert(e.region);
  return {ids.begin(), ids.end()};
}

std::vector<int> Mesh::region_elements(int region) const {
  std::vector<int> out;
  for (int e = 0; e < num_elements(); ++e) {
    if (elements[e].region == region) out.push_back(e);
  }
  return out;
}

std::vector<int> Mesh::region_nodes(int region) const {
  std::vector<int> out;
  std::vector<char> seen(nodes.size(), 0);
  for (const auto& el : elements) {
    if (el.region != region) continue;
    for (int n : {el.n1, el.n2}) {
      if (!seen[n]) {
        seen[n] = 1;
        out.push_back(n);
      }
    }
  }
  return out;
}

std::vector<std::vector<int>> Mesh::region_loops(int region) const {
  std::unordered_map<int, int> outgoing;
  const auto elems = region_elements(region);
  for (int e : elems) outgoing.emplace(elements[e].n1, e);

  std::vector<std::vector<int>> loops;
  std::set<int> visited;
  for (int start : elems) {
    if (visited.count(start)) continue;
    std::vector<int> loop;
    int e = start;
    while (e >= 0 && !visited.count(e)) {
      visited.insert(e);
      loop.push_back(e);
      auto it = outgoing.find(elements[e].n2);
      e = it == outgoing.end() ? -1 : it->second;
    }
    loops.push_back(std::move(loop));
  }
  return loops;
}

double Mesh::loop_signed_area(const std::vector<int>& loop) const {
  double area = 0.0;
  for (int e : loop) {
    const Vec2& a = nodes[elements[e].n1];
    const Vec2& b = nodes[elements[e].n2];
    area += a.x() * b.y() - b.x() * a.y();
  }
  return 0.5 * area;
}

double region_area(const Mesh& mesh, int region) {
  double area = 0.0;
  for (const auto& loop : mesh.region_loops(region)) area += mesh.loop_signed_area(loop);
  return area;
}

bool point_in_region(const Mesh& mesh, int region, const Vec2& p) {
  double winding = 0.0;
  for (const auto& el : mesh.elements) {
    if (el.region != region) continue;
    const Vec2 a = mesh.nodes[el.n1] - p;
    const Vec2 b = mesh.nodes[el.n2] - p;
    winding += std::atan2(a.x() * b.y() - a.y() * b.x(), a.dot(b));
  }
  return std::lround(winding / (2.0 * std::numbers::pi)) >= 1;
}

std::pair<double, double> distance_to_boundary(const Mesh& mesh, int region, const Vec2& p) {
  double best = std::numeric_limits<double>::infinity();
  double best_len = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto& el = mesh.elements[e];
    if (el.region != region) continue;
    const Vec2& a = mesh.nodes[el.n1];
    const Vec2 d = mesh.nodes[el.n2] - a;
    const double len2 = d.squaredNorm();
    const double s = len2 > 0.0 ? std::clamp((p - a).dot(d) / len2, 0.0, 1.0) : 0.0;
    const double dist = (a + s * d - p).norm();
    if (dist < best) {
      best = dist;
      best_len = std::sqrt(len2);
    }
  }
  return {best, best_len};
}

// ---------------------------------------------------------------------------
// Material
// ---------------------------------------------------------------------------

Stress Material::stress_from_strain(const Eigen::Vector3d& e) const {
  const double mu = shear_modulus();
  const double lambda = lame_lambda();
  return {(lambda + 2.0 * mu) * e(0) + lambda * e(1), lambda * e(0) + (lambda + 2.0 * mu) * e(1),
          2.0 * mu * e(2)};
}

Eigen::Vector3d Material::strain_from_stress(const Stress& s) const {
  const double two_mu = 2.0 * shear_modulus();
  return {((1.0 - nu) * s(0) - nu * s(1)) / two_mu, ((1.0 - nu) * s(1) - nu * s(0)) / two_mu,
          s(2) / two_mu};
}

double Material::energy_product(const Stress& a, const Stress& b) const {
  const Eigen::Vector3d e = strain_from_stress(b);
  return a(0) * e(0) + a(1) * e(1) + 2.0 * a(2) * e(2);
}

// ---------------------------------------------------------------------------
// Rheology
// ---------------------------------------------------------------------------

const std::vector<std::string>& rheology_preset_names() {
  static const std::vector<std::string> names = {
      "hooke", "newton", "maxwell", "kelvin_voigt", "boltzmann", "jeffreys", "burgers", "solid4"};
  return names;
}

namespace {

double require(const std::optional<double>& v, std::string_view param, std::string_view name) {
  if (!v) {
    throw Error(ErrorCode::InvalidRheology,
                "rheology '" + std::string(name) + "' requires parameter '" + std::string(param) + "'");
  }
  if (!std::isfinite(*v) || *v <= 0.0) {
    throw Error(ErrorCode::InvalidRheology, "rheology parameter '" + std::string(param) +
                                                "' must be positive for '" + std::string(name) + "'");
  }
  return *v;
}

RheologyCoeffs make(double c0, double c1, double c2, double x0, double x1, double x2,
                    std::string_view name) {
  RheologyCoeffs r{c0, c1, c2, x0, x1, x2, std::string(name)};
  if (const auto d = rheology_diagnostics(r); !d.empty()) {
    throw Error(ErrorCode::InvalidRheology, d.front());
  }
  return r;
}

}  // namespace

RheologyCoeffs rheology_preset(std::string_view name, const RheologyParams& p) {
  // Series components of the generic scheme: spring alpha*C, dashpot mu2*C and
  // a Kelvin-Voigt unit (C, chi*C). Presets eliminate internal strains and
  // divide through so that xi0 = 1.
  if (name == "hooke") return make(1, 0, 0, 1, 0, 0, name);
  if (name == "newton") {
    const double chi = require(p.chi, "chi", name);
    return make(0, chi, 0, 1, 0, 0, name);
  }
  if (name == "maxwell") {
    const double chi = require(p.chi, "chi", name);
    return make(0, chi, 0, 1, chi, 0, name);
  }
  if (name == "kelvin_voigt") {
    if (!p.chi) require(p.chi, "chi", name);
    if (*p.chi == 0.0) return make(1, 0, 0, 1, 0, 0, "hooke");
    const double chi = require(p.chi, "chi", name);
    return make(1, chi, 0, 1, 0, 0, name);
  }
  if (name == "boltzmann") {
    const double chi = require(p.chi, "chi", name);
    const double a = require(p.alpha, "alpha", name);
    return make(a / (a + 1.0), a * chi / (a + 1.0), 0, 1, chi / (a + 1.0), 0, name);
  }
  if (name == "jeffreys") {
    const double chi = require(p.chi, "chi", name);
    const double mu2 = require(p.mu2, "mu2", name);
    return make(0, mu2, chi * mu2, 1, chi + mu2, 0, name);
  }
  if (name == "burgers") {
    const double chi = require(p.chi, "chi", name);
    const double a = require(p.alpha, "alpha", name);
    const double mu2 = require(p.mu2, "mu2", name);
    return make(0, mu2, chi * mu2, 1, chi + mu2 + mu2 / a, chi * mu2 / a, name);
  }
  if (name == "solid4") {
    // Kelvin-Voigt unit (C, chi*C) in parallel with a Maxwell arm (alpha*C, mu2*C).
    const double chi = require(p.chi, "chi", name);
    const double a = require(p.alpha, "alpha", name);
    const double mu2 = require(p.mu2, "mu2", name);
    return make(1, chi + mu2 + mu2 / a, chi * mu2 / a, 1, mu2 / a, 0, name);
  }
  throw Error(ErrorCode::InvalidRheology, "unknown rheology '" + std::string(name) + "'");
}

std::optional<double> kelvin_voigt_time(const RheologyCoeffs& r) {
  if (r.chi0 > 0.0 && r.chi0 == r.xi0 && r.chi2 == 0.0 && r.xi1 == 0.0 && r.xi2 == 0.0) {
    return r.chi1 / r.chi0;
  }
  return std::nullopt;
}

std::vector<std::string> rheology_diagnostics(const RheologyCoeffs& r) {
  std::vector<std::string> out;
  for (double c : {r.chi0, r.chi1, r.chi2, r.xi0, r.xi1, r.xi2}) {
    if (!std::isfinite(c) || c < 0.0) {
      out.emplace_back("rheology coefficients must be finite and nonnegative");
      break;
    }
  }
  if (r.chi0 == 0.0 && r.chi1 == 0.0 && r.chi2 == 0.0) out.emplace_back("all chi coefficients are zero");
  if (r.xi0 == 0.0 && r.xi1 == 0.0 && r.xi2 == 0.0) out.emplace_back("all xi coefficients are zero");
  return out;
}

// ---------------------------------------------------------------------------
// Load programs and boundary conditions
// ---------------------------------------------------------------------------

LoadProgram::LoadProgram(std::vector<std::pair<double, double>> breakpoints)
    : points_(std::move(breakpoints)) {
  if (points_.empty()) throw Error(ErrorCode::Configuration, "load program needs at least one breakpoint");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!std::isfinite(points_[i].first) || !std::isfinite(points_[i].second)) {
      throw Error(ErrorCode::Configuration, "load program breakpoints must be finite");
    }
    if (i > 0 && points_[i].first < points_[i - 1].first) {
      throw Error(ErrorCode::Configuration, "load program breakpoint times must increase");
    }
    if (i > 1 && points_[i].first == points_[i - 2].first) {
      throw Error(ErrorCode::Configuration,
                  "load program jumps are encoded by exactly two equal breakpoint times");
    }
  }
}

double LoadProgram::operator()(double t) const {
  if (points_.empty()) return 1.0;
  if (t <= points_.front().first) return points_.front().second;
  for (std::size_t i = 0; i + 1 < points_.size(); ++i) {
    const auto& [t0, v0] = points_[i];
    const auto& [t1, v1] = points_[i + 1];
    if (t1 > t0 && t <= t1) return v0 + (v1 - v0) * (t - t0) / (t1 - t0);
  }
  return points_.back().second;
}

BoundaryCondition BoundaryCondition::fixed(std::string group) {
  BoundaryCondition bc;
  bc.group = std::move(group);
  bc.components[0] = {BcKind::Dirichlet, 0.0, {}};
  bc.components[1] = {BcKind::Dirichlet, 0.0, {}};
  return bc;
}

BoundaryCondition BoundaryCondition::traction(std::string group, BcFrame frame, double c0,
                                              double c1, std::string program) {
  BoundaryCondition bc;
  bc.group = std::move(group);
  bc.frame = frame;
  bc.components[0] = {BcKind::Neumann, c0, program};
  bc.components[1] = {BcKind::Neumann, c1, program};
  return bc;
}

const RegionMaterial& Model::region(int id) const {
  for (const auto& r : regions) {
    if (r.region == id) return r;
  }
  throw Error(ErrorCode::Configuration, "no material for region " + std::to_string(id));
}

const LoadProgram& Model::program(const std::string& name) const {
  static const LoadProgram constant;
  if (name.empty()) return constant;
  auto it = programs.find(name);
  if (it == programs.end()) throw Error(ErrorCode::Configuration, "unknown load program '" + name + "'");
  return it->second;
}

const BoundaryCondition* Model::condition(int group) const {
  const std::string name = mesh.group_name(group);
  for (const auto& bc : boundary) {
    if (bc.group == name) return &bc;
  }
  return nullptr;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

std::vector<std::string> validate_mesh(const Mesh& mesh) {
  std::vector<std::string> out;
  if (mesh.elements.empty()) {
    out.emplace_back("mesh has no elements");
    return out;
  }
  const int nn = mesh.num_nodes();
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto& el = mesh.elements[e];
    if (el.n1 < 0 || el.n1 >= nn || el.n2 < 0 || el.n2 >= nn) {
      out.push_back("element #" + std::to_string(e) + " references a missing node");
      return out;
    }
    if (el.group < 0 || (!mesh.group_names.empty() && el.group >= static_cast<int>(mesh.group_names.size()))) {
      out.push_back("element #" + std::to_string(e) + " has no bc-group");
    }
  }
  const double tol = 1e-12 * mesh.bbox_diagonal();
  for (int e = 0; e < mesh.num_elements(); ++e) {
    if (mesh.element_length(e) <= tol) out.push_back("zero-length element #" + std::to_string(e));
  }

  for (int region : mesh.region_ids()) {
    const auto nodes = mesh.region_nodes(region);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      for (std::size_t j = i + 1; j < nodes.size(); ++j) {
        if ((mesh.nodes[nodes[i]] - mesh.nodes[nodes[j]]).norm() <= tol) {
          out.push_back("duplicate nodes #" + std::to_string(nodes[i]) + " and #" +
                        std::to_string(nodes[j]) + " in region " + std::to_string(region));
        }
      }
    }
    std::unordered_map<int, int> in_deg, out_deg;
    for (int e : mesh.region_elements(region)) {
      ++out_deg[mesh.elements[e].n1];
      ++in_deg[mesh.elements[e].n2];
    }
    bool closed = true;
    for (int n : nodes) {
      if (in_deg[n] != 1 || out_deg[n] != 1) {
        out.push_back("node #" + std::to_string(n) + " of region " + std::to_string(region) +
                      " does not have exactly two consistently oriented elements");
        closed = false;
      }
    }
    if (!closed) continue;
    const auto loops = mesh.region_loops(region);
    std::size_t outer = 0;
    for (std::size_t i = 1; i < loops.size(); ++i) {
      if (std::abs(mesh.loop_signed_area(loops[i])) > std::abs(mesh.loop_signed_area(loops[outer]))) outer = i;
    }
    for (std::size_t i = 0; i < loops.size(); ++i) {
      const double a = mesh.loop_signed_area(loops[i]);
      if (i == outer && a <= 0.0) {
        out.push_back("outer loop of region " + std::to_string(region) + " is not counter-clockwise");
      } else if (i != outer && a >= 0.0) {
        out.push_back("hole loop of region " + std::to_string(region) + " is not clockwise");
      }
    }
  }
  return out;
}

std::vector<std::string> validate_model(const Mesh& mesh, const std::vector<RegionMaterial>& materials,
                                        const std::vector<BoundaryCondition>& bcs) {
  auto out = validate_mesh(mesh);
  for (int region : mesh.region_ids()) {
    const auto n = std::count_if(materials.begin(), materials.end(),
                                 [&](const RegionMaterial& m) { return m.region == region; });
    if (n != 1) out.push_back("region " + std::to_string(region) + " needs exactly one material");
  }
  for (const auto& m : materials) {
    if (!(m.material.E > 0.0) || !std::isfinite(m.material.E)) {
      out.push_back("Young's modulus must be positive (region " + std::to_string(m.region) + ")");
    }
    if (!(m.material.nu > -1.0 && m.material.nu < 0.5)) {
      out.push_back("Poisson ratio out of range (region " + std::to_string(m.region) + ")");
    }
    for (const auto& d : rheology_diagnostics(m.rheology)) {
      out.push_back(d + " (region " + std::to_string(m.region) + ")");
    }
  }
  std::set<std::string> seen;
  for (const auto& bc : bcs) {
    const int gid = mesh.group_id(bc.group);
    if (gid < 0) {
      out.push_back("unknown bc-group '" + bc.group + "'");
      continue;
    }
    if (!seen.insert(bc.group).second) out.push_back("bc-group '" + bc.group + "' has two conditions");
    if (bc.contact) {
      const auto& c = *bc.contact;
      if (c.obstacle) {
        if (std::abs(c.obstacle->normal.norm() - 1.0) > 1e-12) {
          out.push_back("obstacle normal of '" + bc.group + "' is not a unit vector");
        }
        const double tol = 1e-12 * mesh.bbox_diagonal();
        for (const auto& el : mesh.elements) {
          if (el.group != gid) continue;
          for (int n : {el.n1, el.n2}) {
            if ((mesh.nodes[n] - c.obstacle->point).dot(c.obstacle->normal) < -tol) {
              out.push_back("negative initial gap at node #" + std::to_string(n));
            }
          }
        }
      } else if (c.gap < 0.0) {
        out.push_back("negative initial gap in contact group '" + bc.group + "'");
      }
      continue;
    }
    if (bc.frame == BcFrame::NormalTangential &&
        (bc.components[0].kind == BcKind::Dirichlet || bc.components[1].kind == BcKind::Dirichlet)) {
      out.push_back("Dirichlet data in the normal/tangential frame is not supported ('" + bc.group + "')");
    }
  }
  return out;
}

std::vector<std::string> validate_model(const Model& model) {
  auto out = validate_model(model.mesh, model.regions, model.boundary);
  for (const auto& bc : model.boundary) {
    for (const auto& c : bc.components) {
      if (!c.program.empty() && !model.programs.count(c.program)) {
        out.push_back("unknown load program '" + c.program + "'");
      }
    }
  }
  for (const auto& itf : model.interfaces) {
    const int a = model.mesh.group_id(itf.group_a);
    const int b = model.mesh.group_id(itf.group_b);
    if (a < 0 || b < 0) {
      out.push_back("interface references an unknown bc-group");
      continue;
    }
    std::set<int> ra, rb;
    for (const auto& el : model.mesh.elements) {
      if (el.group == a) ra.insert(el.region);
      if (el.group == b) rb.insert(el.region);
    }
    if (ra.size() != 1 || rb.size() != 1 || *ra.begin() == *rb.begin()) {
      out.push_back("interface groups must each lie in one region, and in different regions");
    }
    for (const auto& bc : model.boundary) {
      if (bc.group == itf.group_a || bc.group == itf.group_b) {
        out.push_back("interface group '" + bc.group + "' also carries a boundary condition");
      }
    }
  }
  if (!model.initial_displacement.is_zero()) {
    for (const auto& r : model.regions) {
      if (!kelvin_voigt_time(r.rheology)) {
        out.push_back("nonzero initial displacement requires Kelvin-Voigt regions");
        break;
      }
    }
  }
  return out;
}

}  // namespace viscobem
