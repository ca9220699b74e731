#include "viscobem/case.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "json.hpp"
#include "viscobem/csv.hpp"
#include "viscobem/error.hpp"
#include "viscobem/mesh_io.hpp"

namespace viscobem {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

/// Collects schema violations while walking the document.
class Reader {
 public:
  std::vector<std::string> errors;

  void fail(const std::string& path, const std::string& msg) {
    errors.push_back((path.empty() ? std::string("/") : path) + ": " + msg);
  }

  /// Checks that `j` is an object with only `allowed` keys and all `required` keys.
  bool object(const json& j, const std::string& path, const std::set<std::string>& allowed,
              const std::vector<std::string>& required = {}) {
    if (!j.is_object()) {
      fail(path, "expected an object");
      return false;
    }
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!allowed.count(it.key())) fail(path + "/" + it.key(), "unknown key");
    }
    for (const auto& k : required) {
      if (!j.contains(k)) fail(path + "/" + k, "required field missing");
    }
    return true;
  }

  bool array(const json& j, const std::string& path) {
    if (!j.is_array()) {
      fail(path, "expected an array");
      return false;
    }
    return true;
  }

  double number(const json& j, const std::string& path, double fallback = 0.0) {
    if (!j.is_number()) {
      fail(path, "expected a number");
      return fallback;
    }
    return j.get<double>();
  }

  int integer(const json& j, const std::string& path, int fallback = 0) {
    if (!j.is_number_integer()) {
      fail(path, "expected an integer");
      return fallback;
    }
    return j.get<int>();
  }

  std::string string(const json& j, const std::string& path) {
    if (!j.is_string()) {
      fail(path, "expected a string");
      return {};
    }
    return j.get<std::string>();
  }

  bool boolean(const json& j, const std::string& path, bool fallback) {
    if (!j.is_boolean()) {
      fail(path, "expected a boolean");
      return fallback;
    }
    return j.get<bool>();
  }

  Vec2 vec2(const json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 2) {
      fail(path, "expected [x, y]");
      return Vec2::Zero();
    }
    return {number(j[0], path + "/0"), number(j[1], path + "/1")};
  }

  template <class T, class F>
  void opt(const json& j, const std::string& key, const std::string& path, T& out, F read) {
    if (j.contains(key)) out = read(j.at(key), path + "/" + key);
  }
  void opt_number(const json& j, const std::string& key, const std::string& path, double& out) {
    if (j.contains(key)) out = number(j.at(key), path + "/" + key, out);
  }
  void opt_int(const json& j, const std::string& key, const std::string& path, int& out) {
    if (j.contains(key)) out = integer(j.at(key), path + "/" + key, out);
  }
};

std::optional<Mesh> read_mesh_section(Reader& rd, const json& j, const std::string& base_dir) {
  const std::string path = "/mesh";
  if (!j.is_object()) {
    rd.fail(path, "expected an object");
    return std::nullopt;
  }
  if (j.contains("file")) {
    if (!rd.object(j, path, {"file"})) return std::nullopt;
    const std::string f = rd.string(j.at("file"), path + "/file");
    if (f.empty()) return std::nullopt;
    fs::path p(f);
    if (p.is_relative()) p = fs::path(base_dir) / p;
    try {
      return read_mesh_file(p.string());
    } catch (const Error& e) {
      rd.fail(path + "/file", e.what());
      return std::nullopt;
    }
  }
  if (!j.contains("generator")) {
    rd.fail(path, "either 'generator' or 'file' is required");
    return std::nullopt;
  }
  const std::string gen = rd.string(j.at("generator"), path + "/generator");
  ShapeSpec shape;
  if (gen == "rectangle") {
    rd.object(j, path, {"generator", "length", "height", "nx", "ny", "origin"});
    RectangleSpec s;
    rd.opt_number(j, "length", path, s.length);
    rd.opt_number(j, "height", path, s.height);
    rd.opt_int(j, "nx", path, s.nx);
    rd.opt_int(j, "ny", path, s.ny);
    if (j.contains("origin")) s.origin = rd.vec2(j.at("origin"), path + "/origin");
    shape = s;
  } else if (gen == "quarter_disk") {
    rd.object(j, path, {"generator", "radius", "contact_angle_deg", "n_contact", "n_arc", "n_straight"});
    QuarterDiskSpec s;
    rd.opt_number(j, "radius", path, s.radius);
    rd.opt_number(j, "contact_angle_deg", path, s.contact_angle_deg);
    rd.opt_int(j, "n_contact", path, s.n_contact);
    rd.opt_int(j, "n_arc", path, s.n_arc);
    rd.opt_int(j, "n_straight", path, s.n_straight);
    shape = s;
  } else if (gen == "stacked_rectangles") {
    rd.object(j, path, {"generator", "length", "height0", "height1", "nx", "ny0", "ny1"});
    StackedRectanglesSpec s;
    rd.opt_number(j, "length", path, s.length);
    rd.opt_number(j, "height0", path, s.height0);
    rd.opt_number(j, "height1", path, s.height1);
    rd.opt_int(j, "nx", path, s.nx);
    rd.opt_int(j, "ny0", path, s.ny0);
    rd.opt_int(j, "ny1", path, s.ny1);
    shape = s;
  } else {
    if (!gen.empty()) rd.fail(path + "/generator", "unknown generator '" + gen + "'");
    return std::nullopt;
  }
  try {
    return generate_mesh(shape);
  } catch (const Error& e) {
    rd.fail(path, e.what());
    return std::nullopt;
  }
}

RheologyCoeffs read_rheology(Reader& rd, const json& j, const std::string& path) {
  if (!j.is_object()) {
    rd.fail(path, "expected an object");
    return {};
  }
  if (j.contains("coefficients")) {
    rd.object(j, path, {"coefficients"});
    const std::string cp = path + "/coefficients";
    const json& c = j.at("coefficients");
    RheologyCoeffs r;
    if (!rd.object(c, cp, {"chi0", "chi1", "chi2", "xi0", "xi1", "xi2"})) return r;
    r.chi0 = r.xi0 = 0.0;
    rd.opt_number(c, "chi0", cp, r.chi0);
    rd.opt_number(c, "chi1", cp, r.chi1);
    rd.opt_number(c, "chi2", cp, r.chi2);
    rd.opt_number(c, "xi0", cp, r.xi0);
    rd.opt_number(c, "xi1", cp, r.xi1);
    rd.opt_number(c, "xi2", cp, r.xi2);
    for (const auto& d : rheology_diagnostics(r)) rd.fail(cp, d);
    return r;
  }
  rd.object(j, path, {"preset", "chi", "alpha", "mu2"}, {"preset"});
  if (!j.contains("preset")) return {};
  const std::string name = rd.string(j.at("preset"), path + "/preset");
  RheologyParams p;
  rd.opt(j, "chi", path, p.chi, [&](const json& v, const std::string& q) { return rd.number(v, q); });
  rd.opt(j, "alpha", path, p.alpha, [&](const json& v, const std::string& q) { return rd.number(v, q); });
  rd.opt(j, "mu2", path, p.mu2, [&](const json& v, const std::string& q) { return rd.number(v, q); });
  try {
    return rheology_preset(name, p);
  } catch (const Error& e) {
    rd.fail(path, e.what());
    return {};
  }
}

BcComponent read_component(Reader& rd, const json& j, const std::string& path) {
  BcComponent c;
  if (!rd.object(j, path, {"type", "value", "program"}, {"type"})) return c;
  if (j.contains("type")) {
    const std::string t = rd.string(j.at("type"), path + "/type");
    if (t == "dirichlet") {
      c.kind = BcKind::Dirichlet;
    } else if (t == "neumann") {
      c.kind = BcKind::Neumann;
    } else if (!t.empty()) {
      rd.fail(path + "/type", "expected 'dirichlet' or 'neumann'");
    }
  }
  rd.opt_number(j, "value", path, c.value);
  if (j.contains("program")) c.program = rd.string(j.at("program"), path + "/program");
  return c;
}

BoundaryCondition read_bc(Reader& rd, const json& j, const std::string& path) {
  BoundaryCondition bc;
  if (!j.is_object()) {
    rd.fail(path, "expected an object");
    return bc;
  }
  if (j.contains("group")) bc.group = rd.string(j.at("group"), path + "/group");
  if (j.contains("contact")) {
    rd.object(j, path, {"group", "contact"}, {"group"});
    const std::string cp = path + "/contact";
    const json& c = j.at("contact");
    ContactCondition cc;
    if (rd.object(c, cp, {"obstacle", "gap"})) {
      if (c.contains("obstacle")) {
        const json& o = c.at("obstacle");
        const std::string op = cp + "/obstacle";
        if (rd.object(o, op, {"point", "normal"}, {"point", "normal"})) {
          Obstacle ob;
          if (o.contains("point")) ob.point = rd.vec2(o.at("point"), op + "/point");
          if (o.contains("normal")) ob.normal = rd.vec2(o.at("normal"), op + "/normal");
          cc.obstacle = ob;
        }
        if (c.contains("gap")) rd.fail(cp + "/gap", "not allowed together with an obstacle");
      } else {
        rd.opt_number(c, "gap", cp, cc.gap);
      }
    }
    bc.contact = cc;
    return bc;
  }
  std::string frame = "global";
  if (j.contains("frame")) frame = rd.string(j.at("frame"), path + "/frame");
  std::array<std::string, 2> keys{"x", "y"};
  if (frame == "normal_tangential") {
    bc.frame = BcFrame::NormalTangential;
    keys = {"n", "t"};
  } else if (frame != "global") {
    rd.fail(path + "/frame", "expected 'global' or 'normal_tangential'");
  }
  rd.object(j, path, {"group", "frame", keys[0], keys[1]}, {"group"});
  for (int d = 0; d < 2; ++d) {
    if (j.contains(keys[d])) bc.components[d] = read_component(rd, j.at(keys[d]), path + "/" + keys[d]);
  }
  return bc;
}

LoadProgram read_program(Reader& rd, const json& j, const std::string& path) {
  std::vector<std::pair<double, double>> pts;
  if (!rd.array(j, path)) return {};
  for (std::size_t i = 0; i < j.size(); ++i) {
    const Vec2 p = rd.vec2(j[i], path + "/" + std::to_string(i));
    pts.emplace_back(p.x(), p.y());
  }
  try {
    return LoadProgram(std::move(pts));
  } catch (const Error& e) {
    rd.fail(path, e.what());
    return {};
  }
}

int nearest_node(const Mesh& mesh, const Vec2& x, double tol) {
  int best = -1;
  double bd = std::numeric_limits<double>::infinity();
  for (int n = 0; n < mesh.num_nodes(); ++n) {
    const double d = (mesh.nodes[n] - x).norm();
    if (d < bd) {
      bd = d;
      best = n;
    }
  }
  return bd <= tol ? best : -1;
}

/// True if x lies strictly inside some region of the mesh.
bool strictly_inside(const Mesh& mesh, const Vec2& x) {
  const double tol = 1e-12 * mesh.bbox_diagonal();
  for (int r : mesh.region_ids()) {
    if (point_in_region(mesh, r, x) && distance_to_boundary(mesh, r, x).first > tol) return true;
  }
  return false;
}

void read_time(Reader& rd, const json& j, SimulationOptions& opt) {
  const std::string path = "/time";
  if (!rd.object(j, path, {"T", "tau", "transform"}, {"T", "tau"})) return;
  rd.opt_number(j, "T", path, opt.total_time);
  rd.opt_number(j, "tau", path, opt.tau);
  if (j.contains("transform")) {
    const std::string t = rd.string(j.at("transform"), path + "/transform");
    if (t == "auto") {
      opt.path = TransformPath::Auto;
    } else if (t == "general") {
      opt.path = TransformPath::General;
    } else if (t == "kelvin_voigt") {
      opt.path = TransformPath::KelvinVoigt;
    } else if (!t.empty()) {
      rd.fail(path + "/transform", "expected 'auto', 'general' or 'kelvin_voigt'");
    }
  }
  if (j.contains("T") && j.contains("tau")) {
    try {
      step_count(opt.total_time, opt.tau);
    } catch (const Error& e) {
      rd.fail(path, e.what());
    }
  }
}

void read_solver(Reader& rd, const json& j, SimulationOptions& opt) {
  const std::string path = "/solver";
  if (!rd.object(j, path, {"gauss_points", "subdivision_ratio", "max_depth", "qp_max_iterations"})) return;
  rd.opt_int(j, "gauss_points", path, opt.quadrature.gauss_points);
  rd.opt_number(j, "subdivision_ratio", path, opt.quadrature.subdivision_ratio);
  rd.opt_int(j, "max_depth", path, opt.quadrature.max_depth);
  rd.opt_int(j, "qp_max_iterations", path, opt.qp.max_iterations);
}

void read_output(Reader& rd, const json& j, OutputSpec& out) {
  const std::string path = "/output";
  if (!rd.object(j, path, {"timeseries", "ledger", "contact", "forces", "snapshots"})) return;
  if (j.contains("timeseries")) out.timeseries = rd.boolean(j.at("timeseries"), path + "/timeseries", true);
  if (j.contains("ledger")) out.ledger = rd.boolean(j.at("ledger"), path + "/ledger", true);
  if (j.contains("contact")) out.contact = rd.boolean(j.at("contact"), path + "/contact", true);
  if (j.contains("forces")) out.forces = rd.boolean(j.at("forces"), path + "/forces", true);
  if (!j.contains("snapshots")) return;
  const std::string sp = path + "/snapshots";
  const json& s = j.at("snapshots");
  if (!rd.object(s, sp, {"steps", "x", "y", "nx", "ny"}, {"steps", "x", "y"})) return;
  SnapshotSpec spec;
  if (s.contains("steps") && rd.array(s.at("steps"), sp + "/steps")) {
    for (std::size_t i = 0; i < s.at("steps").size(); ++i) {
      spec.steps.push_back(rd.integer(s.at("steps")[i], sp + "/steps/" + std::to_string(i)));
    }
  }
  if (s.contains("x")) {
    const Vec2 x = rd.vec2(s.at("x"), sp + "/x");
    spec.lower.x() = x[0];
    spec.upper.x() = x[1];
  }
  if (s.contains("y")) {
    const Vec2 y = rd.vec2(s.at("y"), sp + "/y");
    spec.lower.y() = y[0];
    spec.upper.y() = y[1];
  }
  rd.opt_int(s, "nx", sp, spec.nx);
  rd.opt_int(s, "ny", sp, spec.ny);
  if (spec.nx < 1 || spec.ny < 1) rd.fail(sp, "nx and ny must be positive");
  out.snapshots = spec;
}

void read_probes(Reader& rd, const json& j, const Mesh* mesh, Case& c) {
  const std::string path = "/probes";
  if (!rd.object(j, path, {"boundary", "interior"})) return;
  std::set<std::string> names;
  auto name_of = [&](const json& p, const std::string& pp) {
    std::string n;
    if (p.contains("name")) n = rd.string(p.at("name"), pp + "/name");
    if (!n.empty() && !names.insert(n).second) rd.fail(pp + "/name", "duplicate probe name '" + n + "'");
    return n;
  };
  if (j.contains("boundary") && rd.array(j.at("boundary"), path + "/boundary")) {
    const json& arr = j.at("boundary");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string pp = path + "/boundary/" + std::to_string(i);
      const json& p = arr[i];
      if (!rd.object(p, pp, {"name", "node", "point"}, {"name"})) continue;
      BoundaryProbe bp;
      bp.name = name_of(p, pp);
      if (p.contains("node") == p.contains("point")) {
        rd.fail(pp, "exactly one of 'node' and 'point' is required");
        continue;
      }
      if (p.contains("node")) {
        bp.node = rd.integer(p.at("node"), pp + "/node", -1);
        if (mesh && (bp.node < 0 || bp.node >= mesh->num_nodes())) {
          rd.fail(pp + "/node", "not a mesh node");
          continue;
        }
      } else {
        const Vec2 x = rd.vec2(p.at("point"), pp + "/point");
        if (!mesh) continue;
        bp.node = nearest_node(*mesh, x, 1e-8 * mesh->bbox_diagonal());
        if (bp.node < 0) {
          rd.fail(pp + "/point", "no mesh node at this point");
          continue;
        }
      }
      c.boundary_probes.push_back(bp);
    }
  }
  if (j.contains("interior") && rd.array(j.at("interior"), path + "/interior")) {
    const json& arr = j.at("interior");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string pp = path + "/interior/" + std::to_string(i);
      const json& p = arr[i];
      if (!rd.object(p, pp, {"name", "point"}, {"name", "point"})) continue;
      InteriorProbe ip;
      ip.name = name_of(p, pp);
      if (!p.contains("point")) continue;
      ip.point = rd.vec2(p.at("point"), pp + "/point");
      if (mesh && !strictly_inside(*mesh, ip.point)) {
        rd.fail(pp + "/point", "point is not inside the domain");
        continue;
      }
      c.interior_probes.push_back(ip);
    }
  }
}

}  // namespace

std::vector<Vec2> SnapshotSpec::points() const {
  std::vector<Vec2> out;
  const double hx = (upper.x() - lower.x()) / nx;
  const double hy = (upper.y() - lower.y()) / ny;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      out.emplace_back(lower.x() + (i + 0.5) * hx, lower.y() + (j + 0.5) * hy);
    }
  }
  return out;
}

Case parse_config(std::string_view text, const std::string& base_dir) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::Configuration, std::string("malformed JSON: ") + e.what());
  }
  if (doc.is_null()) doc = json::object();

  Reader rd;
  Case c;
  rd.object(doc, "",
            {"mesh", "regions", "programs", "boundary", "interfaces", "initial_displacement", "time",
             "solver", "probes", "output"},
            {"mesh", "regions", "boundary", "time"});
  if (!doc.is_object()) throw Error(ErrorCode::Configuration, rd.errors.front());

  std::optional<Mesh> mesh;
  if (doc.contains("mesh")) mesh = read_mesh_section(rd, doc.at("mesh"), base_dir);
  if (mesh) c.model.mesh = std::move(*mesh);

  if (doc.contains("regions") && rd.array(doc.at("regions"), "/regions")) {
    const json& arr = doc.at("regions");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string p = "/regions/" + std::to_string(i);
      const json& r = arr[i];
      if (!rd.object(r, p, {"region", "E", "nu", "rheology"}, {"region", "E", "nu"})) continue;
      RegionMaterial rm;
      rd.opt_int(r, "region", p, rm.region);
      rd.opt_number(r, "E", p, rm.material.E);
      rd.opt_number(r, "nu", p, rm.material.nu);
      rm.rheology = r.contains("rheology") ? read_rheology(rd, r.at("rheology"), p + "/rheology")
                                           : rheology_preset("hooke");
      c.model.regions.push_back(rm);
    }
  }

  if (doc.contains("programs") && doc.at("programs").is_object()) {
    for (auto it = doc.at("programs").begin(); it != doc.at("programs").end(); ++it) {
      c.model.programs[it.key()] = read_program(rd, it.value(), "/programs/" + it.key());
    }
  } else if (doc.contains("programs")) {
    rd.fail("/programs", "expected an object");
  }

  if (doc.contains("boundary") && rd.array(doc.at("boundary"), "/boundary")) {
    const json& arr = doc.at("boundary");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      c.model.boundary.push_back(read_bc(rd, arr[i], "/boundary/" + std::to_string(i)));
    }
  }

  if (doc.contains("interfaces") && rd.array(doc.at("interfaces"), "/interfaces")) {
    const json& arr = doc.at("interfaces");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string p = "/interfaces/" + std::to_string(i);
      if (!rd.object(arr[i], p, {"a", "b"}, {"a", "b"})) continue;
      InterfaceSpec s;
      if (arr[i].contains("a")) s.group_a = rd.string(arr[i].at("a"), p + "/a");
      if (arr[i].contains("b")) s.group_b = rd.string(arr[i].at("b"), p + "/b");
      c.model.interfaces.push_back(s);
    }
  }

  if (doc.contains("initial_displacement")) {
    const json& u0 = doc.at("initial_displacement");
    const std::string p = "/initial_displacement";
    if (rd.object(u0, p, {"offset", "gradient"})) {
      if (u0.contains("offset")) c.model.initial_displacement.offset = rd.vec2(u0.at("offset"), p + "/offset");
      if (u0.contains("gradient")) {
        const json& g = u0.at("gradient");
        if (!g.is_array() || g.size() != 2) {
          rd.fail(p + "/gradient", "expected [[a, b], [c, d]]");
        } else {
          for (int i = 0; i < 2; ++i) {
            c.model.initial_displacement.gradient.row(i) =
                rd.vec2(g[i], p + "/gradient/" + std::to_string(i)).transpose();
          }
        }
      }
    }
  }

  if (doc.contains("time")) read_time(rd, doc.at("time"), c.options);
  if (doc.contains("solver")) read_solver(rd, doc.at("solver"), c.options);
  if (doc.contains("probes")) read_probes(rd, doc.at("probes"), mesh ? &c.model.mesh : nullptr, c);
  if (doc.contains("output")) read_output(rd, doc.at("output"), c.output);

  // Model-level invariants only make sense once the sections parsed cleanly.
  if (rd.errors.empty()) {
    for (const auto& d : validate_model(c.model)) rd.fail("", d);
  }
  if (!rd.errors.empty()) {
    std::ostringstream msg;
    msg << "invalid configuration:";
    for (const auto& e : rd.errors) msg << "\n  " << e;
    throw Error(ErrorCode::Configuration, msg.str());
  }
  return c;
}

Case load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  const fs::path dir = fs::path(path).parent_path();
  return parse_config(ss.str(), dir.empty() ? std::string(".") : dir.string());
}

int exit_status(const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e)) return err->is_configuration_error() ? 2 : 3;
  return 3;
}

namespace {

bool all_kelvin_voigt(const Simulation& sim) {
  for (const auto& kv : sim.kv_times()) {
    if (!kv) return false;
  }
  return true;
}

/// Mean traction of a contact node along its contact direction, over the
/// element ends carrying the contact unknown.
double contact_traction(const RegionLayout& L, const Vector& p, int n) {
  double sum = 0.0, all = 0.0;
  int count = 0, count_all = 0;
  for (int s = 0; s < static_cast<int>(L.slot.size()); ++s) {
    if (L.slot_node(s) != n) continue;
    all += p(2 * s);
    ++count_all;
    if (!L.slot[s].known[0]) {
      sum += p(2 * s);
      ++count;
    }
  }
  if (count > 0) return sum / count;
  return count_all > 0 ? all / count_all : 0.0;
}

void run_case_impl(const Case& c, const fs::path& dir) {
  Simulation sim(c.model, c.options);
  const Mesh& mesh = c.model.mesh;

  std::vector<Vec2> points;
  for (const auto& p : c.interior_probes) points.push_back(p.point);
  const std::size_t n_probe = points.size();
  std::vector<Vec2> grid;
  std::set<int> snap_steps;
  if (c.output.snapshots) {
    for (const auto& x : c.output.snapshots->points()) {
      if (strictly_inside(mesh, x)) grid.push_back(x);
    }
    snap_steps.insert(c.output.snapshots->steps.begin(), c.output.snapshots->steps.end());
    points.insert(points.end(), grid.begin(), grid.end());
  }
  if (!points.empty()) sim.set_interior_points(points);

  const bool kv = all_kelvin_voigt(sim);
  const bool has_contact = !sim.system().contact.empty();

  std::optional<CsvWriter> ts, interior, ledger_csv, contact_csv, forces_csv;
  if (c.output.timeseries && !c.boundary_probes.empty()) {
    ts.emplace((dir / "timeseries.csv").string(), "step,time,probe,ux,uy,vx,vy,px,py");
  }
  if (c.output.timeseries && n_probe > 0) {
    interior.emplace((dir / "interior.csv").string(), "step,time,probe,ux,uy,vx,vy,sxx,syy,sxy");
  }
  std::optional<EnergyLedger> ledger;
  std::optional<ElasticSplit> split;
  std::optional<DissipationField> diss;
  if (kv) {
    split.emplace(sim);
    if (!grid.empty()) diss.emplace(sim);
    if (c.output.ledger) {
      ledger.emplace(sim);
      ledger_csv.emplace((dir / "ledger.csv").string(), "step,time,stored,dissipated,work,slack");
    }
  }
  if (c.output.contact && has_contact) {
    contact_csv.emplace((dir / "contact.csv").string(), "step,time,node,arc_coord,vn,un,tn,active");
  }
  if (c.output.forces) {
    forces_csv.emplace((dir / "forces.csv").string(), "step,time,group,fx,fy,fx_elastic,fy_elastic");
  }

  const double nan = std::numeric_limits<double>::quiet_NaN();
  auto snapshot = [&](const StepState& s) {
    CsvWriter w((dir / ("snapshot_" + std::to_string(s.step) + ".csv")).string(), "x,y,ux,uy,sxx,syy,sxy,diss");
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const auto k = static_cast<Eigen::Index>(n_probe + i);
      w << grid[i].x() << grid[i].y() << s.interior_u(2 * k) << s.interior_u(2 * k + 1)
        << s.interior_sigma(3 * k) << s.interior_sigma(3 * k + 1) << s.interior_sigma(3 * k + 2)
        << (diss ? diss->density()(k) : nan);
      w.end_row();
    }
  };
  if (snap_steps.count(0)) snapshot(sim.state());

  sim.run([&](const StepState& s) {
    if (split) split->update(s);
    if (diss) diss->update(s);
    if (ts) {
      for (const auto& p : c.boundary_probes) {
        const auto b = sample_boundary(sim, s, p);
        *ts << s.step << s.time << p.name << b.u.x() << b.u.y() << b.v.x() << b.v.y() << b.p.x() << b.p.y();
        ts->end_row();
      }
    }
    if (interior) {
      for (std::size_t i = 0; i < n_probe; ++i) {
        const auto k = static_cast<Eigen::Index>(i);
        *interior << s.step << s.time << c.interior_probes[i].name << s.interior_u(2 * k)
                  << s.interior_u(2 * k + 1) << s.interior_v(2 * k) << s.interior_v(2 * k + 1)
                  << s.interior_sigma(3 * k) << s.interior_sigma(3 * k + 1) << s.interior_sigma(3 * k + 2);
        interior->end_row();
      }
    }
    if (ledger) {
      ledger->update(s);
      const auto& row = ledger->rows().back();
      *ledger_csv << row.step << row.time << row.stored << row.dissipated << row.work << row.slack;
      ledger_csv->end_row();
    }
    if (contact_csv && s.contact) {
      const auto& sys = sim.system();
      for (std::size_t k = 0; k < sys.contact.size(); ++k) {
        const auto& cn = sys.contact[k];
        const auto& L = sys.regions[cn.region];
        const auto& rs = s.regions[cn.region];
        *contact_csv << s.step << s.time << cn.global_node << cn.arc << rs.v(2 * cn.local_node)
                     << rs.u(2 * cn.local_node) << contact_traction(L, rs.p, cn.local_node)
                     << static_cast<int>(s.contact->qp.active[k]);
        contact_csv->end_row();
      }
    }
    if (forces_csv) {
      std::vector<Vector> p;
      for (const auto& r : s.regions) p.push_back(r.p);
      const auto forces = group_forces(mesh, sim.system(), p, split ? &split->elastic() : nullptr);
      for (const auto& f : forces) {
        *forces_csv << s.step << s.time << mesh.group_name(f.group) << f.total.x() << f.total.y()
                    << f.elastic.x() << f.elastic.y();
        forces_csv->end_row();
      }
    }
    if (snap_steps.count(s.step)) snapshot(s);
  });
}

}  // namespace

int run_case(const Case& c, const std::string& out_dir) {
  const fs::path dir(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  fs::remove(dir / "error.txt", ec);
  try {
    run_case_impl(c, dir);
    return 0;
  } catch (const std::exception& e) {
    const int status = exit_status(e);
    std::ofstream err(dir / "error.txt");
    if (const auto* ve = dynamic_cast<const Error*>(&e)) err << to_string(ve->code()) << ": ";
    err << e.what() << "\n";
    return status;
  }
}

}  // namespace viscobem
