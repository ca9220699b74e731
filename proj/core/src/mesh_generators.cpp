#include <cmath>
#include <numbers>

#include "viscobem/error.hpp"
#include "viscobem/model.hpp"

namespace viscobem {

namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw Error(ErrorCode::InvalidGeometry, std::string(what) + " must be positive");
  }
}

void require_count(int n, const char* what) {
  if (n < 1) throw Error(ErrorCode::InvalidGeometry, std::string(what) + " must be at least 1");
}

// Appends a closed loop through `points`; point i starts element i and
// element i gets group groups[i].
void append_loop(Mesh& mesh, const std::vector<Vec2>& points, const std::vector<int>& groups,
                 int region) {
  const int base = mesh.num_nodes();
  const int n = static_cast<int>(points.size());
  for (const auto& p : points) mesh.nodes.push_back(p);
  for (int i = 0; i < n; ++i) {
    mesh.elements.push_back({base + i, base + (i + 1) % n, region, groups[i]});
  }
}

// Counter-clockwise rectangle boundary with four consecutive group ids.
void append_rectangle(Mesh& mesh, double L, double h, int nx, int ny, const Vec2& o,
                      const std::array<int, 4>& group, int region) {
  std::vector<Vec2> pts;
  std::vector<int> grp;
  for (int i = 0; i < nx; ++i) {
    pts.emplace_back(o.x() + L * i / nx, o.y());
    grp.push_back(group[0]);
  }
  for (int j = 0; j < ny; ++j) {
    pts.emplace_back(o.x() + L, o.y() + h * j / ny);
    grp.push_back(group[1]);
  }
  for (int i = 0; i < nx; ++i) {
    pts.emplace_back(o.x() + L - L * i / nx, o.y() + h);
    grp.push_back(group[2]);
  }
  for (int j = 0; j < ny; ++j) {
    pts.emplace_back(o.x(), o.y() + h - h * j / ny);
    grp.push_back(group[3]);
  }
  append_loop(mesh, pts, grp, region);
}

Mesh make(const RectangleSpec& s) {
  require_positive(s.length, "rectangle length");
  require_positive(s.height, "rectangle height");
  require_count(s.nx, "nx");
  require_count(s.ny, "ny");
  Mesh mesh;
  mesh.group_names = {"bottom", "right", "top", "left"};
  append_rectangle(mesh, s.length, s.height, s.nx, s.ny, s.origin, {0, 1, 2, 3}, 0);
  return mesh;
}

Mesh make(const QuarterDiskSpec& s) {
  require_positive(s.radius, "radius");
  require_positive(s.contact_angle_deg, "contact angle");
  if (s.contact_angle_deg >= 90.0) {
    throw Error(ErrorCode::InvalidGeometry, "contact angle must be below 90 degrees");
  }
  require_count(s.n_contact, "n_contact");
  require_count(s.n_arc, "n_arc");
  require_count(s.n_straight, "n_straight");

  const double r = s.radius;
  const double phi = s.contact_angle_deg * std::numbers::pi / 180.0;
  const double start = -0.5 * std::numbers::pi;
  std::vector<Vec2> pts;
  std::vector<int> grp;
  pts.emplace_back(0.0, -r);
  grp.push_back(0);
  for (int i = 1; i < s.n_contact; ++i) {
    const double a = start + phi * i / s.n_contact;
    pts.emplace_back(r * std::cos(a), r * std::sin(a));
    grp.push_back(0);
  }
  for (int i = 0; i < s.n_arc; ++i) {
    const double a = start + phi + (0.5 * std::numbers::pi - phi) * i / s.n_arc;
    pts.emplace_back(r * std::cos(a), r * std::sin(a));
    grp.push_back(1);
  }
  for (int i = 0; i < s.n_straight; ++i) {
    pts.emplace_back(r - r * i / s.n_straight, 0.0);
    grp.push_back(2);
  }
  for (int i = 0; i < s.n_straight; ++i) {
    pts.emplace_back(0.0, -r * i / s.n_straight);
    grp.push_back(3);
  }
  Mesh mesh;
  mesh.group_names = {"contact", "free_arc", "loaded", "symmetry"};
  append_loop(mesh, pts, grp, 0);
  return mesh;
}

Mesh make(const StackedRectanglesSpec& s) {
  require_positive(s.length, "length");
  require_positive(s.height0, "height0");
  require_positive(s.height1, "height1");
  require_count(s.nx, "nx");
  require_count(s.ny0, "ny0");
  require_count(s.ny1, "ny1");
  Mesh mesh;
  mesh.group_names = {"bottom", "right0", "interface0", "left0",
                      "interface1", "right1", "top", "left1"};
  append_rectangle(mesh, s.length, s.height0, s.nx, s.ny0, Vec2::Zero(), {0, 1, 2, 3}, 0);
  append_rectangle(mesh, s.length, s.height1, s.nx, s.ny1, Vec2(0.0, s.height0), {4, 5, 6, 7}, 1);
  return mesh;
}

}  // namespace

Mesh generate_mesh(const ShapeSpec& shape) {
  return std::visit([](const auto& s) { return make(s); }, shape);
}

}  // namespace viscobem
