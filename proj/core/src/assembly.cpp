#include "viscobem/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_map>

#include "viscobem/quadrature.hpp"

namespace viscobem {

namespace {

struct Segment {
  Vec2 p1, p2;
  Vec2 normal;
  double length;
};

Segment segment_of(const Mesh& mesh, int e) {
  const auto& el = mesh.elements[e];
  return {mesh.nodes[el.n1], mesh.nodes[el.n2], mesh.element_normal(e), mesh.element_length(e)};
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 d = b - a;
  const double s = std::clamp((p - a).dot(d) / d.squaredNorm(), 0.0, 1.0);
  return (a + s * d - p).norm();
}

// Adaptive Gauss integration over s in [s0, s1] of f(s, weight) where weight
// already includes the Jacobian.
template <class F>
void integrate(const Segment& seg, const Vec2& xi, double s0, double s1, const QuadratureOptions& opt,
               int depth, F&& f) {
  const Vec2 a = seg.p1 + s0 * (seg.p2 - seg.p1);
  const Vec2 b = seg.p1 + s1 * (seg.p2 - seg.p1);
  const double len = (s1 - s0) * seg.length;
  if (depth < opt.max_depth && point_segment_distance(xi, a, b) < opt.subdivision_ratio * len) {
    const double sm = 0.5 * (s0 + s1);
    integrate(seg, xi, s0, sm, opt, depth + 1, f);
    integrate(seg, xi, sm, s1, opt, depth + 1, f);
    return;
  }
  const auto& rule = gauss_legendre(opt.gauss_points);
  for (int q = 0; q < rule.size(); ++q) {
    const double s = s0 + (s1 - s0) * rule.points[q];
    f(s, rule.weights[q] * len);
  }
}

// Which element end coincides with xi (0, 1) or -1.
int coincident_end(const Segment& seg, const Vec2& xi) {
  const double tol = 1e-10 * seg.length;
  if ((xi - seg.p1).norm() <= tol) return 0;
  if ((xi - seg.p2).norm() <= tol) return 1;
  return -1;
}

}  // namespace

InfluencePair element_influence(const Vec2& xi, const Mesh& mesh, int e, const Material& mat,
                                const QuadratureOptions& opt) {
  const Segment seg = segment_of(mesh, e);
  InfluencePair out;
  const int end = coincident_end(seg, xi);
  if (end < 0) {
    integrate(seg, xi, 0.0, 1.0, opt, 0, [&](double s, double w) {
      const Vec2 x = seg.p1 + s * (seg.p2 - seg.p1);
      const Mat2 U = kelvin_U(x, xi, mat);
      const Mat2 Tt = kelvin_T(x, xi, seg.normal, mat).transpose();
      const double phi[2] = {1.0 - s, s};
      for (int a = 0; a < 2; ++a) {
        out.gblock.block<2, 2>(0, 2 * a) += (w * phi[a]) * U;
        out.hblock.block<2, 2>(0, 2 * a) += (w * phi[a]) * Tt;
      }
    });
    return out;
  }

  // xi at node `end`. Along the element r = |x - xi| grows linearly from 0 to
  // L and r,i is constant, so both integrals are closed form.
  const int far = 1 - end;
  const Vec2 far_point = far == 0 ? seg.p1 : seg.p2;
  const double L = seg.length;
  const double nu = mat.nu;
  const double c = 1.0 / (8.0 * std::numbers::pi * mat.shear_modulus() * (1.0 - nu));
  const Vec2 g = (far_point - xi) / L;
  const Mat2 gg = g * g.transpose();
  // int_0^1 ln(1/(rho L)) (1 - rho) drho and int_0^1 ln(1/(rho L)) rho drho
  const double log_near = -0.5 * std::log(L) + 0.75;
  const double log_far = -0.5 * std::log(L) + 0.25;
  out.gblock.block<2, 2>(0, 2 * end) =
      L * c * ((3.0 - 4.0 * nu) * log_near * Mat2::Identity() + 0.5 * gg);
  out.gblock.block<2, 2>(0, 2 * far) =
      L * c * ((3.0 - 4.0 * nu) * log_far * Mat2::Identity() + 0.5 * gg);
  // T ~ 1/r times the far shape function rho: the integrand is constant.
  out.hblock.block<2, 2>(0, 2 * far) = L * kelvin_T(far_point, xi, seg.normal, mat).transpose();
  return out;
}

StressInfluence element_stress_influence(const Vec2& xi, const Mesh& mesh, int e,
                                         const Material& mat, const QuadratureOptions& opt) {
  const Segment seg = segment_of(mesh, e);
  StressInfluence out;
  integrate(seg, xi, 0.0, 1.0, opt, 0, [&](double s, double w) {
    const Vec2 x = seg.p1 + s * (seg.p2 - seg.p1);
    const StressBlock D = kelvin_D(x, xi, mat);
    const StressBlock S = kelvin_S(x, xi, seg.normal, mat);
    const double phi[2] = {1.0 - s, s};
    for (int a = 0; a < 2; ++a) {
      out.dblock.block<3, 2>(0, 2 * a) += (w * phi[a]) * D;
      out.sblock.block<3, 2>(0, 2 * a) += (w * phi[a]) * S;
    }
  });
  return out;
}

int BemSystem::local_node(int global) const {
  for (int i = 0; i < num_nodes(); ++i) {
    if (nodes[i] == global) return i;
  }
  return -1;
}

Matrix BemSystem::nodal_G() const {
  Matrix out = Matrix::Zero(G.rows(), 2 * num_nodes());
  for (int le = 0; le < num_elements(); ++le) {
    for (int a = 0; a < 2; ++a) {
      out.middleCols(2 * element_nodes[le][a], 2) += G.middleCols(4 * le + 2 * a, 2);
    }
  }
  return out;
}

BemSystem assemble_HG(const Mesh& mesh, int region, const Material& mat,
                      const QuadratureOptions& opt) {
  BemSystem sys;
  sys.region = region;
  sys.material = mat;
  sys.nodes = mesh.region_nodes(region);
  sys.elements = mesh.region_elements(region);
  std::unordered_map<int, int> local;
  for (int i = 0; i < sys.num_nodes(); ++i) local[sys.nodes[i]] = i;
  for (int e : sys.elements) {
    sys.element_nodes.push_back({local[mesh.elements[e].n1], local[mesh.elements[e].n2]});
    sys.lengths.push_back(mesh.element_length(e));
  }
  const int n = sys.num_nodes();
  const int m = sys.num_elements();
  sys.H = Matrix::Zero(2 * n, 2 * n);
  sys.G = Matrix::Zero(2 * n, 4 * m);
  for (int i = 0; i < n; ++i) {
    const Vec2& xi = mesh.nodes[sys.nodes[i]];
    for (int le = 0; le < m; ++le) {
      const InfluencePair ip = element_influence(xi, mesh, sys.elements[le], mat, opt);
      for (int a = 0; a < 2; ++a) {
        const int nj = sys.element_nodes[le][a];
        if (nj != i) sys.H.block<2, 2>(2 * i, 2 * nj) += ip.hblock.block<2, 2>(0, 2 * a);
        sys.G.block<2, 2>(2 * i, 4 * le + 2 * a) = ip.gblock.block<2, 2>(0, 2 * a);
      }
    }
  }
  return sys;
}

void rigid_body_diagonal(BemSystem& sys) {
  const int n = sys.num_nodes();
  for (int i = 0; i < n; ++i) {
    Mat2 sum = Mat2::Zero();
    for (int j = 0; j < n; ++j) {
      if (j != i) sum += sys.H.block<2, 2>(2 * i, 2 * j);
    }
    sys.H.block<2, 2>(2 * i, 2 * i) = -sum;
  }
}

BemSystem assemble_region(const Mesh& mesh, int region, const Material& mat,
                          const QuadratureOptions& opt) {
  BemSystem sys = assemble_HG(mesh, region, mat, opt);
  rigid_body_diagonal(sys);
  return sys;
}

}  // namespace viscobem
