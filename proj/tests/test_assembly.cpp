#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "viscobem/assembly.hpp"
#include "viscobem/error.hpp"
#include "viscobem/simulation.hpp"

using namespace viscobem;

namespace {

Mesh single_element(const Vec2& a, const Vec2& b) {
  Mesh m;
  m.nodes = {a, b};
  m.elements = {Element{0, 1, 0, 0}};
  m.group_names = {"g"};
  return m;
}

/// Reference influence of one element by 64 subdivided 5-point panels.
InfluencePair reference_influence(const Vec2& xi, const Mesh& mesh, int e, const Material& mat) {
  const Vec2 a = mesh.nodes[mesh.elements[e].n1], b = mesh.nodes[mesh.elements[e].n2];
  const double L = (b - a).norm();
  const Vec2 n = mesh.element_normal(e);
  InfluencePair ref;
  for (int i = 0; i < 2; ++i) {
    for (int node = 0; node < 2; ++node) {
      for (int j = 0; j < 2; ++j) {
        auto shape = [node](double s) { return node == 0 ? 1.0 - s : s; };
        ref.gblock(i, 2 * node + j) = oracle::integrate(
            [&](double s) { return kelvin_U(a + s * (b - a), xi, mat)(j, i) * shape(s) * L; }, 0.0, 1.0, 64);
        ref.hblock(i, 2 * node + j) = oracle::integrate(
            [&](double s) { return kelvin_T(a + s * (b - a), xi, n, mat)(j, i) * shape(s) * L; }, 0.0, 1.0, 64);
      }
    }
  }
  return ref;
}

Model patch_model(int nx, int ny, double E = 11000.0, double p = 5.0) {
  return fixtures::bar(800.0, 100.0, nx, ny, E, 0.0, rheology_preset("hooke"), p);
}

/// Physical boundary displacements (x/y per global node) of a one-step elastic solve.
std::vector<Vec2> solve_patch(const Model& m, const QuadratureOptions& q = {}) {
  SimulationOptions opt;
  opt.quadrature = q;
  Simulation sim(m, opt);
  const auto& s = sim.step();
  const auto& L = sim.system().regions[0];
  std::vector<Vec2> u(m.mesh.num_nodes(), Vec2::Zero());
  for (int n = 0; n < L.bem.num_nodes(); ++n) u[L.bem.nodes[n]] = s.regions[0].u.segment<2>(2 * n);
  return u;
}

double max_abs(const Matrix& M) { return M.cwiseAbs().maxCoeff(); }

}  // namespace

TEST(ElementInfluence, FarElementMatchesFineQuadrature) {
  const Material mat{11000.0, 0.25};
  const Mesh m = single_element(Vec2(10.0, 1.0), Vec2(11.0, 1.5));
  for (const Vec2& xi : {Vec2(0.0, 0.0), Vec2(10.5, -20.0), Vec2(30.0, 4.0)}) {
    const auto got = element_influence(xi, m, 0, mat);
    const auto ref = reference_influence(xi, m, 0, mat);
    EXPECT_LT((got.gblock - ref.gblock).norm(), 1e-6 * ref.gblock.norm());
    EXPECT_LT((got.hblock - ref.hblock).norm(), 1e-6 * ref.hblock.norm());
  }
}

TEST(ElementInfluence, NearElementUsesSubdivision) {
  const Material mat{1.0, 0.3};
  const Mesh m = single_element(Vec2(0.0, 0.0), Vec2(1.0, 0.0));
  const Vec2 xi(0.3, 0.02);
  const auto got = element_influence(xi, m, 0, mat);
  // Reference with many more panels: the near-singular integrand is resolved.
  const Vec2 n = m.element_normal(0);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double ref = oracle::integrate(
          [&](double s) { return kelvin_U(Vec2(s, 0.0), xi, mat)(j, i) * (1.0 - s); }, 0.0, 1.0, 4000);
      EXPECT_NEAR(got.gblock(i, j), ref, 1e-8);
      const double refh = oracle::integrate(
          [&](double s) { return kelvin_T(Vec2(s, 0.0), xi, n, mat)(j, i) * (1.0 - s); }, 0.0, 1.0, 4000);
      EXPECT_NEAR(got.hblock(i, j), refh, 1e-7);
    }
  }
}

TEST(ElementInfluence, SingularBlockMatchesAnalyticLogIntegral) {
  const Material mat{5.0, 0.3};
  const double mu = mat.shear_modulus(), nu = mat.nu;
  const double c = 1.0 / (8.0 * oracle::pi * mu * (1.0 - nu));
  const Vec2 a(0.5, -0.25), b(2.0, 0.75);
  const double L = (b - a).norm();
  const Vec2 g = (b - a) / L;
  // int_0^1 -ln(sL) (1-s) ds = -ln L / 2 + 3/4,  int_0^1 -ln(sL) s ds = -ln L / 2 + 1/4
  const Mat2 near = L * c * ((3.0 - 4.0 * nu) * (-0.5 * std::log(L) + 0.75) * Mat2::Identity() + 0.5 * g * g.transpose());
  const Mat2 far = L * c * ((3.0 - 4.0 * nu) * (-0.5 * std::log(L) + 0.25) * Mat2::Identity() + 0.5 * g * g.transpose());

  const Mesh m = single_element(a, b);
  const auto at1 = element_influence(a, m, 0, mat);
  EXPECT_TRUE(at1.gblock.allFinite());
  EXPECT_LT((at1.gblock.leftCols<2>() - near).norm(), 1e-12 * near.norm());
  EXPECT_LT((at1.gblock.rightCols<2>() - far).norm(), 1e-12 * near.norm());
  const auto at2 = element_influence(b, m, 0, mat);
  EXPECT_LT((at2.gblock.rightCols<2>() - near).norm(), 1e-12 * near.norm());
  EXPECT_LT((at2.gblock.leftCols<2>() - far).norm(), 1e-12 * near.norm());
  // The collocation node's own H column is left for the rigid-body diagonal.
  EXPECT_TRUE(at1.hblock.leftCols<2>().isZero(0.0));
}

TEST(ElementInfluence, MirrorSymmetry) {
  const Material mat{3.0, 0.2};
  const Mat2 M = Eigen::Vector2d(1.0, -1.0).asDiagonal();
  const Vec2 a(0.2, 0.4), b(1.1, 0.9), xi(-0.5, 1.7);
  const auto orig = element_influence(xi, single_element(a, b), 0, mat);
  const auto refl = element_influence(M * xi, single_element(M * a, M * b), 0, mat);
  for (int node = 0; node < 2; ++node) {
    const Mat2 g = orig.gblock.middleCols<2>(2 * node), gr = refl.gblock.middleCols<2>(2 * node);
    const Mat2 h = orig.hblock.middleCols<2>(2 * node), hr = refl.hblock.middleCols<2>(2 * node);
    EXPECT_LT((gr - M * g * M).norm(), 1e-13 * g.norm());
    // Keeping the node order flips the element normal as well.
    EXPECT_LT((hr + M * h * M).norm(), 1e-13 * h.norm());
    EXPECT_NEAR(gr(0, 1), -g(0, 1), 1e-15);
    EXPECT_NEAR(gr(0, 0), g(0, 0), 1e-15);
  }
}

TEST(AssembleHG, UnitSquareDimensions) {
  const Mesh mesh = generate_mesh(RectangleSpec{1.0, 1.0, 1, 1});
  const BemSystem s = assemble_HG(mesh, 0, Material{1.0, 0.25});
  EXPECT_EQ(s.H.rows(), 8);
  EXPECT_EQ(s.H.cols(), 8);
  EXPECT_EQ(s.nodal_G().rows(), 8);
  EXPECT_EQ(s.nodal_G().cols(), 8);
  EXPECT_EQ(s.G.cols(), 16);  // element-end slots
}

TEST(AssembleHG, RigidTranslationsAreAnnihilatedOnShippedMeshes) {
  const std::vector<Mesh> meshes = {generate_mesh(RectangleSpec{800.0, 100.0, 80, 10}),
                                    generate_mesh(QuarterDiskSpec{}), generate_mesh(StackedRectanglesSpec{}),
                                    generate_mesh(RectangleSpec{1.0, 1.0, 1, 1})};
  for (const auto& mesh : meshes) {
    for (int r : mesh.region_ids()) {
      const BemSystem s = assemble_region(mesh, r, Material{70.0, 0.35});
      const int n = s.num_nodes();
      for (int d = 0; d < 2; ++d) {
        Vector t = Vector::Zero(2 * n);
        for (int k = 0; k < n; ++k) t(2 * k + d) = 1.0;
        EXPECT_LT((s.H * t).cwiseAbs().maxCoeff() / max_abs(s.H), 1e-10);
      }
    }
  }
}

TEST(RigidBodyDiagonal, SmoothNodeGetsHalfIdentity) {
  const Mesh mesh = generate_mesh(RectangleSpec{1.0, 1.0, 8, 8});
  const BemSystem s = assemble_region(mesh, 0, Material{1.0, 0.3});
  // Node 4 is the midpoint of the bottom side, between two equal collinear elements,
  // where the principal value of the neighbouring elements vanishes.
  ASSERT_TRUE(mesh.nodes[s.nodes[4]].isApprox(Vec2(0.5, 0.0)));
  const Mat2 diag = s.H.block<2, 2>(8, 8);
  EXPECT_LT((diag - 0.5 * Mat2::Identity()).norm(), 1e-6) << diag;
  // Node 0 is the corner (0, 0).
  ASSERT_TRUE(mesh.nodes[s.nodes[0]].isApprox(Vec2(0.0, 0.0)));
  const Mat2 corner = s.H.block<2, 2>(0, 0);
  EXPECT_GT((corner - 0.5 * Mat2::Identity()).norm(), 0.05) << corner;
}

TEST(MixedSystemBuild, PureTractionProblemIsUnsupported) {
  Model m;
  m.mesh = generate_mesh(RectangleSpec{1.0, 1.0, 2, 2});
  m.regions.push_back({0, Material{1.0, 0.2}, rheology_preset("hooke")});
  m.boundary.push_back(BoundaryCondition::traction("left", BcFrame::Global, -1.0, 0.0));
  m.boundary.push_back(BoundaryCondition::traction("right", BcFrame::Global, 1.0, 0.0));
  try {
    Simulation sim(m, SimulationOptions{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnsupportedConfiguration);
  }
}

TEST(MixedSystemBuild, AllDirichletSquareUsesTractionColumns) {
  Model m;
  m.mesh = generate_mesh(RectangleSpec{1.0, 1.0, 2, 2});
  m.regions.push_back({0, Material{1.0, 0.2}, rheology_preset("hooke")});
  for (const char* g : {"bottom", "right", "top", "left"}) m.boundary.push_back(BoundaryCondition::fixed(g));
  Simulation sim(m, SimulationOptions{});
  const auto& L = sim.system().regions[0];
  const Matrix G = L.bem.nodal_G();
  ASSERT_EQ(sim.system().size(), G.cols());
  for (int nd = 0; nd < G.cols(); ++nd) {
    EXPECT_LT((sim.system().matrix().col(L.trac_col[nd]) + G.col(nd)).norm(), 1e-15 * G.norm());
    EXPECT_EQ(L.disp_col[nd], -1);
  }
}

TEST(MixedSystemBuild, ExampleABarHasTwoUnknownsPerNode) {
  const Model m = patch_model(80, 10);
  Simulation sim(m, SimulationOptions{});
  const auto& L = sim.system().regions[0];
  EXPECT_EQ(sim.system().size(), 2 * m.mesh.num_nodes());
  int disp = 0, trac = 0;
  for (int nd = 0; nd < 2 * L.bem.num_nodes(); ++nd) {
    disp += L.disp_col[nd] >= 0;
    trac += L.trac_col[nd] >= 0;
  }
  EXPECT_EQ(trac, 2 * 11);  // the clamped left edge
  EXPECT_EQ(disp + trac, 2 * m.mesh.num_nodes());
}

TEST(PatchTest, UniaxialTractionReproducesLinearField) {
  const Model m = patch_model(80, 10);
  const auto u = solve_patch(m);
  const double umax = 5.0 * 800.0 / 11000.0;
  double err = 0.0;
  for (int n = 0; n < m.mesh.num_nodes(); ++n) {
    const Vec2 exact(5.0 * m.mesh.nodes[n].x() / 11000.0, 0.0);
    err = std::max(err, (u[n] - exact).lpNorm<Eigen::Infinity>());
  }
  EXPECT_LT(err / umax, 1e-6);
}

TEST(PatchTest, RefinementChangesTheSolutionByLessThan1e8) {
  const Model coarse = patch_model(80, 10);
  const Model fine = patch_model(160, 20);
  ASSERT_EQ(fine.mesh.num_elements(), 360);
  const auto uc = solve_patch(coarse);
  const auto uf = solve_patch(fine);
  const double umax = 5.0 * 800.0 / 11000.0;
  double change = 0.0;
  for (int n = 0; n < coarse.mesh.num_nodes(); ++n) {
    for (int k = 0; k < fine.mesh.num_nodes(); ++k) {
      if ((fine.mesh.nodes[k] - coarse.mesh.nodes[n]).norm() < 1e-9) {
        change = std::max(change, (uf[k] - uc[n]).lpNorm<Eigen::Infinity>());
      }
    }
  }
  EXPECT_LT(change / umax, 1e-8);
}

TEST(Quadrature, DoublingGaussPointsChangesRegularBlocksLittle) {
  const std::vector<Mesh> meshes = {generate_mesh(RectangleSpec{800.0, 100.0, 80, 10}),
                                    generate_mesh(QuarterDiskSpec{})};
  const Material mat{70.0, 0.35};
  QuadratureOptions q8, q16;
  q16.gauss_points = 16;
  for (const auto& mesh : meshes) {
    double worst = 0.0;
    for (int n = 0; n < mesh.num_nodes(); n += 3) {
      const Vec2& xi = mesh.nodes[n];
      for (int e = 0; e < mesh.num_elements(); ++e) {
        if (mesh.elements[e].n1 == n || mesh.elements[e].n2 == n) continue;
        const auto a = element_influence(xi, mesh, e, mat, q8);
        const auto b = element_influence(xi, mesh, e, mat, q16);
        worst = std::max(worst, (a.hblock - b.hblock).norm() / a.hblock.norm());
        worst = std::max(worst, (a.gblock - b.gblock).norm() / a.gblock.norm());
      }
    }
    EXPECT_LT(worst, 1e-9);
  }
}
