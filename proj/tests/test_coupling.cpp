#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "viscobem/coupling.hpp"
#include "viscobem/error.hpp"
#include "viscobem/simulation.hpp"

using namespace viscobem;

namespace {

constexpr double kE = 11000.0, kNu = 0.0, kP = 5.0;

/// Uniaxial patch across the interface: clamped bottom, traction p on top, free sides (nu = 0).
Vec2 exact_patch(const Vec2& x) { return {0.0, kP * x.y() / kE}; }

Model single_domain() {
  Model m;
  m.mesh = generate_mesh(RectangleSpec{2.0, 1.0, 8, 8});
  m.regions.push_back({0, Material{kE, kNu}, rheology_preset("hooke")});
  m.boundary = {BoundaryCondition::fixed("bottom"),
                BoundaryCondition::traction("top", BcFrame::Global, 0.0, kP)};
  return m;
}

Model stacked(const RheologyCoeffs& lower, const RheologyCoeffs& upper, const std::string& program = {}) {
  Model m;
  m.mesh = generate_mesh(StackedRectanglesSpec{2.0, 0.5, 0.5, 8, 4, 4});
  m.regions.push_back({0, Material{kE, kNu}, lower});
  m.regions.push_back({1, Material{kE, kNu}, upper});
  m.boundary = {BoundaryCondition::fixed("bottom"),
                BoundaryCondition::traction("top", BcFrame::Global, 0.0, kP, program)};
  m.interfaces.push_back({"interface0", "interface1"});
  return m;
}

/// Physical displacements by global node (last region wins on shared coordinates).
std::map<std::pair<long, long>, Vec2> displacement_by_position(const Simulation& sim, const StepState& s) {
  std::map<std::pair<long, long>, Vec2> out;
  const auto& mesh = sim.model().mesh;
  for (std::size_t r = 0; r < s.regions.size(); ++r) {
    const auto& L = sim.system().regions[r];
    for (int n = 0; n < L.bem.num_nodes(); ++n) {
      const Vec2 x = mesh.nodes[L.bem.nodes[n]];
      out[{std::lround(x.x() * 1e6), std::lround(x.y() * 1e6)}] = s.regions[r].u.segment<2>(2 * n);
    }
  }
  return out;
}

}  // namespace

TEST(Interface, ElasticPairingAndRowCounts) {
  const Model m = stacked(rheology_preset("hooke"), rheology_preset("hooke"));
  Simulation sim(m, SimulationOptions{});
  const auto& sys = sim.system();
  ASSERT_EQ(sys.pairs.size(), 9u);
  for (const auto& p : sys.pairs) {
    const Vec2 a = m.mesh.nodes[sys.regions[p.region_a].bem.nodes[p.node_a]];
    const Vec2 b = m.mesh.nodes[sys.regions[p.region_b].bem.nodes[p.node_b]];
    EXPECT_LT((a - b).norm(), 1e-10);
  }
  // Elastic sides: the compatibility row reads v_a - v_b = 0.
  for (const auto& ir : sys.interface_rows) {
    if (ir.type != InterfaceRowType::Compatibility) continue;
    const auto& p = sys.pairs[ir.pair];
    const int ca = sys.regions[p.region_a].disp_col[2 * p.node_a + ir.dir];
    const int cb = sys.regions[p.region_b].disp_col[2 * p.node_b + ir.dir];
    ASSERT_GE(ca, 0);
    ASSERT_GE(cb, 0);
    EXPECT_EQ(sys.matrix()(ir.row, ca), 1.0);
    EXPECT_EQ(sys.matrix()(ir.row, cb), -1.0);
  }
}

TEST(Interface, TwoElasticRegionsReproduceTheSingleDomain) {
  const Model one = single_domain();
  const Model two = stacked(rheology_preset("hooke"), rheology_preset("hooke"));
  Simulation s1(one, SimulationOptions{}), s2(two, SimulationOptions{});
  const auto u1 = displacement_by_position(s1, s1.step());
  const auto u2 = displacement_by_position(s2, s2.step());
  const double scale = exact_patch(Vec2(2.0, 1.0)).norm();
  double diff = 0.0, exact_err = 0.0;
  int compared = 0;
  for (const auto& [key, u] : u1) {
    const auto it = u2.find(key);
    if (it == u2.end()) continue;
    diff = std::max(diff, (it->second - u).lpNorm<Eigen::Infinity>());
    exact_err = std::max(exact_err, (u - exact_patch(Vec2(key.first * 1e-6, key.second * 1e-6))).lpNorm<Eigen::Infinity>());
    ++compared;
  }
  EXPECT_EQ(compared, one.mesh.num_nodes());
  EXPECT_LT(diff / scale, 1e-8);
  EXPECT_LT(exact_err / scale, 1e-6);
}

TEST(Interface, KelvinVoigtElasticCoefficients) {
  const double chi = fixtures::kExampleChi, tau = 10.0;
  Model m = stacked(rheology_preset("kelvin_voigt", {.chi = chi}), rheology_preset("hooke"));
  SimulationOptions opt;
  opt.tau = tau;
  opt.total_time = 10.0;
  Simulation sim(m, opt);
  const auto& sys = sim.system();
  int checked = 0;
  for (const auto& ir : sys.interface_rows) {
    if (ir.type != InterfaceRowType::Compatibility) continue;
    const auto& p = sys.pairs[ir.pair];
    const int ca = sys.regions[p.region_a].disp_col[2 * p.node_a + ir.dir];
    const int cb = sys.regions[p.region_b].disp_col[2 * p.node_b + ir.dir];
    if (ca < 0 || cb < 0) continue;
    EXPECT_NEAR(sys.matrix()(ir.row, ca), 10.0 / 55.454545, 1e-12);
    EXPECT_EQ(sys.matrix()(ir.row, cb), -1.0);
    ++checked;
  }
  EXPECT_GT(checked, 0);
  // History weights chi / (chi + tau) and 0.
  std::vector<History> h(2);
  for (int r = 0; r < 2; ++r) {
    h[r].u = TwoStepHistory(2 * sys.regions[r].bem.num_nodes());
    h[r].u.prev.setOnes();
    h[r].p = TwoStepHistory(2 * static_cast<Eigen::Index>(sys.regions[r].slot.size()));
  }
  const Vector rhs = interface_rhs(sys, h);
  for (std::size_t i = 0; i < sys.interface_rows.size(); ++i) {
    if (sys.interface_rows[i].type == InterfaceRowType::Compatibility) {
      EXPECT_NEAR(rhs(i), -45.454545 / 55.454545, 1e-12);
    } else {
      EXPECT_EQ(rhs(i), 0.0);
    }
  }
}

TEST(Interface, KelvinVoigtElasticContinuityAndOppositionEveryStep) {
  const Model m = [] {
    Model s = stacked(rheology_preset("kelvin_voigt", {.chi = fixtures::kExampleChi}), rheology_preset("hooke"),
                      "creep");
    s.programs["creep"] = LoadProgram({{0.0, 1.0}, {400.0, 1.0}, {400.0, 0.0}, {800.0, 0.0}});
    return s;
  }();
  SimulationOptions opt;
  opt.tau = 10.0;
  opt.total_time = 800.0;
  Simulation sim(m, opt);
  const auto& sys = sim.system();
  double gap = 0.0, opposition = 0.0;
  sim.run([&](const StepState& s) {
    std::vector<Vector> u, p;
    for (const auto& r : s.regions) {
      u.push_back(r.u);
      p.push_back(r.p);
    }
    gap = std::max(gap, interface_displacement_gap(sys, u));
    // Every element end at a paired node, not only the representative slot.
    double scale = 0.0, worst = 0.0;
    for (const auto& v : p) scale = std::max(scale, v.cwiseAbs().maxCoeff());
    for (const auto& pr : sys.pairs) {
      const auto& La = sys.regions[pr.region_a];
      const auto& Lb = sys.regions[pr.region_b];
      for (int d = 0; d < 2; ++d) {
        if (La.node[pr.node_a].kind[d] != DofKind::Interface) continue;
        for (int sa = 0; sa < static_cast<int>(La.slot.size()); ++sa) {
          if (La.slot_node(sa) != pr.node_a || La.slot[sa].known[d]) continue;
          for (int sb = 0; sb < static_cast<int>(Lb.slot.size()); ++sb) {
            if (Lb.slot_node(sb) != pr.node_b || Lb.slot[sb].known[d]) continue;
            worst = std::max(worst, std::abs(p[pr.region_a](2 * sa + d) + p[pr.region_b](2 * sb + d)));
          }
        }
      }
    }
    opposition = std::max(opposition, worst / scale);
    EXPECT_LT(interface_traction_residual(sys, p), 1e-9);
  });
  EXPECT_LT(gap, 1e-9);
  EXPECT_LT(opposition, 1e-9);
}

TEST(Interface, UnpairedNodeIsAConfigurationError) {
  Model m = stacked(rheology_preset("hooke"), rheology_preset("hooke"));
  // Move one interior node of the upper interface.
  const int g = m.mesh.group_id("interface1");
  for (const auto& e : m.mesh.elements) {
    if (e.group == g) {
      m.mesh.nodes[e.n2].x() += 0.01;
      break;
    }
  }
  try {
    Simulation sim(m, SimulationOptions{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Configuration);
  }
}
