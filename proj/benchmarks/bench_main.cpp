#include <benchmark/benchmark.h>

#include "viscobem/assembly.hpp"
#include "viscobem/contact.hpp"
#include "viscobem/simulation.hpp"

using namespace viscobem;

namespace {

Model example_a() {
  Model m;
  m.mesh = generate_mesh(RectangleSpec{800.0, 100.0, 80, 10});
  m.regions.push_back({0, Material{11000.0, 0.0}, rheology_preset("kelvin_voigt", {.chi = 45.454545})});
  m.programs["creep"] = LoadProgram({{0.0, 1.0}, {400.0, 1.0}, {400.0, 0.0}, {800.0, 0.0}});
  m.boundary.push_back(BoundaryCondition::fixed("left"));
  m.boundary.push_back(BoundaryCondition::traction("right", BcFrame::Global, 5.0, 0.0, "creep"));
  return m;
}

Model quarter_disk() {
  Model m;
  m.mesh = generate_mesh(QuarterDiskSpec{});
  m.regions.push_back({0, Material{70.0, 0.35}, rheology_preset("kelvin_voigt", {.chi = 22.5})});
  m.programs["ramp"] = LoadProgram({{0.0, 0.0}, {250.0, 1.0}, {250.0, 0.0}, {500.0, 0.0}});
  BoundaryCondition sym;
  sym.group = "symmetry";
  sym.components[0] = {BcKind::Dirichlet, 0.0, {}};
  m.boundary.push_back(sym);
  m.boundary.push_back(BoundaryCondition::traction("loaded", BcFrame::NormalTangential, -250.0, 0.0, "ramp"));
  BoundaryCondition c;
  c.group = "contact";
  c.contact = ContactCondition{Obstacle{Vec2(0.0, -0.75), Vec2(0.0, 1.0)}, 0.0};
  m.boundary.push_back(c);
  return m;
}

SimulationOptions options(double tau, double T) {
  SimulationOptions o;
  o.tau = tau;
  o.total_time = T;
  return o;
}

void BM_AssembleRectangle(benchmark::State& state) {
  const int nx = static_cast<int>(state.range(0));
  const Mesh mesh = generate_mesh(RectangleSpec{800.0, 100.0, nx, nx / 8});
  for (auto _ : state) benchmark::DoNotOptimize(assemble_region(mesh, 0, Material{11000.0, 0.0}));
  state.counters["elements"] = mesh.num_elements();
}
BENCHMARK(BM_AssembleRectangle)->Arg(40)->Arg(80)->Arg(160)->Unit(benchmark::kMillisecond);

void BM_AssembleQuarterDisk(benchmark::State& state) {
  const Mesh mesh = generate_mesh(QuarterDiskSpec{});
  for (auto _ : state) benchmark::DoNotOptimize(assemble_region(mesh, 0, Material{70.0, 0.35}));
}
BENCHMARK(BM_AssembleQuarterDisk)->Unit(benchmark::kMillisecond);

/// Per-step cost once the system is factorised.
void BM_CreepStep(benchmark::State& state) {
  const Model m = example_a();
  Simulation sim(m, options(1.0, 1e6));
  for (auto _ : state) benchmark::DoNotOptimize(sim.step());
}
BENCHMARK(BM_CreepStep)->Unit(benchmark::kMicrosecond);

void BM_ExampleAFullRun(benchmark::State& state) {
  const Model m = example_a();
  for (auto _ : state) {
    Simulation sim(m, options(1.0, 800.0));
    sim.run();
  }
}
BENCHMARK(BM_ExampleAFullRun)->Unit(benchmark::kMillisecond);

/// One contact step: condensation, QP with exchange correction and recovery.
void BM_ContactStep(benchmark::State& state) {
  const Model m = quarter_disk();
  Simulation sim(m, options(2.5, 1e6));
  for (auto _ : state) benchmark::DoNotOptimize(sim.step());
}
BENCHMARK(BM_ContactStep)->Unit(benchmark::kMillisecond);

void BM_SolveQp(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  ContactQP qp;
  qp.K = Matrix::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    qp.K(i, i) = 2.0;
    if (i > 0) qp.K(i, i - 1) = qp.K(i - 1, i) = -1.0;
  }
  qp.K(0, 0) += 1.0;
  qp.c = Vector::Constant(m, -1.0);
  qp.b = Vector::Constant(m, 0.05 * m);
  for (auto _ : state) benchmark::DoNotOptimize(solve_qp(qp));
}
BENCHMARK(BM_SolveQp)->Arg(16)->Arg(61)->Arg(128)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
