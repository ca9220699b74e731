#pragma once

#include <string>

#include "viscobem/model.hpp"

namespace fixtures {

using namespace viscobem;

/// Bar [0, L] x [0, h] clamped on the left, uniform traction p on the right.
inline Model bar(double L, double h, int nx, int ny, double E, double nu, const RheologyCoeffs& rheology,
                 double p, const std::string& program = {}) {
  Model m;
  m.mesh = generate_mesh(RectangleSpec{L, h, nx, ny});
  m.regions.push_back({0, Material{E, nu}, rheology});
  m.boundary.push_back(BoundaryCondition::fixed("left"));
  m.boundary.push_back(BoundaryCondition::traction("right", BcFrame::Global, p, 0.0, program));
  return m;
}

/// Example A: L = 800, h = 100, 180 elements, E = 11000, nu = 0.
inline Model example_a(const RheologyCoeffs& rheology, double p = 5.0) {
  Model m = bar(800.0, 100.0, 80, 10, 11000.0, 0.0, rheology, p, "creep");
  m.programs["creep"] = LoadProgram({{0.0, 1.0}, {400.0, 1.0}, {400.0, 0.0}, {800.0, 0.0}});
  return m;
}

inline constexpr double kExampleChi = 45.454545;

/// Quarter disk of the indentation benchmark with a given relaxation time and load program.
inline Model quarter_disk(double chi, double pn, const LoadProgram& program) {
  Model m;
  m.mesh = generate_mesh(QuarterDiskSpec{});
  m.regions.push_back({0, Material{70.0, 0.35}, rheology_preset("kelvin_voigt", {.chi = chi})});
  m.programs["ramp"] = program;
  BoundaryCondition sym;
  sym.group = "symmetry";
  sym.components[0] = {BcKind::Dirichlet, 0.0, {}};
  sym.components[1] = {BcKind::Neumann, 0.0, {}};
  m.boundary.push_back(sym);
  m.boundary.push_back(BoundaryCondition::traction("loaded", BcFrame::NormalTangential, pn, 0.0, "ramp"));
  BoundaryCondition c;
  c.group = "contact";
  c.contact = ContactCondition{Obstacle{Vec2(0.0, -0.75), Vec2(0.0, 1.0)}, 0.0};
  m.boundary.push_back(c);
  return m;
}

inline LoadProgram ramp_and_release() {
  return LoadProgram({{0.0, 0.0}, {250.0, 1.0}, {250.0, 0.0}, {500.0, 0.0}});
}

}  // namespace fixtures
