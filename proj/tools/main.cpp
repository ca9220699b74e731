#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "viscobem/case.hpp"
#include "viscobem/error.hpp"
#include "viscobem/mesh_io.hpp"
#include "viscobem/simulation.hpp"

using namespace viscobem;

int main(int argc, char** argv) {
  CLI::App app{"viscobem: quasistatic viscoelastic boundary element solver"};
  app.require_subcommand(1);

  std::string config, out;
  std::optional<double> tau;
  auto* run = app.add_subcommand("run", "Run a case and write its CSV files");
  run->add_option("--config", config, "Case file (JSON)")->required();
  run->add_option("--out", out, "Output directory")->required();
  run->add_option("--tau", tau, "Override the time step");

  auto* validate = app.add_subcommand("validate", "Check a case file and report problems");
  validate->add_option("--config", config, "Case file (JSON)")->required();

  auto* mesh = app.add_subcommand("mesh", "Write a generated mesh");
  mesh->require_subcommand(1);
  std::string mesh_out;
  RectangleSpec rect;
  QuarterDiskSpec disk;
  StackedRectanglesSpec stack;
  std::vector<double> origin;
  auto* m_rect = mesh->add_subcommand("rectangle", "Axis-aligned rectangle");
  m_rect->add_option("--length", rect.length)->required();
  m_rect->add_option("--height", rect.height)->required();
  m_rect->add_option("--nx", rect.nx)->required();
  m_rect->add_option("--ny", rect.ny)->required();
  m_rect->add_option("--origin", origin)->expected(2);
  auto* m_disk = mesh->add_subcommand("quarter_disk", "Quarter disk with a contact arc");
  m_disk->add_option("--radius", disk.radius, "Radius")->capture_default_str();
  m_disk->add_option("--contact-angle", disk.contact_angle_deg, "Contact arc angle (degrees)")->capture_default_str();
  m_disk->add_option("--n-contact", disk.n_contact)->capture_default_str();
  m_disk->add_option("--n-arc", disk.n_arc)->capture_default_str();
  m_disk->add_option("--n-straight", disk.n_straight)->capture_default_str();
  auto* m_stack = mesh->add_subcommand("stacked_rectangles", "Two rectangles sharing an edge");
  m_stack->add_option("--length", stack.length)->required();
  m_stack->add_option("--height0", stack.height0)->required();
  m_stack->add_option("--height1", stack.height1)->required();
  m_stack->add_option("--nx", stack.nx)->required();
  m_stack->add_option("--ny0", stack.ny0)->required();
  m_stack->add_option("--ny1", stack.ny1)->required();
  for (auto* sub : {m_rect, m_disk, m_stack}) sub->add_option("--out", mesh_out, "Mesh file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run) {
      Case c = load_config(config);
      if (tau) {
        c.options.tau = *tau;
        step_count(c.options.total_time, c.options.tau);
      }
      const int status = run_case(c, out);
      if (status != 0) std::cerr << "run failed; see " << out << "/error.txt\n";
      return status;
    }
    if (*validate) {
      const Case c = load_config(config);
      Simulation sim(c.model, c.options);
      std::cout << "ok: " << c.model.mesh.num_elements() << " elements, " << sim.system().size()
                << " unknowns, " << sim.num_steps() << " steps\n";
      return 0;
    }
    ShapeSpec shape;
    if (*m_rect) {
      if (origin.size() == 2) rect.origin = Vec2(origin[0], origin[1]);
      shape = rect;
    } else if (*m_disk) {
      shape = disk;
    } else {
      shape = stack;
    }
    write_mesh_file(mesh_out, generate_mesh(shape));
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_status(e);
  }
}
