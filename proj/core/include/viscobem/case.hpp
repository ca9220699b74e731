#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "viscobem/model.hpp"
#include "viscobem/simulation.hpp"

namespace viscobem {

/// Regular grid of cell-centred sample points; points outside the domain or
/// on its boundary are skipped.
struct SnapshotSpec {
  std::vector<int> steps;
  Vec2 lower = Vec2::Zero();
  Vec2 upper = Vec2::Ones();
  int nx = 10;
  int ny = 10;

  std::vector<Vec2> points() const;
};

struct OutputSpec {
  bool timeseries = true;
  bool ledger = true;
  bool contact = true;
  bool forces = true;
  std::optional<SnapshotSpec> snapshots;
};

struct Case {
  Model model;
  SimulationOptions options;
  std::vector<BoundaryProbe> boundary_probes;
  std::vector<InteriorProbe> interior_probes;
  OutputSpec output;
};

/// Parses a JSON case description. Unknown keys and missing required keys
/// are collected and reported together as a configuration error with
/// paths such as "/boundary/1/x/type". Relative mesh file paths are resolved
/// against `base_dir`.
Case parse_config(std::string_view text, const std::string& base_dir = ".");
Case load_config(const std::string& path);

/// Runs a case and writes its CSV files into `out_dir`. Returns 0 on success,
/// 2 for configuration errors and 3 for solver errors; on failure the error
/// is written to error.txt in `out_dir`.
int run_case(const Case& c, const std::string& out_dir);

/// Exit status for an exception caught around case handling.
int exit_status(const std::exception& e);

}  // namespace viscobem
