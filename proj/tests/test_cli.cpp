#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "viscobem/case.hpp"
#include "viscobem/error.hpp"

using namespace viscobem;
namespace fs = std::filesystem;

namespace {

const std::string kConfigs = VISCOBEM_CONFIG_DIR;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("viscobem_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

std::string config_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Configuration);
    return e.what();
  }
  ADD_FAILURE() << "configuration was accepted";
  return {};
}

/// Largest number of simultaneously active contact nodes in a contact report.
int peak_active(const fs::path& csv) {
  const auto rows = read_csv(csv);
  std::map<int, int> per_step;
  for (std::size_t i = 1; i < rows.size(); ++i) per_step[std::stoi(rows[i][0])] += std::stoi(rows[i][7]);
  int peak = 0;
  for (const auto& [step, n] : per_step) peak = std::max(peak, n);
  return peak;
}

}  // namespace

TEST(ParseConfig, ShippedExampleA) {
  const Case c = load_config(kConfigs + "/example_a.json");
  EXPECT_EQ(c.options.tau, 1.0);
  EXPECT_EQ(c.options.total_time, 800.0);
  ASSERT_EQ(c.model.regions.size(), 1u);
  const auto& r = c.model.regions[0].rheology;
  EXPECT_EQ(r.chi0, 1.0);
  EXPECT_EQ(r.chi1, 45.454545);
  EXPECT_TRUE(kelvin_voigt_time(r).has_value());
  EXPECT_EQ(c.model.mesh.num_elements(), 180);
  ASSERT_EQ(c.boundary_probes.size(), 1u);
  EXPECT_EQ(c.model.mesh.nodes[c.boundary_probes[0].node], Vec2(800.0, 50.0));
}

TEST(ParseConfig, AllShippedConfigsParse) {
  for (const char* name : {"example_a.json", "example_a_shear.json", "contact_chi0.json", "contact_chi22.5.json",
                           "contact_chi45.json"}) {
    EXPECT_NO_THROW(load_config(kConfigs + "/" + name)) << name;
  }
}

TEST(ParseConfig, EmptyDocumentListsRequiredFields) {
  const std::string msg = config_error("{}");
  for (const char* field : {"/mesh", "/regions", "/boundary", "/time"}) {
    EXPECT_NE(msg.find(std::string(field) + ": required field missing"), std::string::npos) << msg;
  }
}

TEST(ParseConfig, NonIntegerStepCount) {
  const std::string text = slurp(kConfigs + "/example_a.json");
  const auto pos = text.find("\"tau\": 1");
  ASSERT_NE(pos, std::string::npos);
  std::string bad = text;
  bad.replace(pos, 8, "\"tau\": 7");
  EXPECT_NE(config_error(bad).find("T/tau must be an integer"), std::string::npos);
}

TEST(ParseConfig, UnknownKeysAreReportedWithTheirPath) {
  std::string text = slurp(kConfigs + "/example_a.json");
  const auto pos = text.find("\"type\": \"dirichlet\"");
  text.insert(pos, "\"colour\": \"red\", ");
  const std::string msg = config_error(text);
  EXPECT_NE(msg.find("/boundary/0/x/colour: unknown key"), std::string::npos) << msg;
}

TEST(ParseConfig, MalformedJsonAndMissingFile) {
  EXPECT_THROW(parse_config("{ nope"), Error);
  try {
    load_config("/nonexistent/case.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Io);
  }
}

TEST(RunCase, ExampleAWritesOneRowPerStepAndIsDeterministic) {
  const Case c = load_config(kConfigs + "/example_a.json");
  const fs::path a = scratch("example_a_1"), b = scratch("example_a_2");
  ASSERT_EQ(run_case(c, a.string()), 0);
  ASSERT_EQ(run_case(c, b.string()), 0);
  const auto ts = read_csv(a / "timeseries.csv");
  ASSERT_EQ(ts.size(), 801u);  // header + 800 steps for the single probe
  EXPECT_EQ(ts[0][0], "step");
  EXPECT_EQ(ts[800][0], "800");
  EXPECT_EQ(read_csv(a / "interior.csv").size(), 801u);
  EXPECT_EQ(read_csv(a / "ledger.csv").size(), 801u);
  for (const char* f : {"snapshot_100.csv", "snapshot_400.csv", "snapshot_401.csv", "snapshot_800.csv"}) {
    EXPECT_TRUE(fs::exists(a / f)) << f;
  }
  EXPECT_FALSE(fs::exists(a / "contact.csv"));
  EXPECT_FALSE(fs::exists(a / "error.txt"));
  for (const auto& entry : fs::directory_iterator(a)) {
    const auto name = entry.path().filename();
    EXPECT_EQ(slurp(entry.path()), slurp(b / name)) << name;
  }
}

TEST(RunCase, ContactReportsDependOnViscosity) {
  const fs::path d0 = scratch("contact_0"), d45 = scratch("contact_45");
  ASSERT_EQ(run_case(load_config(kConfigs + "/contact_chi0.json"), d0.string()), 0);
  ASSERT_EQ(run_case(load_config(kConfigs + "/contact_chi45.json"), d45.string()), 0);
  const std::string r0 = slurp(d0 / "contact.csv"), r45 = slurp(d45 / "contact.csv");
  EXPECT_FALSE(r0.empty());
  EXPECT_NE(r0, r45);
  EXPECT_EQ(read_csv(d0 / "contact.csv").size(), 1u + 200u * 61u);
  EXPECT_LE(peak_active(d45 / "contact.csv"), peak_active(d0 / "contact.csv"));
}

TEST(RunCase, SolverFailureWritesErrorFile) {
  // Pulling the disk away from the obstacle leaves its vertical translation free.
  std::string text = slurp(kConfigs + "/contact_chi0.json");
  const auto pos = text.find("-250");
  ASSERT_NE(pos, std::string::npos);
  text.replace(pos, 4, "250");
  const Case c = parse_config(text);
  const fs::path d = scratch("float");
  EXPECT_EQ(run_case(c, d.string()), 3);
  const std::string err = slurp(d / "error.txt");
  EXPECT_EQ(err.rfind("ill-posed-configuration", 0), 0u) << err;
}
