#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "satopt/cli.hpp"

namespace satopt {
namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("satopt_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    config_ = (dir_ / "config.json").string();
    std::ofstream(config_) << "{}\n";
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(std::vector<std::string> args) {
    args.insert(args.begin(), "satopt");
    return cli::run(args);
  }
  std::string out(const std::string& name) const { return (dir_ / name).string(); }

  static std::string read(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }

  /// Data rows of a CSV file, header row first, comment line dropped.
  static std::vector<std::vector<std::string>> csv(const fs::path& p) {
    std::ifstream in(p);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
      if (line.rfind("#", 0) == 0) continue;
      std::vector<std::string> cells;
      std::stringstream ss(line);
      std::string cell;
      while (std::getline(ss, cell, ',')) cells.push_back(cell);
      rows.push_back(cells);
    }
    return rows;
  }

  fs::path dir_;
  std::string config_;
};

TEST(ParseGrid, ListsAndRanges) {
  EXPECT_EQ(cli::parse_grid("1,2.5,3"), (std::vector<double>{1, 2.5, 3}));
  EXPECT_EQ(cli::parse_grid("0.1e9:0.3e9:0.1e9"), (std::vector<double>{0.1e9, 0.2e9, 0.3e9}));
  EXPECT_EQ(cli::parse_grid("0:0:1"), (std::vector<double>{0}));
  EXPECT_THROW(cli::parse_grid("1,x"), std::invalid_argument);
  EXPECT_THROW(cli::parse_grid("1:0:1"), std::invalid_argument);
  EXPECT_THROW(cli::parse_grid("0:1:0"), std::invalid_argument);
}

TEST_F(CliTest, SolveWritesAllFiles) {
  ASSERT_EQ(run({"solve", "--config", config_, "--w", "0", "--out", out("s")}), cli::kExitOk);
  for (const char* f : {"manifest.json", "trace.csv", "allocation.csv", "metrics.json"}) {
    EXPECT_TRUE(fs::exists(dir_ / "s" / f)) << f;
  }
  const auto m = nlohmann::json::parse(read(dir_ / "s" / "metrics.json"));
  EXPECT_EQ(m["objective"].get<double>(), m["usc_bps"].get<double>());
  EXPECT_TRUE(m["converged"].get<bool>());
  EXPECT_EQ(m["upa"]["p_tot_w"].get<double>(), 500.0);
  const auto alloc = csv(dir_ / "s" / "allocation.csv");
  EXPECT_EQ(alloc.front(), (std::vector<std::string>{"beam", "subcarrier", "power_w"}));
  EXPECT_EQ(alloc.size(), 1u + 7u * 4u);
  const auto trace = csv(dir_ / "s" / "trace.csv");
  EXPECT_EQ(trace.size(), 2u + m["iterations"].get<std::size_t>());
  const auto manifest = nlohmann::json::parse(read(dir_ / "s" / "manifest.json"));
  EXPECT_EQ(manifest["command"], "solve");
  EXPECT_FALSE(manifest.contains("jobs"));
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run({}), cli::kExitUsage);
  EXPECT_EQ(run({"solve"}), cli::kExitUsage);
  EXPECT_EQ(run({"bogus", "--config", config_}), cli::kExitUsage);
  EXPECT_EQ(run({"solve", "--config", out("missing.json")}), cli::kExitUsage);
  EXPECT_EQ(run({"sweep-r", "--config", config_, "--r-grid", "", "--out", out("e")}), cli::kExitUsage);
  EXPECT_EQ(run({"convergence", "--config", config_, "--starts", "mu:2", "--out", out("e")}),
            cli::kExitUsage);
  std::ofstream(out("bad.json")) << R"({"n_beams": 0})";
  EXPECT_EQ(run({"validate", "--config", out("bad.json")}), cli::kExitUsage);
}

TEST_F(CliTest, ValidatePrintsCanonicalConfig) {
  ::testing::internal::CaptureStdout();
  const int rc = run({"validate", "--config", config_});
  const std::string text = ::testing::internal::GetCapturedStdout();
  EXPECT_EQ(rc, cli::kExitOk);
  const auto j = nlohmann::json::parse(text);
  EXPECT_EQ(j["base_config"]["n_beams"], 7);
}

TEST_F(CliTest, SweepRProducesOneRowPerSchemeAndSlope) {
  ASSERT_EQ(run({"sweep-r", "--config", config_, "--trials", "2", "--jobs", "2", "--out", out("r")}),
            cli::kExitOk);
  const auto agg = csv(dir_ / "r" / "sweep_r.csv");
  EXPECT_EQ(agg.size(), 1u + 30u);
  const auto raw = csv(dir_ / "r" / "sweep_r_trials.csv");
  EXPECT_EQ(raw.size(), 1u + 60u);
}

TEST_F(CliTest, SweepWDefaultGrid) {
  ASSERT_EQ(run({"sweep-w", "--config", config_, "--out", out("w")}), cli::kExitOk);
  const auto rows = csv(dir_ / "w" / "pareto.csv");
  ASSERT_EQ(rows.size(), 7u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"w_bps_per_w", "usc_bps", "p_tot_w", "objective",
                                               "iterations", "converged"}));
}

TEST_F(CliTest, ConvergenceTracesPerWeightAndStart) {
  ASSERT_EQ(run({"convergence", "--config", config_, "--starts", "mu:0.1,mu:1.0,random:3", "--out",
                 out("c")}),
            cli::kExitOk);
  const auto rows = csv(dir_ / "c" / "convergence.csv");
  std::set<std::pair<std::string, std::string>> traces;
  for (std::size_t i = 1; i < rows.size(); ++i) traces.insert({rows[i][0], rows[i][1]});
  EXPECT_EQ(traces.size(), 10u);
}

TEST_F(CliTest, RerunIsByteIdentical) {
  const std::vector<std::string> args = {"sweep-w", "--config", config_, "--out", out("d")};
  ASSERT_EQ(run(args), cli::kExitOk);
  const std::string a = read(dir_ / "d" / "pareto.csv");
  const std::string ma = read(dir_ / "d" / "manifest.json");
  ASSERT_EQ(run(args), cli::kExitOk);
  EXPECT_EQ(read(dir_ / "d" / "pareto.csv"), a);
  EXPECT_EQ(read(dir_ / "d" / "manifest.json"), ma);
}

}  // namespace
}  // namespace satopt
