#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bdsde/grid.hpp"
#include "bdsde/oracle.hpp"
#include "experiments.hpp"
#include "json.hpp"

namespace bdsde::tools {
namespace {

namespace fs = std::filesystem;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

std::vector<std::string> lines(const fs::path& p) {
  std::ifstream f(p);
  std::vector<std::string> out;
  for (std::string l; std::getline(f, l);) out.push_back(l);
  return out;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("bdsde_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string file(const std::string& name) const { return (dir_ / name).string(); }
  fs::path dir_;
};

TEST_F(Cli, SolveTransportMatchesClosedForm) {
  const auto r = cli({"solve", "--model", "transport", "--T", "1", "--n", "4", "--seed", "7"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = nlohmann::json::parse(r.out);
  const TimeGrid g(1.0, 4);
  const auto exact = exact_transport(g, sample_path(g, 7));
  EXPECT_EQ(doc["y0"].get<double>(), exact.y_path.front());
  EXPECT_EQ(doc["exact_y0"].get<double>(), exact.y_path.front());
  EXPECT_EQ(doc["path_y"].size(), 5U);
}

TEST_F(Cli, SolveTreeCsv) {
  const auto out = file("tree.csv");
  const auto r = cli({"solve", "--model", "linear", "--n", "3", "--keep-tree", "--out", out});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines(out);
  ASSERT_EQ(rows.size(), 1U + 10U);
  EXPECT_EQ(rows[0], "level,node,W,y,z,scheme");
  EXPECT_TRUE(fs::exists(out + ".meta.json"));
}

TEST_F(Cli, PathsShape) {
  const auto out = file("paths.csv");
  ASSERT_EQ(cli({"paths", "--T", "1", "--n", "512", "--seed", "1", "--out", out}).code, 0);
  const auto rows = lines(out);
  ASSERT_EQ(rows.size(), 514U);
  EXPECT_EQ(rows[0], "t,W,B_rev");
  const TimeGrid g(1.0, 512);
  const auto w = walk_values(sample_path(g, 1), g);
  char expect[64];
  std::snprintf(expect, sizeof expect, "0,0,%.17g", w.B.back());
  EXPECT_EQ(rows[1], expect);
  EXPECT_EQ(rows.back().substr(0, 2), "1,");
  const auto meta = nlohmann::json::parse(slurp(out + ".meta.json"));
  EXPECT_EQ(meta["seed"], 1);
  EXPECT_EQ(meta["config"]["n"], 512);
}

TEST_F(Cli, ByteIdenticalReruns) {
  for (int k = 0; k < 2; ++k) {
    const auto out = file("mc" + std::to_string(k) + ".csv");
    ASSERT_EQ(cli({"mc", "--model", "sine", "--n", "8", "--samples", "300", "--seed", "9",
                   "--out", out}).code, 0);
  }
  EXPECT_EQ(slurp(file("mc0.csv")), slurp(file("mc1.csv")));
  EXPECT_EQ(slurp(file("mc0.csv.meta.json")).size(), slurp(file("mc1.csv.meta.json")).size());
}

TEST_F(Cli, ConfigFileWithOverrides) {
  const auto cfg = file("run.cfg");
  std::ofstream(cfg) << "model = \"sine\"\nn = 8\nsamples = 40\nseed = 3\n";
  const auto out = file("mc.csv");
  const auto r = cli({"mc", "--config", cfg, "--samples", "25", "--out", out});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_EQ(doc["model"], "sine");
  EXPECT_EQ(doc["n"], 8);
  EXPECT_EQ(doc["samples"], 25);
}

TEST_F(Cli, ConvergenceTable) {
  const auto out = file("conv.csv");
  const auto r = cli({"convergence", "--model", "sine", "--n-list", "8,16,32,64", "--samples",
                      "500", "--out", out});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines(out);
  ASSERT_EQ(rows.size(), 5U);
  for (std::size_t k = 1; k < rows.size(); ++k) {
    const double err = std::stod(rows[k].substr(rows[k].find(',') + 1));
    EXPECT_TRUE(std::isfinite(err));
  }
  const auto meta = nlohmann::json::parse(slurp(out + ".meta.json"));
  EXPECT_TRUE(meta["slope"].is_number());
}

TEST_F(Cli, PicardDiagnose) {
  const auto out = file("picard.csv");
  ASSERT_EQ(cli({"picard-diagnose", "--model", "linear", "--n", "16", "--out", out}).code, 0);
  const auto rows = lines(out);
  EXPECT_EQ(rows[0], "p,norm_sq,ratio");
  EXPECT_EQ(rows[1].back(), ',');  // no ratio for p = 0
  EXPECT_EQ(cli({"picard-diagnose", "--model", "linear", "--n", "16", "--p-max", "2",
                 "--out", out}).code, 1);
}

TEST_F(Cli, SpdeSurface) {
  const auto out = file("surface.csv");
  ASSERT_EQ(cli({"spde", "--model", "additive", "--terminal", "square", "--sigma", "0.5", "--n",
                 "16", "--x-count", "5", "--seed", "2", "--out", out}).code, 0);
  const auto rows = lines(out);
  ASSERT_EQ(rows.size(), 6U);
  EXPECT_EQ(rows[0], "x,u0,eps_seed");
  const auto meta = nlohmann::json::parse(slurp(out + ".meta.json"));
  const double noise = meta["noise_term"];
  // x = -1: u = 1 + 0.25 + noise.
  const double u = std::stod(rows[1].substr(rows[1].find(',') + 1));
  EXPECT_NEAR(u - noise, 1.25, 1e-12);
}

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(cli({}).code, 2);
  EXPECT_EQ(cli({"solve", "--model", "nope"}).code, 2);
  EXPECT_EQ(cli({"solve", "--scheme", "euler"}).code, 2);
  EXPECT_EQ(cli({"solve", "--n", "0"}).code, 2);
  EXPECT_EQ(cli({"solve", "--model", "sine", "--n", "1"}).code, 2);
  EXPECT_EQ(cli({"solve", "--model", "linear", "--params", "1,2"}).code, 2);
  EXPECT_EQ(cli({"convergence", "--n-list", "16,8"}).code, 2);
  EXPECT_EQ(cli({"spde", "--terminal", "cube"}).code, 2);
  EXPECT_EQ(cli({"picard-diagnose", "--norm", "l1"}).code, 2);
  EXPECT_EQ(cli({"frobnicate"}).code, 2);
  EXPECT_EQ(cli({"solve", "--n", "many"}).code, 2);
  EXPECT_EQ(cli({"--help"}).code, 0);
}

}  // namespace
}  // namespace bdsde::tools
