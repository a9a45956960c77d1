#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "app.hpp"
#include "config.hpp"
#include "verify.hpp"

namespace fs = std::filesystem;
using obdeg::cli::json;

namespace {

struct CliRun {
  int status;
  std::string out, err;
};

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("obdeg_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  CliRun run(const std::vector<std::string>& args) {
    std::vector<const char*> argv{"obdeg"};
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int s = obdeg::cli::run_app(static_cast<int>(argv.size()), argv.data(), out, err);
    return {s, out.str(), err.str()};
  }
  std::string write(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p.string();
  }
  json report(const std::string& stem) { return obdeg::cli::load_config((dir_ / (stem + ".report.json")).string()); }
  std::string slurp(const std::string& file) {
    std::ifstream in(dir_ / file);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
  static std::string bundled(const std::string& name) { return std::string(OBDEG_CONFIG_DIR) + "/" + name + ".json"; }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, BundledRobinDegree) {
  const CliRun r = run({"degree", "--config", bundled("robin-degree"), "--out", dir_.string()});
  ASSERT_EQ(r.status, 0) << r.err;
  const json rep = report("robin-degree");
  EXPECT_EQ(rep["measured"]["degree"]["degree"], 1);
  EXPECT_EQ(rep["measured"]["degree"]["dim_E_minus"], 0);
  EXPECT_TRUE(rep["pass"].get<bool>());
  EXPECT_EQ(rep["seed"], 1);
  EXPECT_EQ(rep["input"]["domain"]["n_r"], 16);
  EXPECT_FALSE(rep["measured"]["eigenvalues"].empty());
  for (const auto& c : rep["checks"]) {
    EXPECT_TRUE(c.contains("measured"));
    EXPECT_TRUE(c.contains("tolerance"));
  }
  EXPECT_TRUE(fs::exists(dir_ / "robin-degree.field.csv"));
}

TEST_F(CliTest, UnknownKeyIsNamed) {
  const std::string cfg =
      write("c.json", R"({"name": "x", "domain": {"shape": "disk", "n_r": 8, "n_theta": 16, "radiius": 1},
                          "problem": {"name": "laplace-robin"}})");
  const CliRun r = run({"degree", "--config", cfg, "--out", dir_.string()});
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.err.find("radiius"), std::string::npos) << r.err;
  const CliRun top = run({"solve", "--config", write("d.json", R"({"name": "x", "extra": 1,
      "domain": {"shape": "disk"}, "problem": {"name": "laplace-robin"}})"), "--out", dir_.string()});
  EXPECT_EQ(top.status, 2);
  EXPECT_NE(top.err.find("extra"), std::string::npos);
}

TEST_F(CliTest, SyntaxErrorReportsLineAndColumn) {
  const std::string cfg = write("bad.json", "{\n  \"name\": \"x\",\n  \"n\": 3,,\n}");
  const CliRun r = run({"yamabe", "--config", cfg, "--out", dir_.string()});
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.err.find("bad.json:3:"), std::string::npos) << r.err;
}

TEST_F(CliTest, TypeErrorNamesField) {
  const std::string cfg = write("t.json", R"({"name": "y", "n": "three"})");
  const CliRun r = run({"yamabe", "--config", cfg, "--out", dir_.string()});
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.err.find("/n"), std::string::npos) << r.err;
}

TEST_F(CliTest, RuntimeErrorWritesErrorReport) {
  const std::string cfg = write("neg.json", R"({"name": "neg", "n": 3, "c": -0.5, "n_r": 8, "n_theta": 16})");
  const CliRun r = run({"yamabe", "--config", cfg, "--out", dir_.string()});
  EXPECT_EQ(r.status, 3);
  const json rep = report("neg");
  EXPECT_FALSE(rep["pass"].get<bool>());
  EXPECT_EQ(rep["error"]["kind"], "unsupported-regime");
}

TEST_F(CliTest, StuckHomotopyKeepsPartialPath) {
  const std::string cfg = write("h.json", R"({"name": "stuck",
      "domain": {"shape": "disk", "n_r": 8, "n_theta": 16},
      "family": {"name": "bratu", "params": {"lambda_max": 20}},
      "schedule": {"dt_min": 0.01}})");
  const CliRun r = run({"homotopy", "--config", cfg, "--out", dir_.string()});
  EXPECT_EQ(r.status, 3);
  EXPECT_TRUE(fs::exists(dir_ / "stuck.path.csv"));
  EXPECT_EQ(report("stuck")["error"]["kind"], "continuation-stuck");
}

TEST_F(CliTest, SeedOverrideIsRecorded) {
  const CliRun r = run({"degree", "--config", bundled("robin-degree"), "--out", dir_.string(), "--seed", "42"});
  ASSERT_EQ(r.status, 0);
  EXPECT_EQ(report("robin-degree")["seed"], 42);
}

TEST_F(CliTest, DeterministicCsv) {
  ASSERT_EQ(run({"solve", "--config", bundled("semilinear-solve"), "--out", dir_.string()}).status, 0);
  const std::string first = slurp("semilinear-solve.field.csv");
  ASSERT_EQ(run({"solve", "--config", bundled("semilinear-solve"), "--out", dir_.string()}).status, 0);
  EXPECT_EQ(first, slurp("semilinear-solve.field.csv"));
  EXPECT_EQ(first.substr(0, first.find('\n')), "node_index,x,y,value");
}

TEST_F(CliTest, VerifySmallPasses) {
  const CliRun r = run({"verify", "--config", bundled("verify-small"), "--out", dir_.string()});
  ASSERT_EQ(r.status, 0) << r.out << r.err;
  for (const std::string& check : obdeg::cli::verify_check_names()) {
    const json rep = report("verify-small-" + check);
    EXPECT_TRUE(rep["pass"].get<bool>()) << check;
    EXPECT_FALSE(rep["checks"].empty()) << check;
  }
  EXPECT_EQ(report("verify-small")["measured"]["checks"].size(), obdeg::cli::verify_check_names().size());
}

TEST_F(CliTest, FoldHomotopyInvariance) {
  const CliRun r = run({"homotopy", "--config", bundled("fold-homotopy"), "--out", dir_.string()});
  ASSERT_EQ(r.status, 0) << r.err;
  const json rep = report("fold-homotopy");
  EXPECT_EQ(rep["measured"]["invariance"].size(), 11u);
  const std::string path = slurp("fold-homotopy.path.csv");
  EXPECT_EQ(path.substr(0, path.find('\n')), "t,residual,lambda,chi,iterations");
}

TEST_F(CliTest, ReflectorOutputs) {
  const std::string cfg = write("r.json", R"({"name": "refl",
      "domain": {"shape": "star", "a0": 0.5, "cos": [0.0, 0.03], "n_r": 12, "n_theta": 24},
      "manufactured": {"solution": "example", "route": "discrete"},
      "reflected": {"name": "gaussian", "base": 1.0, "amplitude": 0.3, "center": [0.1, 0.0], "width": 0.4},
      "foliation_r0": 0.45, "pushforward_samples": 20000, "pushforward_tolerance": 0.1})");
  const CliRun r = run({"reflector", "--config", cfg, "--out", dir_.string()});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir_ / "refl.image.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "refl.field.csv"));
  EXPECT_LT(report("refl")["measured"]["error_vs_manufactured"].get<double>(), 1e-4);
}

TEST_F(CliTest, YamabeProfile) {
  const CliRun r = run({"yamabe", "--config", bundled("yamabe-n3"), "--out", dir_.string()});
  ASSERT_EQ(r.status, 0) << r.err;
  const json rep = report("yamabe-n3");
  EXPECT_EQ(std::abs(rep["measured"]["degree"]["degree"].get<int>()), 1);
  EXPECT_TRUE(rep["measured"].contains("h_g_convention"));
  EXPECT_TRUE(fs::exists(dir_ / "yamabe-n3.profile.csv"));
}

TEST_F(CliTest, MissingSubcommandOrConfig) {
  EXPECT_EQ(run({}).status, 2);
  EXPECT_EQ(run({"degree"}).status, 2);
  EXPECT_EQ(run({"degree", "--config", (dir_ / "missing.json").string()}).status, 2);
}
