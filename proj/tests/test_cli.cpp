#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("renormlab_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  Outcome run(const std::string& args) const {
    const auto out = dir_ / "stdout.txt";
    const auto err = dir_ / "stderr.txt";
    const std::string cmd = std::string(RENORM_LAB_BIN) + " " + args + " > " + out.string() +
                            " 2> " + err.string();
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, TuneGolden) {
  const auto r = run("tune --t 2 --type doubling --depth 1");
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "c = 0.618033988750\n");
}

TEST_F(Cli, TuneDeepDoubling) {
  const auto r = run("tune --t 2 --type doubling --depth 6 --out " + (dir_ / "t").string());
  ASSERT_EQ(r.code, 0) << r.err;
  const double c = std::stod(r.out.substr(4));
  EXPECT_NEAR(c, 0.784973, 1e-6);
  const auto j = json::parse(slurp(dir_ / "t" / "map.json"));
  EXPECT_EQ(j.at("t"), 2.0);
  EXPECT_EQ(j.at("schema"), "renorm-lab/1");
}

TEST_F(Cli, RejectsExponentOne) {
  const auto r = run("tune --t 1 --type doubling --depth 2");
  EXPECT_EQ(r.code, 1);
  EXPECT_NO_THROW((void)json::parse(r.err));
}

TEST_F(Cli, NonRenormalizableTower) {
  const auto r = run("tower --t 2 --c 1 --depth 3 --out " + dir_.string());
  EXPECT_EQ(r.code, 2);
  const auto j = json::parse(r.err);
  EXPECT_EQ(j.at("error"), "not-renormalizable-at-level");
  EXPECT_EQ(j.at("level"), 1);
  EXPECT_FALSE(fs::exists(dir_ / "tower.json"));
}

TEST_F(Cli, DepthCap) {
  EXPECT_EQ(run("tower --t 2 --type doubling --depth 9 --out " + dir_.string()).code, 1);
  EXPECT_EQ(run("certify --t 2 --type doubling --depth 3 --L 9 --out " + dir_.string()).code, 1);
}

TEST_F(Cli, UnknownFlag) { EXPECT_NE(run("tower --bogus").code, 0); }

TEST_F(Cli, TowerArtifacts) {
  const auto r = run("tower --t 2 --type doubling --depth 4 --out " + dir_.string());
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(slurp(dir_ / "tower.json"));
  EXPECT_EQ(j.at("levels").size(), 4u);
  const auto csv = slurp(dir_ / "tower.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "k,n_k,m_k,J_lo,J_hi,I_lo,I_hi,p_k,alpha_slope,c1_fk");
}

TEST_F(Cli, ConfigWithOverride) {
  std::ofstream(dir_ / "cfg.json")
      << R"({"map": {"t": 2, "type": "doubling", "depth": 4}, "depth": 2, "out": ")"
      << (dir_ / "from_cfg").string() << "\"}";
  ASSERT_EQ(run("tower --config " + (dir_ / "cfg.json").string()).code, 0);
  EXPECT_EQ(json::parse(slurp(dir_ / "from_cfg" / "tower.json")).at("levels").size(), 2u);
  ASSERT_EQ(run("tower --config " + (dir_ / "cfg.json").string() + " --depth 3").code, 0);
  EXPECT_EQ(json::parse(slurp(dir_ / "from_cfg" / "tower.json")).at("levels").size(), 3u);
}

TEST_F(Cli, PartitionArtifacts) {
  ASSERT_EQ(run("partition --t 2 --type doubling --depth 3 --L 2 --out " + dir_.string()).code, 0);
  EXPECT_EQ(slurp(dir_ / "partition.csv").rfind("level,index,left,right,kind,iterate\n", 0), 0u);
  EXPECT_FALSE(slurp(dir_ / "words.txt").empty());
}

TEST_F(Cli, CertifyIsReproducible) {
  const std::string args = "certify --t 2 --type doubling --depth 4 --L 2 --grid 32 --out ";
  const auto a = run(args + (dir_ / "a").string());
  const auto b = run(args + (dir_ / "b").string());
  ASSERT_EQ(a.code, 0) << a.err;
  ASSERT_EQ(b.code, 0) << b.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(slurp(dir_ / "a" / "report.csv"), slurp(dir_ / "b" / "report.csv"));
  EXPECT_EQ(slurp(dir_ / "a" / "report.json"), slurp(dir_ / "b" / "report.json"));
  const auto j = json::parse(slurp(dir_ / "a" / "report.json"));
  EXPECT_GE(j.at("A").get<double>(), 1.0);
}

TEST_F(Cli, SelfConjugacyIsIdentity) {
  const auto r = run(
      "conjugate --map '{\"t\":2,\"type\":\"doubling\"}' --target '{\"t\":2,\"type\":\"doubling\"}'"
      " --depth 3 --L 2 --j0 2 --j1 5 --out " + dir_.string());
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(slurp(dir_ / "qs.json"));
  ASSERT_EQ(j.at("forward").size(), 4u);
  for (const auto& row : j.at("forward")) EXPECT_NEAR(row.at("max_rho").get<double>(), 1.0, 1e-12);
  for (const auto& row : j.at("inverse")) EXPECT_NEAR(row.at("max_rho").get<double>(), 1.0, 1e-12);
  EXPECT_TRUE(fs::exists(dir_ / "mesh.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "qs.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "qs_inverse.csv"));
}

TEST_F(Cli, ConjugacyMismatchedCombinatorics) {
  const auto r = run(
      "conjugate --map '{\"t\":2,\"type\":\"doubling\"}' --target '{\"t\":2,\"type\":\"2,3,2\"}'"
      " --depth 3 --L 2 --out " + dir_.string());
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(json::parse(r.err).at("error"), "combinatorics-mismatch");
}
