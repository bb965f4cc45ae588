#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
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
    dir_ = fs::temp_directory_path() /
           ("fibersym_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  Result run(const std::string& args, const fs::path& sub = {}) {
    const auto cwd = dir_ / sub;
    fs::create_directories(cwd);
    const auto out = dir_ / "stdout.txt", err = dir_ / "stderr.txt";
    const std::string cmd = "cd '" + cwd.string() + "' && '" FSYM_CLI_PATH "' " + args + " > '" + out.string() +
                            "' 2> '" + err.string() + "'";
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, HelpListsFlagsWithDefaults) {
  const std::pair<const char*, std::vector<const char*>> subs[] = {
      {"synth", {"--model", "--out", "--points", "--noise", "--seed", "--replicates", "[21]", "[mycelium]"}},
      {"fit", {"--data", "--out", "--alpha", "--epochs", "--seed", "--threshold", "--permissive", "[0.05]", "[20000]",
               "[0.001]"}},
      {"predict", {"--model", "--case", "--points", "--out", "[tension:in-plane]"}},
      {"stiffness", {"--data", "--out", "--permissive"}},
      {"subsets", {"--data", "--out", "--max-terms", "--threads"}},
      {"report", {"--data", "--out", "--model", "--svg"}},
  };
  for (const auto& [sub, flags] : subs) {
    const auto r = run(std::string(sub) + " --help");
    EXPECT_EQ(r.code, 0) << sub;
    for (const char* f : flags) EXPECT_NE(r.out.find(f), std::string::npos) << sub << " missing " << f;
  }
  EXPECT_EQ(run("--help").code, 0);
}

TEST_F(Cli, SynthThenFitRecoversMycelium) {
  ASSERT_EQ(run("synth --model mycelium --out d").code, 0);
  EXPECT_TRUE(fs::exists(dir_ / "d/data.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "d/manifest.json"));
  const auto r = run("fit --data d/ --alpha 0.05 --out f");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto report = nlohmann::json::parse(slurp(dir_ / "f/fit_report.json"));
  EXPECT_EQ(report["active_terms"], nlohmann::json::array({1, 11}));
  EXPECT_EQ(report["schema_version"], 1);
  const auto model = nlohmann::json::parse(slurp(dir_ / "f/model.json"));
  EXPECT_EQ(model["name"], "mycelium_discovered");
}

TEST_F(Cli, PredictPrintsCsv) {
  const auto r = run("predict --model protein_mycelium --case tension:in-plane --points 3");
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  ASSERT_EQ(lines.size(), 4u);
  const auto last = lines.back();
  const double stress = std::stod(last.substr(last.find(',') + 1));
  EXPECT_NEAR(stress, 2.0 * 3.4689 * 4.1216 * (1.1 - 1.0 / 1.21), 1e-12);
}

TEST_F(Cli, FitWithoutDataFailsWithNoData) {
  fs::create_directories(dir_ / "empty");
  const auto r = run("fit --data empty");
  EXPECT_EQ(r.code, 5);
  EXPECT_NE(r.err.find("NoData"), std::string::npos) << r.err;
  EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);
}

TEST_F(Cli, DistinctExitCodes) {
  EXPECT_EQ(run("fit --bogus").code, 2);
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("predict --model nope").code, 2);
  EXPECT_EQ(run("predict --case tension").code, 2);
  std::ofstream(dir_ / "bad.csv") << "material,mode,direction,replicate,loading,stress_kPa\n"
                                     "m,tension,in-plane,mean,1,0\nm,tension,in-plane,mean,1.5,3\n";
  const auto v = run("fit --data bad.csv");
  EXPECT_EQ(v.code, 3);
  EXPECT_NE(v.err.find("OutOfRange"), std::string::npos);
  EXPECT_EQ(run("fit --data bad.csv --permissive --epochs 10 --out p").code, 0);
  EXPECT_EQ(run("fit --data missing.csv").code, 5);
}

TEST_F(Cli, IdenticalRunsGiveIdenticalFiles) {
  // The same invocations run from two working directories.
  for (const char* cwd : {"a", "b"}) {
    ASSERT_EQ(run("synth --model fruiting_body --noise 0.02 --seed 7 --replicates 5 --out s", cwd).code, 0);
    ASSERT_EQ(run("fit --data s --epochs 2000 --out f", cwd).code, 0);
    ASSERT_EQ(run("stiffness --data s --out k", cwd).code, 0);
    ASSERT_EQ(run("report --data s --model f/model.json --svg --out r", cwd).code, 0);
    ASSERT_EQ(run("subsets --data s --max-terms 1 --out q", cwd).code, 0);
  }
  int compared = 0;
  for (const auto& e : fs::recursive_directory_iterator(dir_ / "a")) {
    if (!e.is_regular_file()) continue;
    const auto rel = fs::relative(e.path(), dir_ / "a");
    EXPECT_EQ(slurp(e.path()), slurp(dir_ / "b" / rel)) << rel;
    ++compared;
  }
  EXPECT_GT(compared, 20);
  const auto manifest = nlohmann::json::parse(slurp(dir_ / "a/f/manifest.json"));
  EXPECT_EQ(manifest["command"], "fit");
  EXPECT_EQ(manifest["config"]["alpha"], 0.05);
  EXPECT_EQ(manifest["outputs"].size(), 2u);
}

TEST_F(Cli, StiffnessAndSubsets) {
  ASSERT_EQ(run("synth --model mycelium --noise 0.05 --replicates 10 --seed 3 --out s").code, 0);
  const auto k = run("stiffness --data s --out k");
  ASSERT_EQ(k.code, 0) << k.err;
  EXPECT_NE(k.out.find("anisotropic"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir_ / "k/stiffness_report.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "k/stiffness_samples.csv"));

  ASSERT_EQ(run("synth --model protein_mycelium --points 11 --out p").code, 0);
  const auto s = run("subsets --data p --max-terms 1 --out q");
  ASSERT_EQ(s.code, 0) << s.err;
  const auto doc = nlohmann::json::parse(slurp(dir_ / "q/subsets.json"));
  EXPECT_EQ(doc["subsets"][0]["terms"], nlohmann::json::array({1}));
}

TEST_F(Cli, PredictToDirectoryWritesManifest) {
  ASSERT_EQ(run("predict --model mycelium --case shear:cross-plane --points 5 --out o").code, 0);
  EXPECT_TRUE(fs::exists(dir_ / "o/prediction.csv"));
  const auto m = nlohmann::json::parse(slurp(dir_ / "o/manifest.json"));
  EXPECT_EQ(m["config"]["loading"], 0.1);
}
