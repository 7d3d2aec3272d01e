#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "test_util.hpp"

using namespace sgcca;
namespace fs = std::filesystem;

namespace {

const fs::path kRoot = fs::temp_directory_path() / "sgcca_cli_tests";

int run(const std::string& args) {
  const std::string cmd = std::string(SGCCA_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

std::string small_synth_flags() { return "--dims 30,45,51 --samples 24"; }

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    fs::remove_all(kRoot);
    fs::create_directories(kRoot);
  }
  fs::path dir(const std::string& name) const { return kRoot / name; }
};

}  // namespace

TEST_F(Cli, SynthIsDeterministic) {
  ASSERT_EQ(run("synth " + small_synth_flags() + " --seed 7 --out " + dir("a").string()), 0);
  ASSERT_EQ(run("synth " + small_synth_flags() + " --seed 7 --out " + dir("b").string()), 0);
  for (const char* f : {"view_1.csv", "view_2.csv", "view_3.csv", "support_1.csv"})
    EXPECT_EQ(slurp(dir("a") / f), slurp(dir("b") / f)) << f;
  EXPECT_EQ(load_matrix((dir("a") / "view_2.csv").string()).rows(), 45);
  const auto manifest = read_json(dir("a") / "manifest.json");
  EXPECT_EQ(manifest["command"], "synth");
  EXPECT_EQ(manifest["seed"], 7);
  EXPECT_TRUE(manifest.contains("wall_clock_seconds"));
  EXPECT_EQ(manifest["config"]["samples"], 24);
}

TEST_F(Cli, SynthDefaultsAreDeskScale) {
  ASSERT_EQ(run("synth --out " + dir("d").string()), 0);
  const Matrix v3 = load_matrix((dir("d") / "view_3.csv").string());
  EXPECT_EQ(v3.rows(), 1700);
  EXPECT_EQ(v3.cols(), 100);
}

TEST_F(Cli, SynthUnwritableOutput) {
  std::ofstream(dir("file")) << "x";
  EXPECT_NE(run("synth " + small_synth_flags() + " --out " + (dir("file") / "sub").string()), 0);
}

TEST_F(Cli, FitGccaOnNoiselessViews) {
  Rng rng(1);
  const Matrix u = fixtures::gaussian(rng, 1, 20);
  for (int j = 1; j <= 3; ++j)
    save_matrix(fixtures::gaussian(rng, 5 + j, 1) * u, (dir("v") += std::to_string(j) + ".csv").string());
  const std::string views = dir("v1.csv").string() + " " + dir("v2.csv").string() + " " +
                            dir("v3.csv").string();
  ASSERT_EQ(run("fit --algo gcca --no-center --views " + views + " --out " + dir("m").string()), 0);
  EXPECT_FALSE(fs::exists(dir("m") / "trace.csv"));
  ASSERT_EQ(run("eval --model " + (dir("m") / "model.json").string() + " --views " + views +
                " --out " + dir("r.json").string()),
            0);
  const auto report = read_json(dir("r.json"));
  EXPECT_LE(report["reconstruction_error"].get<double>(), 1e-10);
  EXPECT_EQ(report["aroc_pairs"].size(), 3u);
  EXPECT_TRUE(report["aroc_avg"].is_number());
  EXPECT_TRUE(fs::exists(dir("r.json.manifest.json")));
}

TEST_F(Cli, FitAdmmWritesTraceAndDefaults) {
  ASSERT_EQ(run("synth " + small_synth_flags() + " --out " + dir("s").string()), 0);
  const std::string views = (dir("s") / "view_1.csv").string() + " " +
                            (dir("s") / "view_2.csv").string() + " " +
                            (dir("s") / "view_3.csv").string();
  ASSERT_EQ(run("fit --algo sgcca-admm --max-iter 100 --views " + views + " --out " + dir("m").string()), 0);
  const auto manifest = read_json(dir("m") / "manifest.json");
  EXPECT_EQ(manifest["config"]["beta_max"], 1e4);
  EXPECT_EQ(manifest["config"]["tol1"], 1e-5);
  EXPECT_EQ(manifest["config"]["tol2"], 1e-5);
  EXPECT_EQ(manifest["inputs"].size(), 3u);
  const std::string trace = slurp(dir("m") / "trace.csv");
  EXPECT_EQ(trace.rfind("k,beta,objective", 0), 0u);
  const auto model = load_model((dir("m") / "model.json").string());
  EXPECT_EQ(model.algorithm, Algorithm::sgcca_admm);

  // Held-out style evaluation: a different data file omits reconstruction error.
  ASSERT_EQ(run("synth " + small_synth_flags() + " --seed 99 --out " + dir("t").string()), 0);
  const std::string test_views = (dir("t") / "view_1.csv").string() + " " +
                                 (dir("t") / "view_2.csv").string() + " " +
                                 (dir("t") / "view_3.csv").string();
  ASSERT_EQ(run("eval --model " + (dir("m") / "model.json").string() + " --views " + test_views +
                " --retrieval-pairs 1-3 --out " + dir("r.json").string()),
            0);
  const auto report = read_json(dir("r.json"));
  EXPECT_TRUE(report["reconstruction_error"].is_null());
  EXPECT_EQ(report["aroc_pairs"].size(), 1u);
  EXPECT_TRUE(report["aroc_pairs"].contains("1-3"));
}

TEST_F(Cli, LabelsGiveAccuracy) {
  Rng rng(2);
  std::vector<std::string> labels;
  Matrix x(4, 30);
  for (Index c = 0; c < 30; ++c) {
    const bool pos = c % 2 == 0;
    labels.push_back(pos ? "p" : "n");
    x.col(c) = 0.1 * fixtures::gaussian(rng, 4, 1);
    x(0, c) += pos ? 2.0 : -2.0;
  }
  save_matrix(x, dir("x.csv").string());
  save_labels(labels, dir("y.txt").string());
  ASSERT_EQ(run("fit --algo gcca --views " + dir("x.csv").string() + " --labels " +
                dir("y.txt").string() + " --ell 0 --out " + dir("m").string()),
            0);
  ASSERT_EQ(run("eval --model " + (dir("m") / "model.json").string() + " --views " +
                dir("x.csv").string() + " --labels " + dir("y.txt").string() + " --out " +
                dir("r.json").string()),
            0);
  EXPECT_DOUBLE_EQ(read_json(dir("r.json"))["accuracy"].get<double>(), 1.0);
}

TEST_F(Cli, InputErrorsExitWithTwo) {
  ASSERT_EQ(run("synth " + small_synth_flags() + " --out " + dir("s").string()), 0);
  const auto v1 = (dir("s") / "view_1.csv").string();
  EXPECT_EQ(run("fit --algo gcca --views " + v1 + " " + dir("nope.csv").string() + " --out " +
                dir("m").string()),
            2);
  EXPECT_FALSE(fs::exists(dir("m")));

  save_matrix(Matrix::Ones(3, 5), dir("short.csv").string());
  const std::string cmd = std::string(SGCCA_CLI_PATH) + " fit --algo gcca --views " + v1 + " " +
                          dir("short.csv").string() + " --out " + dir("m").string() + " 2> " +
                          dir("err.txt").string();
  const int status = std::system(cmd.c_str());
  EXPECT_EQ(WEXITSTATUS(status), 2);
  EXPECT_NE(slurp(dir("err.txt")).find("short.csv"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir("m")));

  EXPECT_EQ(run("fit --algo pca --views " + v1 + " " + v1 + " --out " + dir("m").string()), 2);
  EXPECT_EQ(run("bogus"), 2);
  EXPECT_EQ(run("eval --model " + v1 + " --views " + v1 + " --out " + dir("r.json").string()), 2);
}

TEST_F(Cli, ModelDataMismatch) {
  ASSERT_EQ(run("synth " + small_synth_flags() + " --out " + dir("s").string()), 0);
  const std::string views = (dir("s") / "view_1.csv").string() + " " +
                            (dir("s") / "view_2.csv").string() + " " +
                            (dir("s") / "view_3.csv").string();
  ASSERT_EQ(run("fit --algo gcca --views " + views + " --out " + dir("m").string()), 0);
  const std::string swapped = (dir("s") / "view_2.csv").string() + " " +
                              (dir("s") / "view_1.csv").string() + " " +
                              (dir("s") / "view_3.csv").string();
  EXPECT_EQ(run("eval --model " + (dir("m") / "model.json").string() + " --views " + swapped +
                " --out " + dir("r.json").string()),
            2);
}

TEST_F(Cli, BenchIsReproducible) {
  const std::string flags = "bench " + small_synth_flags() + " --repeats 2 --seed 5 --max-iter 200";
  ASSERT_EQ(run(flags + " --out " + dir("a").string()), 0);
  ASSERT_EQ(setenv("SGCCA_NUM_THREADS", "1", 1), 0);
  ASSERT_EQ(run(flags + " --out " + dir("b").string()), 0);
  unsetenv("SGCCA_NUM_THREADS");
  EXPECT_EQ(slurp(dir("a") / "bench.json"), slurp(dir("b") / "bench.json"));
  const auto bench = read_json(dir("a") / "bench.json");
  EXPECT_EQ(bench["runs"].size(), 2u);
  EXPECT_TRUE(bench["aggregates"]["sgcca-admm"].contains("sparsity_1"));
  EXPECT_EQ(read_json(dir("a") / "manifest.json")["command"], "bench");
}
