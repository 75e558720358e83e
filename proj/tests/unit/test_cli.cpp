#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "commands.hpp"
#include "objhc/dendrogram.hpp"

namespace objhc::cli {
namespace {

namespace fs = std::filesystem;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "objhc");
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("objhc_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string make_data(int per = 25) {
    const auto p = path("data.csv");
    const auto r = run({"--seed", "7", "gen", "--clusters", "4", "--per", std::to_string(per),
                        "--dim", "16", "--sep", "10", "-o", p});
    EXPECT_EQ(r.code, 0) << r.err;
    return p;
  }

  fs::path dir_;
};

TEST_F(Cli, GenWritesDeterministicCsv) {
  const auto p = make_data();
  const auto first = slurp(p);
  int rows = 0;
  for (char c : first) rows += c == '\n';
  EXPECT_EQ(rows, 100);
  make_data();
  EXPECT_EQ(slurp(p), first);
  EXPECT_TRUE(fs::exists(p + ".manifest.json"));
  const auto manifest = nlohmann::json::parse(slurp(p + ".manifest.json"));
  EXPECT_EQ(manifest["seed"], 7);
  EXPECT_TRUE(manifest.contains("wall_clock_seconds"));
  EXPECT_TRUE(manifest.contains("peak_memory_kb"));
}

TEST_F(Cli, GenRejectsZeroPer) {
  const auto r = run({"gen", "--per", "0", "-o", path("x.csv")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("InvalidParam"), std::string::npos);
}

TEST_F(Cli, GenBinary) {
  const auto p = path("data.f32");
  EXPECT_EQ(run({"gen", "--per", "3", "--data-format", "f32", "-o", p}).code, 0);
  EXPECT_EQ(fs::file_size(p), 4u * 12u * 16u);
  const auto t = path("t.json");
  EXPECT_EQ(run({"cluster", p, "--data-format", "f32", "--algo", "avg", "-o", t}).code, 0);
}

TEST_F(Cli, ClusterProducesValidDeterministicTree) {
  const auto data = make_data();
  const auto t1 = path("t1.json"), t2 = path("t2.json");
  const std::vector<std::string> base{"--seed", "1", "cluster", "--algo", "bppc", "--measure",
                                      "l2sq", "--theta", "64", "--delta", "0.1",
                                      "--label-column", "0", data, "-o"};
  auto a1 = base, a2 = base;
  a1.push_back(t1);
  a2.push_back(t2);
  const auto r = run(a1);
  ASSERT_EQ(r.code, 0) << r.err;
  ASSERT_EQ(run(a2).code, 0);
  EXPECT_EQ(slurp(t1), slurp(t2));
  const auto tree = deserialize(slurp(t1));
  EXPECT_EQ(tree.n_leaves(), 100);
  EXPECT_TRUE(tree.is_binary());
  const auto manifest = nlohmann::json::parse(slurp(t1 + ".manifest.json"));
  EXPECT_EQ(manifest["algorithm"]["theta"], 64);
  EXPECT_EQ(manifest["measure"]["kind"], "l2sq");
}

TEST_F(Cli, ClusterErrors) {
  const auto data = make_data();
  EXPECT_EQ(run({"cluster", "--algo", "ward", "--measure", "cossim", "--label-column", "0", data,
                 "-o", path("t.json")})
                .code,
            2);
  EXPECT_EQ(run({"cluster", "--algo", "nope", data, "-o", path("t.json")}).code, 2);
  EXPECT_EQ(run({"cluster", path("missing.csv"), "-o", path("t.json")}).code, 1);
  EXPECT_EQ(run({"cluster", "--theta", "0", "--label-column", "0", data, "-o", path("t.json")}).code, 2);
  EXPECT_EQ(run({"cluster", "--label-column", "0", data, "-o", "/nonexistent/dir/t.json"}).code, 1);
  EXPECT_EQ(run({"cluster"}).code, 2);
}

TEST_F(Cli, EvalReport) {
  const auto data = make_data();
  const auto t = path("t.json");
  ASSERT_EQ(run({"cluster", "--algo", "random", "--label-column", "0", data, "-o", t}).code, 0);
  const auto a = run({"--format", "json", "eval", "--measure", "l2sq", "--label-column", "0",
                      "--dp", data, t});
  ASSERT_EQ(a.code, 0) << a.err;
  const auto b = run({"--format", "json", "eval", "--measure", "l2sq", "--label-column", "0",
                      "--dp", data, t});
  EXPECT_EQ(a.out, b.out);
  const auto report = nlohmann::json::parse(a.out);
  EXPECT_EQ(report["objective"], "ckmm");
  EXPECT_LT(std::abs(report["alpha_star"].get<double>()), 0.25);
  EXPECT_TRUE(report["purity"].is_number());

  const auto text = run({"eval", "--measure", "l2sq", "--label-column", "0", "--dp", data, t});
  EXPECT_NE(text.out.find("alpha/alpha*"), std::string::npos);
  EXPECT_NE(text.out.find("DP"), std::string::npos);
}

TEST_F(Cli, EvalMismatchAndMissingLabels) {
  const auto data = make_data();
  const auto t = path("t.json");
  {
    std::ofstream out(t);
    out << serialize(random_binary_tree(5, 1));
  }
  EXPECT_EQ(run({"eval", "--label-column", "0", data, t}).code, 2);
  {
    std::ofstream out(t);
    out << serialize(random_binary_tree(100, 1));
  }
  // Without --label-column the labels read as a coordinate, so --dp has nothing to use.
  EXPECT_EQ(run({"eval", "--dp", data, t}).code, 2);
  EXPECT_EQ(run({"eval", "--objective", "ckmm", "--label-column", "0", data, t}).code, 2);
  {
    std::ofstream out(t);
    out << "{broken";
  }
  EXPECT_EQ(run({"eval", "--label-column", "0", data, t}).code, 1);
}

TEST_F(Cli, BenchRanksAndReportsStd) {
  const auto data = make_data();
  const auto out = path("bench.json");
  const auto r = run({"--seed", "3", "bench", "--measure", "l2sq", "--theta", "32", "--reps", "3",
                      "--algos", "random,randomcut,bppc", "--label-column", "0", data, "-o", out});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("std"), std::string::npos);
  const auto doc = nlohmann::json::parse(slurp(out));
  ASSERT_EQ(doc["results"].size(), 3u);
  EXPECT_EQ(doc["results"][0]["algorithm"], "bppc");
  for (const auto& row : doc["results"]) EXPECT_TRUE(row.contains("alpha_star_std"));
}

TEST_F(Cli, BenchPartialFailure) {
  const auto data = make_data();
  const auto r = run({"bench", "--measure", "cossim", "--reps", "1", "--algos", "random,ward",
                      "--label-column", "0", data});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("FAILED"), std::string::npos);
  const auto all_bad = run({"bench", "--measure", "cossim", "--reps", "1", "--algos", "ward",
                            "--label-column", "0", data});
  EXPECT_EQ(all_bad.code, 3);
}

TEST_F(Cli, OracleAgrees) {
  const auto p = path("small.csv");
  ASSERT_EQ(run({"--seed", "2", "gen", "--clusters", "2", "--per", "3", "--dim", "3", "-o", p}).code, 0);
  const auto r = run({"--format", "json", "oracle", "--measure", "l2sq", "--exhaustive",
                      "--max2sat", "--mc", "200", "--label-column", "0", p});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_TRUE(doc["agree"].get<bool>());
  EXPECT_EQ(doc["trees_enumerated"], 945);
  EXPECT_LE(doc["opt"].get<double>(), doc["upper_bound"].get<double>() * (1 + 1e-12));
}

TEST(Format, Pairs) {
  EXPECT_EQ(format_pair(0.874, 0.451), ".87/.45");
  EXPECT_EQ(format_pair(1.0, -0.05), "1.00/-.05");
  EXPECT_EQ(format_fraction(-0.0001), ".00");
}

TEST(ExitCodes, Map) {
  EXPECT_EQ(exit_code_for(ErrorKind::Io), 1);
  EXPECT_EQ(exit_code_for(ErrorKind::InvalidParam), 2);
  EXPECT_EQ(exit_code_for(ErrorKind::MeasureMismatch), 2);
  EXPECT_EQ(exit_code_for(ErrorKind::Infeasible), 3);
}

}  // namespace
}  // namespace objhc::cli
