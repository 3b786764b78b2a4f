#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "gamecond/cli.hpp"
#include "oracles.hpp"

using namespace gamecond;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string data(const std::string& name) { return std::string(GAMECOND_DATA_DIR) + "/" + name; }

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("gamecond_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p.string();
  }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, KappaOnPennies) {
  const auto r = run_cli({"kappa", "--input", data("matching_pennies.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j["result"]["kappa"].get<double>(), 0.70711, 1e-5);
  EXPECT_EQ(j["command"], "kappa");
  EXPECT_EQ(j["result"]["argmax_config"]["I"], nlohmann::json::array({1}));
  EXPECT_EQ(j["result"]["argmax_config"]["K"], nlohmann::json::array({1, 2}));
  EXPECT_EQ(j["result"]["argmax_config"]["J"], nlohmann::json::array({2}));
  EXPECT_TRUE(j["diagnostics"].contains("timestamp"));
}

TEST_F(CliTest, TopLevelKeyOrder) {
  const auto r = run_cli({"value", "--input", data("matching_pennies.csv"), "--no-timestamp"});
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::ordered_json::parse(r.out);
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  EXPECT_EQ(keys, (std::vector<std::string>{"command", "input", "result", "diagnostics", "tolerances"}));
  EXPECT_FALSE(j["diagnostics"].contains("timestamp"));
}

TEST_F(CliTest, ConstantGameExitsThree) {
  for (const char* cmd : {"kappa", "kappa-oracle"}) {
    const auto r = run_cli({cmd, "--input", data("constant.csv")});
    EXPECT_EQ(r.code, 3);
    EXPECT_NE(r.err.find("all strategy profiles are equilibria"), std::string::npos) << r.err;
  }
  const auto r = run_cli({"reg", "--input", data("constant.csv"), "--point", "0.5,0.5;1,0"});
  EXPECT_EQ(r.code, 3);
}

TEST_F(CliTest, ValueOnRps) {
  const auto r = run_cli({"value", "--input", data("rock_paper_scissors.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j["result"]["value"].get<double>(), 0.0, 1e-12);
  EXPECT_NE(r.out.find("\"value\": 0.0"), std::string::npos);
}

TEST_F(CliTest, RegularityBound) {
  const auto r = run_cli({"reg", "--input", data("matching_pennies.csv"), "--point", "1,0;0.5,0.5"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j["result"]["regularity_bound"].get<double>(), 1.0 / std::sqrt(2.0), 1e-12);
}

TEST_F(CliTest, MalformedInputsExitTwo) {
  const std::string bad_number = write("bad.csv", "1,x\n2,3\n");
  const std::string ragged = write("ragged.csv", "1,2\n3\n");
  const std::string nan = write("nan.csv", "1,nan\n");
  const std::string empty = write("empty.csv", "\n");
  const std::string bad_json = write("bad.json", "{\"matrix\": [[1, 2], [3]]");
  for (const auto& path : {bad_number, ragged, nan, empty, bad_json}) {
    const auto r = run_cli({"value", "--input", path});
    EXPECT_EQ(r.code, 2) << path;
    EXPECT_FALSE(r.err.empty());
  }
  EXPECT_EQ(run_cli({"value", "--input", (dir_ / "missing.csv").string()}).code, 2);
  EXPECT_EQ(run_cli({"value"}).code, 2);
  EXPECT_EQ(run_cli({"--input", data("matching_pennies.csv")}).code, 2);
  EXPECT_EQ(run_cli({"frobnicate", "--input", data("matching_pennies.csv")}).code, 2);
  EXPECT_EQ(run_cli({"solve", "--input", data("matching_pennies.csv"), "--eps", "-1"}).code, 2);
  EXPECT_EQ(run_cli({"reg", "--input", data("matching_pennies.csv"), "--point", "1,0"}).code, 2);
  EXPECT_EQ(run_cli({"reg", "--input", data("matching_pennies.csv"), "--point", "0.9,0;1,0"}).code, 2);
  EXPECT_EQ(run_cli({"value", "--input", data("matching_pennies.csv"), "--format", "xml"}).code, 2);
}

TEST_F(CliTest, JsonInputAndFormatOverride) {
  const auto a = run_cli({"value", "--input", data("skewed.json"), "--no-timestamp"});
  ASSERT_EQ(a.code, 0) << a.err;
  const std::string renamed = write("skewed.txt", "{\"matrix\": [[3, -1, 0.5], [-2, 4, 1], [0, -0.5, -3]]}");
  const auto b = run_cli({"value", "--input", renamed, "--format", "json", "--no-timestamp"});
  ASSERT_EQ(b.code, 0) << b.err;
  EXPECT_EQ(nlohmann::json::parse(a.out)["result"], nlohmann::json::parse(b.out)["result"]);
}

TEST_F(CliTest, OutputRoundTripIsBitExact) {
  const std::string out = (dir_ / "report.json").string();
  const auto r = run_cli({"kappa", "--input", data("skewed.json"), "--output", out});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(out);
  const auto j = nlohmann::json::parse(in);
  const auto game = io::load_game(data("skewed.json"));
  EXPECT_EQ(j["result"]["kappa"].get<double>(), condition_measure(game).kappa);

  const std::string vout = (dir_ / "value.json").string();
  ASSERT_EQ(run_cli({"value", "--input", data("skewed.json"), "--output", vout}).code, 0);
  std::ifstream vin(vout);
  EXPECT_EQ(nlohmann::json::parse(vin)["result"]["value"].get<double>(), game_value(game).value);
}

TEST_F(CliTest, DeterministicWithoutTimestamp) {
  for (const std::vector<std::string>& args :
       {std::vector<std::string>{"kappa-oracle", "--input", data("skewed.json"), "--samples", "500", "--seed", "9",
                                 "--no-timestamp"},
        std::vector<std::string>{"vz-check", "--input", data("skewed.json"), "--trials", "20", "--seed", "4",
                                 "--no-timestamp"},
        std::vector<std::string>{"kappa", "--input", data("skewed.json"), "--threads", "3", "--no-timestamp"}}) {
    const auto a = run_cli(args);
    const auto b = run_cli(args);
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
  }
}

TEST_F(CliTest, ThreadsFromEnvironment) {
  ::setenv("GAMECOND_THREADS", "3", 1);
  const auto a = run_cli({"kappa", "--input", data("matching_pennies.csv"), "--no-timestamp"});
  const auto b = run_cli({"kappa", "--input", data("matching_pennies.csv"), "--threads", "2", "--no-timestamp"});
  ::unsetenv("GAMECOND_THREADS");
  EXPECT_EQ(nlohmann::json::parse(a.out)["diagnostics"]["threads"], 3);
  EXPECT_EQ(nlohmann::json::parse(b.out)["diagnostics"]["threads"], 2);
}

TEST_F(CliTest, SolveAndIterationLimit) {
  const auto ok = run_cli({"solve", "--input", data("skewed.json"), "--eps", "1e-4"});
  ASSERT_EQ(ok.code, 0) << ok.err;
  EXPECT_LE(nlohmann::json::parse(ok.out)["result"]["final_gap"].get<double>(), 1e-4);

  const std::string out = (dir_ / "limit.json").string();
  const auto r = run_cli({"solve", "--input", data("skewed.json"), "--eps", "1e-9", "--max-iter", "10", "--output", out});
  EXPECT_EQ(r.code, 4);
  std::ifstream in(out);
  const auto j = nlohmann::json::parse(in);
  EXPECT_EQ(j["result"]["status"], "iteration_limit_exceeded");
  EXPECT_EQ(j["result"]["iterations"], 10);
}

TEST_F(CliTest, ReportCsv) {
  const auto r = run_cli({"report", "--input", data("skewed.json"), "--ladder", "1e-1,1e-2,1e-3"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "epsilon,iterations,final_gap");
  int rows = 0;
  long prev = -1;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string eps, its, gap;
    std::getline(ss, eps, ',');
    std::getline(ss, its, ',');
    std::getline(ss, gap, ',');
    EXPECT_LE(std::stod(gap), std::stod(eps));
    EXPECT_GE(std::stol(its), prev);
    prev = std::stol(its);
    ++rows;
  }
  EXPECT_EQ(rows, 3);
  EXPECT_EQ(run_cli({"report", "--input", data("skewed.json"), "--ladder", "1e-3,1e-2"}).code, 2);
}

TEST_F(CliTest, VzCheck) {
  const auto r = run_cli({"vz-check", "--input", data("matching_pennies.csv"), "--trials", "50"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["result"]["trials"], 50);
  EXPECT_TRUE(j["result"]["within_tolerance"].get<bool>());
}

TEST_F(CliTest, KappaWithOracleEstimate) {
  const auto r = run_cli({"kappa", "--input", data("matching_pennies.csv"), "--grid-step", "0.01"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_LE(j["result"]["oracle_estimate"].get<double>(), j["result"]["kappa"].get<double>() + 1e-9);
}
