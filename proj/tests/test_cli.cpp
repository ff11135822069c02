#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dynkin/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = dynkin::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = fs::temp_directory_path() / ("dynkin_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir_);
    for (const auto& name : dynkin::gallery_names()) {
      auto r = run({"gallery", name, "--emit"});
      ASSERT_EQ(r.code, 0);
      std::ofstream(dir_ / (name + ".json")) << r.out;
    }
  }
  static void TearDownTestSuite() { fs::remove_all(dir_); }
  static std::string path(const std::string& name) { return (dir_ / (name + ".json")).string(); }
  static fs::path dir_;
};

fs::path Cli::dir_;

}  // namespace

TEST_F(Cli, SolveCountable) {
  auto r = run({"solve", "--scenario", path("countable"), "--exhaustive", "--expect", "sharp"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("fixed_point S=ALL T=∅ verdict=sharp certificate=exhaustive"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("n=0 player1 S = ∅"), std::string::npos);
}

TEST_F(Cli, ExpectMismatchExitsOne) {
  auto r = run({"solve", "--scenario", path("countable"), "--expect", "soft-not-sharp"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("expected soft-not-sharp"), std::string::npos);
}

TEST_F(Cli, SolveJsonRecords) {
  auto r = run({"solve", "--scenario", path("countable"), "--format", "json"});
  ASSERT_EQ(r.code, 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  auto j = nlohmann::json::parse(line);
  EXPECT_EQ(j["n"], 0);
  EXPECT_EQ(j["player"], 1);
  EXPECT_EQ(j["policy_bitmask"], "0x0000");
  EXPECT_TRUE(j["policy_labels"].empty());
  std::string last;
  while (std::getline(in, line)) last = line;
  auto fin = nlohmann::json::parse(last);
  EXPECT_EQ(fin["terminal"], "fixed_point");
  EXPECT_EQ(fin["coarse"], "sharp");
}

TEST_F(Cli, VerifyExtendedLimit) {
  std::string xs;
  for (int k = 0; k < 12; ++k) xs += (k ? "," : "") + std::string("x") + std::to_string(k);
  auto r = run({"verify", "--scenario", path("extended"), "--S", xs, "--T", "y,z", "--exhaustive",
                "--expect", "soft-not-sharp"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("witness=player2@z"), std::string::npos) << r.out;
}

TEST_F(Cli, GammaAndEnumerate) {
  auto g = run({"gamma", "--scenario", path("three-state"), "--player", "2", "--other", "a,b"});
  EXPECT_EQ(g.code, 0);
  EXPECT_NE(g.out.find("fixed_point c"), std::string::npos) << g.out;
  auto e = run({"enumerate", "--scenario", path("three-state"), "--player", "1", "--other", "ALL"});
  EXPECT_EQ(e.code, 0);
  EXPECT_NE(e.out.find("count"), std::string::npos);
}

TEST_F(Cli, SolveReportsCycle) {
  auto r = run({"solve", "--scenario", path("three-state"), "--start", "", "--expect", "cycle"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("cycle ∅ -> c -> b -> a,c -> ∅"), std::string::npos) << r.out;
}

TEST_F(Cli, Check) {
  auto r = run({"check", "--scenario", path("three-state")});
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("player1:supermartingale"), std::string::npos);
  EXPECT_NE(r.out.find("fails at b,c"), std::string::npos) << r.out;
  auto w = run({"check", "--scenario", path("countable"), "--mode", "war-of-attrition", "--format", "json"});
  EXPECT_EQ(w.code, 0) << w.out;
}

TEST_F(Cli, Simulate) {
  auto r = run({"simulate", "--scenario", path("countable"), "--S", "x0", "--T", "x3", "--x", "x5",
                "--paths", "2000", "--seed", "5", "--expect", "agree"});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_NE(r.out.find("seed=5 paths=2000"), std::string::npos);
}

TEST_F(Cli, Negotiate) {
  auto r = run({"negotiate", "--m", "10", "--expect", "prop-beta1<=beta2"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("beta_bar=2 beta_underbar=0.3"), std::string::npos) << r.out;
  std::ofstream(dir_ / "params.json") << R"({"p": 0.4, "beta1": 3, "beta2": 0.1, "m": 6})";
  auto c = run({"negotiate", "--params", (dir_ / "params.json").string(), "--format", "json"});
  ASSERT_EQ(c.code, 0) << c.err;
  std::istringstream in(c.out);
  std::string line, last;
  while (std::getline(in, line)) last = line;
  EXPECT_EQ(nlohmann::json::parse(last)["case"], "case3-infinite");
}

TEST_F(Cli, GalleryAssert) {
  auto r = run({"gallery", "three-state", "--assert"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("soft equilibria: 0"), std::string::npos);
  EXPECT_EQ(run({"gallery", "three-state", "--assert", "--emit"}).code, 2);
}

TEST_F(Cli, InputErrorsExitTwo) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"solve"}).code, 2);
  EXPECT_EQ(run({"solve", "--scenario", "/nonexistent.json"}).code, 2);
  auto bad = run({"verify", "--scenario", path("three-state"), "--S", "q"});
  EXPECT_EQ(bad.code, 2);
  EXPECT_NE(bad.err.find("unknown state label 'q'"), std::string::npos);
  std::ofstream(dir_ / "broken.json") << R"({"states": ["a"], "transitions": [[0.5]], "players": []})";
  auto broken = run({"check", "--scenario", (dir_ / "broken.json").string()});
  EXPECT_EQ(broken.code, 2);
  EXPECT_NE(broken.err.find("/transitions/0"), std::string::npos) << broken.err;
  dynkin::NegotiationParams prm;
  prm.m = 8;
  std::ofstream(dir_ / "lattice.json") << dynkin::dump_scenario(dynkin::build_negotiation(prm));
  auto big = run({"verify", "--scenario", (dir_ / "lattice.json").string(), "--exhaustive"});
  EXPECT_EQ(big.code, 2);
  EXPECT_NE(big.err.find("at most 14 states"), std::string::npos) << big.err;
}

TEST_F(Cli, HelpExitsZero) {
  auto r = run({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("solve"), std::string::npos);
}
