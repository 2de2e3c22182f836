#include "randgener/cli.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace randgener;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = randgener::cli::run(std::move(args), out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("randgener-cli-" + std::to_string(::getpid()) + "-" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

std::string slurp(const std::string& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_F(CliTest, SetupWritesIdentityAndTrapdoorFiles) {
  auto r = invoke({"setup", "--n", "5", "--lambda", "16", "--T", "100", "--scheme", "pietrzak", "--out", path("s")});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("128"), std::string::npos);
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(path("s"))) {
    (void)e;
    ++files;
  }
  EXPECT_EQ(files, 6u);
  auto ids = randgener::cli::read_json_file(path("s/identities.json"));
  EXPECT_EQ(ids["identities"].size(), 5u);
  EXPECT_EQ(ids["identities"][0]["pp"]["T"], 128);
}

TEST_F(CliTest, RunThenVerify) {
  ASSERT_EQ(invoke({"setup", "--n", "3", "--lambda", "16", "--T", "64", "--out", path("s")}).code, 0);
  auto r = invoke({"run", "--setup", path("s"), "--rounds", "3", "--out", path("t.jsonl")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("P2"), std::string::npos);
  auto v = invoke({"verify", path("t.jsonl"), "--identities", path("s/identities.json")});
  EXPECT_EQ(v.code, 0) << v.out;
  EXPECT_NE(v.out.find("accept"), std::string::npos);
}

TEST_F(CliTest, SamplesRunAndVerify) {
  std::string samples = RANDGENER_SAMPLE_DIR;
  auto r = invoke({"run", "--config", samples + "/config.json", "--script", samples + "/script.json", "--T", "256",
                "--lambda", "24", "--out", path("t.jsonl")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(invoke({"verify", path("t.jsonl")}).code, 0);
}

TEST_F(CliTest, OverridesAcceptBothSpellings) {
  auto a = invoke({"run", "--n", "3", "--lambda", "16", "--T", "32", "--rounds", "1", "--reward_unit", "3",
                "--penalty-unit", "4", "--out", path("a.jsonl")});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_NE(a.out.find("P0  3"), std::string::npos) << a.out;
}

TEST_F(CliTest, VerifyRejectsTamperedTranscript) {
  ASSERT_EQ(invoke({"run", "--n", "3", "--lambda", "16", "--T", "32", "--rounds", "2", "--out", path("t.jsonl")}).code, 0);
  auto text = slurp(path("t.jsonl"));
  text[text.size() / 2] ^= 0x04;
  std::ofstream(path("bad.jsonl"), std::ios::binary) << text;
  auto v = invoke({"verify", path("bad.jsonl")});
  EXPECT_EQ(v.code, 1);
  EXPECT_NE(v.out.find("reject"), std::string::npos);
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(invoke({}).code, 2);
  EXPECT_EQ(invoke({"frobnicate"}).code, 2);
  EXPECT_EQ(invoke({"run", "--n", "notanumber"}).code, 2);
  EXPECT_EQ(invoke({"run", "--scheme", "boneh"}).code, 2);
  EXPECT_EQ(invoke({"run", "--rounds", "0", "--out", path("x.jsonl")}).code, 1);
  EXPECT_EQ(invoke({"run", "--n", "1", "--out", path("x.jsonl")}).code, 1);
  EXPECT_EQ(invoke({"verify", path("missing.jsonl")}).code, 1);
  EXPECT_EQ(invoke({"verify"}).code, 2);
  EXPECT_EQ(invoke({"--help"}).code, 0);
}

TEST_F(CliTest, BenchJson) {
  auto r = invoke({"bench", "--lambda", "32", "--log2-min", "6", "--log2-max", "7", "--json"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto rows = json::parse(r.out);
  ASSERT_EQ(rows.size(), 4u);
  for (const auto& row : rows) EXPECT_TRUE(row["consistent"].get<bool>());
  EXPECT_EQ(invoke({"bench", "--log2-min", "9", "--log2-max", "8"}).code, 1);
}

TEST_F(CliTest, FixturesCommandReproducesGoldenFile) {
  ASSERT_EQ(invoke({"fixtures", "--out", path("g.json")}).code, 0);
  EXPECT_EQ(json::parse(slurp(path("g.json"))), json::parse(slurp(std::string(RANDGENER_FIXTURE_DIR) + "/hash_golden.json")));
}
