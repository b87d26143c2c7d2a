#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "gigp/cli.hpp"
#include "gigp/error.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "gigp");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = gigp::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("gigp_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  fs::path dir_;
};

// Writes a simulated truncated table for data-driven commands.
std::string lotka_like(const CliTest&, const std::string& file) {
  const auto r = run({"simulate", "--nu", "-0.5", "--alpha", "0", "--theta", "0.96876", "--m", "6891", "--seed", "3",
                      "--format", "csv", "--out", file});
  EXPECT_EQ(r.code, 0) << r.err;
  return file;
}

}  // namespace

TEST_F(CliTest, ShapeEchoesScaling) {
  const auto r = run({"shape", "--nu", "0.5", "--alpha", "2", "--theta", "0.99", "--m", "1000", "--seed", "7", "--delta",
                      "0.2", "--out", path("report.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(slurp(path("report.json")));
  EXPECT_NEAR(j["scaling"]["A"].get<double>(), 99.49916, 1e-4);
  EXPECT_NEAR(j["scaling"]["B"].get<double>(), 564.1896, 1e-3);
  EXPECT_EQ(j["scaling"]["case"], "a");
  EXPECT_EQ(j["scaling"]["regime"], "regular");
  EXPECT_EQ(j["result"]["M"], 1000);
  EXPECT_GT(j["result"]["sup_distance"].get<double>(), 0.0);
  EXPECT_FALSE(j["result"]["points"].empty());
}

TEST_F(CliTest, FitWithForcedTheta) {
  const std::string data = lotka_like(*this, path("lotka.csv"));
  const auto r = run({"fit", "--data", data, "--nu", "-0.5", "--alpha", "0", "--theta", "0.96876"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_NEAR(j["scaling"]["A"].get<double>(), 31.5076, 1e-4);
  EXPECT_NEAR(j["scaling"]["B"].get<double>(), 343.5839, 1e-3);
  EXPECT_EQ(j["result"]["theta_source"], "given");
  EXPECT_TRUE(j["config"]["zero_truncated"].get<bool>());
  EXPECT_TRUE(j["result"]["alpha_hat"].is_number());

  const auto est = run({"fit", "--data", data, "--nu", "-0.5", "--alpha", "0"});
  ASSERT_EQ(est.code, 0) << est.err;
  const json e = json::parse(est.out);
  EXPECT_EQ(e["result"]["theta_source"], "mean-matched");
  EXPECT_NEAR(e["result"]["theta"].get<double>(), 0.96876, 0.01);
}

TEST_F(CliTest, RepeatedRunsAreByteIdentical) {
  for (const char* fmt : {"json", "csv", "svg"}) {
    const auto a = run({"shape", "--nu", "-0.5", "--alpha", "2", "--theta", "0.99", "--m", "500", "--seed", "11", "--format", fmt});
    const auto b = run({"shape", "--nu", "-0.5", "--alpha", "2", "--theta", "0.99", "--m", "500", "--seed", "11", "--format", fmt});
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out) << fmt;
  }
}

TEST_F(CliTest, EmbeddedConfigReproducesOutput) {
  const std::string data = lotka_like(*this, path("lotka.csv"));
  const std::vector<std::vector<std::string>> runs = {
      {"simulate", "--nu", "0.5", "--alpha", "2", "--theta", "0.99", "--m", "300", "--seed", "5"},
      {"shape", "--nu", "0.5", "--alpha", "2", "--theta", "0.99", "--m", "300", "--seed", "5", "--delta", "0.3"},
      {"fit", "--data", data, "--nu", "-0.5", "--alpha", "0", "--u-min", "-1"},
      {"gof", "--data", data, "--nu", "-0.5", "--alpha", "0", "--z-items", "100"},
      {"chaotic", "--nu", "-0.5", "--alpha", "2", "--theta", "0.99", "--m", "35", "--replicates", "60"},
      {"partition", "--n", "2500", "--seed", "4"},
  };
  int k = 0;
  for (auto args : runs) {
    for (const char* fmt : {"json", "csv", "svg"}) {
      const std::string first = path("run" + std::to_string(k) + "." + fmt);
      const std::string second = path("rerun" + std::to_string(k++) + "." + fmt);
      auto a = args;
      a.insert(a.end(), {"--format", fmt, "--out", first});
      const auto r1 = run(a);
      ASSERT_EQ(r1.code, 0) << args[0] << " " << fmt << ": " << r1.err;
      const auto r2 = run({args[0], "--config", first, "--out", second});
      ASSERT_EQ(r2.code, 0) << args[0] << " " << fmt << ": " << r2.err;
      EXPECT_EQ(slurp(first), slurp(second)) << args[0] << " " << fmt;
    }
  }
}

TEST_F(CliTest, ConfigRules) {
  const auto a = run({"partition", "--n", "100", "--out", path("p.json")});
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(run({"partition", "--config", path("p.json"), "--seed", "2"}).code, gigp::cli::kExitValidation);
  EXPECT_EQ(run({"simulate", "--config", path("p.json")}).code, gigp::cli::kExitValidation);
  EXPECT_EQ(run({"partition", "--config", path("missing.json")}).code, gigp::cli::kExitIo);
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(run({"--help"}).code, gigp::cli::kExitOk);
  EXPECT_EQ(run({}).code, gigp::cli::kExitValidation);
  EXPECT_EQ(run({"simulate", "--nu", "0.5", "--alpha", "2", "--theta", "1.5", "--m", "10"}).code, gigp::cli::kExitValidation);
  EXPECT_EQ(run({"simulate", "--nu", "0.5", "--alpha", "2", "--theta", "0.5"}).code, gigp::cli::kExitValidation);
  EXPECT_EQ(run({"simulate", "--nu", "-2", "--alpha", "2", "--theta", "0.5", "--m", "10"}).code, gigp::cli::kExitValidation);
  EXPECT_EQ(run({"simulate", "--nu", "0.5", "--alpha", "2", "--theta", "0.5", "--m", "10", "--format", "xml"}).code,
            gigp::cli::kExitValidation);
  const auto missing = run({"fit", "--data", path("nope.csv"), "--nu", "1", "--alpha", "0"});
  EXPECT_EQ(missing.code, gigp::cli::kExitIo);
  EXPECT_NE(missing.err.find("nope.csv"), std::string::npos);
  EXPECT_EQ(run({"simulate", "--nu", "0.5", "--alpha", "2", "--theta", "0.5", "--m", "10", "--out",
                 path("no/such/dir/x.json")})
                .code,
            gigp::cli::kExitIo);
}

TEST_F(CliTest, OutputDirectoryFromEnvironment) {
  ::setenv("GIGP_OUTPUT_DIR", dir_.c_str(), 1);
  const auto a = run({"partition", "--n", "400", "--format", "csv"});
  const auto b = run({"partition", "--n", "400", "--out", "named.json"});
  ::unsetenv("GIGP_OUTPUT_DIR");
  EXPECT_EQ(a.code, 0);
  EXPECT_TRUE(a.out.empty());
  EXPECT_TRUE(fs::exists(dir_ / "partition.csv"));
  EXPECT_EQ(b.code, 0);
  EXPECT_TRUE(fs::exists(dir_ / "named.json"));
}

TEST_F(CliTest, BinaryExitStatus) {
  const std::string cli = GIGP_CLI_PATH;
  auto status = [&](const std::string& args) {
    const int s = std::system((cli + " " + args + " > /dev/null 2>&1").c_str());
    return WEXITSTATUS(s);
  };
  EXPECT_EQ(status("partition --n 100"), 0);
  EXPECT_EQ(status("partition --n 0"), 1);
  EXPECT_EQ(status("fit --nu 1 --alpha 0 --data " + path("absent.csv")), 2);
}

TEST(TableCsv, ParsesCommentsAndRows) {
  const auto t = gigp::cli::parse_table_csv("# note\n# more\nj,count\n1,5\n3,2\n10,1\n");
  EXPECT_EQ(t.M(), 8);
  EXPECT_EQ(t.N(), 5 + 6 + 10);
  EXPECT_EQ(t.count(3), 2);
  EXPECT_EQ(t.count(2), 0);
}

TEST(TableCsv, RejectsMalformedInput) {
  using gigp::ValidationError;
  EXPECT_THROW(gigp::cli::parse_table_csv("j,count\r\n1,2\r\n"), ValidationError);
  EXPECT_THROW(gigp::cli::parse_table_csv("j,count,extra\n1,2,3\n"), ValidationError);
  EXPECT_THROW(gigp::cli::parse_table_csv("j,count\n1,2,3\n"), ValidationError);
  EXPECT_THROW(gigp::cli::parse_table_csv("j,count\n1,2\n1,4\n"), ValidationError);
  EXPECT_THROW(gigp::cli::parse_table_csv("j,count\n1,x\n"), ValidationError);
  EXPECT_THROW(gigp::cli::parse_table_csv("j,count\n1.5,2\n"), ValidationError);
  EXPECT_THROW(gigp::cli::parse_table_csv("1,2\n"), ValidationError);
  EXPECT_THROW(gigp::cli::parse_table_csv(""), ValidationError);
  EXPECT_THROW(gigp::cli::parse_table_csv("j,count\n-1,2\n"), ValidationError);
  EXPECT_THROW(gigp::cli::read_table_csv("/nonexistent/table.csv"), gigp::IoError);
}
