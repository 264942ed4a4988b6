#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "dfsim/cli.hpp"

namespace {

int run_cli(const std::vector<std::string>& args, std::string* out_text = nullptr,
            std::string* err_text = nullptr) {
  std::vector<const char*> argv;
  argv.push_back("dfsim");
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int rc = dfsim::cli::run_main(static_cast<int>(argv.size()), argv.data(),
                                      out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return rc;
}

std::size_t count_lines(const std::string& s) {
  std::size_t n = 0;
  for (char c : s)
    if (c == '\n') ++n;
  return n;
}

}  // namespace

TEST(Cli, RunHadamardReportsBranchAndFidelity) {
  std::string out;
  const int rc = run_cli({"run", "--protocol", "hadamard", "--alpha", "0.6,0",
                          "--beta", "0,0.8", "--phases", "0.3,1.1", "--seed", "9"},
                         &out);
  ASSERT_EQ(rc, 0) << out;
  const auto doc = nlohmann::json::parse(out);
  EXPECT_EQ(doc.at("protocol"), "hadamard");
  EXPECT_EQ(doc.at("seed"), 9);
  EXPECT_EQ(doc.at("record").size(), 5u);
  EXPECT_NEAR(doc.at("fidelity_vs_ideal").get<double>(), 1.0, 1e-10);
  EXPECT_EQ(doc.at("output").at("amplitudes").size(), 2u);
}

TEST(Cli, RunRzUsesTheta) {
  std::string out;
  const int rc = run_cli({"run", "--protocol", "rz", "--alpha", "0.6,0", "--beta",
                          "0,0.8", "--theta", "0.9"},
                         &out);
  ASSERT_EQ(rc, 0);
  const auto doc = nlohmann::json::parse(out);
  EXPECT_NEAR(doc.at("theta").get<double>(), 0.9, 1e-15);
  EXPECT_NEAR(doc.at("fidelity_vs_ideal").get<double>(), 1.0, 1e-12);
}

TEST(Cli, RunIsByteIdenticalForSameSeed) {
  const std::vector<std::string> args{"run", "--protocol", "cphase", "--alpha",
                                      "0.6,0", "--beta", "0,0.8", "--phases",
                                      "1.0,2.0", "--seed", "4"};
  std::string a, b;
  EXPECT_EQ(run_cli(args, &a), 0);
  EXPECT_EQ(run_cli(args, &b), 0);
  EXPECT_EQ(a, b);
  EXPECT_FALSE(a.empty());
}

TEST(Cli, EnumerateJsonAndCsv) {
  std::string js;
  ASSERT_EQ(run_cli({"enumerate", "--protocol", "hadamard", "--phases", "0.3,1.1"},
                    &js),
            0);
  const auto doc = nlohmann::json::parse(js);
  EXPECT_EQ(doc.at("branch_count"), 32);
  EXPECT_NEAR(doc.at("probability_sum").get<double>(), 1.0, 1e-10);
  EXPECT_NEAR(doc.at("min_branch_fidelity").get<double>(), 1.0, 1e-10);
  ASSERT_EQ(doc.at("branches").size(), 32u);
  EXPECT_TRUE(doc.at("branches")[0].contains("output_amplitudes"));

  std::string csv;
  ASSERT_EQ(run_cli({"enumerate", "--protocol", "hadamard", "--phases", "0.3,1.1",
                     "--format", "csv"},
                    &csv),
            0);
  EXPECT_EQ(count_lines(csv), 33u);  // header + 32 branches
}

TEST(Cli, VerifyPassesAndReports) {
  std::string out;
  const int rc = run_cli({"verify", "--draws", "2", "--seed", "5"}, &out);
  EXPECT_EQ(rc, 0);
  const auto doc = nlohmann::json::parse(out);
  EXPECT_TRUE(doc.at("pass").get<bool>());
  EXPECT_EQ(doc.at("contracts").size(), 9u);
  EXPECT_EQ(doc.at("correction_table").size(), 8u);
}

TEST(Cli, NoiseBenchRowsAndFrozenMeans) {
  std::string out;
  const int rc = run_cli({"noise-bench", "--samples", "2000", "--seed", "3"}, &out);
  ASSERT_EQ(rc, 0);
  const auto doc = nlohmann::json::parse(out);
  const auto& rows = doc.at("rows");
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0].at("encoding"), "dfs");
  EXPECT_NEAR(rows[0].at("mean").get<double>(), 1.0, 1e-12);  // protected
  EXPECT_NEAR(rows[1].at("mean").get<double>(), 2.0 / std::numbers::pi, 0.05);
  EXPECT_NEAR(rows[2].at("mean").get<double>(), 0.0, 1e-12);
  EXPECT_NEAR(rows[3].at("mean").get<double>(), 0.9, 0.05);

  std::string csv;
  ASSERT_EQ(run_cli({"noise-bench", "--samples", "200", "--format", "csv"}, &csv), 0);
  EXPECT_EQ(count_lines(csv), 5u);  // header + 4 rows
  EXPECT_NE(csv.find("label,encoding,channel"), std::string::npos);
}

TEST(Cli, WorkerCountDoesNotChangeTheReport) {
  std::string base;
  ASSERT_EQ(run_cli({"noise-bench", "--samples", "400", "--seed", "11"}, &base), 0);
  ::setenv("DFS_SIM_THREADS", "3", 1);
  std::string threaded;
  ASSERT_EQ(run_cli({"noise-bench", "--samples", "400", "--seed", "11"}, &threaded), 0);
  ::unsetenv("DFS_SIM_THREADS");
  EXPECT_EQ(base, threaded);
}

TEST(Cli, ConfigFileSuppliesDefaultsFlagsWin) {
  const std::string path = ::testing::TempDir() + "dfsim_cli_config.json";
  {
    std::ofstream f(path);
    f << R"({"protocol": "rz", "alpha": [0.6, 0], "beta": [0, 0.8],
             "theta": 1.3, "seed": 21})";
  }
  std::string out;
  ASSERT_EQ(run_cli({"run", "--config", path}, &out), 0) << out;
  auto doc = nlohmann::json::parse(out);
  EXPECT_EQ(doc.at("protocol"), "rz");
  EXPECT_NEAR(doc.at("theta").get<double>(), 1.3, 1e-15);

  // An explicit flag beats the config value.
  std::string out2;
  ASSERT_EQ(run_cli({"run", "--config", path, "--theta", "0.4"}, &out2), 0);
  auto doc2 = nlohmann::json::parse(out2);
  EXPECT_NEAR(doc2.at("theta").get<double>(), 0.4, 1e-15);
  std::remove(path.c_str());
}

TEST(Cli, OutFlagWritesFileInsteadOfStdout) {
  const std::string path = ::testing::TempDir() + "dfsim_cli_out.json";
  std::string out;
  ASSERT_EQ(run_cli({"run", "--protocol", "rz", "--theta", "0.5", "--out", path},
                    &out),
            0);
  EXPECT_TRUE(out.empty());
  std::ifstream f(path);
  ASSERT_TRUE(f.good());
  std::stringstream buf;
  buf << f.rdbuf();
  EXPECT_NO_THROW(nlohmann::json::parse(buf.str()));
  std::remove(path.c_str());
}

TEST(Cli, UsageErrorsExitTwo) {
  std::string err;
  EXPECT_EQ(run_cli({"run"}, nullptr, &err), 2);  // no protocol
  EXPECT_EQ(run_cli({"run", "--protocol", "cnot"}, nullptr, &err), 2);
  EXPECT_EQ(run_cli({"run", "--protocol", "rz", "--alpha", "nonsense"}, nullptr,
                    &err),
            2);
  EXPECT_EQ(run_cli({"run", "--protocol", "rz", "--alpha", "1,0", "--beta", "1,0"},
                    nullptr, &err),
            2);  // not normalized
  EXPECT_EQ(run_cli({"run", "--protocol", "rz", "--format", "xml"}, nullptr, &err),
            2);
  EXPECT_EQ(run_cli({"--no-such-flag"}, nullptr, &err), 2);
  EXPECT_EQ(run_cli({"run", "--config", "/nonexistent/config.json"}, nullptr, &err),
            2);
  EXPECT_FALSE(err.empty());
}

TEST(Cli, HelpExitsZero) {
  std::string out;
  EXPECT_EQ(run_cli({"--help"}, &out), 0);
  EXPECT_NE(out.find("run"), std::string::npos);
  EXPECT_NE(out.find("noise-bench"), std::string::npos);
}
