#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "pottslab_cli/cli.hpp"

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = pottslab::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::filesystem::path tmp(const std::string& name) { return std::filesystem::temp_directory_path() / name; }

}  // namespace

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run({"rate", "--d", "3", "--q", "3", "--p", "0.5"}).code, pottslab::cli::kExitOk);
  // The second-colour pattern is not the maximiser at criticality.
  EXPECT_EQ(run({"expansion-probe", "--d", "3", "--q", "3", "--critical"}).code, pottslab::cli::kExitCheckFailed);
  EXPECT_EQ(run({"rate", "--d", "3", "--q", "3"}).code, pottslab::cli::kExitUsage);
  EXPECT_EQ(run({}).code, pottslab::cli::kExitUsage);
  EXPECT_EQ(run({"no-such-command"}).code, pottslab::cli::kExitUsage);
}

TEST(Cli, UsageErrorNamesFlagAndPrintsSynopsis) {
  const auto r = run({"rate", "--d", "3", "--q", "3", "--p", "1.5"});
  EXPECT_EQ(r.code, pottslab::cli::kExitUsage);
  EXPECT_NE(r.err.find("--p"), std::string::npos);
  EXPECT_NE(r.err.find("--workers"), std::string::npos) << r.err;

  const auto bad_q = run({"iterate", "--d", "3", "--q", "1", "--p", "0.5"});
  EXPECT_EQ(bad_q.code, pottslab::cli::kExitUsage);
  EXPECT_NE(bad_q.err.find("--q"), std::string::npos);
}

TEST(Cli, PAndCriticalAreExclusive) {
  const auto r = run({"iterate", "--d", "3", "--q", "3", "--p", "0.5", "--critical"});
  EXPECT_EQ(r.code, pottslab::cli::kExitUsage);
  EXPECT_NE(r.err.find("--critical"), std::string::npos);
}

TEST(Cli, CriticalRejectsColouringCase) {
  const auto r = run({"iterate", "--d", "2", "--q", "3", "--critical"});
  EXPECT_EQ(r.code, pottslab::cli::kExitUsage);
  EXPECT_NE(r.err.find("zero-temperature"), std::string::npos);
}

TEST(Cli, RegimeMismatchIsUsageError) {
  const auto r = run({"rate", "--d", "3", "--q", "3", "--critical"});
  EXPECT_EQ(r.code, pottslab::cli::kExitUsage);
  EXPECT_NE(r.err.find("--p"), std::string::npos);
}

TEST(Cli, OutputIsDeterministicAcrossRunsAndWorkers) {
  const auto a = tmp("pottslab_cli_a.json");
  const auto b = tmp("pottslab_cli_b.json");
  for (const std::vector<std::string>& base :
       {std::vector<std::string>{"oracle-check", "--d", "2", "--q", "3", "--p", "0.3", "--n", "2"},
        std::vector<std::string>{"frozen-search", "--d", "2", "--q", "3", "--p", "0.01"},
        std::vector<std::string>{"h-max", "--d", "3", "--q", "3", "--critical", "--r", "1.001"}}) {
    auto args_a = base;
    args_a.insert(args_a.end(), {"--workers", "1", "--out", a.string()});
    auto args_b = base;
    args_b.insert(args_b.end(), {"--workers", "5", "--out", b.string()});
    EXPECT_EQ(run(args_a).code, pottslab::cli::kExitOk) << base.front();
    EXPECT_EQ(run(args_b).code, pottslab::cli::kExitOk);
    const auto text = slurp(a);
    EXPECT_FALSE(text.empty());
    EXPECT_EQ(text, slurp(b)) << base.front();
    EXPECT_EQ(run(args_a).code, pottslab::cli::kExitOk);
    EXPECT_EQ(text, slurp(a));
  }
  std::filesystem::remove(a);
  std::filesystem::remove(b);
}

TEST(Cli, JsonDocumentShape) {
  const auto r = run({"two-step-bound", "--d", "2", "--q", "3", "--p", "0.5", "--json"});
  ASSERT_EQ(r.code, pottslab::cli::kExitOk) << r.err;
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_EQ(doc["subcommand"], "two-step-bound");
  EXPECT_TRUE(doc["ok"].get<bool>());
  EXPECT_TRUE(doc.contains("tool_version"));
  EXPECT_TRUE(doc.contains("seed_convention"));
  EXPECT_EQ(doc["params"]["q"], 3);
  EXPECT_FALSE(doc["checks"].empty());
}

TEST(Cli, BudgetFromEnvironment) {
  ::setenv("POTTSLAB_BUDGET_CONFIGS", "10", 1);
  const auto small = run({"oracle-check", "--d", "2", "--q", "3", "--p", "0.3", "--n", "2"});
  EXPECT_EQ(small.code, pottslab::cli::kExitUsage);
  EXPECT_NE(small.err.find("budget"), std::string::npos);
  // The flag wins over the environment.
  EXPECT_EQ(run({"oracle-check", "--d", "2", "--q", "3", "--p", "0.3", "--n", "2", "--config-budget", "1000"}).code,
            pottslab::cli::kExitOk);
  ::setenv("POTTSLAB_BUDGET_CONFIGS", "lots", 1);
  const auto bad = run({"oracle-check", "--d", "2", "--q", "3", "--p", "0.3", "--n", "2"});
  EXPECT_EQ(bad.code, pottslab::cli::kExitUsage);
  EXPECT_NE(bad.err.find("POTTSLAB_BUDGET_CONFIGS"), std::string::npos);
  ::unsetenv("POTTSLAB_BUDGET_CONFIGS");
}

TEST(Cli, IterateWritesCsv) {
  const auto csv = tmp("pottslab_iterate.csv");
  const auto r = run({"iterate", "--d", "3", "--q", "3", "--critical", "--N", "25", "--csv", csv.string()});
  ASSERT_EQ(r.code, pottslab::cli::kExitOk) << r.err;
  std::ifstream in(csv);
  std::string line;
  int rows = -1;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 25);
  std::filesystem::remove(csv);
}

TEST(Cli, UnwritableOutputIsRuntimeFailure) {
  const auto r = run({"rate", "--d", "3", "--q", "3", "--p", "0.5", "--out", "/nonexistent-dir/x.json"});
  EXPECT_EQ(r.code, pottslab::cli::kExitCheckFailed);
  EXPECT_NE(r.err.find("/nonexistent-dir/x.json"), std::string::npos);
}

TEST(Cli, HelpAndVersion) {
  EXPECT_EQ(run({"--help"}).code, pottslab::cli::kExitOk);
  const auto v = run({"--version"});
  EXPECT_EQ(v.code, pottslab::cli::kExitOk);
  EXPECT_FALSE(v.out.empty());
}
