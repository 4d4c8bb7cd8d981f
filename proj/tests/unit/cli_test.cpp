#include <gtest/gtest.h>
#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

namespace {

struct CliRun {
  int code = -1;
  std::string out;
};

CliRun run_cli(const std::string& args) {
  std::string cmd = std::string(HOU_CLI_PATH) + " " + args + " 2>/dev/null";
  CliRun r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string data(const char* name) { return std::string(HOU_TEST_DATA) + "/" + name; }

std::string temp_file(const std::string& name, const std::string& text) {
  auto path = std::filesystem::temp_directory_path() / ("hou_cli_test_" + name);
  std::ofstream(path) << text;
  return path.string();
}

TEST(Cli, FixpointOracleRefutes) {
  CliRun r = run_cli("solve " + data("occurs.hou") + " --oracles fixpoint");
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.out.find("unifier 1:"), std::string::npos);
  EXPECT_NE(r.out.find("status: non-unifiable\n"), std::string::npos);
}

TEST(Cli, CompleteVariantEnumeratesTwoUnifiers) {
  CliRun r = run_cli("solve " + data("two_unifiers.hou") + " --variant complete --max-unifiers 10");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out,
            "unifier 1:\n  G -> \\x1:i. b\n"
            "unifier 2:\n  F -> \\x1:i. H_1\n"
            "status: exhausted\n"
            "unifiers: 2 steps: 9 pulls: 6\n");
}

TEST(Cli, StepBudget) {
  CliRun r = run_cli("solve " + data("flexflex.hou") + " --variant complete --max-steps 1000");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("status: budget\n"), std::string::npos);
}

TEST(Cli, SolidOracleWithVerification) {
  CliRun r = run_cli("solve " + data("solid_mgu.hou") + " --oracles solid --verify");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("  F -> \\x1:i. g a (H_1 x1 x1 a)\n  G -> \\x1:i. H_1 (f a) (f x1) x1\n"), std::string::npos);
  EXPECT_NE(r.out.find("status: exhausted\n"), std::string::npos);
}

TEST(Cli, PragmaticDefaultsTerminate) {
  for (const char* name : {"occurs.hou", "nested_heads.hou", "divergent.hou", "flexflex.hou"}) {
    CliRun r = run_cli("solve " + data(name) + " --verify");
    EXPECT_TRUE(r.code == 0 || r.code == 1) << name;
    EXPECT_NE(r.out.find("status: "), std::string::npos) << name;
  }
}

TEST(Cli, OutputIsDeterministic) {
  std::string args = "solve " + data("divergent.hou") + " --variant complete --max-unifiers 5 --max-steps 5000";
  CliRun a = run_cli(args);
  CliRun b = run_cli(args);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.code, b.code);
}

TEST(Cli, InputErrorsExitTwo) {
  EXPECT_EQ(run_cli("solve /nonexistent/x.hou").code, 2);
  EXPECT_EQ(run_cli("solve " + temp_file("bad.hou", "tp i.\nconst a i.\n")).code, 2);
  EXPECT_EQ(run_cli("solve " + temp_file("undecl.hou", "unify: x =?= x.\n")).code, 2);
  EXPECT_EQ(run_cli("solve " + data("two_unifiers.hou") + " --limits 1,2,3").code, 2);
  EXPECT_EQ(run_cli("solve " + data("two_unifiers.hou") + " --variant bogus").code, 2);
  EXPECT_EQ(run_cli("solve " + data("two_unifiers.hou") + " --oracles nonsense").code, 2);
  EXPECT_EQ(run_cli("index " + data("index_fp.hou") + " --positions 1..2").code, 2);
}

TEST(Cli, IndexSampledPositions) {
  CliRun r = run_cli("index " + data("index_fp.hou") + " --positions 1,1.1.1,2 --verify");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("term 0: f  fp (db1, N, db0)\n"), std::string::npos);
  EXPECT_NE(r.out.find("fp (db0, N, N)\n"), std::string::npos);
  EXPECT_NE(r.out.find("query 0 unif: f  fp (db1, N, db0)\n  candidates: 0\n  confirmed: 0\n"), std::string::npos);
  EXPECT_NE(r.out.find("  candidates: 1\n  confirmed: 1\n"), std::string::npos);
  EXPECT_NE(r.out.find("filter ratio: 0.500"), std::string::npos);
}

TEST(Cli, IndexEmptyStore) {
  std::string f = temp_file("empty_store.hou", "tp i. const a : i. query-unif: a. query-match: a.\n");
  CliRun r = run_cli("index " + f);
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("query 0 unif: a  fp (a, N, N, N, N, N)\n  candidates:\n"), std::string::npos);
  EXPECT_NE(r.out.find("query 1 match: a  fp (a, N, N, N, N, N)\n  candidates:\n"), std::string::npos);
  EXPECT_NE(r.out.find("filter ratio: 0.000 (0 of 0 pairs filtered)"), std::string::npos);
}

}  // namespace
