#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <string>
#include <sys/wait.h>

#include <nlohmann/json.hpp>

namespace {

struct Result {
  int code = -1;
  std::string out;
};

// Runs the tool with stderr folded away or captured.
Result run(const std::string& args, bool capture_stderr = false, const std::string& env = "") {
  const std::string cmd = (env.empty() ? "" : "env " + env + " ") + std::string(QF_CLI_PATH) + " " + args + (capture_stderr ? " 2>&1" : " 2>/dev/null");
  FILE* pipe = popen(cmd.c_str(), "r");
  Result r;
  if (!pipe) return r;
  std::array<char, 4096> buf;
  std::size_t got;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string data(const std::string& name) { return std::string(QF_DATA_DIR) + "/" + name; }

TEST(Cli, SimulateMajority) {
  const Result r = run("simulate " + data("maj3.json") + " --input 110");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(nlohmann::json::parse(r.out), nlohmann::json::parse(R"({"p": 1.0})"));
}

TEST(Cli, CheckFormulaWitness) {
  const Result r = run("check-formula " + data("sample_top.json"));
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_FALSE(j["formula"].get<bool>());
  EXPECT_EQ(j["witness"].size(), 2u);
  EXPECT_TRUE(nlohmann::json::parse(run("check-formula " + data("sample_bottom.json")).out)["formula"]);
}

TEST(Cli, EdSigma) {
  const auto j = nlohmann::json::parse(run("bounds ed-sigma --ell 4").out);
  EXPECT_EQ(j["binom"], 560);
  EXPECT_EQ(j["power"], 64);
  const auto big = nlohmann::json::parse(run("bounds ed-sigma --ell 16").out);
  EXPECT_EQ(big["binom"], "669128737063722082963200");
}

TEST(Cli, BoundsArithmetic) {
  const auto ne = nlohmann::json::parse(run("bounds nechiporuk --ed 4").out);
  EXPECT_NEAR(ne["total"].get<double>(), 11.447, 1e-3);
  const auto w = nlohmann::json::parse(run("bounds warren --d 1 --m 1 --t 1").out);
  EXPECT_NEAR(w["log2_count"].get<double>(), 3.442695040888963, 1e-12);
  const auto a = nlohmann::json::parse(run("bounds appendix --n 4 --N 4 --d 2").out);
  EXPECT_NEAR(a["log2_total"].get<double>(), 230.16624130844682904, 1e-9);
  const auto m = nlohmann::json::parse(
      run("bounds nechiporuk --circuit " + data("maj3.json") + " --partition '0;1,2'").out);
  EXPECT_EQ(m["blocks"][0]["sigma"], 3);
}

TEST(Cli, CompileAndEvaluate) {
  const std::string net = ::testing::TempDir() + "qf_cli_net.json";
  const Result c = run("compile-bool " + data("maj3.json") + " --bits 10 -o " + net);
  ASSERT_EQ(c.code, 0);
  const auto stats = nlohmann::json::parse(c.out);
  EXPECT_EQ(stats["W"], 18);
  const auto v = nlohmann::json::parse(run("eval-netlist " + net + " --input 011").out);
  EXPECT_EQ(v["word"], 1024);
  const auto all = nlohmann::json::parse(run("eval-netlist " + net).out);
  EXPECT_EQ(all["rows"].size(), 8u);
}

TEST(Cli, TruncateReportsBothMuRules) {
  const auto j = nlohmann::json::parse(run("truncate " + data("maj3.json") + " --eps 0.01 --report").out);
  EXPECT_TRUE(j.contains("formula_mu"));
  EXPECT_TRUE(j.contains("bound_driven_mu"));
  EXPECT_TRUE(j["pass"].get<bool>());
}

TEST(Cli, SqueezeAndDilate) {
  const auto s = nlohmann::json::parse(
      run("squeeze " + data("ed4.json") + " --block 0,1,2,3 --tau 000100100011").out);
  EXPECT_EQ(s["s_j"], 12);
  EXPECT_LE(s["size"].get<int>(), s["size_limit"].get<int>());
  const auto d = nlohmann::json::parse(run("dilate " + data("channels/dephasing.json")).out);
  EXPECT_LE(d["max_error"].get<double>(), 1e-8);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("simulate").code, 2);
  EXPECT_EQ(run("simulate " + data("maj3.json") + " --input 11x").code, 1);
  const Result nf = run("simulate " + data("sample_top.json") + " --input 00 --engine formula", true);
  EXPECT_EQ(nf.code, 1);
  const auto err = nlohmann::json::parse(nf.out);
  EXPECT_EQ(err["error"], "not_formula");
  EXPECT_EQ(run("simulate /nonexistent.json --input 0").code, 1);
  EXPECT_EQ(run("truncate " + data("maj3.json")).code, 2);
}

TEST(Cli, ToleranceFromEnvironment) {
  const std::string args = "simulate " + data("maj3.json") + " --input 110";
  EXPECT_EQ(run(args, false, "QF_TOL=abc").code, 2);
  EXPECT_EQ(run(args, false, "QF_TOL=1e-6").code, 0);
}

TEST(Cli, ByteIdenticalReruns) {
  const std::string cmd = "--seed 7 dilate " + data("channels/dephasing.json") + " --samples 20";
  EXPECT_EQ(run(cmd).out, run(cmd).out);
  const std::string tt = "truthtable " + data("maj3.json");
  EXPECT_EQ(run(tt).out, run(tt).out);
}

}  // namespace
