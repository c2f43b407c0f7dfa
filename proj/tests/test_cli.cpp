#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <string>

#include <json.hpp>
#include <sys/wait.h>

#include "oracles.hpp"

namespace {

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(AUTOMEASURE_CLI) + " " + args + " 2>/dev/null";
  Run r{0, ""};
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {-1, ""};
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string s(const char* name) { return oracle::data_file(name); }

}  // namespace

TEST(Cli, RuleCheck) {
  const auto ok = run("rule check " + s("ledrappier.json") + " --json");
  EXPECT_EQ(ok.code, 0);
  const auto j = nlohmann::json::parse(ok.out);
  EXPECT_EQ(j["schema"], "automeasure-report/1");
  EXPECT_EQ(j["result"]["left_permutative"], true);
  EXPECT_EQ(j["result"]["right_permutative"], true);
  EXPECT_EQ(run("rule check " + s("constant.json")).code, 1);
}

TEST(Cli, MeasureCheckKitchens) {
  const auto r = run("measure check " + s("kitchens.json") + " --rule " + s("ledrappier.json") + " -n 6 --json");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(nlohmann::json::parse(r.out)["verdict"], "verified");
}

TEST(Cli, TriangleZWordsEmpty) {
  const auto r = run("lift z-words " + s("triangle.json") + " -k 2 -L 3 -N 1 --json");
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(nlohmann::json::parse(r.out)["result"]["words"].empty());
}

TEST(Cli, UsageAndInputErrors) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("rule").code, 2);
  EXPECT_EQ(run("rule check /nonexistent.json").code, 2);
  EXPECT_EQ(run("measure check " + s("uniform2.json") + " -n 40").code, 2);
  EXPECT_EQ(run("rlp counts -p 2 -q 4").code, 2);
}

TEST(Cli, ViolationStillEmitsReport) {
  const auto r = run("measure check " + s("m_odd.json") + " -n 3 --json");
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(nlohmann::json::parse(r.out)["verdict"], "violation");
}

TEST(Cli, WorkerCountDoesNotChangeOutput) {
  for (const std::string args : {"conditional census " + s("kitchens.json") + " -n 6",
                                 "lift z-words-group " + s("d3.json") + " -k 3 -L 3 -N 2",
                                 "measure entropy " + s("kitchens.json") + " -n 8"}) {
    const auto a = run(args + " --workers 1");
    const auto b = run(args + " --workers 8");
    EXPECT_EQ(a.code, b.code);
    EXPECT_EQ(a.out, b.out) << args;
  }
}

TEST(Cli, DepthCapFlagAndEnv) {
  EXPECT_EQ(run("measure eval " + s("uniform2.json") + " -w 0101 --depth-cap 3").code, 2);
  EXPECT_EQ(run("measure eval " + s("uniform2.json") + " -w 0101 --depth-cap 4").code, 0);
  const std::string env = "AUTOMEASURE_DEPTH_CAP=3 ";
  const std::string cmd = env + AUTOMEASURE_CLI + " measure eval " + s("uniform2.json") + " -w 0101 >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  EXPECT_EQ(WEXITSTATUS(status), 2);
}

TEST(Cli, Rlp) {
  const auto d = run("rlp diagram -p 2 -q 3 -x 1/2 -w 3 -h 2 --json");
  EXPECT_EQ(d.code, 0);
  const auto j = nlohmann::json::parse(d.out);
  EXPECT_EQ(j["result"]["rows"][0][0], 3);
  EXPECT_EQ(j["result"]["rows"][0][1], 0);
  EXPECT_EQ(run("rlp counts -p 2 -q 3 --l-max 12").code, 0);
  EXPECT_EQ(run("rlp fiber -p 2 -q 3 --max-den 50").code, 0);
}

TEST(Cli, GroupCommands) {
  EXPECT_EQ(run("group zero-ent " + s("d3.json") + " -H r0,r1,r2").code, 0);
  EXPECT_EQ(run("group zero-ent " + s("z4.json") + " -H 0,2").code, 1);
  const auto info = nlohmann::json::parse(run("group info " + s("d3.json") + " --json").out);
  EXPECT_EQ(info["result"]["subgroups"].size(), 6u);
}

TEST(Cli, Synthesis) {
  const auto r = run("synth run " + s("nu_c3.json") + " --rule " + s("d3_rule.json") +
                     " --verify --round-trip -n 4 --print-depth 1 --json");
  EXPECT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["result"]["cylinders"]["r0"], "1/3");
  EXPECT_EQ(j["result"]["round_trip"]["status"], "pass");
  EXPECT_EQ(run("synth dihedral " + s("atomic0.json") + " -m 3 -n 6").code, 0);
  EXPECT_EQ(run("synth dihedral " + s("uniform2.json") + " -m 3 -n 6").code, 2);
}
