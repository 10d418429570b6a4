#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "circlechain/cli.hpp"

using namespace circlechain;

namespace {

struct CliResult {
  int code;
  std::string out, err;
};

CliResult run(std::vector<std::string> args, const std::string& input = "") {
  args.insert(args.begin(), "circlechain");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::istringstream in(input);
  std::ostringstream out, err;
  const int code = cli_main(static_cast<int>(argv.size()), argv.data(), in, out, err);
  return {code, out.str(), err.str()};
}

std::string generated(const std::string& kind, int n, int seed) {
  return run({"generate", "--kind", kind, "--n", std::to_string(n), "--seed", std::to_string(seed)}).out;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("circlechain_test_" + name);
}

}  // namespace

TEST(Cli, TouchingEvenPassesOddFails) {
  const CliResult even = run({"verify"}, generated("touching", 4, 1));
  EXPECT_EQ(even.code, 0) << even.err;
  EXPECT_EQ(Json::parse(even.out)["overall"], true);
  const CliResult odd = run({"verify"}, generated("touching", 3, 1));
  EXPECT_EQ(odd.code, 1);
  const Json j = Json::parse(odd.out);
  EXPECT_EQ(j["overall"], false);
  EXPECT_NEAR(std::abs(j["checks"][0]["value"]["closing_defect"].get<double>()), kPi, 1e-9);
}

TEST(Cli, GenerateIsDeterministicAndValid) {
  for (const char* kind : {"polygon", "common_point", "touching", "quadrilateral", "n_lines", "rational", "open_polygon"}) {
    const int n = std::string(kind) == "quadrilateral" || std::string(kind) == "n_lines" ? 4 : 3;
    const std::string a = generated(kind, n, 9), b = generated(kind, n, 9);
    EXPECT_EQ(a, b) << kind;
    EXPECT_NO_THROW(parse_scene(a)) << kind;
    const CliResult v = run({"sweep-check"}, a);
    EXPECT_EQ(v.code, 0) << kind << "\n" << v.out;
  }
}

TEST(Cli, OutFileMatchesStdout) {
  const auto path = temp_file("scene.json");
  const CliResult r = run({"generate", "--kind", "polygon", "--n", "5", "--seed", "3", "--out", path.string()});
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  std::ifstream f(path);
  const std::string bytes{std::istreambuf_iterator<char>(f), {}};
  EXPECT_EQ(bytes, generated("polygon", 5, 3));
  const CliResult v = run({"verify", path.string()});
  EXPECT_EQ(v.code, 0);
  std::filesystem::remove(path);
}

TEST(Cli, InputErrorsExitTwo) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"generate"}).code, 2);
  EXPECT_EQ(run({"generate", "--kind", "hexagon"}).code, 2);
  EXPECT_EQ(run({"generate", "--kind", "polygon", "--n", "2"}).code, 2);
  EXPECT_EQ(run({"verify"}, "not json").code, 2);
  EXPECT_EQ(run({"verify", "/nonexistent/scene.json"}).code, 2);
  EXPECT_EQ(run({"verify", "--tol", "-1"}, generated("polygon", 3, 1)).code, 2);
  EXPECT_EQ(run({"iterate", "--rounds", "0"}, generated("polygon", 3, 1)).code, 2);
  EXPECT_EQ(run({"steiner", "--lines", "1,0,0;0,1,0"}).code, 2);
  EXPECT_EQ(run({"steiner", "--lines", "1,0,0;0,1,0;1,0,1;1,1,3"}).code, 2);
  EXPECT_EQ(run({"sweep", "--kinds", "hexagon"}).code, 2);
  const CliResult bad = run({"verify"}, "{\"version\": \"1\"}");
  EXPECT_EQ(bad.code, 2);
  EXPECT_NE(bad.err.find("circles"), std::string::npos);
  EXPECT_TRUE(bad.out.empty());
}

TEST(Cli, HelpExitsZero) {
  const CliResult r = run({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("generate"), std::string::npos);
}

TEST(Cli, IterateTrace) {
  const CliResult r = run({"iterate", "--rounds", "2", "--starts", "3"}, generated("polygon", 4, 2));
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = Json::parse(r.out);
  ASSERT_EQ(j["traces"].size(), 3u);
  for (const Json& t : j["traces"]) {
    EXPECT_EQ(t["rounds"], 2);
    EXPECT_EQ(t["vertices"].size(), 9u);
    EXPECT_NO_THROW(trace_from_json(t));
  }
}

TEST(Cli, IncidenceReports) {
  EXPECT_EQ(run({"incidence"}, generated("polygon", 6, 2)).code, 0);
  EXPECT_EQ(run({"incidence"}, generated("touching", 3, 2)).code, 0);
  EXPECT_EQ(run({"incidence"}, generated("touching", 4, 2)).code, 0);
  const CliResult r = run({"incidence"}, generated("common_point", 3, 2));
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(Json::parse(r.out)["overall"], true);
}

TEST(Cli, SteinerFromLinesAndScene) {
  const CliResult r = run({"steiner", "--lines", "0,1,0;1,0,0;1,1,1;-2,1,0.3"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(Json::parse(r.out)["overall"], true);
  EXPECT_EQ(run({"steiner"}, generated("quadrilateral", 4, 5)).code, 0);
  EXPECT_EQ(run({"steiner"}, generated("polygon", 4, 5)).code, 2);
}

TEST(Cli, MobiusInvariance) {
  for (int seed = 0; seed < 5; ++seed) {
    const CliResult r = run({"mobius", "--seed", std::to_string(seed)}, generated("polygon", 5, seed));
    EXPECT_EQ(r.code, 0) << r.out;
  }
}

TEST(Cli, RenderSvg) {
  const std::string scene = generated("polygon", 5, 4);
  const CliResult a = run({"render"}, scene), b = run({"render"}, scene);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out.find("<polygon"), std::string::npos);

  const auto trace_path = temp_file("trace.json");
  const CliResult trace = run({"iterate", "--rounds", "1"}, scene);
  {
    std::ofstream f(trace_path);
    f << Json::parse(trace.out)["traces"][0].dump();
  }
  const auto scene_path = temp_file("render_scene.json");
  {
    std::ofstream f(scene_path);
    f << scene;
  }
  const CliResult with = run({"render", scene_path.string(), "--trace", trace_path.string()});
  EXPECT_EQ(with.code, 0) << with.err;
  EXPECT_NE(with.out.find("<polygon"), std::string::npos);
  std::filesystem::remove(trace_path);
  std::filesystem::remove(scene_path);
}

TEST(Cli, SweepSmall) {
  const CliResult r = run({"sweep", "--count", "50", "--seed", "3"});
  EXPECT_EQ(r.code, 0) << r.out;
  const Json j = Json::parse(r.out);
  EXPECT_EQ(j["overall"], true);
  const CliResult kinds = run({"sweep", "--count", "10", "--kinds", "touching,rational"});
  EXPECT_EQ(kinds.code, 0);
}

TEST(Cli, SweepReportsReproductionCommands) {
  // An absurdly tight tolerance makes checks fail; every failure names a command.
  const CliResult r = run({"sweep", "--count", "5", "--seed", "0", "--tol", "1e-30"});
  EXPECT_NE(r.code, 0);
  if (r.code == 1) {
    EXPECT_NE(r.err.find("circlechain generate"), std::string::npos);
  }
}
