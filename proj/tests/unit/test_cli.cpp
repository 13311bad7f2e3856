#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kDepol = "0.3333333333333333,0.3333333333333333,0.3333333333333334";

struct Run {
  int code;
  std::string out;
};

fs::path scratch() {
  auto d = fs::temp_directory_path() / "gsci_cli_test";
  fs::create_directories(d);
  return d;
}

Run run(const std::string& args) {
  const auto out = scratch() / "stdout.txt";
  const std::string cmd = std::string(GSCI_CLI_PATH) + " " + args + " > " + out.string() + " 2> /dev/null";
  const int status = std::system(cmd.c_str());
  std::ifstream in(out);
  std::stringstream ss;
  ss << in.rdbuf();
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("family then threshold round trip") {
  const auto g = scratch() / "rep5.json";
  REQUIRE(run("family --kind rep --n 5 --out " + g.string()).code == 0);
  auto r = run("threshold --graph " + g.string() + " --direction " + kDepol + "");
  REQUIRE(r.code == 0);
  CHECK(std::abs(std::stod(r.out) - 0.190356) <= 2e-6);
  auto manifest = nlohmann::json::parse(slurp(g.string() + ".manifest.json"));
  CHECK(manifest["subcommand"] == "family");
  CHECK(manifest.contains("tool_version"));
  CHECK(manifest.contains("wall_clock_seconds"));
}

TEST_CASE("ci engines agree through the command line") {
  const auto g = scratch() / "cat22.json";
  REQUIRE(run("family --kind cat --n1 2 --n2 2 --out " + g.string()).code == 0);
  double v[3];
  const char* engines[] = {"symmetric", "direct", "dense"};
  for (int i = 0; i < 3; ++i) {
    auto r = run("ci --graph " + g.string() + " --p 0.85,0.05,0.05,0.05 --engine " + engines[i]);
    REQUIRE(r.code == 0);
    v[i] = std::stod(r.out);
  }
  CHECK(std::abs(v[0] - v[1]) <= 1e-12);
  CHECK(std::abs(v[0] - v[2]) <= 1e-10);
  auto noiseless = run("ci --graph " + g.string() + " --p 1,0,0,0");
  CHECK(std::abs(std::stod(noiseless.out) - 0.25) <= 1e-14);
}

TEST_CASE("spectrum cache and surface output") {
  const auto g = scratch() / "rep3.json";
  const auto cache = scratch() / "rep3.spectrum.json";
  const auto csv = scratch() / "rep3.csv";
  fs::remove(cache);
  REQUIRE(run("family --kind rep --n 3 --out " + g.string()).code == 0);
  REQUIRE(run("spectrum --graph " + g.string() + " --out " + cache.string()).code == 0);
  CHECK(run("spectrum --load " + cache.string()).code == 0);
  REQUIRE(run("surface --graph " + g.string() + " --spectrum " + cache.string() + " --resolution 3 --out " + csv.string())
              .code == 0);
  auto text = slurp(csv);
  CHECK(text.rfind("theta,phi,p1,p2,p3,x_code,x_single,delta\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 10);
}

TEST_CASE("convert stabilizers to a graph") {
  const auto stab = scratch() / "bell.txt";
  std::ofstream(stab) << "XX\nZZ\n";
  auto r = run("convert --stabilizers " + stab.string());
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["k_sys"] == 1);
}

TEST_CASE("exit codes") {
  CHECK(run("").code == 1);
  CHECK(run("threshold --bogus").code == 1);
  CHECK(run("threshold --graph /nonexistent/g.json --direction " + kDepol + "").code == 1);
  CHECK(run("ci --graph /nonexistent/g.json").code == 1);
  const auto g = scratch() / "rep2.json";
  REQUIRE(run("family --kind rep --n 2 --out " + g.string()).code == 0);
  CHECK(run("threshold --graph " + g.string() + " --direction -1,1,1").code == 1);
  CHECK(run("ci --graph " + g.string() + " --p 0.5,0.5,0.5,0").code == 1);
  CHECK(run("search --ksys 3 --kenv-max 2 --direction " + kDepol + " --max-candidates 10").code == 2);
  const auto big = scratch() / "rep12.json";
  REQUIRE(run("family --kind rep --n 12 --out " + big.string()).code == 0);
  CHECK(run("ci --graph " + big.string() + " --p 1,0,0,0 --engine dense").code == 2);
}
