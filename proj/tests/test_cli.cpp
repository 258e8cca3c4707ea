#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>

#include "tamp/experiment.hpp"
#include "tamp/matrix_io.hpp"

using namespace tamp;
namespace fs = std::filesystem;

namespace {

const std::string kCli = TAMP_CLI;
const std::string kConfigs = TAMP_CONFIG_DIR;

int run(const std::string& args) {
  std::string cmd = "\"" + kCli + "\" " + args + " > /dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("tamp_test_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

}  // namespace

TEST_CASE("gen writes a reproducible matrix") {
  fs::path d = scratch("gen");
  CHECK(run("gen --kind hadamard --n 8 --out " + q(d / "h.tamp")) == 0);
  CHECK(fs::exists(d / "h.tamp"));
  CHECK(fs::exists(d / "h.tamp.json"));
  CHECK(run("--seed 4 gen --kind goe --n 16 --out " + q(d / "a.tamp")) == 0);
  CHECK(run("--seed 4 gen --kind goe --n 16 --out " + q(d / "b.tamp")) == 0);
  Matrix a = read_matrix((d / "a.tamp").string());
  CHECK(a == read_matrix((d / "b.tamp").string()));
  CHECK(a.rows() == 16);
  CHECK(run("gen --kind hadamard --n 12 --out " + q(d / "x.tamp")) == 2);
  CHECK(run("gen --kind nonsense --n 8 --out " + q(d / "x.tamp")) == 2);
}

TEST_CASE("se prints and writes the kernel") {
  fs::path d = scratch("se");
  CHECK(run("--out " + q(d) + " se --config " + q(kConfigs + "/goe_identity.json")) == 0);
  SEKernel k = read_json_file((d / "kernel.json").string()).get<SEKernel>();
  CHECK(k.T == 4);
  CHECK((k.gammas[0] - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("amp then compare, and the ablation is caught") {
  fs::path d = scratch("amp");
  const std::string cfg = q(kConfigs + "/goe_identity.json");
  REQUIRE(run("--out " + q(d) + " amp --config " + cfg + " --n 1000 --trials 20") == 0);
  REQUIRE(run("--out " + q(d) + " se --config " + cfg) == 0);
  CHECK(fs::exists(d / "moments.csv"));
  CHECK(fs::exists(d / "trials.csv"));
  CHECK(fs::exists(d / "trace_0.tamp"));
  CHECK(run("--out " + q(d) + " compare --kernel " + q(d / "kernel.json") + " --moments " +
            q(d / "moments.csv")) == 0);
  CHECK(fs::exists(d / "verdict.csv"));

  // same iteration without the correction, checked against the corrected kernel
  json j = read_json_file(kConfigs + "/goe_identity.json");
  j["amp"]["mode"] = "none";
  write_json_file((d / "ablation.json").string(), j);
  fs::path a = d / "ablation";
  REQUIRE(run("--out " + q(a) + " amp --no-traces --config " + q(d / "ablation.json") + " --n 1000 --trials 20") == 0);
  CHECK(!fs::exists(a / "trace_0.tamp"));
  CHECK(run("--out " + q(a) + " compare --kernel " + q(d / "kernel.json") + " --moments " +
            q(a / "moments.csv")) == 1);
}

TEST_CASE("traffic and audit outputs") {
  fs::path d = scratch("traffic");
  CHECK(run("--out " + q(d) + " traffic --config " + q(kConfigs + "/goe_identity.json") +
            " --n 128 --trials 3") == 0);
  CHECK(fs::exists(d / "traffic.csv"));
  CHECK(run("--out " + q(d) + " cactus-audit --config " + q(kConfigs + "/goe_identity.json") +
            " --n 64 --trials 2") == 0);
  CHECK(fs::exists(d / "audit.csv"));
  CHECK(fs::exists(d / "deloc.csv"));
}

TEST_CASE("bad input exits with 2") {
  fs::path d = scratch("bad");
  CHECK(run("") == 2);
  CHECK(run("se --config " + q(d / "missing.json")) == 2);
  std::ofstream(d / "broken.json") << "{ not json";
  CHECK(run("se --config " + q(d / "broken.json")) == 2);
  std::ofstream(d / "k.json") << R"({"T": 2, "gammas": [[[1,0],[0,1]]], "weights": [1]})";
  std::ofstream(d / "m.csv") << "block,stat,s,t,mean,se,trials\nall,xx,1,1,1,0.1,3\n";
  CHECK(run("compare --kernel " + q(d / "k.json") + " --moments " + q(d / "m.csv") + " --out " + q(d)) == 2);
}
