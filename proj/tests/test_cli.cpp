// Runs the relucost binary end to end.
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <doctest.h>

#include "oracles.hpp"
#include "random_inputs.hpp"
#include "relucost/json_io.hpp"

using namespace relucost;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
};

RunResult Run(const std::string& args) {
  const std::string cmd = std::string(RELUCOST_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

Json RunJson(const std::string& args) {
  const RunResult r = Run(args);
  REQUIRE(r.exit_code == 0);
  return Json::parse(r.out);
}

class TempDir {
 public:
  TempDir() : path_(fs::temp_directory_path() / ("relucost_cli_" + std::to_string(::getpid()))) {
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string Write(const std::string& name, const std::string& text) const {
    const fs::path p = path_ / name;
    std::ofstream(p) << text;
    return p.string();
  }
  std::string Path(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

}  // namespace

TEST_CASE("repcost") {
  TempDir tmp;
  const std::string hat =
      tmp.Write("hat.json", R"({"breakpoints": [0, 1, 2], "slopes": [0, 1, -1, 0], "anchor": [0, 0]})");
  const Json j = RunJson("repcost " + hat);
  CHECK(j["cost"] == 4.0);
  CHECK(j["tv"] == 4.0);
  CHECK(j["end_sum"] == 0.0);
  CHECK(j["case"] == "zero");

  const RunResult csv = Run("--format csv repcost " + hat);
  CHECK(csv.exit_code == 0);
  CHECK(csv.out.rfind("tv,end_sum,cost,case,upper_bound\n", 0) == 0);

  const std::string lin = tmp.Write("lin.json", R"({"breakpoints": [], "slopes": [3], "anchor": [0, 0]})");
  const Json k = RunJson("repcost " + lin);
  CHECK(k["cost"] == 6.0);
  CHECK(k["case"] == "negative");
}

TEST_CASE("interp agrees with the grid oracle and the nested golden oracle") {
  TempDir tmp;
  const std::string tent = tmp.Write("tent.json", R"({"points": [[0, 0], [1, 1], [2, 0]]})");
  const Json j = RunJson("interp --grid-oracle " + tent);
  CHECK(j["cost"] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(j["grid_oracle"]["agree"] == true);
  CHECK(j["end_slopes"][0] == doctest::Approx(1.0));
  CHECK(j["end_slopes"][1] == doctest::Approx(-1.0));
  CHECK(j["trace"].size() == 512);

  testgen::Rng rng(81);
  for (int trial = 0; trial < 10; ++trial) {
    const Dataset data = testgen::RandomDataset(rng, testgen::UniformInt(rng, 2, 8), -5, 5);
    const std::string path = tmp.Write("d.json", DatasetToJson(data).dump());
    const Json r = RunJson("interp --grid 4 --grid-oracle " + path);
    CAPTURE(trial);
    CHECK(r["grid_oracle"]["agree"] == true);
    CHECK(std::abs(r["cost"].get<double>() - oracle::SplineCostOracle(data.xs(), data.ys())) < 1e-6);
  }
}

TEST_CASE("extract") {
  TempDir tmp;
  const std::string net = tmp.Write("abs.json", R"({"w1": [1, -1], "b1": [0, 0], "w2": [1, 1], "b2": 0})");
  const Json j = RunJson("extract " + net);
  REQUIRE(j["atoms"].size() == 1);
  CHECK(j["atoms"][0]["location"] == 0.0);
  CHECK(j["atoms"][0]["mass"] == 2.0);
}

TEST_CASE("depth report on a random net") {
  const Json j = RunJson("--seed 4 depth --random 3 2 5 2");
  CHECK(j["L"] == 3);
  CHECK(j["subnets"] == 5);
  CHECK(j["rebuilt_max_deviation"].get<double>() < 1e-10);
  CHECK(j["rebuilt_cost_CL"].get<double>() <= j["cost_CL"].get<double>() + 1e-12);
  CHECK(j["rebuilt_cost_CL"].get<double>() == doctest::Approx(j["bridge_penalty"].get<double>()));
}

TEST_CASE("train2 is deterministic and writes its outputs") {
  TempDir tmp;
  const std::string args = "--seed 5 train2 --random-points 5 --k 6 --steps 2000 --lr 1e-2";
  const RunResult a = Run(args);
  const RunResult b = Run(args);
  REQUIRE(a.exit_code == 0);
  CHECK(a.out == b.out);
  const Json j = Json::parse(a.out);
  for (const char* key : {"net", "dataset", "steps", "final_loss", "net_cost", "rbar",
                          "spline_optimum", "rbar_over_optimum", "cost_over_rbar"}) {
    CHECK(j.contains(key));
  }
  CHECK(j["steps"] == 2000);
  // The lower-bound law holds for whatever GD produced.
  CHECK(j["cost_over_rbar"].get<double>() >= 1.0 - 1e-12);

  const std::string out = tmp.Path("out.csv");
  const std::string trace = tmp.Path("trace.csv");
  CHECK(Run("--format csv -o " + out + " " + args.substr(9) + " --trace-csv " + trace).exit_code == 0);
  std::ifstream in(out);
  std::string header;
  std::getline(in, header);
  CHECK(header == "units,steps,loss,net_cost,rbar,spline_optimum,rbar_over_optimum,cost_over_rbar");
  std::ifstream tin(trace);
  std::getline(tin, header);
  CHECK(header == "step,objective,loss,cost");
}

TEST_CASE("highdim csv") {
  const RunResult r = Run("--seed 3 highdim --claim laplacian --d 3 --r-sweep 100 1000 --samples 2000");
  REQUIRE(r.exit_code == 0);
  std::istringstream lines(r.out);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "r,estimate,std_error");
  int rows = 0;
  while (std::getline(lines, line)) rows += !line.empty();
  CHECK(rows == 2);
}

TEST_CASE("exit codes") {
  TempDir tmp;
  CHECK(Run("").exit_code == 1);
  CHECK(Run("repcost").exit_code == 1);
  CHECK(Run("nosuchcommand").exit_code == 1);
  CHECK(Run("highdim --claim laplacian --d 1").exit_code == 1);
  // Parses, but fails validation.
  CHECK(Run("train2 --random-points 3 --lr -1").exit_code == 2);
  CHECK(Run("repcost " + tmp.Path("missing.json")).exit_code == 2);
  const std::string bad = tmp.Write("bad.json", R"({"breakpoints": [0], "slopes": [1], "anchor": [0, 0]})");
  CHECK(Run("repcost " + bad).exit_code == 2);
  const std::string garbage = tmp.Write("garbage.json", "{not json");
  CHECK(Run("interp " + garbage).exit_code == 2);
  CHECK(Run("train2 --random-points 4 --k 5 --steps 100 --lr 50").exit_code == 3);
}
