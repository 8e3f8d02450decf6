#include <condcap/errors.hpp>
#include <condcap/scenario.hpp>

#include <doctest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace condcap;
namespace fs = std::filesystem;

namespace {
const std::string kCli = CONDCAP_CLI_PATH;
const std::string kScenarios = CONDCAP_SCENARIO_DIR;

const char* kSmall = R"({
  "schema": "condenser-cap/1",
  "name": "small",
  "kernel": { "family": "riesz", "alpha": 2.0, "dim": 3, "epsilon": 0.1 },
  "plates": [
    { "id": 1, "sign": 1, "shape": { "type": "sphere_shell", "center": [0, 0, 0], "radius": 1.0 }, "points": 60, "a": 1.0 },
    { "id": 2, "sign": -1, "shape": { "type": "sphere_shell", "center": [0, 0, 0], "radius": 2.0 }, "points": 60, "a": 1.0 }
  ],
  "weight_function": { "type": "constant", "value": 1.0 },
  "solver": { "max_iterations": 100000, "gap_tolerance": 1e-10, "step_rule": "armijo" },
  "outputs": { "report": "report.json", "weights_csv": "weights.csv", "trace_csv": "trace.csv" },
  "seed": 0
})";

std::string error_of(const std::string& text) {
  try {
    parse_scenario(text, "doc.json");
  } catch (const InputError& e) {
    return e.what();
  }
  return {};
}

std::string replace(std::string s, const std::string& from, const std::string& to) {
  const auto pos = s.find(from);
  REQUIRE(pos != std::string::npos);
  return s.replace(pos, from.size(), to);
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("condcap_cli_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write(const fs::path& dir, const std::string& name, const std::string& text) {
  std::ofstream(dir / name) << text;
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run(const std::string& args) {
  const int status = std::system((kCli + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}
}  // namespace

TEST_CASE("a valid scenario parses") {
  const auto s = parse_scenario(kSmall);
  CHECK(s.name == "small");
  CHECK_FALSE(s.auto_epsilon);
  CHECK(s.kernel.smoothing_epsilon == 0.1);
  CHECK(s.plates.size() == 2);
  CHECK(s.plates[1].sign == -1);
  CHECK(s.solver.gap_tolerance == 1e-10);
  CHECK(s.outputs.residuals_csv.empty());
}

TEST_CASE("shipped scenarios parse") {
  for (const char* name : {"concentric.json", "single_shell.json", "growing_ball.json", "shell_refinement.json",
                           "family_constant.json", "family_inverse_square.json", "log_disk.json",
                           "overlapping.json"})
    CHECK_NOTHROW(load_scenario(kScenarios + "/" + name));
}

TEST_CASE("parse errors name the line and the JSON pointer") {
  const auto unknown = error_of(replace(kSmall, R"("seed": 0)", R"("seed": 0, "colour": 1)"));
  CHECK(unknown.find("doc.json:12:") == 0);
  CHECK(unknown.find("colour") != std::string::npos);

  const auto schema = error_of(replace(kSmall, "condenser-cap/1", "condenser-cap/9"));
  CHECK(schema.find("doc.json:2:") == 0);
  CHECK(schema.find("/schema") != std::string::npos);

  const auto sign = error_of(replace(kSmall, R"("sign": -1)", R"("sign": 0)"));
  CHECK(sign.find("doc.json:7:") == 0);
  CHECK(sign.find("/plates/1/sign") != std::string::npos);

  const auto dim = error_of(replace(kSmall, R"("center": [0, 0, 0], "radius": 1.0)", R"("center": [0, 0], "radius": 1.0)"));
  CHECK(dim.find("/plates/0") != std::string::npos);

  CHECK_FALSE(error_of("{ not json").empty());
  CHECK_FALSE(error_of(replace(kSmall, R"("step_rule": "armijo")", R"("step_rule": "newton")")).empty());
  CHECK_FALSE(error_of(replace(kSmall, R"("gap_tolerance": 1e-10)", R"("gap_tolerance": -1)")).empty());
}

TEST_CASE("exit codes") {
  const auto dir = scratch("codes");
  const auto small = write(dir, "small.json", kSmall);
  CHECK(run("solve " + small.string() + " --out " + (dir / "ok").string()) == 0);
  CHECK(fs::exists(dir / "ok" / "report.json"));
  CHECK(fs::exists(dir / "ok" / "weights.csv"));
  CHECK(fs::exists(dir / "ok" / "trace.csv"));

  const auto capped = write(dir, "capped.json", replace(kSmall, R"("max_iterations": 100000)", R"("max_iterations": 3)"));
  CHECK(run("solve " + capped.string() + " --out " + (dir / "capped").string()) == 2);
  CHECK(fs::exists(dir / "capped" / "report.json"));

  CHECK(run("solve " + kScenarios + "/overlapping.json --out " + (dir / "bad").string()) == 1);
  CHECK(run("solve " + (dir / "missing.json").string()) == 1);
  CHECK(run("solve") == 1);
  CHECK(run("benchmark --list") == 0);
  CHECK(run("benchmark --criterion 42") == 1);
  CHECK(run("benchmark --gap 1e-2 --max-iterations 2 --criterion 5") == 2);
  fs::remove_all(dir);
}

TEST_CASE("deterministic runs are byte-identical") {
  const auto dir = scratch("det");
  const auto small = write(dir, "small.json", kSmall);
  REQUIRE(run("solve " + small.string() + " --deterministic --out " + (dir / "a").string()) == 0);
  REQUIRE(run("solve " + small.string() + " --deterministic --out " + (dir / "b").string()) == 0);
  for (const char* f : {"report.json", "weights.csv", "trace.csv"}) {
    const auto a = slurp(dir / "a" / f);
    CHECK_FALSE(a.empty());
    CHECK(a == slurp(dir / "b" / f));
  }
  fs::remove_all(dir);
}
