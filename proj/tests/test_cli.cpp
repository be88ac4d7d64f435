#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "ergolab/cli.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using ergolab::cli::run;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch_dir() {
  auto dir = fs::temp_directory_path() / "ergolab_test_cli";
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("tower example") {
  auto r = invoke({"tower", "--n", "12", "--h", "11"});
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["residual"] == nlohmann::json::array({11}));
  CHECK(j["base"] == nlohmann::json::array({0}));
  CHECK(j["valid"] == true);
  auto manifest = nlohmann::json::parse(r.err);
  CHECK(manifest["subcommand"] == "tower");
  CHECK(manifest["parameters"]["n"] == "12");
}

TEST_CASE("rankone correlate example") {
  auto r = invoke({"rankone", "correlate", "--h1", "1", "--spacers", "auto", "--intervals", "100:200", "--A", "level:5",
                   "--n-max", "1000"});
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  CHECK(line == "n,numerator,denominator");
  std::size_t rows = 0;
  bool half_at_height = false;
  while (std::getline(in, line)) {
    ++rows;
    // A is one stage-2 level (measure 1/2) and h_2 = 150.
    if (line == "150,1,4") half_at_height = true;
  }
  CHECK(rows == 1001);
  CHECK(half_at_height);
}

TEST_CASE("f2 search example") {
  auto r = invoke({"f2", "search", "--radius", "2", "--budget", "10000", "--seed", "7", "--threads", "1"});
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["certificate"]["verdict"] == true);
  CHECK(j["five_measure_at_most_one"] == true);
  CHECK(j["measure_value"].get<double>() >= 1.0 / 131072);
}

TEST_CASE("exit codes") {
  CHECK(invoke({"tower", "--n", "8", "--h", "3", "--roof-target", "0"}).code == 1);
  CHECK(invoke({"involutions", "--n", "10", "--seed", "1"}).code == 1);
  CHECK(invoke({"tower", "--n", "8", "--h", "3", "--bogus", "1"}).code == 2);
  CHECK(invoke({"tower", "--n", "8"}).code == 2);
  CHECK(invoke({"frobnicate"}).code == 2);
  CHECK(invoke({}).code == 2);
  CHECK(invoke({"involutions", "--n", "20"}).code == 2);
  CHECK(invoke({"ledrappier", "field", "--width", "8"}).code == 2);
  CHECK(invoke({"mosaic", "generate", "--width", "8", "--height", "8"}).code == 2);
  CHECK(invoke({"f2", "search", "--budget", "10"}).code == 2);
  CHECK(invoke({"rankone", "correlate", "--A", "blob:3", "--n-max", "10"}).code == 2);
  auto usage = invoke({"rankone", "correlate", "--A", "level:x", "--n-max", "10"});
  CHECK(usage.code == 2);
  CHECK(usage.err.find("--A") != std::string::npos);

  auto help = invoke({"mosaic", "count", "--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("--width") != std::string::npos);
}

TEST_CASE("seeded runs are byte-identical") {
  auto dir = scratch_dir();
  const std::vector<std::vector<std::string>> runs = {
      {"involutions", "--n", "500", "--seed", "4"},
      {"recurrence", "--n", "80", "--seed", "9", "--mode", "series", "--horizon", "30"},
      {"ledrappier", "field", "--width", "32", "--height", "16", "--seed", "2"},
      {"ledrappier", "stats", "--width", "32", "--height", "32", "--seed", "2", "--samples", "50"},
      {"mosaic", "generate", "--width", "12", "--height", "10", "--seed", "6", "--boundary", "clipped"},
      {"f2", "search", "--budget", "5000", "--seed", "3", "--restarts", "2"},
  };
  int index = 0;
  for (auto args : runs) {
    auto a = dir / ("a" + std::to_string(index));
    auto b = dir / ("b" + std::to_string(index++));
    auto first = args, second = args;
    first.insert(first.end(), {"--out", a.string()});
    second.insert(second.end(), {"--out", b.string()});
    REQUIRE(invoke(first).code == 0);
    REQUIRE(invoke(second).code == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(!slurp(a).empty());
    auto manifest = nlohmann::json::parse(slurp(a.string() + ".manifest.json"));
    CHECK(manifest["outputs"][0] == a.string());
    CHECK(manifest["seed"].is_number());
    CHECK(manifest.contains("wall_time_s"));
  }
  fs::remove_all(dir);
}
