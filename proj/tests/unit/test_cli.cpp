#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cli.hpp"

using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = qmod::cli::dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

std::string temp_path(const char* name) { return (std::filesystem::temp_directory_path() / name).string(); }

}  // namespace

TEST_CASE("forms lists [1,1,-1]") {
  const Run r = run({"forms", "--disc", "5", "--bound-a", "1"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j.at("schema") == "qmodular/1");
  CHECK(j.at("count") == 8);
  bool found = false;
  for (const auto& q : j.at("forms")) found = found || q == json::array({1, 1, -1});
  CHECK(found);
}

TEST_CASE("geodesics") {
  const Run r = run({"geodesics", "--disc", "8", "--bound-a", "2"});
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out).at("geodesics").size() > 0);
}

TEST_CASE("eval") {
  const Run r = run({"eval", "--fn", "Lambda", "--tau", "0.1", "2.2"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j.at("fn") == "Lambda");
  CHECK(j.at("value").contains("re"));
  CHECK(run({"eval", "--fn", "rho", "--tau", "0", "1.5", "--w", "0.1", "-0.5"}).code == 0);
  CHECK(run({"eval", "--fn", "theta", "--tau", "0", "1", "--z", "0.1", "0.8"}).code == 0);
}

TEST_CASE("usage errors exit 2") {
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"eval", "--fn", "nope"}).code == 2);
  CHECK(run({"eval", "--fn", "psi", "--tau", "0", "-1"}).code == 2);
  CHECK(run({"eval", "--fn", "rho", "--tau", "0", "1"}).code == 2);
  CHECK(run({"forms", "--disc", "9"}).code == 2);
  CHECK(run({"eval", "--fn", "Psi", "--tau", "0", "1"}).code == 2);
}

TEST_CASE("non-convergence exits 3") {
  // r(a) = 0 for a = 2, 3, 4 when D = 5, so the doubling check needs bound 3 to see a = 5
  const Run r = run({"eval", "--fn", "psi", "--tau", "0.1", "0.05", "--bound-a", "3", "--tol", "1e-14"});
  CHECK(r.code == 3);
}

TEST_CASE("grid writes nx * ny rows") {
  const std::string path = temp_path("qmodular_test_grid.csv");
  const Run r = run({"grid", "--fn", "Lambda", "--disc", "5", "--k", "2", "--nx", "12", "--ny", "9", "--out", path});
  REQUIRE(r.code == 0);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line.rfind("u,v,re,im,component_hash,est_error", 0) == 0);
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 12 * 9);
  std::filesystem::remove(path);
}

TEST_CASE("grid flags points on E_D") {
  const Run r = run({"grid", "--fn", "Psi", "--nx", "3", "--ny", "3", "--u-min", "-0.5", "--u-max", "0.5", "--v-min",
                     "0.5", "--v-max", "1.5"});
  REQUIRE(r.code == 0);
  // (0, 1) lies on four geodesics
  CHECK(r.out.find("0,1,,,0,,1") != std::string::npos);
}

TEST_CASE("cinfty") {
  const Run r = run({"cinfty"});
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out).at("c_inf").at("value").get<double>() > 0.0);
}

TEST_CASE("verify split exits 0 and is reproducible") {
  const Run a = run({"verify", "--suite", "split", "--disc", "5", "--k", "2", "--seed", "1"});
  CHECK(a.code == 0);
  const Run b = run({"verify", "--suite", "split", "--disc", "5", "--k", "2", "--seed", "1", "--workers", "1"});
  CHECK(a.out == b.out);
  CHECK(json::parse(a.out).at("passed") == true);
}
