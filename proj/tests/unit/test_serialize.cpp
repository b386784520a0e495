#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qmodular/serialize.hpp"

using namespace qmod;
using nlohmann::json;

TEST_CASE("complex numbers round trip") {
  const cplx z{1.25, -3.5e-17};
  const json j = complex_json(z);
  CHECK(j.at("re") == 1.25);
  CHECK(complex_from_json(j) == z);
  CHECK(complex_from_json(json::parse(j.dump())) == z);
}

TEST_CASE("forms and points") {
  const json q = QForm{1, 1, -1};
  CHECK(q.dump() == "[1,1,-1]");
  CHECK(q.get<QForm>() == QForm{1, 1, -1});
  CHECK_THROWS_AS(json::array({1, 2}).get<QForm>(), DomainError);
  const json p = Point::upper(0.5, 2.0);
  CHECK(p.at("u") == 0.5);
  const Point back = point_from_json(p);
  CHECK(back.v() == 2.0);
}

TEST_CASE("documents carry the schema tag") {
  const json d = document("eval", json{{"x", 1}});
  CHECK(d.at("schema") == "qmodular/1");
  CHECK(d.at("kind") == "eval");
  CHECK(d.at("x") == 1);
}

TEST_CASE("report fields") {
  VerificationReport r;
  r.check_id = "split.cinf";
  r.points = {Point::upper(0, 16)};
  r.residual = 1e-7;
  r.tolerance = 1e-5;
  r.passed = true;
  r.metadata["bound_a"] = "2048";
  const json j = r;
  for (const char* key : {"check_id", "points", "residual", "tolerance", "passed", "metadata"}) CHECK(j.contains(key));
  SeriesValue s;
  s.value = {1, 2};
  s.est_error = 3e-9;
  s.terms_used = 10;
  const json js = s;
  for (const char* key : {"value", "est_error", "terms_used"}) CHECK(js.contains(key));
  const json split = SplitReport{};
  for (const char* key : {"psi_value", "c_inf", "eichler_hol", "eichler_nonhol", "residual"}) CHECK(split.contains(key));
}
