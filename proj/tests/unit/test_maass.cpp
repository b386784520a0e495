#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qmodular/maass.hpp"

using namespace qmod;

namespace {
const Params P5(5, 2);
}

TEST_CASE("residue counts") {
  CHECK(residue_count(5, 1) == 1);
  CHECK(residue_count(5, 2) == 0);
  // brute force for a few more a
  for (i64 a = 1; a <= 30; ++a) {
    i64 r = 0;
    for (i64 b = 0; b < 2 * a; ++b)
      if ((b * b - 5) % (4 * a) == 0) ++r;
    CHECK(residue_count(5, a) == r);
  }
}

TEST_CASE("c_inf against Psi high in the cusp") {
  const CInfinity c = c_infinity(P5, 1e-10);
  CHECK(c.error_bound <= 1e-9);
  CHECK(c.value > 0.0);
  double prev = 1e300;
  for (double V : {6.0, 10.0, 16.0}) {
    const SeriesValue s = eval_Psi(P5, Point::upper(0.0, V));
    const double d = std::abs(s.value - c.value);
    CHECK(d <= prev + 1e-9);
    prev = d;
  }
  CHECK(prev < 1e-5);
}

TEST_CASE("Psi is modular of weight -2k") {
  const Point t = Point::upper(0.23, 1.9);
  const SeriesValue base = eval_Psi(P5, t);
  const SeriesValue tr = eval_Psi(P5, t.shifted(1.0));
  CHECK(std::abs(tr.value - base.value) < std::max(1e-9, 10 * (tr.est_error + base.est_error)));
  const SeriesValue s = eval_Psi(P5, Point::from(-1.0 / t.z()));
  const cplx j = std::pow(t.z(), -4);
  CHECK(std::abs(s.value - j * base.value) < std::max(1e-9, 10 * (s.est_error + base.est_error)) * std::abs(j) +
                                                  1e-9);
}

TEST_CASE("Psi is refused on the exceptional set") {
  CHECK_THROWS_AS(eval_Psi(P5, Point::upper(0.0, 1.0)), DomainError);
  CHECK_NOTHROW(eval_Psi(P5, Point::upper(0.0, 1.01)));
}

TEST_CASE("quadrature path breaks at crossings") {
  const QuadraturePath path = make_path(P5, Point::upper(0.0, 0.8));
  REQUIRE(path.segments.size() >= 2);
  CHECK(path.segments.front().first == doctest::Approx(0.8));
  CHECK(path.segments.front().second == doctest::Approx(1.0));
  for (std::size_t i = 1; i < path.segments.size(); ++i)
    CHECK(path.segments[i].first == doctest::Approx(path.segments[i - 1].second));
  CHECK(path.v_max == doctest::Approx(std::sqrt(5.0) / 2 + 12 * std::log(10.0) / (2 * pi)));
}

TEST_CASE("Eichler integrals are stable under panel refinement") {
  const Point t = Point::upper(0.1, 2.5);
  EichlerOptions coarse, fine;
  coarse.adaptive = fine.adaptive = false;
  coarse.panel_length = 0.25;
  fine.panel_length = 0.125;
  const EichlerPair a = eichler_integrals(P5, t, {}, coarse);
  const EichlerPair b = eichler_integrals(P5, t, {}, fine);
  CHECK(std::abs(a.hol.value - b.hol.value) < 1e-7 * std::max(1.0, std::abs(b.hol.value)));
  CHECK(std::abs(a.nonhol.value - b.nonhol.value) < 1e-7 * std::max(1.0, std::abs(b.nonhol.value)));
}

TEST_CASE("non-holomorphic Eichler integral under reflection") {
  const Point t = Point::upper(0.2, 1.6);
  const cplx a = eichler_nonhol(P5, t).value;
  const cplx b = eichler_nonhol(P5, Point::upper(-0.2, 1.6)).value;
  CHECK(std::abs(b - std::conj(a)) < 1e-8 * std::max(1.0, std::abs(a)));
}

TEST_CASE("Eichler integrals exist on the exceptional set") {
  const Point on = Point::upper(0.0, 1.0);
  const EichlerPair e = eichler_integrals(P5, on);
  CHECK(std::isfinite(std::abs(e.hol.value)));
  CHECK(std::isfinite(std::abs(e.nonhol.value)));
}

TEST_CASE("split in the unbounded component") {
  const SplitReport r = split_residual(P5, Point::upper(0.1, 2.2));
  CHECK(r.residual < 1e-4);
  CHECK(std::abs(r.local_poly) == 0.0);
}

TEST_CASE("split with the component continuation below a geodesic") {
  const SplitReport r = split_residual(P5, Point::upper(0.0, 0.7));
  CHECK(r.component_residual < 1e-4);
  CHECK(std::abs(r.local_poly) > 0.0);
}

TEST_CASE("local polynomial vanishes above every geodesic") {
  CHECK(std::abs(local_polynomial(P5, Point::upper(0.3, 3.0))) == 0.0);
}

TEST_CASE("dbar jump prediction at the apex is real and nonzero") {
  const Point apex = Point::upper(-0.5, std::sqrt(5.0) / 2);
  const cplx j = psi_dbar_jump_prediction(P5, apex);
  CHECK(std::abs(j) > 0.0);
}
