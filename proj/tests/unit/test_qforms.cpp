#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "qmodular/qforms.hpp"

using namespace qmod;

namespace {

bool contains(const std::vector<QForm>& v, QForm q) { return std::find(v.begin(), v.end(), q) != v.end(); }

// brute-force triple loop oracle
std::vector<QForm> brute(i64 D, i64 bound) {
  std::vector<QForm> out;
  for (i64 a = -bound; a <= bound; ++a)
    for (i64 b = -3 * bound; b <= 3 * bound; ++b)
      for (i64 c = -3 * bound; c <= 3 * bound; ++c)
        if (a != 0 && b * b - 4 * a * c == D && std::abs(b) <= 3) out.push_back({a, b, c});
  return out;
}

const cplx apex5{-0.5, std::sqrt(5.0) / 2.0};

}  // namespace

TEST_CASE("params validation") {
  CHECK_NOTHROW(Params(5, 2));
  CHECK_NOTHROW(Params(12, 4));
  CHECK_THROWS_AS(Params(4, 2), DomainError);
  CHECK_THROWS_AS(Params(7, 2), DomainError);
  CHECK_THROWS_AS(Params(5, 3), DomainError);
  CHECK_THROWS_AS(Params(-3, 2), DomainError);
  CHECK_THROWS_AS(Params(5, 0), DomainError);
}

TEST_CASE("enumeration for D=5 at bound 1 matches brute force") {
  const Params P(5, 2);
  auto got = enumerate_forms(P, 1, {0.0, 10.0});
  std::erase_if(got, [](const QForm& q) { return std::abs(q.b) > 3; });
  auto want = brute(5, 1);
  CHECK(got.size() == 8);
  CHECK(want.size() == 8);
  for (const QForm& q : want) CHECK(contains(got, q));
  CHECK(contains(enumerate_forms(P, 1), QForm{1, 1, -1}));
}

TEST_CASE("enumeration for D=8 at bound 1") {
  const auto got = enumerate_forms(Params(8, 2), 1, {0.0, 10.0});
  for (QForm q : {QForm{1, 0, -2}, QForm{-1, 0, 2}, QForm{1, 2, -1}, QForm{-1, 2, 1}, QForm{1, -2, -1},
                  QForm{-1, -2, 1}})
    CHECK(contains(got, q));
  for (const QForm& q : got) CHECK(q.discriminant() == 8);
}

TEST_CASE("enumeration order and discriminant") {
  const auto got = enumerate_forms(Params(13, 2), 6);
  CHECK(std::is_sorted(got.begin(), got.end(), FormOrder{}));
  for (const QForm& q : got) {
    CHECK(q.discriminant() == 13);
    const Geodesic g = geodesic(q, Params(13, 2));
    CHECK(std::abs(g.center) - g.radius <= 0.5 + 1e-12);
  }
}

TEST_CASE("action on forms") {
  CHECK(act({1, 1, -1}, GLMatrix::T()) == QForm{1, 3, 1});
  CHECK(act({3, -5, 7}, GLMatrix::identity()) == QForm{3, -5, 7});
  CHECK(act({1, 1, -1}, GLMatrix::S().inverse()) == QForm{-1, -1, 1});
  CHECK_THROWS_AS(GLMatrix::make(1, 2, 3, 4), DomainError);
  // right action: Q o (g h) = (Q o g) o h
  const GLMatrix g = GLMatrix::make(2, 1, 1, 1), h = GLMatrix::make(1, -3, 0, 1);
  const QForm q{2, 3, -5};
  CHECK(act(q, g * h) == act(act(q, g), h));
  CHECK(act(q, g).discriminant() == q.discriminant());
}

TEST_CASE("roots") {
  const Roots r = roots({1, 1, -1});
  CHECK(r.alpha_minus == doctest::Approx(-1.618034).epsilon(1e-6));
  CHECK(r.alpha_plus == doctest::Approx(0.618034).epsilon(1e-6));
  const Roots s = roots({-1, -1, 1});
  CHECK(s.alpha_minus == doctest::Approx(0.618034).epsilon(1e-6));
  CHECK(s.alpha_plus == doctest::Approx(-1.618034).epsilon(1e-6));
  CHECK_THROWS_AS(roots({0, 1, 1}), DomainError);
}

TEST_CASE("q_value and q_tau") {
  CHECK(std::abs(q_value({1, 1, -1}, cplx{0, 1}) - cplx{-2, 1}) < 1e-15);
  CHECK(std::abs(q_value({1, 1, -1}, apex5) - cplx{-2.5, 0}) < 1e-14);
  CHECK(std::abs(q_value({-1, -1, 1}, cplx{0, 1}) - cplx{2, -1}) < 1e-15);
  CHECK(std::abs(q_tau({1, 1, -1}, cplx{0, 1})) < 1e-15);
  CHECK(q_tau({1, 1, -1}, cplx{0, 2}) == doctest::Approx(1.5));
  CHECK_THROWS_AS(q_tau({1, 1, -1}, cplx{1, 0}), DomainError);
}

TEST_CASE("geodesic geometry") {
  const Geodesic g = geodesic({1, 1, -1}, Params(5, 2));
  CHECK(g.center == doctest::Approx(-0.5));
  CHECK(g.radius == doctest::Approx(std::sqrt(5.0) / 2));
}

TEST_CASE("crossing heights") {
  const Params P(5, 2);
  auto c = crossing_heights(P, 0.0, 0.5, 2.0);
  REQUIRE(c.size() == 1);
  CHECK(c[0].height == doctest::Approx(1.0));
  CHECK(c[0].forms.size() == 4);
  CHECK(crossing_heights(P, 0.0, 1.2).empty());
  bool found = false;
  for (const Crossing& x : crossing_heights(P, 0.25, 0.5, 1.0))
    if (std::abs(x.height - std::sqrt(11.0) / 4) < 1e-12 && contains(x.forms, QForm{1, 1, -1})) found = true;
  CHECK(found);
}

TEST_CASE("forms vanishing at a point") {
  const Params P(5, 2);
  const auto at_i = forms_vanishing_at(P, Point::upper(0, 1));
  CHECK(at_i.size() == 4);
  for (QForm q : {QForm{1, 1, -1}, QForm{1, -1, -1}, QForm{-1, 1, 1}, QForm{-1, -1, 1}}) CHECK(contains(at_i, q));
  const auto at_apex = forms_vanishing_at(P, Point::from(apex5));
  CHECK(at_apex.size() == 2);
  CHECK(contains(at_apex, QForm{1, 1, -1}));
  CHECK(contains(at_apex, QForm{-1, -1, 1}));
  CHECK(forms_vanishing_at(P, Point::upper(0, 2)).empty());
  // exact version with u = -1/2, v^2 = 5/4
  const auto exact = forms_vanishing_at_exact(P, {Rational(-1, 2), Rational(5, 4)});
  CHECK(exact.size() == 2);
}

TEST_CASE("component signatures") {
  const Params P(5, 2);
  const SignatureWindow w{};
  const auto high = component_signature(P, Point::upper(0, 2), w);
  for (const auto& [q, s] : high.entries) CHECK(s == q.sign());
  const auto lo = component_signature(P, Point::upper(0, 0.9), w);
  const auto hi = component_signature(P, Point::upper(0, 1.1), w);
  REQUIRE(lo.entries.size() == hi.entries.size());
  int differ = 0;
  for (std::size_t i = 0; i < lo.entries.size(); ++i) {
    CHECK(lo.entries[i].first == hi.entries[i].first);
    if (lo.entries[i].second != hi.entries[i].second) {
      ++differ;
      CHECK(std::abs(q_tau(lo.entries[i].first, cplx{0, 1})) < 1e-12);
    }
  }
  // only a > 0 forms are recorded: [1,1,-1] and [1,-1,-1]
  CHECK(differ == 2);
  CHECK(same_component(P, Point::upper(0, 2), Point::upper(0.3, 3)));
  CHECK_FALSE(same_component(P, Point::upper(0, 0.9), Point::upper(0, 1.1)));
  CHECK(lo.hash() != hi.hash());
}

TEST_CASE("residue table") {
  const ResidueTable t(5, 10);
  for (i64 a = 1; a <= 10; ++a)
    for (i64 b0 : t.residues(a)) {
      CHECK(b0 >= 0);
      CHECK(b0 < 2 * a);
      CHECK(((b0 * b0 - 5) % (4 * a) + 4 * a) % (4 * a) == 0);
    }
}
