#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qmodular/series.hpp"

using namespace qmod;

namespace {

const Params P5(5, 2);

cplx at_S(cplx t) { return -1.0 / t; }

double tolerance(const SeriesValue& a, const SeriesValue& b) {
  return std::max(1e-9, 10.0 * (a.est_error + b.est_error));
}

}  // namespace

TEST_CASE("f is a cusp form of weight 2 kappa") {
  const SeriesEngine e(P5);
  const Point t = Point::upper(0.2, 2.0);
  const SeriesValue base = e.f(3, t);
  const SeriesValue s = e.f(3, Point::from(at_S(t.z())));
  CHECK(std::abs(s.value - std::pow(t.z(), 6) * base.value) < tolerance(s, base) * std::abs(std::pow(t.z(), 6)));
  const SeriesValue tr = e.f(3, t.shifted(1.0));
  CHECK(std::abs(tr.value - base.value) < tolerance(tr, base));
  const Point q = Point::upper(0.3, 1.7);
  CHECK(std::abs(e.f(3, Point::upper(-0.3, 1.7)).value - std::conj(e.f(3, q).value)) < 1e-10);
  // odd kappa: Q and -Q cancel, so f vanishes identically
  for (double v : {3.0, 5.0, 8.0}) CHECK(std::abs(e.f(3, Point::upper(0, v)).value) < 1e-25);
  double prev = 1e300;
  for (double v : {3.0, 5.0, 8.0}) {
    const double m = std::abs(e.f(4, Point::upper(0, v)).value);
    CHECK(m < prev);
    prev = m;
  }
}

TEST_CASE("psi periodicity, decay and inversion") {
  const SeriesEngine e(P5);
  const Point t = Point::upper(0.2, 1.3);
  const SeriesValue a = e.psi(t), b = e.psi(t.shifted(1.0));
  CHECK(std::abs(a.value - b.value) < tolerance(a, b));
  double prev = 1e300;
  for (double v : {4.0, 8.0, 16.0}) {
    const double m = std::abs(e.psi(Point::upper(0, v)).value);
    CHECK(m < prev);
    prev = m;
  }
  CHECK(prev < 1e-10);
  const InversionCheck inv = psi_inversion_check(P5, Point::upper(0.1, 1.4));
  CHECK(inv.residual < 1e-9);
}

TEST_CASE("phi correction for D=5 consists of two forms") {
  const auto forms = forms_a_neg_c_pos(P5);
  REQUIRE(forms.size() == 2);
  CHECK(std::find(forms.begin(), forms.end(), QForm{-1, 1, 1}) != forms.end());
  CHECK(std::find(forms.begin(), forms.end(), QForm{-1, -1, 1}) != forms.end());
  // brute force over a box that contains every a < 0 < c form for D = 5
  int count = 0;
  for (i64 a = -5; a < 0; ++a)
    for (i64 c = 1; c <= 5; ++c)
      for (i64 b = -5; b <= 5; ++b)
        if (b * b - 4 * a * c == 5) ++count;
  CHECK(count == 2);
  const Point t = Point::upper(0.1, 1.4);
  const InversionCheck inv = phi_inversion_check(P5, t);
  CHECK(inv.residual < 1e-9);
  const cplx want = 2.0 * (1.0 / std::pow(q_value(QForm{-1, 1, 1}, t), 3) + 1.0 / std::pow(q_value(QForm{-1, -1, 1}, t), 3));
  CHECK(std::abs(inv.rhs - want) < 1e-12);
}

TEST_CASE("phi and Lambda in the unbounded component") {
  const SeriesEngine e(P5);
  const Point t = Point::upper(0, 2);
  const SeriesValue phi = e.phi(t), lam = e.Lambda(t);
  CHECK(std::abs(2.0 * phi.value - lam.value) < tolerance(phi, lam));
  const SeriesValue p1 = e.phi(Point::upper(0.3, 1.1)), p2 = e.phi(Point::upper(1.3, 1.1));
  CHECK(std::abs(p1.value - p2.value) < tolerance(p1, p2));
}

TEST_CASE("rho limits and translation") {
  const SeriesEngine e(P5);
  const Point t = Point::upper(0.15, 1.2);
  double prev = 1e300;
  for (double V : {4.0, 8.0, 16.0}) {
    const double m = std::abs(e.rho(t, Point::lower(0, V)).value);
    CHECK(m < prev);
    prev = m;
  }
  const Point w = Point::lower(0.3, 0.7);
  const SeriesValue a = e.rho(t, w), b = e.rho(t.shifted(1.0), w.shifted(1.0));
  CHECK(std::abs(a.value - b.value) < tolerance(a, b));
  prev = 1e300;
  for (double v : {2.0, 4.0, 8.0}) {
    const double m = std::abs(e.rho(Point::upper(0, v), Point::lower(0, 2)).value);
    CHECK(m < prev);
    prev = m;
  }
}

TEST_CASE("lambda pair: limit, bimodularity, log form") {
  const SeriesEngine e(P5);
  const Point t = Point::upper(-0.1, 1.3);
  const cplx target = -2.0 * pi * I * e.phi(t).value;
  const double d8 = std::abs(e.lambda(t, Point::lower(0, 8)).value - target);
  const double d16 = std::abs(e.lambda(t, Point::lower(0, 16)).value - target);
  CHECK(d16 < d8);
  CHECK(d16 < 0.6 * d8);
  const Point w = Point::lower(0.25, 0.8);
  const SeriesValue base = e.lambda(t, w);
  const SeriesValue inv = e.lambda(Point::from(at_S(t.z())), Point::from(at_S(w.z())));
  const cplx j = std::pow(t.z(), 6);
  CHECK(std::abs(inv.value - j * base.value) < tolerance(inv, base) * std::abs(j));
  const SeriesValue lf = e.lambda_log_form(t, w);
  CHECK(std::abs(lf.value - base.value) < 1e-10);
  CHECK(lambda_log_identity_residual(P5, t) < 1e-12);
}

TEST_CASE("Omega vanishes on the diagonal and is bimodular") {
  const SeriesEngine e(P5);
  for (cplx z : {cplx{0.2, 0.9}, cplx{-0.4, 1.5}}) {
    const Point t = Point::from(z);
    const SeriesValue o = e.Omega(t, t.conj());
    CHECK(std::abs(o.value) < std::max(1e-6, 10 * o.est_error));
  }
  const Point t = Point::upper(0.1, 1.2), w = Point::lower(-0.2, 0.6);
  const SeriesValue base = e.Omega(t, w);
  const SeriesValue inv = e.Omega(Point::from(at_S(t.z())), Point::from(at_S(w.z())));
  const cplx j = std::pow(t.z(), 6);
  CHECK(std::abs(inv.value - j * base.value) < tolerance(inv, base) * std::abs(j));
}

TEST_CASE("Omega(tau, -iV) approaches psi like 1/V") {
  TruncationPolicy pol;
  pol.bound_a = 128;
  const SeriesEngine e(P5, pol);
  const Point t = Point::upper(0.1, 1.3);
  const cplx psi = e.psi(t).value;
  const cplx d16 = e.Omega(t, Point::lower(0, 16)).value - psi;
  const cplx d32 = e.Omega(t, Point::lower(0, 32)).value - psi;
  CHECK(std::abs(d32) < std::abs(d16));
  // the defect halves when V doubles
  CHECK(std::abs(32.0 * d32 - 16.0 * d16) < 0.05 * std::abs(16.0 * d16));
}

TEST_CASE("omega limit and transformations") {
  const SeriesEngine e(P5);
  const Point t = Point::upper(0.05, 1.25);
  const cplx psi = e.psi(t).value;
  double prev = 1e300;
  for (double V : {4.0, 8.0, 16.0}) {
    const double d = std::abs(e.omega(t, Point::upper(0, V)).value - psi);
    CHECK(d < prev);
    prev = d;
  }
  const Point z = Point::upper(0.3, 0.9);
  const SeriesValue base = e.omega(t, z);
  const SeriesValue tr = e.omega(t.shifted(1.0), z.shifted(1.0));
  CHECK(std::abs(tr.value - base.value) < tolerance(tr, base));
  const SeriesValue inv = e.omega(Point::from(at_S(t.z())), Point::from(at_S(z.z())));
  const cplx j = std::pow(t.z(), 6);
  CHECK(std::abs(inv.value - j * base.value) < tolerance(inv, base) * std::abs(j));
}

TEST_CASE("Lambda: modularity, symmetry, jump prediction") {
  const SeriesEngine e(P5);
  const Point t = Point::upper(0.15, 2.1);
  const SeriesValue base = e.Lambda(t);
  const SeriesValue inv = e.Lambda(Point::from(at_S(t.z())));
  const cplx j = std::pow(t.z(), 6);
  CHECK(std::abs(inv.value - j * base.value) < tolerance(inv, base) * std::abs(j));
  const Point q = Point::upper(0.35, 0.8);
  CHECK(std::abs(e.Lambda(Point::upper(-0.35, 0.8)).value - std::conj(e.Lambda(q).value)) < 1e-10);
  const Point apex = Point::upper(-0.5, std::sqrt(5.0) / 2);
  CHECK(std::abs(lambda_jump_prediction(P5, apex) - cplx{-32.0 / 125.0, 0}) < 1e-14);
  // four forms vanish at i: 2 sum sgn(a)/Q(i,1)^3 = -16/125
  CHECK(std::abs(lambda_jump_prediction(P5, Point::upper(0, 1)) - cplx{-16.0 / 125.0, 0}) < 1e-14);
}

TEST_CASE("doubling the cut-off changes values by less than the tolerance") {
  TruncationPolicy a, b;
  a.bound_a = 64;
  b.bound_a = 128;
  const Point t = Point::upper(0.22, 1.05);
  const cplx va = SeriesEngine(P5, a).psi(t).value;
  const cplx vb = SeriesEngine(P5, b).psi(t).value;
  CHECK(std::abs(va - vb) < a.target_tol);
}
