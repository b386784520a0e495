#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qmodular/diffops.hpp"
#include "qmodular/maass.hpp"
#include "qmodular/special.hpp"

using namespace qmod;

namespace {
const Params P5(5, 2);
double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }
}  // namespace

TEST_CASE("Wirtinger derivatives of simple fields") {
  const Point p = Point::upper(0.3, 1.2);
  const Wirtinger sq = wirtinger([](cplx z) { return z * z; }, p);
  CHECK(std::abs(sq.d_tau - 2.0 * p.z()) < 1e-7);
  CHECK(std::abs(sq.d_taubar) < 1e-7);
  // v = (tau - conj tau)/(2i), so d/dtaubar v^2 = 2 v (-1/(2i)) = i v
  const Wirtinger v2 = wirtinger([](cplx z) { return cplx(z.imag() * z.imag(), 0); }, p);
  CHECK(std::abs(v2.d_taubar - I * p.v()) < 1e-7);
  CHECK(std::abs(v2.d_tau + I * p.v()) < 1e-7);
}

TEST_CASE("Wirtinger rule for Q_tau") {
  for (QForm q : {QForm{1, 1, -1}, QForm{-2, 3, 2}, QForm{5, -7, 2}}) {
    const Point p = Point::upper(0.17, 0.93);
    const Wirtinger w = wirtinger([q](cplx z) { return cplx(q_tau(q, z), 0); }, p);
    CHECK(std::abs(2.0 * I * p.v() * p.v() * w.d_taubar - q_value(q, p)) < 1e-6 * std::abs(q_value(q, p)));
  }
}

TEST_CASE("xi of holomorphic functions vanishes") {
  const Point p = Point::upper(-0.2, 0.8);
  CHECK(std::abs(xi_apply([](cplx z) { return std::exp(I * z) * z; }, 3.0, p)) < 1e-7);
}

TEST_CASE("xi of Psi is D^{k+1/2} Lambda") {
  const Point p = Point::upper(0.3, 1.5);
  const Field psi = [](cplx z) { return eval_Psi(P5, Point::from(z)).value; };
  DiffSpec spec;
  spec.guard = &P5;
  const cplx lhs = xi_apply(psi, -4.0, p, spec);
  const cplx rhs = std::pow(5.0, 2.5) * SeriesEngine(P5).Lambda(p).value;
  CHECK(rel(lhs, rhs) < 1e-4);
  CHECK(laplacian_residual(psi, -4.0, p, spec) < 1e-3 * std::abs(psi(p.z())));
}

TEST_CASE("stencil guard refuses to straddle a geodesic") {
  DiffSpec spec;
  spec.guard = &P5;
  spec.step = 1e-2;
  const Field f = [](cplx z) { return z; };
  CHECK_THROWS_AS(wirtinger(f, Point::upper(0.0, 1.0 + 1e-3), spec), DomainError);
}

TEST_CASE("Cauchy derivatives") {
  const Point p = Point::upper(0.4, 0.9);
  const Field ex = [](cplx z) { return std::exp(z); };
  for (int n = 1; n <= 5; ++n) CHECK(std::abs(cauchy_deriv(ex, p, n) - std::exp(p.z())) < 1e-10 * std::abs(std::exp(p.z())));
  for (int m = 1; m <= 6; ++m) {
    const Field pw = [m](cplx z) { return std::pow(z, m); };
    CHECK(std::abs(cauchy_deriv(pw, p, m) - std::tgamma(m + 1.0)) < 1e-10 * std::tgamma(m + 1.0));
  }
  const QForm q{1, 1, -1};
  const Roots r = roots(q);
  const Field lg = [r](cplx z) { return log_ratio_unchecked(z, r.alpha_minus, r.alpha_plus); };
  const Point t = Point::upper(0.0, 2.0);
  CHECK(std::abs(cauchy_deriv(lg, t, 1) + std::sqrt(5.0) / q_value(q, t)) < 1e-9);
  DiffSpec bad;
  bad.contour_radius = 1.0;
  CHECK_THROWS_AS(cauchy_deriv(ex, p, 1, bad), DomainError);
}

TEST_CASE("Bol images of the log terms") {
  const BolTermCheck a = bol_term_check(P5, {1, 1, -1}, 1, Point::upper(0, 2));
  CHECK(a.residual < 1e-8);
  const BolTermCheck b = bol_term_check(P5, {1, 1, -1}, 3, Point::upper(0.2, 2.5));
  CHECK(b.residual < 1e-6);
  const BolTermCheck c = bol_term_check(P5, {-1, -1, 1}, 2, Point::upper(0, 1.7));
  CHECK(c.residual < 1e-7);
  // the opposite sign and reciprocal power of 2 pi do not fit beyond n = 1
  CHECK(b.reciprocal_residual > 0.5);
}

TEST_CASE("Bol identity with raising operators") {
  const Field e = [](cplx z) { return std::exp(2.0 * pi * I * z); };
  CHECK(bol_identity_residual(e, Point::upper(0.1, 0.6)) < 1e-6);
}

TEST_CASE("Laplacian of simple fields") {
  const Point p = Point::upper(0.25, 1.1);
  CHECK(laplacian_residual([](cplx z) { return std::exp(z) / z; }, 2.0, p) < 1e-6);
  CHECK(laplacian_residual([](cplx z) { return cplx(z.imag(), 0); }, 0.0, p) < 1e-6);
  CHECK(xi_factorization_residual([](cplx z) { return std::exp(z) * z.imag(); }, 1.0, p) < 1e-3);
}

TEST_CASE("conjugation symmetry of the Wirtinger pair") {
  const Field f = [](cplx z) { return std::exp(z) * z.imag() * z.imag() + z * z * z * std::norm(z); };
  const Field g = [&f](cplx z) { return f(std::conj(z)); };
  const Point p = Point::upper(-0.3, 0.75);
  // f(tau) = conj(f(conj tau)), so conj(d/dtaubar [f(conj tau)]) = d/dtau f
  const cplx lhs = std::conj(wirtinger(g, p).d_taubar);
  const cplx rhs = wirtinger(f, p).d_tau;
  CHECK(rel(lhs, rhs) < 1e-6);
}
