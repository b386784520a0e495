#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qmodular/theta.hpp"

using namespace qmod;

TEST_CASE("kernel truncation is stable under doubling") {
  const ThetaValue t = eval_theta_kernel(2, Point::upper(0, 1), Point::upper(0, 1));
  CHECK(t.est_error < 1e-8);
  CHECK(t.forms_used > 0);
  ThetaPolicy loose;
  loose.target_tol = 1e-6;
  const ThetaValue u = eval_theta_kernel(2, Point::upper(0, 1), Point::upper(0, 1), loose);
  CHECK(std::abs(u.value - t.value) < 1e-6 * std::max(1.0, std::abs(t.value)));
}

TEST_CASE("z translation") {
  const Point tau = Point::upper(0.2, 1.1), z = Point::upper(0.13, 0.7);
  const cplx a = eval_theta_kernel(2, tau, z).value;
  const cplx b = eval_theta_kernel(2, tau, z.shifted(1.0)).value;
  CHECK(std::abs(a - b) < 1e-12 * std::abs(a));
  const ThetaZCheck t = theta_z_modularity_residual(2, tau, z, GLMatrix::T());
  CHECK(t.residual < 1e-9);
  CHECK(t.modulus_defect < 1e-9);
}

TEST_CASE("weight -2k in tau") {
  const Point tau = Point::upper(0.2, 1.1), z = Point::upper(-0.1, 0.6);
  CHECK(theta_tau_modularity(2, tau, z, GLMatrix::S()).residual < 1e-6);
  CHECK(theta_tau_modularity(2, tau, z, GLMatrix::T()).residual < 1e-6);
  CHECK(theta_tau_modularity(4, tau, z, GLMatrix::S()).residual < 1e-6);
}

TEST_CASE("a slice matches the form enumerator") {
  const Params P(5, 2);
  const Point tau = Point::upper(0.1, 0.9), z = Point::upper(0.2, 0.5);
  const cplx a = eval_theta_slice(2, 5, tau, z).value;
  const cplx b = theta_slice_direct(P, tau, z);
  CHECK(std::abs(a - b) < 1e-12 * std::max(1e-300, std::abs(a)));
}

TEST_CASE("Fourier support on discriminants") {
  const Point tau = Point::upper(0.21, 1.07);
  const auto coeffs = theta_fourier_coefficients(2, tau, 0.3, {1, 2, 3, 4, 5, 6, 7, 8});
  double largest = 0.0;
  for (const auto& [d, c] : coeffs) largest = std::max(largest, std::abs(c));
  REQUIRE(largest > 0.0);
  for (const auto& [d, c] : coeffs) {
    const i64 r = ((d % 4) + 4) % 4;
    if (r == 2 || r == 3) CHECK(std::abs(c) < 1e-10 * largest);
    else CHECK(std::abs(c) > 1e-6 * largest);
  }
}

TEST_CASE("Kronecker symbol") {
  CHECK(kronecker_symbol(0, 1) == 1);
  CHECK(kronecker_symbol(0, -1) == 1);
  CHECK(kronecker_symbol(2, 3) == -1);
  CHECK(kronecker_symbol(4, 3) == 1);
  CHECK(kronecker_symbol(8, 3) == -1);
  CHECK(kronecker_symbol(3, 5) == -1);
  CHECK(kronecker_symbol(4, 5) == 1);
  CHECK(kronecker_symbol(-1, 3) == -1);
  CHECK(kronecker_symbol(-1, -3) == 1);
  // brute force Legendre for p = 7
  for (i64 c = 1; c < 7; ++c) {
    bool square = false;
    for (i64 x = 1; x < 7; ++x) square = square || (x * x) % 7 == c;
    CHECK(kronecker_symbol(c, 7) == (square ? 1 : -1));
  }
}

TEST_CASE("z transformation rejects matrices outside Gamma_0(4)") {
  CHECK_THROWS_AS(theta_z_modularity_residual(2, Point::upper(0, 1), Point::upper(0.1, 0.8), GLMatrix::S()),
                  DomainError);
}
