#include "qmodular/special.hpp"

#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace qmod {

LogRatio log_ratio(cplx z, double alpha_minus, double alpha_plus, BranchPolicy policy) {
  if (z.imag() != 0.0) return {log_ratio_unchecked(z, alpha_minus, alpha_plus), false};
  const double x = z.real();
  if (x == alpha_minus || x == alpha_plus) throw DomainError("log ratio evaluated at a root");
  const double r = (x - alpha_minus) / (x - alpha_plus);
  if (r > 0.0) return {cplx(std::log(r), 0.0), false};
  if (policy == BranchPolicy::reject) throw DomainError("log ratio evaluated on its branch cut");
  return {cplx(std::log(-r), pi), true};
}

double beta_complete_half(int n) {
  if (n < 0) throw DomainError("beta_complete_half needs n >= 0");
  double b = pi;
  for (int j = 1; j <= n; ++j) b *= (j - 0.5) / j;
  return b;
}

double beta_inc_half(double x, int n) { return beta_inc_half(x, 1.0 - x, n); }

double beta_inc_half(double x, double one_minus_x, int n) {
  if (n < 0) throw DomainError("beta_inc_half needs n >= 0");
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("beta_inc_half needs x in [0, 1]");
  if (x == 0.0) return 0.0;
  if (one_minus_x <= 0.0) return beta_complete_half(n);
  const double p = n + 0.5;

  if (x < 0.5 && std::pow(x, n) < 1e-3) {
    // x^p sum_j (1/2)_j / j! x^j / (p + j)
    double coef = 1.0;
    double xj = 1.0;
    double sum = 0.0;
    for (int j = 0; j < 400; ++j) {
      const double term = coef * xj / (p + j);
      sum += term;
      if (term < 1e-17 * sum) break;
      coef *= (j + 0.5) / (j + 1.0);
      xj *= x;
    }
    return std::pow(x, p) * sum;
  }

  const double sx = std::sqrt(x);
  const double s1 = std::sqrt(one_minus_x);
  double b = x <= 0.5 ? 2.0 * std::asin(sx) : pi - 2.0 * std::asin(s1);
  double xa = sx;  // x^(m + 1/2)
  for (int m = 0; m < n; ++m) {
    const double a = m + 0.5;
    b = (a / (a + 0.5)) * (b - xa * s1 / a);
    xa *= x;
  }
  return b;
}

double beta_inc_oracle(double x, double p, double q, double tol) {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("beta_inc_oracle needs x in [0, 1]");
  if (!(p > 0.0 && q > 0.0)) throw DomainError("beta_inc_oracle needs p, q > 0");
  using boost::math::quadrature::gauss_kronrod;
  double total = 0.0;
  double err_total = 0.0;
  // t = r^2 on [0, x1] removes the endpoint singularity at 0. The split
  // moves to 1/2 only for x > 3/4 so that neither piece is very short.
  const double x1 = x > 0.75 ? 0.5 : x;
  if (x1 > 0.0) {
    auto f = [p, q](double r) {
      if (r == 0.0) return 0.0;
      return 2.0 * std::pow(r, 2.0 * p - 1.0) * std::pow(1.0 - r * r, q - 1.0);
    };
    double err = 0.0;
    total += gauss_kronrod<double, 61>::integrate(f, 0.0, std::sqrt(x1), 12, tol, &err);
    err_total += err;
  }
  // t = 1 - s^2 on [1/2, x] removes the singularity at 1
  if (x > 0.75) {
    auto g = [p, q](double s) {
      if (s == 0.0) return 0.0;
      return 2.0 * std::pow(1.0 - s * s, p - 1.0) * std::pow(s, 2.0 * q - 1.0);
    };
    double err = 0.0;
    total += gauss_kronrod<double, 61>::integrate(g, std::sqrt(1.0 - x), std::sqrt(0.5), 12, tol, &err);
    err_total += err;
  }
  if (err_total > tol * std::max(1.0, std::abs(total)) * 10.0)
    throw ConvergenceError("beta_inc_oracle did not converge");
  return total;
}

}  // namespace qmod
