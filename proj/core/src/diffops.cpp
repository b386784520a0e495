#include "qmodular/diffops.hpp"

#include <array>
#include <cmath>

#include "qmodular/special.hpp"

namespace qmod {

namespace {

void check_stencil(const DiffSpec& spec, const Point& p, double h) {
  if (h <= 0.0 || h >= 0.5 * p.v()) throw DomainError("difference step must be positive and below v/2");
  if (spec.guard == nullptr) return;
  const std::array<cplx, 8> offsets{cplx(h, 0), cplx(-h, 0), cplx(0, h), cplx(0, -h),
                                    cplx(h, h), cplx(h, -h), cplx(-h, h), cplx(-h, -h)};
  for (const cplx& d : offsets)
    if (!same_component(*spec.guard, p, Point::from(p.z() + d)))
      throw DomainError("difference stencil crosses the exceptional set");
}

void check_upper(const Point& p) {
  if (p.v() <= 0.0) throw DomainError("differential operators act on the upper half plane");
}

struct Partials {
  cplx fu, fv;
};

Partials partials(const Field& f, const Point& p, double h) {
  const cplx z = p.z();
  return {(f(z + h) - f(z - h)) / (2.0 * h), (f(z + cplx(0, h)) - f(z - cplx(0, h))) / (2.0 * h)};
}

// Field whose value at tau is an operator applied at tau; used for nesting.
template <class Op>
Field lift(Op op) {
  return [op](cplx z) { return op(Point::from(z)); };
}

}  // namespace

Wirtinger wirtinger(const Field& f, const Point& p, const DiffSpec& spec) {
  check_upper(p);
  check_stencil(spec, p, spec.step);
  const Partials d = partials(f, p, spec.step);
  return {0.5 * (d.fu - I * d.fv), 0.5 * (d.fu + I * d.fv)};
}

cplx xi_apply(const Field& f, double kappa, const Point& p, const DiffSpec& spec) {
  const Wirtinger w = wirtinger(f, p, spec);
  return 2.0 * I * std::pow(p.v(), kappa) * std::conj(w.d_taubar);
}

cplx laplacian(const Field& f, double kappa, const Point& p, const DiffSpec& spec) {
  check_upper(p);
  // second differences cancel two more digits, so they use a wider step;
  // steps h and 2h are combined to remove the h^2 term
  const double h = 10.0 * spec.step;
  check_stencil(spec, p, 2.0 * h);
  const cplx z = p.z();
  const cplx f0 = f(z);
  const double v = p.v();
  auto at = [&](double s) {
    const cplx fe = f(z + s), fw = f(z - s);
    const cplx fn = f(z + cplx(0, s)), fs = f(z - cplx(0, s));
    const cplx fuu = (fe - 2.0 * f0 + fw) / (s * s);
    const cplx fvv = (fn - 2.0 * f0 + fs) / (s * s);
    const cplx fu = (fe - fw) / (2.0 * s);
    const cplx fv = (fn - fs) / (2.0 * s);
    return -v * v * (fuu + fvv) + I * kappa * v * (fu + I * fv);
  };
  return (4.0 * at(h) - at(2.0 * h)) / 3.0;
}

double laplacian_residual(const Field& f, double kappa, const Point& p, const DiffSpec& spec) {
  return std::abs(laplacian(f, kappa, p, spec));
}

cplx raise(const Field& f, double kappa, const Point& p, const DiffSpec& spec) {
  const Wirtinger w = wirtinger(f, p, spec);
  return 2.0 * I * w.d_tau + kappa * f(p.z()) / p.v();
}

cplx cauchy_deriv(const Field& f, const Point& p, int order, const DiffSpec& spec) {
  check_upper(p);
  if (order < 0) throw DomainError("derivative order must be non-negative");
  const double r = spec.contour_radius > 0.0 ? spec.contour_radius : 0.5 * p.v();
  if (r >= p.v()) throw DomainError("Cauchy contour leaves the upper half plane");
  const int nodes = 64 * (order + 1);
  CompensatedSum s;
  for (int j = 0; j < nodes; ++j) {
    const double theta = 2.0 * pi * j / nodes;
    const cplx e = std::polar(1.0, theta);
    s.add(f(p.z() + r * e) * std::polar(1.0, -order * theta));
  }
  return std::tgamma(order + 1.0) / (nodes * std::pow(r, order)) * s.value();
}

cplx bol_apply(const Field& f, const Point& p, int order, const DiffSpec& spec) {
  return cauchy_deriv(f, p, order, spec) / std::pow(2.0 * pi * I, order);
}

BolTermCheck bol_term_check(const Params& params, const QForm& q, int n, const Point& p, const DiffSpec& spec) {
  if (n < 1) throw DomainError("bol_term_check needs n >= 1");
  if (q.discriminant() != params.D()) throw DomainError("form has the wrong discriminant");
  const auto [am, ap] = roots(q);
  const Field g = [&, am = am, ap = ap](cplx z) {
    return log_ratio_unchecked(z, am, ap) * std::pow(q_value(q, z), n - 1);
  };
  BolTermCheck out{};
  out.lhs = bol_apply(g, p, 2 * n - 1, spec);
  const double fact = std::tgamma(static_cast<double>(n));
  const double mag = fact * fact * std::pow(static_cast<double>(params.D()), n - 0.5);
  const cplx qn = std::pow(q_value(q, p), n);
  out.rhs = I * std::pow(2.0 * pi, 1 - 2 * n) * mag / qn;
  out.rhs_reciprocal = -I * std::pow(2.0 * pi, 2 * n - 1) * mag / qn;
  out.residual = std::abs(out.lhs - out.rhs) / std::abs(out.rhs);
  out.reciprocal_residual = std::abs(out.lhs - out.rhs_reciprocal) / std::abs(out.rhs_reciprocal);
  return out;
}

double bol_identity_residual(const Field& f, const Point& p, const DiffSpec& spec) {
  DiffSpec inner = spec;
  inner.guard = nullptr;
  check_stencil(spec, p, 2.0 * spec.step);
  const Field r_minus = lift([&](const Point& x) { return raise(f, -1.0, x, inner); });
  const cplx rhs = raise(r_minus, 1.0, p, inner);
  const Field d1 = lift([&](const Point& x) { return wirtinger(f, x, inner).d_tau; });
  const cplx d2 = wirtinger(d1, p, inner).d_tau / std::pow(2.0 * pi * I, 2);
  const cplx lhs = 16.0 * pi * pi * d2;
  return std::abs(lhs - rhs) / std::max(std::abs(lhs), 1e-300);
}

double xi_factorization_residual(const Field& f, double kappa, const Point& p, const DiffSpec& spec) {
  DiffSpec inner = spec;
  inner.guard = nullptr;
  check_stencil(spec, p, 20.0 * spec.step);
  const Field xf = lift([&](const Point& x) { return xi_apply(f, kappa, x, inner); });
  return std::abs(laplacian(f, kappa, p, inner) + xi_apply(xf, 2.0 - kappa, p, inner));
}

}  // namespace qmod
