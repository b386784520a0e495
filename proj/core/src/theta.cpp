#include "qmodular/theta.hpp"

#include <array>
#include <cmath>
#include <limits>

namespace qmod {

namespace {

void check_k(int k) {
  if (k < 0 || k % 2 != 0) throw DomainError("theta kernel needs an even k >= 0");
}

// Real linear forms of (a, b, c): Re Q(tau,1)/v, Im Q(tau,1)/v and Q_tau.
struct Rows {
  std::array<std::array<double, 3>, 3> r;
};

Rows rows(const Point& tau) {
  const cplx t = tau.z();
  const cplx t2 = t * t;
  const double v = tau.v();
  return {{{{t2.real() / v, t.real() / v, 1.0 / v},
            {t2.imag() / v, t.imag() / v, 0.0},
            {std::norm(t) / v, t.real() / v, 1.0 / v}}}};
}

// Half-widths of the box containing {x : x^T G x <= M}, G = R^T R.
std::array<i64, 3> box(const Rows& rw, double M) {
  std::array<std::array<double, 3>, 3> g{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int r = 0; r < 3; ++r) g[i][j] += rw.r[r][i] * rw.r[r][j];
  const double det = g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1]) -
                     g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0]) +
                     g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0]);
  const std::array<double, 3> minors{g[1][1] * g[2][2] - g[1][2] * g[2][1],
                                     g[0][0] * g[2][2] - g[0][2] * g[2][0],
                                     g[0][0] * g[1][1] - g[0][1] * g[1][0]};
  std::array<i64, 3> out{};
  for (int i = 0; i < 3; ++i) out[i] = static_cast<i64>(std::floor(std::sqrt(M * minors[i] / det))) + 1;
  return out;
}

struct Accum {
  CompensatedSum sum;
  i64 dmin = std::numeric_limits<i64>::max();
  i64 dmax = std::numeric_limits<i64>::min();
  i64 count = 0;
};

// Adds the term of (a, b, c) if its exponent is within M.
void add_term(Accum& acc, int k, const Point& tau, const Point& z, i64 a, i64 b, i64 c, double M) {
  const QForm q{a, b, c};
  const cplx qv = q_value(q, tau);
  const double v = tau.v();
  const double qt = (a * std::norm(tau.z()) + b * tau.u() + c) / v;
  const double F = std::norm(qv) / (v * v) + qt * qt;
  if (F > M) return;
  const i64 d = b * b - 4 * a * c;
  const double y = z.v();
  // e^{-4 pi |Q|^2 y / v^2} e^{2 pi d y} = e^{-2 pi y F}
  const double x_phase = -2.0 * pi * std::fmod(static_cast<double>(d) * z.u(), 1.0);
  acc.sum.add(std::abs(qt) * std::pow(qv, k) * std::exp(-2.0 * pi * y * F) * std::polar(1.0, x_phase));
  acc.dmin = std::min(acc.dmin, d);
  acc.dmax = std::max(acc.dmax, d);
  ++acc.count;
}

double exponent_bound(const ThetaPolicy& policy, double y) {
  if (!(policy.target_tol > 0.0 && policy.target_tol < 1.0)) throw DomainError("target_tol must lie in (0,1)");
  return (std::log(1.0 / policy.target_tol) + policy.margin) / (2.0 * pi * y);
}

template <class Filter>
Accum kernel_sum(int k, const Point& tau, const Point& z, double M, const Filter& keep) {
  const Rows rw = rows(tau);
  const auto bx = box(rw, M);
  Accum acc;
  for (i64 a = -bx[0]; a <= bx[0]; ++a)
    for (i64 b = -bx[1]; b <= bx[1]; ++b)
      for (i64 c = -bx[2]; c <= bx[2]; ++c)
        if (keep(a, b, c)) add_term(acc, k, tau, z, a, b, c, M);
  return acc;
}

template <class Filter>
ThetaValue evaluate(int k, const Point& tau, const Point& z, const ThetaPolicy& policy, const Filter& keep) {
  check_k(k);
  if (tau.v() <= 0.0 || z.v() <= 0.0) throw DomainError("theta kernel needs tau and z in the upper half plane");
  const double M = exponent_bound(policy, z.v());
  const double prefactor = std::pow(z.v(), k + 1);
  Accum acc = kernel_sum(k, tau, z, M, keep);
  ThetaValue out;
  out.value = prefactor * acc.sum.value();
  if (policy.doubling_check) {
    Accum wide = kernel_sum(k, tau, z, 2.0 * M, keep);
    const cplx wide_value = prefactor * wide.sum.value();
    out.est_error = std::abs(wide_value - out.value);
    out.value = wide_value;
    acc = wide;
  }
  out.forms_used = acc.count;
  if (acc.count > 0) out.d_range = {acc.dmin, acc.dmax};
  return out;
}

}  // namespace

ThetaValue eval_theta_kernel(int k, const Point& tau, const Point& z, const ThetaPolicy& policy) {
  return evaluate(k, tau, z, policy, [](i64, i64, i64) { return true; });
}

ThetaValue eval_theta_slice(int k, i64 d, const Point& tau, const Point& z, const ThetaPolicy& policy) {
  return evaluate(k, tau, z, policy, [d](i64 a, i64 b, i64 c) { return b * b - 4 * a * c == d; });
}

cplx theta_slice_direct(const Params& params, const Point& tau, const Point& z, const ThetaPolicy& policy) {
  if (tau.v() <= 0.0 || z.v() <= 0.0) throw DomainError("theta kernel needs tau and z in the upper half plane");
  const int k = params.k();
  check_k(k);
  const double M = 2.0 * exponent_bound(policy, z.v());
  const auto bx = box(rows(tau), M);
  const double halfwidth = std::abs(tau.u()) + static_cast<double>(bx[1]) + std::sqrt(double(params.D())) + 1.0;
  Accum acc;
  for (const QForm& q : enumerate_forms(params, bx[0], UWindow{tau.u(), halfwidth}))
    add_term(acc, k, tau, z, q.a, q.b, q.c, M);
  return std::pow(z.v(), k + 1) * acc.sum.value();
}

ThetaTauCheck theta_tau_modularity(int k, const Point& tau, const Point& z, const GLMatrix& g,
                                   const ThetaPolicy& policy) {
  ThetaTauCheck out{};
  out.lhs = eval_theta_kernel(k, g.apply(tau), z, policy).value;
  out.rhs = std::pow(g.j(tau.z()), -2 * k) * eval_theta_kernel(k, tau, z, policy).value;
  out.residual = std::abs(out.lhs - out.rhs) / std::max(std::abs(out.rhs), 1e-300);
  return out;
}

int kronecker_symbol(i64 c, i64 d) {
  if (d % 2 == 0) throw DomainError("kronecker_symbol needs odd d");
  if (c == 0) return (d == 1 || d == -1) ? 1 : 0;
  // Shimura's convention: (c/d) = (c/|d|), times -1 if c < 0 and d < 0
  int sign = (c < 0 && d < 0) ? -1 : 1;
  i64 n = d < 0 ? -d : d;
  i64 m = c % n;
  if (m < 0) m += n;
  // Jacobi symbol (m/n)
  int t = 1;
  while (m != 0) {
    while (m % 2 == 0) {
      m /= 2;
      const i64 r = n % 8;
      if (r == 3 || r == 5) t = -t;
    }
    std::swap(m, n);
    if (m % 4 == 3 && n % 4 == 3) t = -t;
    m %= n;
  }
  if (n != 1) return 0;
  return sign * t;
}

ThetaZCheck theta_z_modularity_residual(int k, const Point& tau, const Point& z, const GLMatrix& g,
                                        const ThetaPolicy& policy) {
  if (g.c() % 4 != 0) throw DomainError("matrix is not in Gamma_0(4)");
  const double kappa = 0.5 - k;
  const i64 d = g.d();
  const cplx eps = ((d % 4) + 4) % 4 == 1 ? cplx(1.0, 0.0) : I;
  const cplx eps_pow = std::pow(eps, 2.0 * kappa);
  const double chi = kronecker_symbol(g.c(), d);
  auto multiplier = [&](const Point& w) { return chi * eps_pow * std::pow(g.j(w.z()), kappa); };
  auto ratio = [&](const Point& w) {
    const cplx lhs = eval_theta_kernel(k, tau, g.apply(w), policy).value;
    const cplx rhs = multiplier(w) * eval_theta_kernel(k, tau, w, policy).value;
    return std::pair{lhs, rhs};
  };
  ThetaZCheck out{};
  const auto [l0, r0] = ratio(z);
  const cplx q = l0 / r0;
  out.modulus_defect = std::abs(std::abs(q) - 1.0);
  out.fitted_constant = q / std::abs(q);
  double worst = 0.0;
  for (const Point& w : {z, z.shifted(0.17, 0.0), z.shifted(-0.09, 0.15 * z.v())}) {
    const auto [l, r] = ratio(w);
    worst = std::max(worst, std::abs(l - out.fitted_constant * r) / std::max(std::abs(l), 1e-300));
  }
  out.residual = worst;
  return out;
}

std::vector<std::pair<i64, cplx>> theta_fourier_coefficients(int k, const Point& tau, double y,
                                                             const std::vector<i64>& ds, int nodes,
                                                             const ThetaPolicy& policy) {
  if (nodes < 2) throw DomainError("need at least two quadrature nodes");
  std::vector<cplx> samples(static_cast<std::size_t>(nodes));
  for (int j = 0; j < nodes; ++j)
    samples[static_cast<std::size_t>(j)] =
        eval_theta_kernel(k, tau, Point::upper(static_cast<double>(j) / nodes, y), policy).value;
  std::vector<std::pair<i64, cplx>> out;
  for (i64 d : ds) {
    CompensatedSum s;
    for (int j = 0; j < nodes; ++j)
      s.add(samples[static_cast<std::size_t>(j)] * std::polar(1.0, 2.0 * pi * static_cast<double>(d * j % nodes) / nodes));
    out.emplace_back(d, s.value() / static_cast<double>(nodes));
  }
  return out;
}

}  // namespace qmod
