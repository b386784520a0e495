#include "qmodular/series.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss.hpp>

#include "qmodular/special.hpp"

namespace qmod {

namespace {

constexpr int kTailOrder = 20;

// Integral of g over [x0, inf) with x = x0 + L s / (1 - s).
template <class G>
cplx tail_integral(double x0, double L, const G& g) {
  using GL = boost::math::quadrature::gauss<double, kTailOrder>;
  const auto& xs = GL::abscissa();
  const auto& ws = GL::weights();
  CompensatedSum acc;
  auto node = [&](double t, double w) {
    const double s = 0.5 * (1.0 + t);
    const double one_minus = 1.0 - s;
    const double x = x0 + L * s / one_minus;
    acc.add(g(x) * (0.5 * w * L / (one_minus * one_minus)));
  };
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] == 0.0) {
      node(0.0, ws[i]);
    } else {
      node(xs[i], ws[i]);
      node(-xs[i], ws[i]);
    }
  }
  return acc.value();
}

// Sign of Q_tau with values at roundoff level treated as zero.
int robust_sign_q_tau(const QForm& q, cplx z) {
  const double num = double(q.a) * std::norm(z) + double(q.b) * z.real() + double(q.c);
  const double scale = std::abs(double(q.a)) * std::norm(z) + std::abs(double(q.b) * z.real()) + std::abs(double(q.c));
  if (std::abs(num) <= 1e-12 * scale) return 0;
  return sgn(num / z.imag());
}

cplx ipow(cplx z, int n) {
  cplx r = 1.0;
  cplx base = z;
  for (int e = n; e > 0; e >>= 1) {
    if (e & 1) r *= base;
    base *= base;
  }
  return r;
}

}  // namespace

FormSummer::FormSummer(const Params& params, const TruncationPolicy& policy)
    : params_(params), policy_(policy) {
  if (policy.bound_a < 1) throw DomainError("bound_a must be >= 1");
  if (!(policy.target_tol > 0.0)) throw DomainError("target_tol must be positive");
  if (policy.window_factor < 0.0) throw DomainError("window_factor must be non-negative");
  table_ = std::make_shared<const ResidueTable>(params.D(), policy.doubling_check ? 2 * policy.bound_a
                                                                                   : policy.bound_a);
}

double FormSummer::window(double v_scale) const noexcept {
  double factor = policy_.window_factor;
  if (factor == 0.0) {
    if (policy_.class_tails) {
      factor = 24.0;
    } else {
      factor = std::clamp(std::pow(1e3 / policy_.target_tol, 1.0 / (2 * params_.k() + 1)), 8.0, 400.0);
    }
  }
  return factor * std::max(std::abs(v_scale), 0.5 * params_.sqrt_d()) + 1.0;
}

SeriesValue FormSummer::sum_impl(double u, double v_scale, bool positive_only, const void* ctx,
                                 TermFn fn) const {
  const i64 A = policy_.bound_a;
  const i64 A_max = policy_.doubling_check ? 2 * A : A;
  const double W = window(v_scale);
  const i64 D = params_.D();
  CompensatedSum total;
  cplx at_A{};
  i64 terms = 0;
  for (i64 abs_a = 1; abs_a <= A_max; ++abs_a) {
    for (i64 a : {-abs_a, abs_a}) {
      if (positive_only && a < 0) continue;
      for (i64 b0 : table_->residues(abs_a)) {
        const double centre = -u - double(b0) / (2.0 * double(a));
        const auto m_lo = static_cast<i64>(std::ceil(centre - W));
        const auto m_hi = static_cast<i64>(std::floor(centre + W));
        for (i64 m = m_lo; m <= m_hi; ++m) {
          const i64 b = b0 + 2 * a * m;
          total.add(fn(ctx, QForm{a, b, (b * b - D) / (4 * a)}, 0.0));
        }
        terms += m_hi - m_lo + 1;
        if (policy_.class_tails) {
          const QForm base{a, b0, (b0 * b0 - D) / (4 * a)};
          const double right = double(m_hi) + 0.5;
          const double left = double(m_lo) - 0.5;
          total.add(tail_integral(right, right - centre, [&](double x) { return fn(ctx, base, x); }));
          total.add(tail_integral(-left, centre - left, [&](double x) { return fn(ctx, base, -x); }));
        }
      }
    }
    if (abs_a == A) at_A = total.value();
  }
  SeriesValue out;
  out.value = total.value();
  out.terms_used = terms;
  out.coarse_value = policy_.doubling_check ? at_A : out.value;
  if (policy_.doubling_check) {
    out.est_error = std::abs(out.value - at_A);
    out.converged = out.est_error <= policy_.target_tol * std::max(1.0, std::abs(out.value));
  }
  return out;
}

std::vector<QForm> FormSummer::index_set(double u, double v_scale) const {
  const i64 A = policy_.bound_a;
  const double W = window(v_scale);
  const i64 D = params_.D();
  std::vector<QForm> out;
  for (i64 abs_a = 1; abs_a <= A; ++abs_a) {
    for (i64 a : {-abs_a, abs_a}) {
      for (i64 b0 : table_->residues(abs_a)) {
        const double centre = -u - double(b0) / (2.0 * double(a));
        const auto m_lo = static_cast<i64>(std::ceil(centre - W));
        const auto m_hi = static_cast<i64>(std::floor(centre + W));
        for (i64 m = m_lo; m <= m_hi; ++m) {
          const i64 b = b0 + 2 * a * m;
          out.push_back({a, b, (b * b - D) / (4 * a)});
        }
      }
    }
  }
  return out;
}

SeriesEngine::SeriesEngine(const Params& params, const TruncationPolicy& policy) : summer_(params, policy) {}

void SeriesEngine::require_upper(const Point& p, const char* what) const {
  if (p.half() != HalfPlane::upper) throw DomainError(std::string(what) + " must lie in the upper half plane");
}

void SeriesEngine::require_lower(const Point& p, const char* what) const {
  if (p.half() != HalfPlane::lower) throw DomainError(std::string(what) + " must lie in the lower half plane");
}

SeriesValue SeriesEngine::f(int kappa, const Point& tau) const {
  if (kappa < 2) throw DomainError("f needs kappa >= 2");
  const cplx z = tau.z();
  return summer_.sum(tau.u(), tau.v(), false, [&](const QForm& q, double x) {
    return 1.0 / ipow(q_value(q, z + x), kappa);
  });
}

SeriesValue SeriesEngine::psi(const Point& tau) const {
  require_upper(tau, "tau");
  const cplx z = tau.z();
  const int kk = params().k() + 1;
  return summer_.sum(tau.u(), tau.v(), false, [&](const QForm& q, double x) {
    const Roots r = roots(q);
    const cplx zx = z + x;
    return log_ratio_unchecked(zx, r.alpha_minus, r.alpha_plus) / ipow(q_value(q, zx), kk);
  });
}

SeriesValue SeriesEngine::phi(const Point& tau) const {
  require_upper(tau, "tau");
  const cplx z = tau.z();
  const int kk = params().k() + 1;
  return summer_.sum(tau.u(), tau.v(), true, [&](const QForm& q, double x) {
    return 1.0 / ipow(q_value(q, z + x), kk);
  });
}

SeriesValue SeriesEngine::rho(const Point& tau, const Point& w) const {
  require_upper(tau, "tau");
  require_lower(w, "w");
  const cplx z = tau.z();
  const cplx wz = w.z();
  const int kk = params().k() + 1;
  return summer_.sum(tau.u(), std::max(tau.v(), std::abs(w.v())), false, [&](const QForm& q, double x) {
    const Roots r = roots(q);
    return log_ratio_unchecked(wz + x, r.alpha_minus, r.alpha_plus) / ipow(q_value(q, z + x), kk);
  });
}

SeriesValue SeriesEngine::lambda(const Point& tau, const Point& w) const {
  require_upper(tau, "tau");
  require_lower(w, "w");
  const cplx z = tau.z();
  const cplx wz = w.z();
  const double sd = params().sqrt_d();
  const int kk = params().k() + 1;
  return summer_.sum(tau.u(), std::max(tau.v(), std::abs(w.v())), false, [&](const QForm& q, double x) {
    return 2.0 * I * std::atan(q_tau(q, wz + x) / sd) / ipow(q_value(q, z + x), kk);
  });
}

SeriesValue SeriesEngine::lambda_log_form(const Point& tau, const Point& w) const {
  require_upper(tau, "tau");
  require_lower(w, "w");
  const cplx z = tau.z();
  const cplx wz = w.z();
  const int kk = params().k() + 1;
  // 2i arctan(Q_w / sqrt D) = Log_Q(w) - Log_Q(conj w) - pi i sgn(a)
  return summer_.sum(tau.u(), std::max(tau.v(), std::abs(w.v())), false, [&](const QForm& q, double x) {
    const Roots r = roots(q);
    const cplx num = log_ratio_unchecked(wz + x, r.alpha_minus, r.alpha_plus) -
                     log_ratio_unchecked(std::conj(wz) + x, r.alpha_minus, r.alpha_plus) -
                     pi * I * double(q.sign());
    return num / ipow(q_value(q, z + x), kk);
  });
}

SeriesValue SeriesEngine::Omega(const Point& tau, const Point& w) const {
  require_upper(tau, "tau");
  require_lower(w, "w");
  const cplx z = tau.z();
  const cplx wz = w.z();
  const double sd = params().sqrt_d();
  const int kk = params().k() + 1;
  return summer_.sum(tau.u(), std::max(tau.v(), std::abs(w.v())), false, [&](const QForm& q, double x) {
    const Roots r = roots(q);
    const cplx num = log_ratio_unchecked(z + x, r.alpha_minus, r.alpha_plus) -
                     log_ratio_unchecked(wz + x, r.alpha_minus, r.alpha_plus) + pi * I * double(q.sign()) +
                     2.0 * I * std::atan(q_tau(q, wz + x) / sd);
    return num / ipow(q_value(q, z + x), kk);
  });
}

SeriesValue SeriesEngine::omega(const Point& tau, const Point& zp) const {
  require_upper(tau, "tau");
  require_upper(zp, "z");
  const cplx z = tau.z();
  const cplx zz = zp.z();
  const int kk = params().k() + 1;
  return summer_.sum(tau.u(), std::max(tau.v(), zp.v()), false, [&](const QForm& q, double x) {
    const Roots r = roots(q);
    const cplx num = log_ratio_unchecked(z + x, r.alpha_minus, r.alpha_plus) -
                     log_ratio_unchecked(zz + x, r.alpha_minus, r.alpha_plus);
    return num / ipow(q_value(q, z + x), kk);
  });
}

SeriesValue SeriesEngine::Lambda(const Point& tau) const {
  require_upper(tau, "tau");
  const cplx z = tau.z();
  const int kk = params().k() + 1;
  SeriesValue out = summer_.sum(tau.u(), tau.v(), false, [&](const QForm& q, double x) {
    const cplx zx = z + x;
    const int s = x == 0.0 ? robust_sign_q_tau(q, zx) : sgn(q_tau(q, zx));
    return double(s) / ipow(q_value(q, zx), kk);
  });
  out.near_exceptional = !forms_vanishing_at(params(), tau, 1e-9).empty();
  return out;
}

namespace {

// tau^{-2k-2} Log_P(-1/tau) / P(-1/tau,1)^{k+1} for P = Q o S^{-1}.
cplx psi_term_at_inverse(const QForm& q, cplx z, int kk) {
  const QForm p = act(q, GLMatrix::S().inverse());
  const cplx zi = -1.0 / z;
  const Roots r = roots(p);
  return log_ratio_unchecked(zi, r.alpha_minus, r.alpha_plus) / ipow(q_value(p, zi), kk) / ipow(z, 2 * kk);
}

}  // namespace

InversionCheck psi_inversion_check(const Params& params, const Point& tau, const TruncationPolicy& policy) {
  if (tau.half() != HalfPlane::upper) throw DomainError("tau must lie in the upper half plane");
  const FormSummer summer(params, policy);
  const cplx z = tau.z();
  const int kk = params.k() + 1;
  CompensatedSum lhs, rhs;
  i64 terms = 0;
  for (const QForm& q : summer.index_set(tau.u(), tau.v())) {
    const Roots r = roots(q);
    const cplx qz = ipow(q_value(q, z), kk);
    lhs.add(psi_term_at_inverse(q, z, kk) - log_ratio_unchecked(z, r.alpha_minus, r.alpha_plus) / qz);
    rhs.add(std::log(std::abs(r.alpha_plus / r.alpha_minus)) / qz);
    ++terms;
  }
  InversionCheck out{};
  out.correction_forms = forms_a_neg_c_pos(params);
  for (const QForm& q : out.correction_forms) rhs.add(-2.0 * pi * I / ipow(q_value(q, z), kk));
  out.lhs = lhs.value();
  out.rhs = rhs.value();
  out.residual = std::abs(out.lhs - out.rhs);
  out.terms = terms;
  return out;
}

InversionCheck phi_inversion_check(const Params& params, const Point& tau, const TruncationPolicy& policy) {
  if (tau.half() != HalfPlane::upper) throw DomainError("tau must lie in the upper half plane");
  const FormSummer summer(params, policy);
  const cplx z = tau.z();
  const int kk = params.k() + 1;
  CompensatedSum lhs, rhs;
  i64 terms = 0;
  // phi = sum over a > 0 = (1/2) sum sgn(a)/Q^{k+1} on a negation-closed set
  for (const QForm& q : summer.index_set(tau.u(), tau.v())) {
    const QForm p = act(q, GLMatrix::S().inverse());
    const cplx zi = -1.0 / z;
    const cplx here = 0.5 * double(q.sign()) / ipow(q_value(q, z), kk);
    const cplx there = 0.5 * double(p.sign()) / ipow(q_value(p, zi), kk) / ipow(z, 2 * kk);
    lhs.add(there - here);
    ++terms;
  }
  InversionCheck out{};
  out.correction_forms = forms_a_neg_c_pos(params);
  for (const QForm& q : out.correction_forms) rhs.add(2.0 / ipow(q_value(q, z), kk));
  out.lhs = lhs.value();
  out.rhs = rhs.value();
  out.residual = std::abs(out.lhs - out.rhs);
  out.terms = terms;
  return out;
}

double lambda_log_identity_residual(const Params& params, const Point& tau, const TruncationPolicy& policy) {
  if (tau.half() != HalfPlane::upper) throw DomainError("tau must lie in the upper half plane");
  const FormSummer summer(params, policy);
  const cplx z = tau.z();
  const double sd = params.sqrt_d();
  double worst = 0.0;
  for (const QForm& q : summer.index_set(tau.u(), tau.v())) {
    const Roots r = roots(q);
    const cplx lhs = log_ratio_unchecked(z, r.alpha_minus, r.alpha_plus) -
                     log_ratio_unchecked(std::conj(z), r.alpha_minus, r.alpha_plus) + pi * I * double(q.sign());
    const double t = q_tau(q, z) / sd;
    const cplx rhs = std::log((t - I) / (t + I)) + pi * I * double(sgn(t));
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

cplx lambda_jump_prediction(const Params& params, const Point& p, double tol) {
  const int kk = params.k() + 1;
  CompensatedSum s;
  for (const QForm& q : forms_vanishing_at(params, p, tol)) {
    s.add(2.0 * double(q.sign()) / ipow(q_value(q, p.z()), kk));
  }
  return s.value();
}

}  // namespace qmod
