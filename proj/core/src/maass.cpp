#include "qmodular/maass.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include <boost/math/quadrature/gauss.hpp>

#include "qmodular/special.hpp"

namespace qmod {

namespace {

cplx ipow(cplx z, int n) {
  cplx r = 1.0;
  for (int i = 0; i < n; ++i) r *= z;
  return r;
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// c_inf = pref * sum_{a >= 1} r(a) / a^{k+1}. Psi sums over all of Q_D and the
// a < 0 forms contribute as much as the a > 0 ones.
double cinf_prefactor(const Params& params) {
  const int k = params.k();
  return 2.0 * pi * std::pow(double(params.D()), k + 0.5) / (std::pow(2.0, 2 * k) * (2 * k + 1));
}

}  // namespace

SeriesValue eval_Psi(const Params& params, const Point& p, const TruncationPolicy& policy,
                     const PsiOptions& options) {
  if (p.half() != HalfPlane::upper) throw DomainError("Psi is defined on the upper half plane");
  if (!forms_vanishing_at(params, p, 1e-6).empty()) throw DomainError("Psi diverges on E_D");
  const FormSummer summer(params, policy);
  const cplx z = p.z();
  const int k = params.k();
  const double D = double(params.D());
  SeriesValue out = summer.sum(p.u(), p.v(), false, [&](const QForm& q, double x) {
    const cplx zx = z + x;
    const double qt = q_tau(q, zx);
    const double qt2 = qt * qt;
    const double denom = D + qt2;
    return 0.5 * ipow(q_value(q, zx), k) * beta_inc_half(D / denom, qt2 / denom, k);
  });
  if (options.cusp_tail) {
    const CInfinity cinf = c_infinity(params, 1e-10);
    const double pref = cinf_prefactor(params);
    const i64 A = policy.bound_a;
    const i64 A_max = policy.doubling_check ? 2 * A : A;
    CompensatedSum head_fine, head_coarse;
    for (i64 a = A_max; a >= 1; --a) {
      const double c = pref * double(residue_count(params.D(), a)) / std::pow(double(a), k + 1);
      head_fine.add(c);
      if (a <= A) head_coarse.add(c);
    }
    out.value += cinf.value - head_fine.value().real();
    out.coarse_value += cinf.value - head_coarse.value().real();
    if (policy.doubling_check) {
      out.est_error = std::abs(out.value - out.coarse_value);
      out.converged = out.est_error <= policy.target_tol * std::max(1.0, std::abs(out.value));
    }
  }
  return out;
}

QuadraturePath make_path(const Params& params, const Point& p) {
  if (p.half() != HalfPlane::upper) throw DomainError("path base must lie in the upper half plane");
  const double v_max = std::max(0.5 * params.sqrt_d(), p.v()) + 12.0 * std::log(10.0) / (2.0 * pi);
  std::vector<double> cuts{p.v()};
  for (const Crossing& c : crossing_heights(params, p.u(), p.v(), v_max)) cuts.push_back(c.height);
  cuts.push_back(v_max);
  QuadraturePath path{p, {}, v_max, 0};
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) path.segments.emplace_back(cuts[i], cuts[i + 1]);
  return path;
}

namespace {

constexpr int kOrder = 20;
using Pair = std::array<cplx, 2>;
using GL = boost::math::quadrature::gauss<double, kOrder>;

// Lambda, or its continuation from one component, on the ray above u.
class LambdaSource {
 public:
  LambdaSource(const Params& params, const TruncationPolicy& policy, const Point& base, EichlerIntegrand mode)
      : engine_(params, policy), mode_(mode), k_(params.k()) {
    if (mode == EichlerIntegrand::component) {
      const auto max_a = static_cast<i64>(std::floor(params.sqrt_d() / (2.0 * base.v()))) + 1;
      for (const QForm& q : enumerate_forms(params, max_a, UWindow{base.u(), 0.0})) {
        const double qt = q_tau(q, base.z());
        if (double(q.a) * qt < 0.0) enclosing_.push_back(q);
      }
    }
  }

  SeriesValue operator()(double u, double t) const {
    const Point w = Point::upper(u, t);
    if (mode_ == EichlerIntegrand::vertical) return engine_.Lambda(w);
    SeriesValue phi = engine_.phi(w);
    phi.value = 2.0 * phi.value + algebraic(cplx(u, t));
    phi.est_error *= 2.0;
    return phi;
  }

  /// The finitely many terms with frozen sign opposite to sgn(a).
  [[nodiscard]] cplx algebraic(cplx w) const {
    CompensatedSum s;
    for (const QForm& q : enclosing_) s.add(-2.0 * double(q.sign()) / ipow(q_value(q, w), k_ + 1));
    return s.value();
  }
  [[nodiscard]] bool has_algebraic_part() const noexcept { return !enclosing_.empty(); }

 private:
  SeriesEngine engine_;
  EichlerIntegrand mode_;
  int k_;
  std::vector<QForm> enclosing_;
};

struct Integrand {
  const LambdaSource& source;
  double u, v;
  int two_k;
  double series_err = 0.0;
  i64 evaluations = 0;

  Pair operator()(double t, double weight) {
    const SeriesValue lam = source(u, t);
    ++evaluations;
    const double ph = std::pow(v - t, two_k);
    const double pn = std::pow(t + v, two_k);
    series_err += weight * lam.est_error * (ph + pn);
    return {lam.value * ph, std::conj(lam.value) * pn};
  }
};

template <class F>
Pair gauss_panel(F& f, double a, double b) {
  const auto& xs = GL::abscissa();
  const auto& ws = GL::weights();
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  CompensatedSum s0, s1;
  auto node = [&](double x, double w) {
    const Pair val = f(mid + half * x, half * w);
    s0.add(val[0] * (half * w));
    s1.add(val[1] * (half * w));
  };
  for (std::size_t i = 0; i < xs.size(); ++i) {
    node(xs[i], ws[i]);
    if (xs[i] != 0.0) node(-xs[i], ws[i]);
  }
  return {s0.value(), s1.value()};
}

double pair_diff(const Pair& x, const Pair& y) { return std::abs(x[0] - y[0]) + std::abs(x[1] - y[1]); }

Pair adaptive(Integrand& f, double a, double b, const Pair& whole, const EichlerOptions& opt, int depth,
              double& err) {
  const double m = 0.5 * (a + b);
  const Pair left = gauss_panel(f, a, m);
  const Pair right = gauss_panel(f, m, b);
  const Pair both{left[0] + right[0], left[1] + right[1]};
  const double diff = pair_diff(both, whole);
  if (diff <= opt.quad_tol * (b - a) || depth >= opt.max_depth) {
    err += diff;
    return both;
  }
  const Pair l = adaptive(f, a, m, left, opt, depth + 1, err);
  const Pair r = adaptive(f, m, b, right, opt, depth + 1, err);
  return {l[0] + r[0], l[1] + r[1]};
}

// int_V^inf e^{-lambda (t - V)} (t - c)^n dt
double exp_poly_tail(double V, double c, int n, double lambda) {
  double sum = 0.0;
  double falling = 1.0;
  for (int j = 0; j <= n; ++j) {
    sum += falling * std::pow(V - c, n - j) / std::pow(lambda, j + 1);
    falling *= double(n - j);
  }
  return sum;
}

// int_V^inf of the algebraic part against both kernels, t = V + V s / (1 - s).
Pair algebraic_tail(const LambdaSource& src, double u, double v, double V, int two_k) {
  auto f = [&](double s, double) -> Pair {
    const double one_minus = 1.0 - s;
    const double t = V + V * s / one_minus;
    const double jac = V / (one_minus * one_minus);
    const cplx g = src.algebraic(cplx(u, t));
    return {g * std::pow(v - t, two_k) * jac, std::conj(g) * std::pow(t + v, two_k) * jac};
  };
  Pair total{};
  constexpr int panels = 16;
  for (int i = 0; i < panels; ++i) {
    const Pair val = gauss_panel(f, double(i) / panels, double(i + 1) / panels);
    total[0] += val[0];
    total[1] += val[1];
  }
  return total;
}

}  // namespace

EichlerPair eichler_integrals(const Params& params, const Point& p, const TruncationPolicy& policy,
                              const EichlerOptions& options) {
  if (!(options.panel_length > 0.0)) throw DomainError("panel_length must be positive");
  const int k = params.k();
  const LambdaSource source(params, policy, p, options.integrand);
  EichlerPair out{{}, {}, make_path(params, p), 0.0, 0};
  Integrand f{source, p.u(), p.v(), 2 * k};
  CompensatedSum ih, in;
  double quad_err = 0.0;
  for (const auto& [a, b] : out.path.segments) {
    const auto panels = std::max<i64>(1, static_cast<i64>(std::ceil((b - a) / options.panel_length)));
    out.path.node_budget += static_cast<int>(panels) * kOrder;
    const double h = (b - a) / double(panels);
    for (i64 i = 0; i < panels; ++i) {
      const double lo = a + h * double(i);
      const double hi = i + 1 == panels ? b : lo + h;
      Pair val = gauss_panel(f, lo, hi);
      if (options.adaptive) val = adaptive(f, lo, hi, val, options, 0, quad_err);
      ih.add(val[0]);
      in.add(val[1]);
    }
  }
  // Above v_max the exponentially decaying part is modelled by one term
  // c e^{-2 pi t}; the algebraic part of a continuation is integrated.
  const double V = out.path.v_max;
  cplx lam_top = source(p.u(), V).value;
  ++f.evaluations;
  double tail_size = 0.0;
  if (source.has_algebraic_part()) {
    lam_top -= source.algebraic(cplx(p.u(), V));
    const Pair alg = algebraic_tail(source, p.u(), p.v(), V, 2 * k);
    ih.add(alg[0]);
    in.add(alg[1]);
  }
  const cplx tail_h = lam_top * exp_poly_tail(V, p.v(), 2 * k, 2.0 * pi);
  const cplx tail_n = std::conj(lam_top) * exp_poly_tail(V, -p.v(), 2 * k, 2.0 * pi);
  tail_size = std::abs(tail_h) + std::abs(tail_n);
  ih.add(tail_h);
  in.add(tail_n);

  const double sign_k = (k % 2 == 0) ? 1.0 : -1.0;
  // on w = u + i t: (tau - w)^{2k} dw = i (-1)^k (v - t)^{2k} dt, and
  // (w + tau)^{2k} dw = i (-1)^k (t + v)^{2k} dt on w = -u + i t.
  const cplx pref_h = -std::pow(2.0 * pi * I, 2 * k + 1) / factorial(2 * k) * I * sign_k;
  const cplx pref_n = -std::pow(2.0 * I, -(2 * k + 1)) * I * sign_k;
  out.hol.value = pref_h * ih.value();
  out.nonhol.value = pref_n * in.value();
  out.quad_error = quad_err;
  out.hol.est_error = std::abs(pref_h) * (quad_err + f.series_err + tail_size);
  out.nonhol.est_error = std::abs(pref_n) * (quad_err + f.series_err + tail_size);
  out.hol.coarse_value = out.hol.value;
  out.nonhol.coarse_value = out.nonhol.value;
  out.hol.terms_used = out.nonhol.terms_used = f.evaluations;
  out.lambda_evaluations = f.evaluations;
  out.hol.converged = out.nonhol.converged = quad_err <= 1e3 * options.quad_tol * (V - p.v());
  out.hol.near_exceptional = out.nonhol.near_exceptional = !forms_vanishing_at(params, p, 1e-9).empty();
  return out;
}

SeriesValue eichler_hol(const Params& params, const Point& p, const TruncationPolicy& policy,
                        const EichlerOptions& options) {
  return eichler_integrals(params, p, policy, options).hol;
}

SeriesValue eichler_nonhol(const Params& params, const Point& p, const TruncationPolicy& policy,
                           const EichlerOptions& options) {
  return eichler_integrals(params, p, policy, options).nonhol;
}

i64 residue_count(i64 D, i64 a) {
  if (a < 1) throw DomainError("residue_count needs a >= 1");
  const i64 m = 4 * a;
  const i64 target = ((D % m) + m) % m;
  i64 n = 0;
  for (i64 b = 0; b < 2 * a; ++b) {
    if ((b * b) % m == target) ++n;
  }
  return n;
}

namespace {

__extension__ typedef __int128 i128;

i64 powmod(i64 b, i64 e, i64 m) {
  i64 r = 1 % m;
  b %= m;
  if (b < 0) b += m;
  while (e > 0) {
    if (e & 1) r = static_cast<i64>((i128)r * b % m);
    b = static_cast<i64>((i128)b * b % m);
    e >>= 1;
  }
  return r;
}

// Number of x mod n with x^2 = D mod n, multiplicative in n.
class SquareRootCounter {
 public:
  SquareRootCounter(i64 D, i64 n_max) : D_(D), spf_(static_cast<std::size_t>(n_max) + 1, 0) {
    for (i64 i = 2; i <= n_max; ++i) {
      if (spf_[static_cast<std::size_t>(i)] != 0) continue;
      for (i64 j = i; j <= n_max; j += i) {
        if (spf_[static_cast<std::size_t>(j)] == 0) spf_[static_cast<std::size_t>(j)] = static_cast<std::uint32_t>(i);
      }
    }
  }

  i64 count(i64 n) {
    i64 total = 1;
    while (n > 1) {
      const i64 p = spf_[static_cast<std::size_t>(n)];
      int e = 0;
      i64 pe = 1;
      while (n % p == 0) {
        n /= p;
        ++e;
        pe *= p;
      }
      total *= prime_power(p, e, pe);
      if (total == 0) return 0;
    }
    return total;
  }

  i64 prime_power(i64 p, int e, i64 pe) {
    if (p != 2 && D_ % p != 0) return 1 + (powmod(D_, (p - 1) / 2, p) == 1 ? 1 : -1);
    const auto key = std::make_pair(p, e);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    const i64 target = ((D_ % pe) + pe) % pe;
    i64 c = 0;
    for (i64 x = 0; x < pe; ++x) {
      if (static_cast<i64>((i128)x * x % pe) == target) ++c;
    }
    cache_[key] = c;
    return c;
  }

 private:
  i64 D_;
  std::vector<std::uint32_t> spf_;
  std::map<std::pair<i64, int>, i64> cache_;
};

// r(a) <= K 2^{omega(a)}; K from the primes dividing 2D.
double residue_bound_constant(i64 D) {
  SquareRootCounter small(D, 2);
  auto brute = [&](i64 p, int e) {
    i64 pe = 1;
    for (int i = 0; i < e; ++i) pe *= p;
    return small.prime_power(p, e, pe);
  };
  auto valuation = [](i64 n, i64 p) {
    int v = 0;
    while (n % p == 0) {
      n /= p;
      ++v;
    }
    return v;
  };
  i64 m2 = 0;
  for (int e = 2; e <= valuation(4 * D, 2) + 4; ++e) m2 = std::max(m2, brute(2, e));
  double K = std::max(1.0, double(m2) / 2.0);
  auto odd_factor = [&](i64 p, int v) {
    i64 mp = 0;
    for (int e = 1; e <= v + 2; ++e) mp = std::max(mp, brute(p, e));
    return std::max(1.0, double(mp) / 2.0);
  };
  i64 rest = D;
  while (rest % 2 == 0) rest /= 2;
  for (i64 p = 3; p * p <= rest; p += 2) {
    if (rest % p != 0) continue;
    int v = 0;
    while (rest % p == 0) {
      rest /= p;
      ++v;
    }
    K *= odd_factor(p, v);
  }
  if (rest > 1) K *= odd_factor(rest, 1);
  return K;
}

CInfinity compute_c_infinity(const Params& params, double tol) {
  const int k = params.k();
  const i64 D = params.D();
  const double pref = cinf_prefactor(params);
  const double K = residue_bound_constant(D);
  auto tail_bound = [&](double A) { return pref * 2.0 * K * std::pow(A, 0.5 - k) / (k - 0.5); };
  constexpr i64 kMaxA = i64{1} << 22;
  i64 A = 1024;
  while (A < kMaxA && tail_bound(double(A)) > tol) A *= 2;
  SquareRootCounter counter(D, 4 * A);
  CompensatedSum sum;
  // small a first would lose the tail to rounding; add from the top down
  for (i64 a = A; a >= 1; --a) {
    const i64 r = counter.count(4 * a) / 2;
    if (r != 0) sum.add(double(r) / std::pow(double(a), k + 1));
  }
  return {pref * sum.value().real(), tail_bound(double(A)), A};
}

}  // namespace

CInfinity c_infinity(const Params& params, double tol) {
  if (!(tol > 0.0)) throw DomainError("c_infinity needs tol > 0");
  static std::mutex mu;
  static std::map<std::tuple<i64, int, double>, CInfinity> memo;
  const auto key = std::make_tuple(params.D(), params.k(), tol);
  {
    const std::lock_guard lock(mu);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
  }
  const CInfinity c = compute_c_infinity(params, tol);
  const std::lock_guard lock(mu);
  memo.emplace(key, c);
  return c;
}

cplx local_polynomial(const Params& params, const Point& p) {
  if (p.half() != HalfPlane::upper) throw DomainError("local_polynomial needs an upper half plane point");
  const int k = params.k();
  const auto max_a = static_cast<i64>(std::floor(params.sqrt_d() / (2.0 * p.v()))) + 1;
  CompensatedSum s;
  for (const QForm& q : enumerate_forms(params, max_a, UWindow{p.u(), 0.0})) {
    if (double(q.a) * q_tau(q, p.z()) < 0.0) s.add(ipow(q_value(q, p.z()), k));
  }
  return beta_complete_half(k) * s.value();
}

SplitReport split_residual(const Params& params, const Point& p, const TruncationPolicy& policy,
                           const EichlerOptions& options) {
  const int k = params.k();
  const SeriesValue psi = eval_Psi(params, p, policy);
  const CInfinity cinf = c_infinity(params, 1e-10);
  EichlerOptions opt = options;
  opt.integrand = EichlerIntegrand::vertical;
  const EichlerPair e = eichler_integrals(params, p, policy, opt);
  const double dk = std::pow(double(params.D()), k + 0.5);
  const double coef = dk * factorial(2 * k) / std::pow(4.0 * pi, 2 * k + 1);
  const cplx rhs = cinf.value - coef * e.hol.value + dk * e.nonhol.value;
  SplitReport r{};
  r.psi_value = psi.value;
  r.c_inf = cinf.value;
  r.eichler_hol = e.hol.value;
  r.eichler_nonhol = e.nonhol.value;
  r.residual = std::abs(psi.value - rhs);
  r.est_error = psi.est_error + cinf.error_bound + coef * e.hol.est_error + dk * e.nonhol.est_error;
  r.local_poly = local_polynomial(params, p);
  if (r.local_poly == cplx{}) {
    r.component_hol = e.hol.value;
    r.component_nonhol = e.nonhol.value;
  } else {
    opt.integrand = EichlerIntegrand::component;
    const EichlerPair c = eichler_integrals(params, p, policy, opt);
    r.component_hol = c.hol.value;
    r.component_nonhol = c.nonhol.value;
  }
  const cplx rhs_c = cinf.value - coef * r.component_hol + dk * r.component_nonhol + r.local_poly;
  r.component_residual = std::abs(psi.value - rhs_c);
  return r;
}

cplx psi_dbar_jump_prediction(const Params& params, const Point& p, double tol) {
  const int k = params.k();
  const double v = p.v();
  CompensatedSum s;
  for (const QForm& q : forms_vanishing_at(params, p, tol)) {
    s.add(double(q.sign()) / ipow(q_value(q, std::conj(p.z())), k + 1));
  }
  return I * std::pow(double(params.D()), k + 0.5) * std::pow(v, 2 * k) * s.value();
}

}  // namespace qmod
