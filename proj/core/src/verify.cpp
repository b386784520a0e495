#include "qmodular/verify.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iterator>
#include <thread>

#include "qmodular/maass.hpp"
#include "qmodular/theta.hpp"

namespace qmod {

// ---------------------------------------------------------------- sampling

SampleStream::SampleStream(std::uint64_t seed) : engine_(seed) {}

double SampleStream::uniform(double lo, double hi) {
  // 53 random bits mapped to [0, 1)
  const double x = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * x;
}

i64 SampleStream::integer(i64 lo, i64 hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<i64>(engine_() % span);
}

// ---------------------------------------------------------------- jumps

std::vector<double> jump_epsilons() {
  std::vector<double> eps;
  for (int j = 0; j <= 8; ++j) eps.push_back(std::ldexp(1e-2, -j));
  return eps;
}

cplx neville_at_zero(std::span<const double> x, std::span<const cplx> y) {
  if (x.size() != y.size() || x.empty()) throw DomainError("neville_at_zero needs matching non-empty samples");
  std::vector<cplx> p(y.begin(), y.end());
  const std::size_t n = x.size();
  for (std::size_t m = 1; m < n; ++m)
    for (std::size_t i = 0; i + m < n; ++i)
      p[i] = (x[i + m] * p[i] - x[i] * p[i + 1]) / (x[i + m] - x[i]);
  return p[0];
}

JumpMeasure jump_measure(const Field& f, const Params& params, const Point& p) {
  if (forms_vanishing_at(params, p, 1e-9).empty()) throw DomainError("jump_measure needs a point on the exceptional set");
  const std::vector<double> eps = jump_epsilons();
  JumpMeasure out{};
  std::vector<cplx> avg;
  for (double e : eps) {
    const cplx above = f(p.z() + cplx(0, e));
    const cplx below = f(p.z() - cplx(0, e));
    out.jump_sequence.push_back(above - below);
    avg.push_back(0.5 * (above + below));
  }
  const std::size_t n = eps.size();
  const std::span<const double> x4(eps.data() + n - 4, 4), x3(eps.data() + n - 3, 3);
  const std::span<const cplx> j4(out.jump_sequence.data() + n - 4, 4), j3(out.jump_sequence.data() + n - 3, 3);
  const std::span<const cplx> a4(avg.data() + n - 4, 4), a3(avg.data() + n - 3, 3);
  out.jump = neville_at_zero(x4, j4);
  out.average = neville_at_zero(x4, a4);
  out.extrapolation_error = std::max(std::abs(out.jump - neville_at_zero(x3, j3)),
                                     std::abs(out.average - neville_at_zero(x3, a3)));
  try {
    out.continuity_defect = out.average - f(p.z());
    out.value_at_point = true;
  } catch (const DomainError&) {
    out.continuity_defect = 0.0;
  }
  return out;
}

// ---------------------------------------------------------------- tolerances

namespace {

constexpr ToleranceEntry kTolerances[] = {
    {"transforms.exact.", 1e-10, "relative roundoff of polynomial identities in double precision"},
    {"transforms.inversion.", 1e-6, "termwise identity over one index set; roundoff times the number of terms"},
    {"transforms.correction_forms", 0.5, "count of forms differing from brute force; must be 0"},
    {"transforms.lambda_log", 1e-10, "termwise branch identity; roundoff"},
    {"transforms.modularity.", 1e-9, "max(1e-9, 10 est_error of both sides); series truncation"},
    {"omega.diagonal", 1e-6, "max(1e-6, 10 est_error); series truncation"},
    {"omega.bimodular.", 1e-9, "max(1e-9, 10 est_error of both sides); series truncation"},
    {"omega.inverse_v_law", 1e-4, "relative; remainder of cubic extrapolation in 1/V from V = 16..128"},
    {"split.", 1e-4, "series est_error + Eichler quadrature error + c_inf tail bound"},
    {"split.cinf", 1e-5, "Psi truncation at V = 16 + c_inf tail bound"},
    {"jumps.lambda.", 1e-4, "absolute; Richardson remainder on the eps sequence + series truncation"},
    {"jumps.lambda.average", 1e-6, "absolute; two-sided average against the value on E_D"},
    {"jumps.lambda.apex_nonzero", 1e-12, "relative; finite sum against its closed form"},
    {"jumps.psi.continuity", 1e-5, "absolute; Richardson remainder + Psi truncation"},
    {"jumps.psi.dbar", 1e-3, "relative; finite differences at step eps/4 + Richardson remainder"},
    {"diffops.xi_psi", 1e-4, "relative; O(h^2) central differences + Psi truncation"},
    {"diffops.laplacian_psi", 1e-3, "relative to |Psi|; second differences at 10h and 20h, Richardson-combined"},
    {"diffops.xi_lambda_star", 1e-4, "relative; central differences + quadrature error"},
    {"diffops.xi_eichler_hol", 1e-6, "relative to |E|; central differences + quadrature error"},
    {"diffops.bol_term", 1e-6, "relative; trapezoid rule on a circle, spectrally accurate"},
    {"diffops.bol_identity", 1e-6, "relative; nested central differences"},
    {"diffops.wirtinger_rules", 1e-6, "relative; O(h^2) central differences"},
    {"diffops.conj_symmetry", 1e-6, "relative; O(h^2) central differences"},
    {"diffops.xi_factorization", 1e-3, "absolute on an O(1) field; nested differences"},
    {"diffops.laplacian_holomorphic", 1e-6, "absolute on an O(1) field; Richardson-combined second differences"},
    {"eichler.", 1e-7, "relative; quadrature refinement N against 2N"},
    {"eichler.jump.", 1e-3, "absolute over max(1, |E|); Richardson remainder + quadrature error"},
    {"eichler.path_split", 0.5, "count of crossing heights missing from the path; must be 0"},
    {"theta.", 1e-6, "relative; Gaussian truncation"},
    {"theta.doubling", 1e-8, "absolute; change under doubling of the exponent bound"},
    {"theta.z_translation", 1e-12, "relative; roundoff"},
    {"theta.slice_direct", 1e-12, "relative; roundoff"},
    {"theta.fourier_support", 1e-10, "relative to the largest coefficient; aliasing + truncation"},
};

constexpr std::string_view kSuites[] = {"transforms", "omega", "split", "jumps", "diffops", "theta", "eichler-local"};

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string num(cplx z) { return num(z.real()) + (z.imag() < 0 ? "" : "+") + num(z.imag()) + "i"; }

VerificationReport report(std::string id, std::vector<Point> points, double residual, double tolerance = -1.0,
                          std::map<std::string, std::string> metadata = {}) {
  VerificationReport r;
  if (tolerance < 0.0) tolerance = tolerance_for(id).tolerance;
  r.check_id = std::move(id);
  r.points = std::move(points);
  r.residual = residual;
  r.tolerance = tolerance;
  r.passed = residual < tolerance;
  r.metadata = std::move(metadata);
  return r;
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

struct Check {
  std::string id;
  std::function<VerificationReport()> run;
};

// ---------------------------------------------------------------- sample helpers

Point off_exceptional_point(SampleStream& rs, const Params& params, double v_lo = 0.4, double v_hi = 3.0,
                            double margin = 1e-3) {
  for (;;) {
    const Point p = Point::upper(rs.uniform(-0.5, 0.5), rs.uniform(v_lo, v_hi));
    if (forms_vanishing_at(params, p, margin).empty()) return p;
  }
}

bool in_unbounded_component(const Params& params, const Point& p) {
  return crossing_heights(params, p.u(), p.v()).empty();
}

QForm sample_form(SampleStream& rs, const Params& params) {
  static thread_local std::vector<QForm> pool;
  static thread_local i64 pool_d = 0;
  if (pool_d != params.D()) {
    pool = enumerate_forms(params, 8, UWindow{0.0, 4.0});
    pool_d = params.D();
  }
  return pool[static_cast<std::size_t>(rs.integer(0, static_cast<i64>(pool.size()) - 1))];
}

GLMatrix sample_gamma(SampleStream& rs) {
  GLMatrix g = GLMatrix::identity();
  const i64 len = rs.integer(1, 6);
  for (i64 i = 0; i < len; ++i) {
    switch (rs.integer(0, 2)) {
      case 0: g = g * GLMatrix::T(); break;
      case 1: g = g * GLMatrix::T().inverse(); break;
      default: g = g * GLMatrix::S(); break;
    }
  }
  return g;
}

// A point on S_q met by no other geodesic within 1e-6.
Point point_on_geodesic(SampleStream& rs, const Params& params, const QForm& q) {
  const Geodesic g = geodesic(q, params);
  for (;;) {
    const double theta = rs.uniform(0.3, pi - 0.3);
    const Point p = Point::upper(g.center + g.radius * std::cos(theta), g.radius * std::sin(theta));
    if (forms_vanishing_at(params, p, 1e-6).size() == 2) return p;
  }
}

// Form of the smallest geodesic through the apex height sqrt(D)/2.
QForm apex_form(const Params& params) {
  const i64 b = params.D() % 2;
  return {1, b, (b * b - params.D()) / 4};
}

Point apex_point(const Params& params) {
  const QForm q = apex_form(params);
  return Point::upper(-0.5 * double(q.b), 0.5 * params.sqrt_d());
}

// ---------------------------------------------------------------- transforms

std::vector<Check> transforms_suite(const Params& params, SampleStream& rs, const TruncationPolicy& policy) {
  std::vector<Check> checks;
  constexpr int kSamples = 200;
  struct Sample {
    QForm q;
    GLMatrix g;
    Point tau;
  };
  std::vector<Sample> samples;
  for (int i = 0; i < kSamples; ++i) {
    const QForm q = sample_form(rs, params);
    const GLMatrix g = sample_gamma(rs);
    samples.push_back({q, g, Point::upper(rs.uniform(-2.0, 2.0), rs.uniform(0.1, 3.0))});
  }
  const double D = double(params.D());

  checks.push_back({"transforms.exact.bkk_identity", [=] {
                      double worst = 0.0;
                      for (const auto& s : samples) {
                        const double v = s.tau.v(), qt = q_tau(s.q, s.tau);
                        const double lhs = D * v * v + qt * qt * v * v;
                        worst = std::max(worst, std::abs(lhs - std::norm(q_value(s.q, s.tau))) / lhs);
                      }
                      return report("transforms.exact.bkk_identity", {}, worst, -1.0, {{"samples", num(kSamples)}});
                    }});
  checks.push_back({"transforms.exact.invariant_factors", [=] {
                      double worst = 0.0;
                      for (const auto& s : samples) {
                        const QForm qg = act(s.q, s.g);
                        const Point gt = s.g.apply(s.tau);
                        const double a = q_tau(qg, s.tau), b = q_tau(s.q, gt);
                        worst = std::max(worst, std::abs(a - b) / std::max(1.0, std::abs(b)));
                        const double c = gt.v() / std::abs(q_value(s.q, gt));
                        const double d = s.tau.v() / std::abs(q_value(qg, s.tau));
                        worst = std::max(worst, std::abs(c - d) / d);
                      }
                      return report("transforms.exact.invariant_factors", {}, worst, -1.0, {{"samples", num(kSamples)}});
                    }});
  checks.push_back({"transforms.exact.gamma_on_forms", [=] {
                      double worst = 0.0;
                      for (const auto& s : samples) {
                        const cplx lhs = q_value(act(s.q, s.g), s.tau);
                        const cplx j = s.g.j(s.tau.z());
                        worst = std::max(worst, rel(lhs, j * j * q_value(s.q, s.g.apply(s.tau))));
                      }
                      return report("transforms.exact.gamma_on_forms", {}, worst, -1.0, {{"samples", num(kSamples)}});
                    }});
  checks.push_back({"transforms.exact.derivative_rules", [=] {
                      double worst = 0.0;
                      for (const auto& s : samples) {
                        const cplx t = s.tau.z();
                        const double v = s.tau.v();
                        const cplx q = q_value(s.q, t);
                        const cplx q1 = 2.0 * double(s.q.a) * t + double(s.q.b);
                        const double q2 = 2.0 * double(s.q.a);
                        worst = std::max(worst, rel(q_tau(s.q, t) * v + I * v * q1, q));
                        worst = std::max(worst, rel(q1 * q1 - 2.0 * q2 * q, cplx(D, 0.0)));
                      }
                      return report("transforms.exact.derivative_rules", {}, worst, -1.0, {{"samples", num(kSamples)}});
                    }});

  std::vector<Point> inv_points;
  for (int i = 0; i < 3; ++i) inv_points.push_back(off_exceptional_point(rs, params, 0.6, 2.0));
  checks.push_back({"transforms.inversion.psi", [=] {
                      double worst = 0.0;
                      for (const Point& p : inv_points) worst = std::max(worst, psi_inversion_check(params, p, policy).residual);
                      return report("transforms.inversion.psi", inv_points, worst);
                    }});
  checks.push_back({"transforms.inversion.phi", [=] {
                      double worst = 0.0;
                      for (const Point& p : inv_points) worst = std::max(worst, phi_inversion_check(params, p, policy).residual);
                      return report("transforms.inversion.phi", inv_points, worst);
                    }});
  checks.push_back({"transforms.lambda_log", [=] {
                      double worst = 0.0;
                      for (const Point& p : inv_points)
                        worst = std::max(worst, lambda_log_identity_residual(params, p, policy));
                      return report("transforms.lambda_log", inv_points, worst);
                    }});
  checks.push_back({"transforms.correction_forms", [=] {
                      // a < 0 < c forces |a| c <= D/4 and b^2 < D
                      std::vector<QForm> brute;
                      const i64 Di = params.D();
                      for (i64 a = -Di; a < 0; ++a)
                        for (i64 b = -Di; b <= Di; ++b)
                          for (i64 c = 1; c <= Di; ++c)
                            if (b * b - 4 * a * c == Di) brute.push_back({a, b, c});
                      std::sort(brute.begin(), brute.end(), FormOrder{});
                      auto listed = forms_a_neg_c_pos(params);
                      std::sort(listed.begin(), listed.end(), FormOrder{});
                      std::vector<QForm> diff;
                      std::set_symmetric_difference(brute.begin(), brute.end(), listed.begin(), listed.end(),
                                                    std::back_inserter(diff), FormOrder{});
                      std::string forms;
                      for (const QForm& q : listed)
                        forms += "[" + std::to_string(q.a) + "," + std::to_string(q.b) + "," + std::to_string(q.c) + "]";
                      return report("transforms.correction_forms", {}, double(diff.size()), -1.0,
                                    {{"forms", forms}, {"count", std::to_string(listed.size())}});
                    }});

  std::vector<Point> mod_points;
  for (int i = 0; i < 3; ++i) mod_points.push_back(off_exceptional_point(rs, params, 0.8, 2.5));
  auto modularity = [=](std::string id, const GLMatrix& g) {
    return Check{id, [=] {
                   double worst = 0.0, allowed = 0.0;
                   const SeriesEngine eng(params, policy);
                   const double base = tolerance_for(id).tolerance;
                   std::map<std::string, std::string> meta;
                   for (const Point& p : mod_points) {
                     const Point gp = g.apply(p);
                     const cplx j = g.j(p.z());
                     const SeriesValue a = eval_Psi(params, gp, policy), b = eval_Psi(params, p, policy);
                     const cplx jp = std::pow(j, -2 * params.k());
                     const SeriesValue c = eng.Lambda(gp), d = eng.Lambda(p);
                     const cplx jl = std::pow(j, 2 * params.k() + 2);
                     const double r1 = std::abs(a.value - jp * b.value);
                     const double t1 = std::max(base, 10.0 * (a.est_error + std::abs(jp) * b.est_error));
                     const double r2 = std::abs(c.value - jl * d.value);
                     const double t2 = std::max(base, 10.0 * (c.est_error + std::abs(jl) * d.est_error));
                     // report the worst ratio residual / allowed on a common scale
                     for (auto [r, t] : {std::pair{r1, t1}, std::pair{r2, t2}})
                       if (r / t > (allowed > 0 ? worst / allowed : -1.0)) {
                         worst = r;
                         allowed = t;
                       }
                   }
                   meta["functions"] = "Psi weight -2k, Lambda weight 2k+2";
                   return report(id, mod_points, worst, allowed, meta);
                 }};
  };
  checks.push_back(modularity("transforms.modularity.S", GLMatrix::S()));
  checks.push_back(modularity("transforms.modularity.T", GLMatrix::T()));
  return checks;
}

// ---------------------------------------------------------------- omega

std::vector<Check> omega_suite(const Params& params, SampleStream& rs, const TruncationPolicy& policy) {
  std::vector<Check> checks;
  std::vector<Point> pts;
  for (int i = 0; i < 5; ++i) pts.push_back(off_exceptional_point(rs, params, 0.6, 2.5));
  checks.push_back({"omega.diagonal", [=] {
                      const SeriesEngine eng(params, policy);
                      double worst = 0.0, allowed = 0.0;
                      for (const Point& p : pts) {
                        const SeriesValue s = eng.Omega(p, p.conj());
                        const double t = std::max(tolerance_for("omega.diagonal").tolerance, 10.0 * s.est_error);
                        if (allowed == 0.0 || std::abs(s.value) / t > worst / allowed) {
                          worst = std::abs(s.value);
                          allowed = t;
                        }
                      }
                      return report("omega.diagonal", pts, worst, allowed);
                    }});
  const Point w = Point::lower(rs.uniform(-0.5, 0.5), rs.uniform(0.5, 2.0));
  auto bimod = [=](std::string id, const GLMatrix& g) {
    return Check{id, [=] {
                   const SeriesEngine eng(params, policy);
                   double worst = 0.0, allowed = 0.0;
                   std::vector<Point> used;
                   for (std::size_t i = 0; i < 3; ++i) {
                     const Point& p = pts[i];
                     const SeriesValue a = eng.Omega(g.apply(p), g.apply(w));
                     const SeriesValue b = eng.Omega(p, w);
                     const cplx j = std::pow(g.j(p.z()), 2 * params.k() + 2);
                     const double r = std::abs(a.value - j * b.value);
                     const double t = std::max(tolerance_for(id).tolerance, 10.0 * (a.est_error + std::abs(j) * b.est_error));
                     if (allowed == 0.0 || r / t > worst / allowed) {
                       worst = r;
                       allowed = t;
                     }
                     used.push_back(p);
                   }
                   used.push_back(w);
                   return report(id, used, worst, allowed);
                 }};
  };
  checks.push_back(bimod("omega.bimodular.S", GLMatrix::S()));
  checks.push_back(bimod("omega.bimodular.T", GLMatrix::T()));
  checks.push_back({"omega.inverse_v_law", [=] {
                      // Omega(tau, -iV) - psi(tau) = i sqrt(D)/V sum 1/(a Q(tau,1)^{k+1}) + O(V^-2)
                      const Point p = pts[0];
                      TruncationPolicy pol = policy;
                      pol.bound_a = std::max<i64>(policy.bound_a, 128);
                      const SeriesEngine eng(params, pol);
                      const cplx psi = eng.psi(p).value;
                      // polynomial extrapolation of V (Omega - psi) in 1/V
                      const std::array<double, 4> heights{16.0, 32.0, 64.0, 128.0};
                      std::array<double, 4> x{};
                      std::array<cplx, 4> scaled{};
                      for (std::size_t i = 0; i < heights.size(); ++i) {
                        x[i] = 1.0 / heights[i];
                        scaled[i] = heights[i] * (eng.Omega(p, Point::lower(0.0, heights[i])).value - psi);
                      }
                      const cplx limit = neville_at_zero(x, scaled);
                      const cplx d1 = scaled[0] / heights[0];
                      const cplx z = p.z();
                      const int kk = params.k() + 1;
                      const cplx predicted =
                          I * params.sqrt_d() * eng.summer().sum(p.u(), p.v(), false, [&](const QForm& q, double x) {
                            return 1.0 / (double(q.a) * std::pow(q_value(q, z + x), kk));
                          }).value;
                      return report("omega.inverse_v_law", {p}, rel(limit, predicted), -1.0,
                                    {{"defect_V16", num(std::abs(d1))},
                                     {"extrapolated_coefficient", num(limit)},
                                     {"predicted_coefficient", num(predicted)}});
                    }});
  return checks;
}

// ---------------------------------------------------------------- split

std::vector<Check> split_suite(const Params& params, SampleStream& rs, const TruncationPolicy& policy) {
  std::vector<Check> checks;
  const double apex = 0.5 * params.sqrt_d();
  for (int i = 0; i < 2; ++i) {
    const Point p = off_exceptional_point(rs, params, apex + 0.05, 3.0);
    const std::string id = "split.unbounded." + std::to_string(i);
    checks.push_back({id, [=] {
                        const SplitReport r = split_residual(params, p, policy);
                        return report(id, {p}, r.residual, -1.0,
                                      {{"psi", num(r.psi_value)},
                                       {"c_inf", num(r.c_inf)},
                                       {"eichler_hol", num(r.eichler_hol)},
                                       {"eichler_nonhol", num(r.eichler_nonhol)},
                                       {"est_error", num(r.est_error)}});
                      }});
  }
  for (int i = 0; i < 2; ++i) {
    Point p = off_exceptional_point(rs, params, 0.4, apex - 0.05);
    while (in_unbounded_component(params, p)) p = off_exceptional_point(rs, params, 0.4, apex - 0.05);
    const std::string id = "split.component." + std::to_string(i);
    checks.push_back({id, [=] {
                        const SplitReport r = split_residual(params, p, policy);
                        SignatureWindow win{p.u(), 1.0, 0.05};
                        return report(id, {p}, r.component_residual, -1.0,
                                      {{"psi", num(r.psi_value)},
                                       {"local_polynomial", num(r.local_poly)},
                                       {"component_hol", num(r.component_hol)},
                                       {"component_nonhol", num(r.component_nonhol)},
                                       {"vertical_path_residual", num(r.residual)},
                                       {"component_hash", std::to_string(component_signature(params, p, win).hash())},
                                       {"est_error", num(r.est_error)}});
                      }});
  }
  checks.push_back({"split.cinf", [=] {
                      const Point p = Point::upper(0.0, 16.0);
                      TruncationPolicy pol = policy;
                      pol.bound_a = 2048;
                      pol.doubling_check = false;
                      const SeriesValue s = eval_Psi(params, p, pol, PsiOptions{false});
                      const CInfinity c = c_infinity(params);
                      return report("split.cinf", {p}, std::abs(s.value - c.value), -1.0,
                                    {{"psi", num(s.value)},
                                     {"c_inf", num(c.value)},
                                     {"c_inf_error_bound", num(c.error_bound)},
                                     {"c_inf_terms", std::to_string(c.terms)},
                                     {"psi_bound_a", std::to_string(pol.bound_a)}});
                    }});
  return checks;
}

// ---------------------------------------------------------------- jumps

std::vector<Check> jumps_suite(const Params& params, SampleStream& rs, const TruncationPolicy& policy) {
  std::vector<Check> checks;
  const Point apex = apex_point(params);
  const Field lambda = [params, policy](cplx z) { return SeriesEngine(params, policy).Lambda(Point::from(z)).value; };

  std::vector<Point> sampled;
  for (int i = 0; i < 3; ++i) {
    const QForm q = sample_form(rs, params);
    sampled.push_back(point_on_geodesic(rs, params, q.a > 0 ? q : -q));
  }
  auto lambda_jump = [=](std::string id, const Point& p) {
    return Check{id, [=] {
                   const JumpMeasure m = jump_measure(lambda, params, p);
                   const cplx predicted = lambda_jump_prediction(params, p);
                   return report(id, {p}, std::abs(m.jump - predicted), -1.0,
                                 {{"jump", num(m.jump)},
                                  {"predicted", num(predicted)},
                                  {"extrapolation_error", num(m.extrapolation_error)}});
                 }};
  };
  checks.push_back(lambda_jump("jumps.lambda.apex", apex));
  for (std::size_t i = 0; i < sampled.size(); ++i)
    checks.push_back(lambda_jump("jumps.lambda.sampled." + std::to_string(i), sampled[i]));

  checks.push_back({"jumps.lambda.average", [=] {
                      const JumpMeasure m = jump_measure(lambda, params, sampled[0]);
                      return report("jumps.lambda.average", {sampled[0]}, std::abs(m.continuity_defect), -1.0,
                                    {{"average", num(m.average)}});
                    }});
  checks.push_back({"jumps.lambda.apex_nonzero", [=] {
                      // only +-q vanish at the apex: jump = 4 / Q(p,1)^{k+1}
                      const QForm q = apex_form(params);
                      const cplx closed = 4.0 / std::pow(q_value(q, apex), params.k() + 1);
                      const cplx predicted = lambda_jump_prediction(params, apex);
                      const double r = std::abs(closed) > 0 ? rel(predicted, closed) : 1.0;
                      return report("jumps.lambda.apex_nonzero", {apex}, r, -1.0, {{"jump", num(predicted)}});
                    }});
  const Field psi = [params, policy](cplx z) { return eval_Psi(params, Point::from(z), policy).value; };
  checks.push_back({"jumps.psi.continuity", [=] {
                      const JumpMeasure m = jump_measure(psi, params, apex);
                      return report("jumps.psi.continuity", {apex}, std::abs(m.jump), -1.0,
                                    {{"average", num(m.average)},
                                     {"extrapolation_error", num(m.extrapolation_error)}});
                    }});
  checks.push_back({"jumps.psi.dbar", [=] {
                      // the difference step shrinks with eps so the stencil stays on one side
                      const std::vector<double> eps = jump_epsilons();
                      std::vector<cplx> seq;
                      for (double e : eps) {
                        DiffSpec spec;
                        spec.step = e / 4.0;
                        const cplx above = wirtinger(psi, Point::from(apex.z() + cplx(0, e)), spec).d_taubar;
                        const cplx below = wirtinger(psi, Point::from(apex.z() - cplx(0, e)), spec).d_taubar;
                        seq.push_back(above - below);
                      }
                      const std::size_t n = eps.size();
                      const cplx jump = neville_at_zero(std::span<const double>(eps.data() + n - 4, 4),
                                                        std::span<const cplx>(seq.data() + n - 4, 4));
                      const cplx predicted = psi_dbar_jump_prediction(params, apex);
                      return report("jumps.psi.dbar", {apex}, rel(jump, predicted), -1.0,
                                    {{"jump", num(jump)}, {"predicted", num(predicted)}});
                    }});
  return checks;
}

// ---------------------------------------------------------------- diffops

std::vector<Check> diffops_suite(const Params& params, SampleStream& rs, const TruncationPolicy& policy) {
  std::vector<Check> checks;
  // wider margin: the Laplacian stencil reaches 2e-3
  const Point p = off_exceptional_point(rs, params, 0.6, 2.5, 0.05);
  const Field psi = [params, policy](cplx z) { return eval_Psi(params, Point::from(z), policy).value; };
  const double Dk = std::pow(double(params.D()), params.k() + 0.5);

  checks.push_back({"diffops.xi_psi", [=] {
                      DiffSpec spec;
                      spec.guard = &params;
                      const cplx xi = xi_apply(psi, -2.0 * params.k(), p, spec);
                      const cplx lam = Dk * SeriesEngine(params, policy).Lambda(p).value;
                      return report("diffops.xi_psi", {p}, rel(xi, lam), -1.0, {{"xi_psi", num(xi)}, {"lambda", num(lam)}});
                    }});
  checks.push_back({"diffops.laplacian_psi", [=] {
                      DiffSpec spec;
                      spec.guard = &params;
                      const double lap = laplacian_residual(psi, -2.0 * params.k(), p, spec);
                      const double mag = std::abs(psi(p.z()));
                      return report("diffops.laplacian_psi", {p}, lap / mag, -1.0, {{"laplacian", num(lap)}});
                    }});
  // xi of the Eichler integrals needs the integrand to be Lambda near p,
  // which holds in the unbounded component
  const Point pu = off_exceptional_point(rs, params, 0.5 * params.sqrt_d() + 0.1, 2.5);
  checks.push_back({"diffops.xi_lambda_star", [=] {
                      const Field ls = [&](cplx z) { return eichler_nonhol(params, Point::from(z), policy).value; };
                      const cplx xi = xi_apply(ls, -2.0 * params.k(), pu);
                      const cplx lam = SeriesEngine(params, policy).Lambda(pu).value;
                      return report("diffops.xi_lambda_star", {pu}, rel(xi, lam), -1.0, {{"xi", num(xi)}, {"lambda", num(lam)}});
                    }});
  checks.push_back({"diffops.xi_eichler_hol", [=] {
                      const Field eh = [&](cplx z) { return eichler_hol(params, Point::from(z), policy).value; };
                      const cplx xi = xi_apply(eh, -2.0 * params.k(), pu);
                      const double scale = std::max(1.0, std::abs(eh(pu.z())) * std::pow(pu.v(), -2.0 * params.k()));
                      return report("diffops.xi_eichler_hol", {pu}, std::abs(xi) / scale, -1.0, {{"xi", num(xi)}});
                    }});

  std::vector<std::pair<QForm, Point>> bol_cases;
  for (int i = 0; i < 3; ++i) {
    const QForm q = sample_form(rs, params);
    for (int j = 0; j < 2; ++j) bol_cases.push_back({q, Point::upper(rs.uniform(-0.5, 0.5), rs.uniform(0.6, 2.5))});
  }
  checks.push_back({"diffops.bol_term", [=] {
                      double worst = 0.0, reciprocal = 0.0;
                      std::vector<Point> pts;
                      for (const auto& [q, x] : bol_cases) {
                        pts.push_back(x);
                        for (int n = 1; n <= 3; ++n) {
                          const BolTermCheck b = bol_term_check(params, q, n, x);
                          worst = std::max(worst, b.residual);
                          reciprocal = std::max(reciprocal, b.reciprocal_residual);
                        }
                      }
                      return report("diffops.bol_term", pts, worst, -1.0, {{"reciprocal_constant_residual", num(reciprocal)}});
                    }});
  const Point pb = Point::upper(rs.uniform(-0.5, 0.5), rs.uniform(0.6, 1.5));
  checks.push_back({"diffops.bol_identity", [=] {
                      const Field e = [](cplx z) { return std::exp(2.0 * pi * I * z); };
                      return report("diffops.bol_identity", {pb}, bol_identity_residual(e, pb));
                    }});

  std::vector<std::pair<QForm, Point>> rule_cases;
  for (int i = 0; i < 20; ++i)
    rule_cases.push_back({sample_form(rs, params), Point::upper(rs.uniform(-1.0, 1.0), rs.uniform(0.4, 2.5))});
  checks.push_back({"diffops.wirtinger_rules", [=] {
                      double worst = 0.0;
                      std::vector<Point> pts;
                      for (const auto& [q, x] : rule_cases) {
                        pts.push_back(x);
                        const double v = x.v();
                        const cplx t = x.z();
                        const Field qt = [q = q](cplx z) { return cplx(q_tau(q, z), 0.0); };
                        const Field qt_reflected = [q = q](cplx z) { return cplx(q_tau(q, cplx(-z.real(), z.imag())), 0.0); };
                        const Field qv2 = [q = q](cplx z) { return q_value(q, z) / (z.imag() * z.imag()); };
                        const Field v2qb = [q = q](cplx z) { return z.imag() * z.imag() / q_value(q, std::conj(z)); };
                        const Field qbv2 = [q = q](cplx z) { return q_value(q, std::conj(z)) / (z.imag() * z.imag()); };
                        const cplx qb = q_value(q, std::conj(t));
                        const double qtv = q_tau(q, t);
                        const std::array<std::pair<cplx, cplx>, 6> rules{{
                            {v * v * wirtinger(qt_reflected, x).d_tau, 0.5 * I * q_value(q, -std::conj(t))},
                            {v * v * wirtinger(qt, x).d_tau, 0.5 * I * qb},
                            {v * v * wirtinger(qv2, x).d_tau, I * qtv},
                            {wirtinger(v2qb, x).d_taubar, I * v * v * qtv / (qb * qb)},
                            {2.0 * I * v * v * wirtinger(qt, x).d_taubar, q_value(q, t)},
                            {I * v * v * wirtinger(qbv2, x).d_taubar, qtv},
                        }};
                        for (const auto& [lhs, rhs] : rules)
                          worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
                      }
                      return report("diffops.wirtinger_rules", pts, worst, -1.0, {{"identities", "6"}, {"samples", "20"}});
                    }});
  checks.push_back({"diffops.conj_symmetry", [=] {
                      // f(tau) = e^tau v^2 + tau^3 |tau|^2 satisfies conj(f(conj tau)) = f(tau)
                      const Field f = [](cplx z) { return std::exp(z) * z.imag() * z.imag() + z * z * z * std::norm(z); };
                      double worst = 0.0;
                      std::vector<Point> pts;
                      for (std::size_t i = 0; i < 5; ++i) {
                        const Point x = rule_cases[i].second;
                        pts.push_back(x);
                        // d/dtaubar of tau -> f(conj tau)
                        const Field fc = [&](cplx z) { return f(std::conj(z)); };
                        const cplx lhs = std::conj(wirtinger(fc, x).d_taubar);
                        worst = std::max(worst, rel(lhs, wirtinger(f, x).d_tau));
                      }
                      return report("diffops.conj_symmetry", pts, worst);
                    }});
  checks.push_back({"diffops.xi_factorization", [=] {
                      const Field f = [](cplx z) { return std::sqrt(z.imag()) * std::exp(I * z) + z.imag() * std::conj(z); };
                      return report("diffops.xi_factorization", {pb}, xi_factorization_residual(f, 0.5, pb));
                    }});
  checks.push_back({"diffops.laplacian_holomorphic", [=] {
                      const Field f = [](cplx z) { return std::exp(2.0 * pi * I * z) + z * z; };
                      return report("diffops.laplacian_holomorphic", {pb}, laplacian_residual(f, -4.0, pb));
                    }});
  return checks;
}

// ---------------------------------------------------------------- theta

std::vector<Check> theta_suite(const Params& params, SampleStream& rs) {
  std::vector<Check> checks;
  const int k = params.k();
  const Point tau = Point::upper(rs.uniform(-0.5, 0.5), rs.uniform(0.9, 1.6));
  const Point z = Point::upper(rs.uniform(-0.5, 0.5), rs.uniform(0.5, 1.2));
  checks.push_back({"theta.doubling", [=] {
                      const Point i1 = Point::upper(0.0, 1.0);
                      const ThetaValue t = eval_theta_kernel(k, i1, i1);
                      return report("theta.doubling", {i1, i1}, t.est_error, -1.0,
                                    {{"value", num(t.value)}, {"forms_used", std::to_string(t.forms_used)}});
                    }});
  checks.push_back({"theta.z_translation", [=] {
                      const cplx a = eval_theta_kernel(k, tau, z).value;
                      const cplx b = eval_theta_kernel(k, tau, z.shifted(1.0)).value;
                      return report("theta.z_translation", {tau, z}, rel(b, a));
                    }});
  for (auto [name, g] : {std::pair{"S", GLMatrix::S()}, std::pair{"T", GLMatrix::T()}}) {
    const std::string id = std::string("theta.tau_modularity.") + name;
    checks.push_back({id, [=] {
                        const ThetaTauCheck c = theta_tau_modularity(k, tau, z, g);
                        return report(id, {tau, z}, c.residual);
                      }});
  }
  checks.push_back({"theta.z_gamma0_4.T", [=] {
                      const ThetaZCheck c = theta_z_modularity_residual(k, tau, z, GLMatrix::T());
                      return report("theta.z_gamma0_4.T", {tau, z}, c.residual, -1.0,
                                    {{"fitted_constant", num(c.fitted_constant)}});
                    }});
  checks.push_back({"theta.slice_direct", [=] {
                      const ThetaValue s = eval_theta_slice(k, params.D(), tau, z);
                      const cplx d = theta_slice_direct(params, tau, z);
                      return report("theta.slice_direct", {tau, z}, std::abs(s.value) > 0 ? rel(d, s.value) : std::abs(d),
                                    -1.0, {{"slice", num(s.value)}});
                    }});
  checks.push_back({"theta.fourier_support", [=] {
                      const std::vector<i64> ds{-4, -3, -1, 0, 1, 2, 3, 4, 5, 6, 7, 8};
                      const auto coeffs = theta_fourier_coefficients(k, tau, 0.7, ds);
                      double largest = 0.0, forbidden = 0.0;
                      for (const auto& [d, c] : coeffs) {
                        const i64 r = ((d % 4) + 4) % 4;
                        if (r == 0 || r == 1) largest = std::max(largest, std::abs(c));
                        else forbidden = std::max(forbidden, std::abs(c));
                      }
                      return report("theta.fourier_support", {tau}, forbidden / largest, -1.0,
                                    {{"largest_allowed", num(largest)}, {"largest_forbidden", num(forbidden)}});
                    }});
  return checks;
}

// ---------------------------------------------------------------- eichler-local

std::vector<Check> eichler_suite(const Params& params, SampleStream& rs, const TruncationPolicy& policy) {
  std::vector<Check> checks;
  EichlerOptions fine;
  fine.panel_length = 0.125;
  const Point p = off_exceptional_point(rs, params, 0.6, 2.5);
  checks.push_back({"eichler.refinement", [=] {
                      const EichlerPair a = eichler_integrals(params, p, policy);
                      const EichlerPair b = eichler_integrals(params, p, policy, fine);
                      const double r = std::max(rel(a.hol.value, b.hol.value), rel(a.nonhol.value, b.nonhol.value));
                      return report("eichler.refinement", {p}, r, -1.0,
                                    {{"hol", num(b.hol.value)}, {"nonhol", num(b.nonhol.value)},
                                     {"quad_error", num(b.quad_error)}});
                    }});
  const Point apex = apex_point(params);
  checks.push_back({"eichler.on_exceptional", [=] {
                      const EichlerPair a = eichler_integrals(params, apex, policy);
                      const EichlerPair b = eichler_integrals(params, apex, policy, fine);
                      const double r = std::max(rel(a.hol.value, b.hol.value), rel(a.nonhol.value, b.nonhol.value));
                      return report("eichler.on_exceptional", {apex}, r, -1.0,
                                    {{"hol", num(b.hol.value)}, {"nonhol", num(b.nonhol.value)}});
                    }});
  checks.push_back({"eichler.conj_symmetry", [=] {
                      const cplx a = eichler_nonhol(params, p, policy).value;
                      const cplx b = eichler_nonhol(params, Point::upper(-p.u(), p.v()), policy).value;
                      return report("eichler.conj_symmetry", {p}, rel(b, std::conj(a)));
                    }});
  checks.push_back({"eichler.path_split", [=] {
                      const Point low = Point::upper(p.u(), 0.3);
                      const QuadraturePath path = make_path(params, low);
                      i64 missing = 0;
                      for (const Crossing& c : crossing_heights(params, low.u(), low.v(), path.v_max)) {
                        bool found = false;
                        for (const auto& [a, b] : path.segments) found = found || a == c.height || b == c.height;
                        if (!found) ++missing;
                      }
                      return report("eichler.path_split", {low}, double(missing), -1.0,
                                    {{"segments", std::to_string(path.segments.size())}});
                    }});
  const QForm q0 = sample_form(rs, params);
  const Point on = point_on_geodesic(rs, params, q0.a > 0 ? q0 : -q0);
  for (const bool hol : {true, false}) {
    const std::string id = std::string("eichler.jump.") + (hol ? "hol" : "nonhol");
    checks.push_back({id, [=] {
                        const Field f = [&](cplx z) {
                          const Point x = Point::from(z);
                          return hol ? eichler_hol(params, x, policy).value : eichler_nonhol(params, x, policy).value;
                        };
                        const JumpMeasure m = jump_measure(f, params, on);
                        const double scale = std::max(1.0, std::abs(m.average));
                        return report(id, {on}, std::abs(m.jump) / scale, -1.0,
                                      {{"jump", num(m.jump)}, {"average", num(m.average)},
                                       {"extrapolation_error", num(m.extrapolation_error)}});
                      }});
  }
  return checks;
}

std::vector<Check> build_suite(std::string_view name, const Params& params, std::uint64_t seed,
                               const TruncationPolicy& policy) {
  SampleStream rs(seed);
  if (name == "transforms") return transforms_suite(params, rs, policy);
  if (name == "omega") return omega_suite(params, rs, policy);
  if (name == "split") return split_suite(params, rs, policy);
  if (name == "jumps") return jumps_suite(params, rs, policy);
  if (name == "diffops") return diffops_suite(params, rs, policy);
  if (name == "theta") return theta_suite(params, rs);
  if (name == "eichler-local") return eichler_suite(params, rs, policy);
  throw DomainError("unknown suite: " + std::string(name));
}

}  // namespace

std::span<const ToleranceEntry> tolerance_table() { return kTolerances; }

const ToleranceEntry& tolerance_for(std::string_view check_id) {
  const ToleranceEntry* best = nullptr;
  for (const ToleranceEntry& e : kTolerances) {
    const bool prefix = !e.check.empty() && e.check.back() == '.';
    const bool match = prefix ? check_id.starts_with(e.check) : check_id == e.check;
    if (match && (best == nullptr || e.check.size() > best->check.size())) best = &e;
  }
  if (best == nullptr) throw DomainError("no tolerance for check " + std::string(check_id));
  return *best;
}

std::span<const std::string_view> suite_names() { return kSuites; }

std::vector<VerificationReport> suite_run(std::string_view name, const Params& params, std::uint64_t seed,
                                          const SuiteOptions& options) {
  const std::vector<Check> checks = build_suite(name, params, seed, options.policy);
  std::vector<VerificationReport> out(checks.size());
  std::vector<std::exception_ptr> errors(checks.size());
  unsigned workers = options.workers == 0 ? std::max(1u, std::thread::hardware_concurrency()) : options.workers;
  workers = std::min<unsigned>(workers, static_cast<unsigned>(checks.size()));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < checks.size(); i = next++) {
      try {
        out[i] = checks[i].run();
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < workers; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::stable_sort(out.begin(), out.end(),
                   [](const VerificationReport& a, const VerificationReport& b) { return a.check_id < b.check_id; });
  return out;
}

}  // namespace qmod
