#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <thread>

#include "qmodular/serialize.hpp"

namespace qmod::cli {

namespace {

using nlohmann::json;

const std::vector<std::string> kFunctions{"f",      "psi", "phi",      "rho",         "lambda",         "omega",
                                          "bigomega", "Lambda", "Psi", "eichler-hol", "eichler-nonhol", "theta"};

struct Common {
  i64 disc = 5;
  int k = 2;
  i64 bound_a = 64;
  double tol = 1e-8;
  std::string out_path;
};

void add_common(CLI::App* app, Common& c, bool with_k = true) {
  app->add_option("--disc", c.disc, "discriminant D")->capture_default_str();
  if (with_k) app->add_option("--k", c.k, "even weight parameter k")->capture_default_str();
  app->add_option("--bound-a", c.bound_a, "cut-off |a| <= bound for series")->capture_default_str();
  app->add_option("--tol", c.tol, "target tolerance")->capture_default_str();
  app->add_option("--out", c.out_path, "write output to this file");
}

struct Sink {
  std::ostream& fallback;
  std::ofstream file;
  std::ostream& stream() { return file.is_open() ? file : fallback; }
};

Sink open_sink(const std::string& path, std::ostream& out) {
  Sink s{out, {}};
  if (!path.empty()) {
    s.file.open(path);
    if (!s.file) throw DomainError("cannot open output file " + path);
  }
  return s;
}

void emit(const json& doc, const std::string& path, std::ostream& out) {
  Sink s = open_sink(path, out);
  s.stream() << doc.dump(2) << '\n';
}

Point upper_from(const std::vector<double>& xy, const char* what) {
  if (xy.size() != 2) throw DomainError(std::string(what) + " needs RE IM");
  if (!(xy[1] > 0.0)) throw DomainError(std::string(what) + " must lie in the upper half plane");
  return Point::upper(xy[0], xy[1]);
}

Point lower_from(const std::vector<double>& xy) {
  if (xy.size() != 2) throw DomainError("--w needs RE IM");
  if (!(xy[1] < 0.0)) throw DomainError("--w must lie in the lower half plane");
  return Point::lower(xy[0], -xy[1]);
}

struct EvalOut {
  cplx value{};
  double est_error = 0.0;
  bool converged = true;
  bool near_exceptional = false;
  json extra = json::object();
};

EvalOut from_series(const SeriesValue& s) {
  return {s.value, s.est_error, s.converged, s.near_exceptional, json{{"terms_used", s.terms_used}}};
}

struct EvalArgs {
  std::string fn;
  Point tau = Point::upper(0.0, 1.0);
  std::optional<Point> w;
  std::optional<Point> z;
  int kappa = 0;
};

EvalOut evaluate_once(const EvalArgs& a, const Params& params, const TruncationPolicy& policy) {
  const SeriesEngine eng(params, policy);
  auto need_w = [&]() -> const Point& {
    if (!a.w) throw DomainError("--fn " + a.fn + " needs --w RE IM");
    return *a.w;
  };
  auto need_z = [&]() -> const Point& {
    if (!a.z) throw DomainError("--fn " + a.fn + " needs --z RE IM");
    return *a.z;
  };
  if (a.fn == "f") return from_series(eng.f(a.kappa, a.tau));
  if (a.fn == "psi") return from_series(eng.psi(a.tau));
  if (a.fn == "phi") return from_series(eng.phi(a.tau));
  if (a.fn == "rho") return from_series(eng.rho(a.tau, need_w()));
  if (a.fn == "lambda") return from_series(eng.lambda(a.tau, need_w()));
  if (a.fn == "omega") return from_series(eng.omega(a.tau, need_z()));
  if (a.fn == "bigomega") return from_series(eng.Omega(a.tau, need_w()));
  if (a.fn == "Lambda") return from_series(eng.Lambda(a.tau));
  if (a.fn == "Psi") return from_series(eval_Psi(params, a.tau, policy));
  if (a.fn == "eichler-hol" || a.fn == "eichler-nonhol") {
    const EichlerPair e = eichler_integrals(params, a.tau, policy);
    EvalOut o = from_series(a.fn == "eichler-hol" ? e.hol : e.nonhol);
    o.extra["quad_error"] = e.quad_error;
    o.extra["path"] = e.path;
    return o;
  }
  if (a.fn == "theta") {
    ThetaPolicy tp;
    tp.target_tol = std::min(policy.target_tol, 1e-6);
    const ThetaValue t = eval_theta_kernel(params.k(), a.tau, need_z(), tp);
    return {t.value, t.est_error, t.est_error <= policy.target_tol * std::max(1.0, std::abs(t.value)), false,
            json{{"forms_used", t.forms_used}, {"d_range", json::array({t.d_range.first, t.d_range.second})}}};
  }
  throw DomainError("unknown function " + a.fn);
}

// Series cut-offs are doubled (up to 16 times the start) until the
// doubling estimate meets the tolerance, unless --bound-a was given.
std::pair<EvalOut, i64> evaluate(const EvalArgs& a, const Params& params, TruncationPolicy policy, bool escalate) {
  const i64 limit = 16 * policy.bound_a;
  for (;;) {
    EvalOut o = evaluate_once(a, params, policy);
    if (o.converged || !escalate || policy.bound_a >= limit || a.fn == "theta") return {o, policy.bound_a};
    policy.bound_a *= 2;
  }
}

// -------------------------------------------------------------------- grid

struct GridSpec {
  double u_min = -0.5, u_max = 0.5, v_min = 0.3, v_max = 2.0;
  int nx = 50, ny = 50;
  std::string fn = "Lambda";
};

std::string fmt(double x) {
  std::ostringstream s;
  s << std::setprecision(17) << x;
  return s.str();
}

// Grid points keep the requested cut-off; the per-point doubling estimate
// goes into est_error instead of escalating. Exit 3 only for non-finite values.
int run_grid(const GridSpec& g, const Common& c, const EvalArgs& base, std::ostream& out) {
  if (g.nx < 2 || g.ny < 2) throw DomainError("grid needs nx, ny >= 2");
  if (!(g.v_min > 0.0) || g.v_max <= g.v_min || g.u_max <= g.u_min) throw DomainError("grid window must lie in H");
  const Params params(c.disc, c.k);
  TruncationPolicy policy;
  policy.bound_a = c.bound_a;
  policy.target_tol = c.tol;
  const SignatureWindow window{0.5 * (g.u_min + g.u_max), 0.5 * (g.u_max - g.u_min) + 1.0,
                               std::min(0.05, 0.5 * g.v_min)};
  std::vector<std::string> rows(static_cast<std::size_t>(g.nx) * static_cast<std::size_t>(g.ny));
  std::atomic<int> next_row{0};
  std::atomic<bool> unconverged{false};
  auto work = [&] {
    for (int iy = next_row++; iy < g.ny; iy = next_row++) {
      const double v = g.v_min + (g.v_max - g.v_min) * iy / (g.ny - 1);
      for (int ix = 0; ix < g.nx; ++ix) {
        const double u = g.u_min + (g.u_max - g.u_min) * ix / (g.nx - 1);
        const Point p = Point::upper(u, v);
        const bool on_e = !forms_vanishing_at(params, p, 1e-6).empty();
        std::string re, im, err, hash = "0";
        if (!on_e) hash = std::to_string(component_signature(params, p, window).hash());
        EvalArgs a = base;
        a.tau = p;
        try {
          const EvalOut o = evaluate_once(a, params, policy);
          re = fmt(o.value.real());
          im = fmt(o.value.imag());
          err = fmt(o.est_error);
          if (!std::isfinite(o.est_error) || !std::isfinite(std::abs(o.value))) unconverged = true;
        } catch (const DomainError&) {
          // undefined on E_D (Psi): left empty and flagged
        }
        rows[static_cast<std::size_t>(iy) * static_cast<std::size_t>(g.nx) + static_cast<std::size_t>(ix)] =
            fmt(u) + "," + fmt(v) + "," + re + "," + im + "," + hash + "," + err + "," + (on_e ? "1" : "0");
      }
    }
  };
  const unsigned workers = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(), g.ny));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < workers; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  Sink s = open_sink(c.out_path, out);
  s.stream() << "u,v,re,im,component_hash,est_error,on_exceptional\n";
  for (const std::string& r : rows) s.stream() << r << '\n';
  return unconverged ? not_converged : ok;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical toolkit for locally harmonic Maass forms attached to Q_D", "qmodular"};
  app.require_subcommand(1);

  Common c;
  EvalArgs ev;
  std::vector<double> tau_xy{0.0, 1.0}, w_xy, z_xy;
  GridSpec grid;
  std::uint64_t seed = 1;
  std::string suite = "transforms";
  unsigned workers = 0;

  auto* forms = app.add_subcommand("forms", "list the forms of discriminant D with |a| <= bound");
  add_common(forms, c, false);
  auto* geos = app.add_subcommand("geodesics", "list the geodesics S_Q meeting |u| <= 1/2");
  add_common(geos, c, false);

  auto* eval = app.add_subcommand("eval", "evaluate one function at one point");
  add_common(eval, c);
  eval->add_option("--fn", ev.fn, "function")->required()->check(CLI::IsMember(kFunctions));
  eval->add_option("--tau", tau_xy, "tau = RE + i IM")->expected(2);
  eval->add_option("--w", w_xy, "w in the lower half plane")->expected(2);
  eval->add_option("--z", z_xy, "z in the upper half plane")->expected(2);
  eval->add_option("--kappa", ev.kappa, "exponent for f (default k + 1)");

  auto* gr = app.add_subcommand("grid", "evaluate on a u-v grid and write CSV");
  add_common(gr, c);
  gr->add_option("--fn", grid.fn, "function")->check(CLI::IsMember(kFunctions))->capture_default_str();
  gr->add_option("--nx", grid.nx)->capture_default_str();
  gr->add_option("--ny", grid.ny)->capture_default_str();
  gr->add_option("--u-min", grid.u_min)->capture_default_str();
  gr->add_option("--u-max", grid.u_max)->capture_default_str();
  gr->add_option("--v-min", grid.v_min)->capture_default_str();
  gr->add_option("--v-max", grid.v_max)->capture_default_str();
  gr->add_option("--w", w_xy, "fixed w for two-variable functions")->expected(2);
  gr->add_option("--z", z_xy, "fixed z for two-variable functions")->expected(2);

  auto* cinf = app.add_subcommand("cinfty", "the limit constant c_inf");
  add_common(cinf, c);

  auto* ver = app.add_subcommand("verify", "run a verification suite");
  add_common(ver, c);
  std::vector<std::string> suite_choices{"all"};
  for (auto s : suite_names()) suite_choices.emplace_back(s);
  ver->add_option("--suite", suite, "suite name or all")->check(CLI::IsMember(suite_choices))->capture_default_str();
  ver->add_option("--seed", seed)->capture_default_str();
  ver->add_option("--workers", workers, "threads (0: all cores)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return usage_error;
  }

  try {
    if (forms->parsed()) {
      const Params params(c.disc, 2);
      json list = json::array();
      for (const QForm& q : enumerate_forms(params, c.bound_a)) list.push_back(q);
      emit(document("forms", json{{"D", c.disc}, {"bound_a", c.bound_a}, {"count", list.size()}, {"forms", list}}),
           c.out_path, out);
      return ok;
    }
    if (geos->parsed()) {
      const Params params(c.disc, 2);
      json list = json::array();
      for (const QForm& q : enumerate_forms(params, c.bound_a)) list.push_back(geodesic(q, params));
      emit(document("geodesics", json{{"D", c.disc}, {"bound_a", c.bound_a}, {"geodesics", list}}), c.out_path, out);
      return ok;
    }
    if (!w_xy.empty()) ev.w = lower_from(w_xy);
    if (!z_xy.empty()) ev.z = upper_from(z_xy, "--z");
    if (eval->parsed()) {
      const Params params(c.disc, c.k);
      ev.tau = upper_from(tau_xy, "--tau");
      if (ev.kappa == 0) ev.kappa = c.k + 1;
      TruncationPolicy policy;
      policy.bound_a = c.bound_a;
      policy.target_tol = c.tol;
      const bool escalate = eval->count("--bound-a") == 0;
      const auto [o, used] = evaluate(ev, params, policy, escalate);
      json body{{"params", params},
                {"fn", ev.fn},
                {"tau", ev.tau},
                {"value", complex_json(o.value)},
                {"est_error", o.est_error},
                {"converged", o.converged},
                {"near_exceptional", o.near_exceptional},
                {"bound_a", used},
                {"details", o.extra}};
      if (ev.w) body["w"] = *ev.w;
      if (ev.z) body["z"] = *ev.z;
      emit(document("eval", body), c.out_path, out);
      return o.converged ? ok : not_converged;
    }
    if (gr->parsed()) {
      ev.fn = grid.fn;
      ev.kappa = c.k + 1;
      return run_grid(grid, c, ev, out);
    }
    if (cinf->parsed()) {
      const Params params(c.disc, c.k);
      const CInfinity v = c_infinity(params, std::min(c.tol, 1e-10));
      emit(document("cinfty", json{{"params", params}, {"c_inf", v}}), c.out_path, out);
      return ok;
    }
    if (ver->parsed()) {
      const Params params(c.disc, c.k);
      SuiteOptions opt;
      opt.policy.bound_a = c.bound_a;
      opt.policy.target_tol = c.tol;
      opt.workers = workers;
      std::vector<std::string_view> names;
      if (suite == "all") names.assign(suite_names().begin(), suite_names().end());
      else names.push_back(suite);
      json reports = json::array();
      bool all_passed = true;
      for (std::string_view n : names) {
        for (const VerificationReport& r : suite_run(n, params, seed, opt)) {
          all_passed = all_passed && r.passed;
          json j = r;
          j["suite"] = std::string(n);
          reports.push_back(std::move(j));
        }
      }
      emit(document("verify", json{{"params", params}, {"seed", seed}, {"passed", all_passed}, {"reports", reports}}),
           c.out_path, out);
      return all_passed ? ok : verification_failed;
    }
  } catch (const ConvergenceError& e) {
    err << "qmodular: " << e.what() << '\n';
    return not_converged;
  } catch (const DomainError& e) {
    err << "qmodular: " << e.what() << '\n';
    return usage_error;
  }
  return usage_error;
}

}  // namespace qmod::cli
