#include "qmodular/serialize.hpp"

namespace qmod {

using nlohmann::json;

json complex_json(cplx z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

cplx complex_from_json(const json& j) { return {j.at("re").get<double>(), j.at("im").get<double>()}; }

void to_json(json& j, const QForm& q) { j = json::array({q.a, q.b, q.c}); }

void from_json(const json& j, QForm& q) {
  if (!j.is_array() || j.size() != 3) throw DomainError("a form is written as [a, b, c]");
  q = {j[0].get<i64>(), j[1].get<i64>(), j[2].get<i64>()};
}

void to_json(json& j, const Point& p) { j = json{{"u", p.u()}, {"v", p.v()}}; }

Point point_from_json(const json& j) { return Point::from({j.at("u").get<double>(), j.at("v").get<double>()}); }

void to_json(json& j, const Params& p) { j = json{{"D", p.D()}, {"k", p.k()}}; }

void to_json(json& j, const Geodesic& g) {
  j = json{{"form", g.form},
           {"center", g.center},
           {"radius", g.radius},
           {"orientation", g.counterclockwise ? "ccw" : "cw"}};
}

void to_json(json& j, const TruncationPolicy& p) {
  j = json{{"bound_a", p.bound_a},
           {"doubling_check", p.doubling_check},
           {"target_tol", p.target_tol},
           {"window_factor", p.window_factor},
           {"class_tails", p.class_tails}};
}

void to_json(json& j, const SeriesValue& s) {
  j = json{{"value", complex_json(s.value)},
           {"est_error", s.est_error},
           {"terms_used", s.terms_used},
           {"converged", s.converged},
           {"near_exceptional", s.near_exceptional}};
}

void to_json(json& j, const CInfinity& c) {
  j = json{{"value", c.value}, {"error_bound", c.error_bound}, {"terms", c.terms}};
}

void to_json(json& j, const QuadraturePath& p) {
  json segs = json::array();
  for (const auto& [a, b] : p.segments) segs.push_back(json::array({a, b}));
  j = json{{"base", p.base}, {"segments", segs}, {"v_max", p.v_max}, {"node_budget", p.node_budget}};
}

void to_json(json& j, const SplitReport& r) {
  j = json{{"psi_value", complex_json(r.psi_value)},
           {"c_inf", r.c_inf},
           {"eichler_hol", complex_json(r.eichler_hol)},
           {"eichler_nonhol", complex_json(r.eichler_nonhol)},
           {"residual", r.residual},
           {"est_error", r.est_error},
           {"component_hol", complex_json(r.component_hol)},
           {"component_nonhol", complex_json(r.component_nonhol)},
           {"local_polynomial", complex_json(r.local_poly)},
           {"component_residual", r.component_residual}};
}

void to_json(json& j, const ThetaValue& t) {
  j = json{{"value", complex_json(t.value)},
           {"est_error", t.est_error},
           {"d_range", json::array({t.d_range.first, t.d_range.second})},
           {"forms_used", t.forms_used}};
}

void to_json(json& j, const JumpMeasure& m) {
  j = json{{"jump", complex_json(m.jump)},
           {"average", complex_json(m.average)},
           {"continuity_defect", complex_json(m.continuity_defect)},
           {"value_at_point", m.value_at_point},
           {"extrapolation_error", m.extrapolation_error}};
}

void to_json(json& j, const VerificationReport& r) {
  j = json{{"check_id", r.check_id},
           {"points", r.points},
           {"residual", r.residual},
           {"tolerance", r.tolerance},
           {"passed", r.passed},
           {"metadata", r.metadata}};
}

json document(std::string_view kind, json body) {
  json out{{"schema", kSchema}, {"kind", std::string(kind)}};
  for (auto& [key, value] : body.items()) out[key] = std::move(value);
  return out;
}

}  // namespace qmod
