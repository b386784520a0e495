#pragma once

#include <nlohmann/json.hpp>

#include "qmodular/maass.hpp"
#include "qmodular/theta.hpp"
#include "qmodular/verify.hpp"

namespace qmod {

/// Version tag written into every top-level document.
inline constexpr const char* kSchema = "qmodular/1";

/// Complex numbers are written as {"re": x, "im": y}.
nlohmann::json complex_json(cplx z);
cplx complex_from_json(const nlohmann::json& j);

void to_json(nlohmann::json& j, const QForm& q);
void from_json(const nlohmann::json& j, QForm& q);
void to_json(nlohmann::json& j, const Point& p);
void to_json(nlohmann::json& j, const Params& p);
void to_json(nlohmann::json& j, const Geodesic& g);
void to_json(nlohmann::json& j, const TruncationPolicy& p);
void to_json(nlohmann::json& j, const SeriesValue& s);
void to_json(nlohmann::json& j, const CInfinity& c);
void to_json(nlohmann::json& j, const QuadraturePath& p);
void to_json(nlohmann::json& j, const SplitReport& r);
void to_json(nlohmann::json& j, const ThetaValue& t);
void to_json(nlohmann::json& j, const JumpMeasure& m);
void to_json(nlohmann::json& j, const VerificationReport& r);

Point point_from_json(const nlohmann::json& j);

/// {"schema": ..., "kind": kind, ...body}.
nlohmann::json document(std::string_view kind, nlohmann::json body);

}  // namespace qmod
