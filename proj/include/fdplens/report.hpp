#pragma once
// JSON renderings shared by the CLI and the HTTP service. Counts are exact
// integers; the proportions q and pi_hat are decimal strings with 12
// significant digits.

#include <string>

#include <json.hpp>

#include "fdplens/hommel.hpp"
#include "fdplens/study.hpp"

namespace fdplens {

inline constexpr int kSchemaVersion = 1;

std::string format_decimal(double x);

nlohmann::ordered_json bound_json(const BoundReport& bound);

// alpha, m, h, z, pi_hat, r_size and b for one context.
nlohmann::ordered_json summary_json(const PValueStudy& study, const HommelContext& ctx);

// summary_json plus the bound for S under "set".
nlohmann::ordered_json analyze_json(const PValueStudy& study, const HommelContext& ctx, const SubsetSelection& S);

// z, the ids in Z, d(Z) = m - h and b, with Z ⊆ B flagged.
nlohmann::ordered_json concentration_json(const PValueStudy& study, const HommelContext& ctx);

} // namespace fdplens
