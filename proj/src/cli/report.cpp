#include "fdplens/report.hpp"

#include <cstdio>

namespace fdplens {

using nlohmann::ordered_json;

std::string format_decimal(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

ordered_json bound_json(const BoundReport& bound) {
    return ordered_json{{"size", bound.size}, {"d", bound.d}, {"t", bound.t}, {"q", format_decimal(bound.q())}};
}

ordered_json summary_json(const PValueStudy& study, const HommelContext& ctx) {
    return ordered_json{{"schema_version", kSchemaVersion},
                        {"alpha", ctx.alpha()},
                        {"m", study.size()},
                        {"h", ctx.h()},
                        {"z", ctx.z()},
                        {"pi_hat", format_decimal(ctx.pi_hat())},
                        {"r_size", hommel_rejection_count(study, ctx)},
                        {"b", bh_count(study, ctx.alpha())}};
}

ordered_json analyze_json(const PValueStudy& study, const HommelContext& ctx, const SubsetSelection& S) {
    ordered_json out = summary_json(study, ctx);
    out["set"] = bound_json(discoveries(study, S, ctx));
    return out;
}

ordered_json concentration_json(const PValueStudy& study, const HommelContext& ctx) {
    const SubsetSelection Z = concentration_set(study, ctx);
    const std::size_t b = bh_count(study, ctx.alpha());
    ordered_json ids = ordered_json::array();
    // Listed by ascending p-value, matching Z = L_z.
    for (std::size_t k = 0; k < ctx.z(); ++k) ids.push_back(study.ids()[study.order()[k]]);
    return ordered_json{{"schema_version", kSchemaVersion},
                        {"alpha", ctx.alpha()},
                        {"m", study.size()},
                        {"h", ctx.h()},
                        {"m_minus_h", study.size() - ctx.h()},
                        {"z", ctx.z()},
                        {"concentration_ids", ids},
                        {"d_concentration", discoveries(study, Z, ctx).d},
                        {"b", b},
                        {"z_within_b", ctx.z() <= b}};
}

} // namespace fdplens
