#pragma once
// Exhaustive comparison of the shortcut against full closed testing on one
// study, counting violations of every finite-sample identity. Shared by the
// unit tests and the acceptance run.

#include <algorithm>
#include <cstddef>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "fdplens/hommel.hpp"
#include "fdplens/oracle.hpp"
#include "support.hpp"

namespace fdplens::testing {

struct CheckCounts {
    std::size_t subsets = 0;
    std::map<std::string, std::size_t> violations;   // property -> count

    void fail(const std::string& what) { ++violations[what]; }
    std::size_t of(const std::string& what) const {
        const auto it = violations.find(what);
        return it == violations.end() ? 0 : it->second;
    }
    std::size_t total() const {
        std::size_t n = 0;
        for (const auto& [_, c] : violations) n += c;
        return n;
    }
    void merge(const CheckCounts& other) {
        subsets += other.subsets;
        for (const auto& [k, c] : other.violations) violations[k] += c;
    }
};

// Property names, grouped as the acceptance report prints them.
inline const char* const kShortcut = "shortcut t equals oracle t";
inline const char* const kLocalTest = "Simes membership matches reference";
inline const char* const kLargeSets = "every set larger than h is rejected";
inline const char* const kFullSet = "t of the full set equals h";
inline const char* const kMembership = "closure membership test matches oracle";
inline const char* const kUCap = "capping u at z-m+h+1 keeps the maximum";
inline const char* const kRestriction = "d(S) equals d(S within Z)";
inline const char* const kMinimality = "Z is minimal";
inline const char* const kConcentrationCount = "d(Z) equals m-h";
inline const char* const kWithinBH = "Z lies within the BH set";
inline const char* const kBhBound = "alpha q(B_q) <= pi_hat q with equality iff h q = 0";
inline const char* const kChain = "|S∩R| <= d <= |S∩Z| <= |S∩B|";

inline CheckCounts check_instance(const std::vector<double>& p, double alpha) {
    CheckCounts out;
    const std::size_t m = p.size();
    const auto study = PValueStudy::from_pvalues(p);
    const auto ctx = HommelContext::compute(study, alpha);
    const auto table = oracle::build_closure(study, alpha);
    const std::size_t h = ctx.h();
    const oracle::Mask full = static_cast<oracle::Mask>((1u << m) - 1);

    const auto R = hommel_rejections(study, ctx);
    const auto Z = concentration_set(study, ctx);
    const auto B = bh_set(study, alpha);

    const auto d_of = [&](oracle::Mask S) { return discoveries(study, oracle::from_mask(S, m), ctx).d; };
    std::vector<std::size_t> d(std::size_t{1} << m);
    for (oracle::Mask S = 0; S <= full; ++S) d[S] = d_of(S);

    if (oracle::oracle_t(table, full) != h) out.fail(kFullSet);
    const oracle::Mask zmask = oracle::to_mask(Z);
    if (d[zmask] != m - h) out.fail(kConcentrationCount);
    if (Z.size() > B.size() || intersect(Z, B).size() != Z.size()) out.fail(kWithinBH);

    for (oracle::Mask S = 0; S <= full; ++S) {
        ++out.subsets;
        const auto members = mask_members(S, m);
        const auto sel = oracle::from_mask(S, m);
        const std::size_t size = members.size();
        const std::size_t t = size - d[S];

        if (oracle::oracle_t(table, S) != t) out.fail(kShortcut);

        if (S != 0) {
            std::vector<double> vals;
            for (auto i : members) vals.push_back(p[i]);
            if (table.locally_rejected(S) != naive_simes(vals, alpha)) out.fail(kLocalTest);
            if (size > h && !table.rejected(S)) out.fail(kLargeSets);
            if (in_closure(study, sel, ctx) != table.rejected(S)) out.fail(kMembership);

            const std::size_t cap = std::min(size, ctx.u_cap());
            const std::size_t uncapped = naive_d(p, members, h, alpha, size);
            if (uncapped != naive_d(p, members, h, alpha, cap) || uncapped != d[S]) out.fail(kUCap);
        }

        if (d[S] != d[S & zmask]) out.fail(kRestriction);

        const std::size_t in_r = intersect(sel, R).size();
        const std::size_t in_z = intersect(sel, Z).size();
        const std::size_t in_b = intersect(sel, B).size();
        if (!(in_r <= d[S] && d[S] <= in_z && in_z <= in_b)) out.fail(kChain);
    }

    // Minimality: dropping any j in Z changes d for some S containing j.
    for (std::size_t j : Z) {
        const oracle::Mask bit = oracle::Mask{1} << j;
        bool witnessed = false;
        for (oracle::Mask S = bit; S <= full && !witnessed; ++S) {
            if ((S & bit) && d[S] != d[S & ~bit]) witnessed = true;
        }
        if (!witnessed) out.fail(kMinimality);
    }

    for (double q : {0.0, 0.01, 0.05, 0.1, 0.3, 0.5, 1.0}) {
        const auto cert = bh_fdp_certificate(study, ctx, q);
        const auto Bq = bh_set(study, q);
        // Cross-multiplied with the oracle: alpha·t(B_q)·m vs h·q·|B_q|.
        const double t = static_cast<double>(oracle::oracle_t(table, oracle::to_mask(Bq)));
        const double lhs = alpha * t * static_cast<double>(m);
        const double rhs = static_cast<double>(h) * q * static_cast<double>(Bq.size());
        const bool zero = static_cast<double>(h) * q == 0.0;
        bool ok = cert.holds && lhs <= rhs && cert.equality == zero;
        if (Bq.empty()) ok = cert.holds && cert.equality == zero;
        if (!ok) out.fail(kBhBound);
    }
    return out;
}

// The acceptance instances: m cycles through 1..12 and alpha through the
// five levels.
struct Instance {
    std::vector<double> p;
    double alpha;
};

inline std::vector<Instance> oracle_instances(std::size_t count, std::uint64_t seed, std::size_t max_m = 12) {
    std::mt19937_64 gen(seed);
    std::vector<Instance> out;
    for (std::size_t k = 0; k < count; ++k) {
        const std::size_t m = 1 + k % max_m;
        out.push_back({random_pvalues(gen, m), kLevels[k % std::size(kLevels)]});
    }
    return out;
}

} // namespace fdplens::testing
