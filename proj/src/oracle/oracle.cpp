#include "fdplens/oracle.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

#include "fdplens/simes.hpp"

namespace fdplens::oracle {

ClosureTable build_closure(const PValueStudy& study, double alpha) {
    const std::size_t m = study.size();
    if (m > kMaxHypotheses) {
        throw std::length_error("closure enumeration is limited to " + std::to_string(kMaxHypotheses) +
                                " hypotheses");
    }
    const Mask full = (Mask{1} << m) - 1;

    ClosureTable table;
    table.m = m;
    table.alpha = alpha;
    table.u_member.assign(std::size_t{full} + 1, false);
    table.x_member.assign(std::size_t{full} + 1, false);

    std::vector<double> values;
    values.reserve(m);
    for (Mask I = 1; I <= full; ++I) {
        values.clear();
        for (std::size_t i = 0; i < m; ++i) {
            if (I & (Mask{1} << i)) values.push_back(study.p(i));
        }
        std::sort(values.begin(), values.end());
        table.u_member[I] = simes_rejects_sorted(values, alpha);
    }

    // Every one-element extension I ∪ {b} is numerically larger than I, so a
    // descending sweep sees all of them first. Each proper superset of I
    // contains some I ∪ {b}, hence the recursion covers all supersets.
    for (Mask I = full; I >= 1; --I) {
        bool rejected = table.u_member[I];
        for (std::size_t b = 0; rejected && b < m; ++b) {
            const Mask bit = Mask{1} << b;
            if (!(I & bit)) rejected = table.x_member[I | bit];
        }
        table.x_member[I] = rejected;
    }
    return table;
}

std::size_t oracle_t(const ClosureTable& table, Mask S) {
    std::size_t best = 0;
    // Walk all submasks of S, including S itself; the empty set is never rejected.
    for (Mask I = S;; I = (I - 1) & S) {
        if (I == 0) break;
        if (!table.x_member[I]) best = std::max<std::size_t>(best, static_cast<std::size_t>(std::popcount(I)));
    }
    return best;
}

Mask to_mask(const SubsetSelection& S) {
    Mask mask = 0;
    for (std::size_t i : S) {
        if (i >= kMaxHypotheses) throw std::out_of_range("index too large for a closure mask");
        mask |= Mask{1} << i;
    }
    return mask;
}

SubsetSelection from_mask(Mask S, std::size_t m) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < m; ++i) {
        if (S & (Mask{1} << i)) idx.push_back(i);
    }
    return SubsetSelection::from_indices(std::move(idx), m);
}

} // namespace fdplens::oracle
