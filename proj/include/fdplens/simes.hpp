#pragma once
// Simes local test.
//
// Every critical-value comparison in the library goes through scaled_leq so
// that the exhaustive closed-testing oracle and the shortcut agree bit for
// bit: n·p <= k·alpha evaluated as two rounded products, no division and no
// tolerance.

#include <cstddef>
#include <span>

#include "fdplens/study.hpp"

namespace fdplens {

inline bool scaled_leq(double n, double p, double k, double alpha) noexcept {
    return n * p <= k * alpha;
}

// True iff some 1 <= i <= |I| has |I|·p_(i:I) <= i·alpha, where ascending
// holds the p-values of I sorted ascending.
bool simes_rejects_sorted(std::span<const double> ascending, double alpha);

// Throws std::invalid_argument for an empty I.
bool simes_rejects(const PValueStudy& study, const SubsetSelection& I, double alpha);

} // namespace fdplens
