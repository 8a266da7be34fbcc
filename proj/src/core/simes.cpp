#include "fdplens/simes.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace fdplens {

bool simes_rejects_sorted(std::span<const double> ascending, double alpha) {
    const auto n = static_cast<double>(ascending.size());
    for (std::size_t i = 0; i < ascending.size(); ++i) {
        if (scaled_leq(n, ascending[i], static_cast<double>(i + 1), alpha)) return true;
    }
    return false;
}

bool simes_rejects(const PValueStudy& study, const SubsetSelection& I, double alpha) {
    if (I.empty()) throw std::invalid_argument("Simes test needs a nonempty index set");
    std::vector<double> values;
    values.reserve(I.size());
    for (std::size_t i : I) values.push_back(study.p(i));
    std::sort(values.begin(), values.end());
    return simes_rejects_sorted(values, alpha);
}

} // namespace fdplens
