#include "fdplens/study.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

namespace fdplens {

PValueStudy::PValueStudy(std::vector<std::string> ids, std::vector<double> p)
    : ids_(std::move(ids)), p_(std::move(p)) {
    const std::size_t m = p_.size();
    if (m == 0) throw std::invalid_argument("study must contain at least one hypothesis");
    if (ids_.size() != m) throw std::invalid_argument("ids and p-values differ in length");

    for (std::size_t i = 0; i < m; ++i) {
        // Written so that NaN fails as well.
        if (!(p_[i] >= 0.0 && p_[i] <= 1.0)) {
            throw std::invalid_argument("p-value for '" + ids_[i] + "' is outside [0, 1]");
        }
    }

    std::unordered_set<std::string_view> seen;
    seen.reserve(m);
    for (const auto& id : ids_) {
        if (!seen.insert(id).second) throw std::invalid_argument("duplicate hypothesis id '" + id + "'");
    }

    order_.resize(m);
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    // Stable on the original index, so ties keep input order.
    std::stable_sort(order_.begin(), order_.end(),
                     [this](std::size_t a, std::size_t b) { return p_[a] < p_[b]; });

    rank_.resize(m);
    sorted_.resize(m);
    for (std::size_t k = 0; k < m; ++k) {
        rank_[order_[k]] = k;
        sorted_[k] = p_[order_[k]];
    }
}

PValueStudy PValueStudy::from_pvalues(std::vector<double> p) {
    std::vector<std::string> ids(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) ids[i] = std::to_string(i + 1);
    return PValueStudy(std::move(ids), std::move(p));
}

SubsetSelection SubsetSelection::from_indices(std::vector<std::size_t> indices, std::size_t m) {
    if (!std::is_sorted(indices.begin(), indices.end())) std::sort(indices.begin(), indices.end());
    if (std::adjacent_find(indices.begin(), indices.end()) != indices.end()) {
        throw std::invalid_argument("subset contains duplicate indices");
    }
    if (!indices.empty() && indices.back() >= m) {
        throw std::out_of_range("subset index " + std::to_string(indices.back()) +
                                " outside study of size " + std::to_string(m));
    }
    return SubsetSelection(std::move(indices));
}

SubsetSelection SubsetSelection::smallest(const PValueStudy& study, std::size_t k) {
    k = std::min(k, study.size());
    std::vector<std::size_t> idx(study.order().begin(), study.order().begin() + static_cast<std::ptrdiff_t>(k));
    std::sort(idx.begin(), idx.end());
    return SubsetSelection(std::move(idx));
}

SubsetSelection SubsetSelection::largest(const PValueStudy& study, std::size_t k) {
    k = std::min(k, study.size());
    std::vector<std::size_t> idx(study.order().end() - static_cast<std::ptrdiff_t>(k), study.order().end());
    std::sort(idx.begin(), idx.end());
    return SubsetSelection(std::move(idx));
}

SubsetSelection SubsetSelection::all(std::size_t m) {
    std::vector<std::size_t> idx(m);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    return SubsetSelection(std::move(idx));
}

bool SubsetSelection::contains(std::size_t i) const {
    return std::binary_search(indices_.begin(), indices_.end(), i);
}

SubsetSelection intersect(const SubsetSelection& a, const SubsetSelection& b) {
    std::vector<std::size_t> out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    // Already strictly increasing; from_indices only re-checks.
    const std::size_t bound = out.empty() ? 0 : out.back() + 1;
    return SubsetSelection::from_indices(std::move(out), bound);
}

} // namespace fdplens
