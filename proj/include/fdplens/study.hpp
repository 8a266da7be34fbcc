#pragma once
// Immutable p-value table and validated hypothesis subsets.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace fdplens {

// A table of m >= 1 hypotheses with their raw p-values and the stable sort
// order by (p, original index). Positions are 0-based throughout the library;
// only the wire formats use 1-based positions.
class PValueStudy {
public:
    // Throws std::invalid_argument on m == 0, size mismatch, duplicate ids,
    // or any p outside [0, 1] (NaN included).
    PValueStudy(std::vector<std::string> ids, std::vector<double> p);

    // Ids default to "1".."m".
    static PValueStudy from_pvalues(std::vector<double> p);

    std::size_t size() const noexcept { return p_.size(); }
    const std::vector<std::string>& ids() const noexcept { return ids_; }
    const std::vector<double>& p() const noexcept { return p_; }
    double p(std::size_t i) const { return p_[i]; }

    // order()[k] is the hypothesis holding the (k+1)-th smallest p-value.
    const std::vector<std::size_t>& order() const noexcept { return order_; }
    // rank(i) is the 0-based position of hypothesis i in order().
    std::size_t rank(std::size_t i) const { return rank_[i]; }
    // sorted()[k] == p(order()[k]).
    const std::vector<double>& sorted() const noexcept { return sorted_; }

private:
    std::vector<std::string> ids_;
    std::vector<double> p_;
    std::vector<std::size_t> order_;
    std::vector<std::size_t> rank_;
    std::vector<double> sorted_;
};

// A strictly increasing set of hypothesis positions within one study.
class SubsetSelection {
public:
    SubsetSelection() = default;

    // Sorts the input; throws std::invalid_argument on duplicates and
    // std::out_of_range on any index >= m.
    static SubsetSelection from_indices(std::vector<std::size_t> indices, std::size_t m);

    // The k hypotheses with the smallest p-values (L_k), listed by position.
    static SubsetSelection smallest(const PValueStudy& study, std::size_t k);
    // The k hypotheses with the largest p-values (K_k), listed by position.
    static SubsetSelection largest(const PValueStudy& study, std::size_t k);
    static SubsetSelection all(std::size_t m);

    std::span<const std::size_t> indices() const noexcept { return indices_; }
    std::size_t size() const noexcept { return indices_.size(); }
    bool empty() const noexcept { return indices_.empty(); }
    bool contains(std::size_t i) const;

    auto begin() const noexcept { return indices_.begin(); }
    auto end() const noexcept { return indices_.end(); }

    friend bool operator==(const SubsetSelection&, const SubsetSelection&) = default;

private:
    explicit SubsetSelection(std::vector<std::size_t> sorted_unique)
        : indices_(std::move(sorted_unique)) {}

    std::vector<std::size_t> indices_;
};

SubsetSelection intersect(const SubsetSelection& a, const SubsetSelection& b);

} // namespace fdplens
