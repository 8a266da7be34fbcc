#pragma once
// Set specifications: how a user names the subset S to bound.
//
//   all | none          every hypothesis / the empty set
//   top:k               the k smallest p-values
//   ranks:a-b           p-value ranks a..b, 1-based and inclusive
//   p<=x                every hypothesis with p <= x
//   ids:a,b,c  | a,b,c  explicit hypothesis ids

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fdplens/study.hpp"

namespace fdplens {

// A set specification that names something absent from the study.
class ResolutionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SetSpec {
    enum class Kind { All, None, Top, RankRange, Threshold, Ids };

    Kind kind = Kind::All;
    std::size_t first_rank = 0;   // Top: count in last_rank; RankRange: 1-based bounds
    std::size_t last_rank = 0;
    double threshold = 0.0;
    std::vector<std::string> ids;

    static SetSpec top(std::size_t k) { return SetSpec{Kind::Top, 1, k, 0.0, {}}; }
    static SetSpec rank_range(std::size_t first, std::size_t last) {
        return SetSpec{Kind::RankRange, first, last, 0.0, {}};
    }
    static SetSpec at_most(double x) { return SetSpec{Kind::Threshold, 0, 0, x, {}}; }
    static SetSpec of_ids(std::vector<std::string> ids) { return SetSpec{Kind::Ids, 0, 0, 0.0, std::move(ids)}; }
};

// Throws std::invalid_argument on malformed syntax.
SetSpec parse_set_spec(std::string_view text);

// Throws ResolutionError for unknown ids or ranks beyond m.
SubsetSelection resolve(const SetSpec& spec, const PValueStudy& study);

} // namespace fdplens
