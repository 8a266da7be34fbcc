#include "fdplens/selection.hpp"

#include <algorithm>
#include <charconv>
#include <unordered_map>

#include "fdplens/input.hpp"

namespace fdplens {

namespace {

std::size_t parse_count(std::string_view s, std::string_view what) {
    std::size_t value = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
        throw std::invalid_argument("invalid " + std::string(what) + " '" + std::string(s) + "'");
    }
    return value;
}

bool starts_with(std::string_view s, std::string_view prefix) { return s.substr(0, prefix.size()) == prefix; }

std::vector<std::string> split_ids(std::string_view list) {
    std::vector<std::string> ids;
    std::size_t start = 0;
    while (start <= list.size()) {
        const auto comma = list.find(',', start);
        std::string_view item = list.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
        while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
        while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
        if (item.empty()) throw std::invalid_argument("empty id in set specification");
        ids.emplace_back(item);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return ids;
}

} // namespace

SetSpec parse_set_spec(std::string_view text) {
    if (text == "all") return SetSpec{};
    if (text == "none" || text.empty()) return SetSpec{SetSpec::Kind::None, 0, 0, 0.0, {}};
    if (starts_with(text, "top:")) return SetSpec::top(parse_count(text.substr(4), "count"));
    if (starts_with(text, "ranks:")) {
        const auto body = text.substr(6);
        const auto dash = body.find('-');
        if (dash == std::string_view::npos) throw std::invalid_argument("rank range must look like ranks:a-b");
        const std::size_t first = parse_count(body.substr(0, dash), "rank");
        const std::size_t last = parse_count(body.substr(dash + 1), "rank");
        if (first == 0 || last < first) throw std::invalid_argument("rank range needs 1 <= a <= b");
        return SetSpec::rank_range(first, last);
    }
    if (starts_with(text, "p<=")) {
        double x = 0.0;
        if (!parse_number(text.substr(3), x)) throw std::invalid_argument("invalid threshold in set specification");
        return SetSpec::at_most(x);
    }
    if (starts_with(text, "ids:")) text.remove_prefix(4);
    return SetSpec::of_ids(split_ids(text));
}

SubsetSelection resolve(const SetSpec& spec, const PValueStudy& study) {
    const std::size_t m = study.size();
    switch (spec.kind) {
    case SetSpec::Kind::All:
        return SubsetSelection::all(m);
    case SetSpec::Kind::None:
        return SubsetSelection{};
    case SetSpec::Kind::Top:
        if (spec.last_rank > m) {
            throw ResolutionError("top:" + std::to_string(spec.last_rank) + " exceeds the " + std::to_string(m) +
                                  " hypotheses");
        }
        return SubsetSelection::smallest(study, spec.last_rank);
    case SetSpec::Kind::RankRange: {
        if (spec.first_rank == 0 || spec.last_rank < spec.first_rank) {
            throw ResolutionError("rank range needs 1 <= first <= last");
        }
        if (spec.last_rank > m) throw ResolutionError("rank range extends beyond m = " + std::to_string(m));
        std::vector<std::size_t> idx(study.order().begin() + static_cast<std::ptrdiff_t>(spec.first_rank - 1),
                                     study.order().begin() + static_cast<std::ptrdiff_t>(spec.last_rank));
        return SubsetSelection::from_indices(std::move(idx), m);
    }
    case SetSpec::Kind::Threshold: {
        const auto& sorted = study.sorted();
        const auto k = static_cast<std::size_t>(std::upper_bound(sorted.begin(), sorted.end(), spec.threshold) -
                                                sorted.begin());
        return SubsetSelection::smallest(study, k);
    }
    case SetSpec::Kind::Ids: {
        std::unordered_map<std::string_view, std::size_t> where;
        where.reserve(m);
        for (std::size_t i = 0; i < m; ++i) where.emplace(study.ids()[i], i);
        std::vector<std::size_t> idx;
        idx.reserve(spec.ids.size());
        for (const auto& id : spec.ids) {
            const auto it = where.find(id);
            if (it == where.end()) throw ResolutionError("unknown hypothesis id '" + id + "'");
            idx.push_back(it->second);
        }
        try {
            return SubsetSelection::from_indices(std::move(idx), m);
        } catch (const std::invalid_argument&) {
            throw ResolutionError("hypothesis id listed twice");
        }
    }
    }
    throw std::logic_error("unhandled set specification");
}

} // namespace fdplens
