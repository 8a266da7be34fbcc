#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "fdplens/study.hpp"

using namespace fdplens;

TEST_CASE("study rejects malformed input") {
    CHECK_THROWS_AS(PValueStudy::from_pvalues({}), std::invalid_argument);
    CHECK_THROWS_AS(PValueStudy::from_pvalues({0.5, 1.5}), std::invalid_argument);
    CHECK_THROWS_AS(PValueStudy::from_pvalues({-0.0001}), std::invalid_argument);
    CHECK_THROWS_AS(PValueStudy::from_pvalues({std::numeric_limits<double>::quiet_NaN()}), std::invalid_argument);
    CHECK_THROWS_AS(PValueStudy({"a", "a"}, {0.1, 0.2}), std::invalid_argument);
    CHECK_THROWS_AS(PValueStudy({"a"}, {0.1, 0.2}), std::invalid_argument);
    CHECK_NOTHROW(PValueStudy::from_pvalues({0.0, 1.0}));
}

TEST_CASE("study ids default to 1-based positions") {
    const auto s = PValueStudy::from_pvalues({0.2, 0.1});
    REQUIRE(s.ids() == std::vector<std::string>{"1", "2"});
}

TEST_CASE("ties are ordered by position") {
    const auto s = PValueStudy::from_pvalues({0.3, 0.1, 0.3, 0.1, 0.0});
    CHECK(s.order() == std::vector<std::size_t>{4, 1, 3, 0, 2});
    CHECK(s.sorted() == std::vector<double>{0.0, 0.1, 0.1, 0.3, 0.3});
    for (std::size_t r = 0; r < s.size(); ++r) CHECK(s.rank(s.order()[r]) == r);
}

TEST_CASE("smallest and largest follow the p-value order") {
    const auto s = PValueStudy::from_pvalues({0.4, 0.1, 0.3, 0.2});
    CHECK(SubsetSelection::smallest(s, 2) == SubsetSelection::from_indices({1, 3}, 4));
    CHECK(SubsetSelection::largest(s, 2) == SubsetSelection::from_indices({0, 2}, 4));
    CHECK(SubsetSelection::smallest(s, 0).empty());
    CHECK(SubsetSelection::largest(s, 4) == SubsetSelection::all(4));
}

TEST_CASE("selection validation") {
    CHECK_THROWS_AS(SubsetSelection::from_indices({1, 1}, 3), std::invalid_argument);
    CHECK_THROWS_AS(SubsetSelection::from_indices({3}, 3), std::out_of_range);
    const auto sel = SubsetSelection::from_indices({2, 0}, 3);
    CHECK(std::vector<std::size_t>(sel.begin(), sel.end()) == std::vector<std::size_t>{0, 2});
    CHECK(sel.contains(2));
    CHECK_FALSE(sel.contains(1));
}

TEST_CASE("intersection of selections") {
    const auto a = SubsetSelection::from_indices({0, 2, 3, 5}, 6);
    const auto b = SubsetSelection::from_indices({1, 2, 5}, 6);
    CHECK(intersect(a, b) == SubsetSelection::from_indices({2, 5}, 6));
    CHECK(intersect(a, SubsetSelection{}).empty());
}
