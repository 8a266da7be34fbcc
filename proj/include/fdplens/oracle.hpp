#pragma once
// Full closed testing by enumeration of all 2^m intersections. Reference
// implementation for small m; it shares only scaled_leq with the shortcut.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "fdplens/study.hpp"

namespace fdplens::oracle {

using Mask = std::uint32_t;

inline constexpr std::size_t kMaxHypotheses = 14;

// Bit i of a mask stands for hypothesis i (0-based).
struct ClosureTable {
    std::size_t m = 0;
    double alpha = 0.0;
    std::vector<bool> u_member;   // Simes rejects H_I
    std::vector<bool> x_member;   // closed testing rejects H_I

    bool locally_rejected(Mask I) const { return u_member[I]; }
    bool rejected(Mask I) const { return x_member[I]; }
};

// Throws std::length_error when m > kMaxHypotheses.
ClosureTable build_closure(const PValueStudy& study, double alpha);

// max{|I| : I ⊆ S, I not rejected}, by literal enumeration of the subsets of S.
std::size_t oracle_t(const ClosureTable& table, Mask S);

Mask to_mask(const SubsetSelection& S);
SubsetSelection from_mask(Mask S, std::size_t m);

} // namespace fdplens::oracle
