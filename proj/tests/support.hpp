#pragma once
// Shared fixtures and brute-force references for the test suites. The
// references follow the textbook definitions directly and share nothing with
// the library apart from scaled_leq.

#include <algorithm>
#include <cstddef>
#include <random>
#include <vector>

#include "fdplens/simes.hpp"
#include "fdplens/study.hpp"

namespace fdplens::testing {

// The four-hypothesis example with h = 2 at alpha = 0.05.
inline PValueStudy example_study() { return PValueStudy::from_pvalues({0.03, 0.031, 0.032, 0.06}); }

inline constexpr double kLevels[] = {0.0, 0.01, 0.05, 0.5, 1.0};

// Mixed p-values: uniform, near zero, exact zeros, exact ones and ties.
inline std::vector<double> random_pvalues(std::mt19937_64& gen, std::size_t m) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> p;
    p.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double kind = unif(gen);
        if (kind < 0.35) {
            p.push_back(unif(gen));
        } else if (kind < 0.7) {
            const double u = unif(gen);
            p.push_back(0.05 * u * u * u);
        } else if (kind < 0.8) {
            p.push_back(0.0);
        } else if (kind < 0.85) {
            p.push_back(1.0);
        } else if (kind < 0.9 && !p.empty()) {
            p.push_back(p[std::uniform_int_distribution<std::size_t>(0, p.size() - 1)(gen)]);
        } else {
            // Simes critical values i·alpha/n for small n land exactly on
            // the comparison boundary.
            const double n = static_cast<double>(std::uniform_int_distribution<int>(1, 12)(gen));
            const double i = static_cast<double>(std::uniform_int_distribution<int>(1, 12)(gen));
            p.push_back(std::min(1.0, i * 0.05 / n));
        }
    }
    return p;
}

inline bool naive_simes(std::vector<double> v, double alpha) {
    std::sort(v.begin(), v.end());
    const double n = static_cast<double>(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (scaled_leq(n, v[i], static_cast<double>(i + 1), alpha)) return true;
    }
    return false;
}

// max{i : the i largest p-values are not Simes-rejected}, testing every i.
inline std::size_t naive_h(const std::vector<double>& p, double alpha) {
    std::vector<double> s = p;
    std::sort(s.begin(), s.end());
    std::size_t best = 0;
    for (std::size_t i = 1; i <= s.size(); ++i) {
        std::vector<double> top(s.end() - static_cast<std::ptrdiff_t>(i), s.end());
        if (!naive_simes(top, alpha)) best = i;
    }
    return best;
}

// max over 1 <= u <= cap of 1 - u + #{i in S : h·p_i <= u·alpha}; 0 for S empty.
inline std::size_t naive_d(const std::vector<double>& p, const std::vector<std::size_t>& S, std::size_t h,
                           double alpha, std::size_t cap) {
    long best = 0;
    for (std::size_t u = 1; u <= cap; ++u) {
        long count = 0;
        for (std::size_t i : S) count += scaled_leq(static_cast<double>(h), p[i], static_cast<double>(u), alpha);
        best = std::max(best, 1 - static_cast<long>(u) + count);
    }
    return static_cast<std::size_t>(best);
}

inline std::vector<std::size_t> mask_members(std::uint32_t mask, std::size_t m) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < m; ++i) {
        if (mask >> i & 1u) out.push_back(i);
    }
    return out;
}

} // namespace fdplens::testing
