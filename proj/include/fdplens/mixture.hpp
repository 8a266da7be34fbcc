#pragma once
// Efron two-groups mixture model: p-value generation and the limit pi_bar of
// Hommel's pi_hat.
//
// True nulls are Uniform(0, 1). False nulls come from a one-sided z-test with
// unit-variance normal shift mu, p = sf(X) with X ~ N(mu, 1), so that
// P_1(x) = sf(isf(x) - mu). Larger mu plays the role of larger sample size.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "fdplens/study.hpp"

namespace fdplens::sim {

struct MixtureConfig {
    double gamma = 0.5;       // proportion of true nulls
    double mu = 2.0;          // alternative effect size
    std::size_t m = 1000;
    std::size_t reps = 100;
    std::uint64_t seed = 1;
    double alpha = 0.05;
    double q = 0.1;
    // Subset tagging for the consistency experiment: within the tagged subset
    // the true-null proportion is gamma_subset and the effect is mu_subset
    // (mu when unset).
    double gamma_subset = 0.3;
    std::optional<double> mu_subset;

    // Throws std::invalid_argument on out-of-range fields.
    void validate() const;

    friend bool operator==(const MixtureConfig&, const MixtureConfig&) = default;
};

// Counter-style stream: mt19937_64 seeded with splitmix64(seed, stream).
// Streams for distinct ids are independent and platform-reproducible.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t stream);

    // Uniform on the open interval (0, 1) with 53-bit resolution.
    double uniform();

private:
    std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

// P_1(x) for a normal shift mu.
double alternative_cdf(double x, double mu);
// P(x) = gamma·x + (1 - gamma)·P_1(x).
double mixture_cdf(double x, double gamma, double mu);

struct DrawnStudy {
    PValueStudy study;
    std::vector<bool> truth;       // H_i true
    std::vector<bool> in_subset;   // tagged subset membership; all false if untagged
};

// One study of cfg.m hypotheses from stream `stream`.
DrawnStudy draw_study(const MixtureConfig& cfg, std::uint64_t stream = 0);

// Like draw_study, but each hypothesis joins the tagged subset with
// probability c. Inside the subset the true-null proportion is
// cfg.gamma_subset; outside it is chosen so the overall proportion stays
// cfg.gamma. Throws std::invalid_argument if c is not in (0, 1] or if no
// outside proportion in [0, 1] achieves cfg.gamma.
DrawnStudy draw_tagged_study(const MixtureConfig& cfg, double c, std::uint64_t stream = 0);

struct PiBar {
    double value = 1.0;      // inf over x in [0, 1) of (1 - P(x·alpha)) / (1 - x)
    double argmin = 0.0;
    bool detectable = false; // value < 1
};

// Grid of `grid` points on [0, 1) refined by golden-section search around the
// grid minimum. Returns 0 when P(alpha) == 1.
PiBar pi_bar(const std::function<double(double)>& cdf, double alpha, std::size_t grid = 100000);
PiBar pi_bar(const MixtureConfig& cfg);

} // namespace fdplens::sim
