#pragma once
// Monte-Carlo experiments under the mixture model. Replications run in
// parallel, each on its own random stream; records are stored by replication
// index so the result does not depend on scheduling.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "fdplens/mixture.hpp"

namespace fdplens::sim {

struct RepRecord {
    std::size_t cell = 0;
    std::size_t m = 0;
    double mu = 0.0;
    std::uint64_t rep = 0;
    double h_frac = 0.0;     // h/m
    double set_frac = 0.0;   // |S|/m for the set under study (T, J_m or S_m)
    double q_bound = 0.0;    // q_alpha of that set
    double b_frac = 0.0;     // |B_alpha|/m
    double r_frac = 0.0;     // |R_alpha|/m
    bool violation = false;  // some S has tau(S) > t_alpha(S)
    bool bound_ok = true;    // experiment-specific exact check held

    friend bool operator==(const RepRecord&, const RepRecord&) = default;
};

struct Stat {
    double mean = 0.0;
    double se = 0.0;   // Monte-Carlo standard error of the mean

    friend bool operator==(const Stat&, const Stat&) = default;
};

struct CellSummary {
    std::size_t cell = 0;
    std::size_t m = 0;
    double mu = 0.0;
    std::size_t reps = 0;
    Stat h_frac;
    Stat set_frac;
    Stat q_bound;
    Stat b_frac;
    Stat r_frac;
    Stat violation;           // mean is the violation rate
    std::size_t bound_failures = 0;

    friend bool operator==(const CellSummary&, const CellSummary&) = default;
};

struct ExperimentResult {
    std::string kind;
    MixtureConfig config;
    double pi_bar = 1.0;
    bool detectable = false;
    std::vector<std::string> warnings;
    std::vector<RepRecord> records;
    std::vector<CellSummary> cells;
    bool passed = false;
    std::string verdict;
};

// Cells in order of first appearance; recomputable from records alone.
std::vector<CellSummary> summarize(const std::vector<RepRecord>& records);

struct RunOptions {
    unsigned threads = 0;   // 0: default_threads()
};

// hardware_concurrency capped by the FDPLENS_THREADS environment variable.
unsigned default_threads();

// Per rep, a study with known truth T; the violation event is T ∈ X_alpha,
// decided by the closure-membership test on T. Passes when the violation
// rate is at most alpha + 3·sqrt(alpha(1 - alpha)/reps).
ExperimentResult coverage_experiment(const MixtureConfig& cfg, RunOptions opts = {});

// Per m and rep, J_m = B at level min(1, q·alpha·pi_bar/pi_hat) (level 1 when
// pi_hat = 0). Passes when every rep has q_alpha(J_m) <= pi_bar·q and the
// BH certificate at the adjusted level holds.
ExperimentResult scalability_experiment(const MixtureConfig& cfg, std::span<const std::size_t> m_grid,
                                        RunOptions opts = {});

// Per (m, mu) cell, S_m is a tagged subset of relative size c with true-null
// proportion gamma_subset. Passes when |mean q_alpha(S_m) - gamma_subset|
// strictly decreases along the grid diagonal. Throws std::invalid_argument
// unless c lies in (0, 1].
ExperimentResult consistency_experiment(const MixtureConfig& cfg, std::span<const std::size_t> m_grid,
                                        std::span<const double> mu_grid, double c, RunOptions opts = {});

// |mean q - gamma_subset| per cell of a consistency result.
std::vector<double> consistency_gaps(const ExperimentResult& result);

nlohmann::ordered_json to_json(const ExperimentResult& result);
// One row per replication, with a header line.
std::string to_csv(const ExperimentResult& result);

} // namespace fdplens::sim
