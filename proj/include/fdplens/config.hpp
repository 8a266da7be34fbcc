#pragma once
// Simulation config files: a JSON object or a flat TOML table with the
// mixture fields plus the experiment grids.
//
//   gamma = 0.5          mu = 2.0        m = 1000        reps = 100
//   seed = 1             alpha = 0.05    q = 0.1
//   gamma_subset = 0.3   mu_subset = 2.0 subset_fraction = 0.5
//   m_grid = [1000, 10000]               mu_grid = [1, 2, 4]

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "fdplens/mixture.hpp"

namespace fdplens {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SimulationSpec {
    sim::MixtureConfig mixture;
    std::vector<std::size_t> m_grid;   // defaults to {mixture.m}
    std::vector<double> mu_grid;       // defaults to {mixture.mu}
    double subset_fraction = 0.5;
};

// Flat TOML (key = value, numbers, booleans, strings, numeric arrays,
// comments) to a JSON object. Tables and inline tables are rejected.
nlohmann::json parse_flat_toml(std::string_view text);

// Validates every field; unknown keys are errors. Throws ConfigError.
SimulationSpec simulation_spec_from_json(const nlohmann::json& doc);

// JSON when the first non-blank character is '{', flat TOML otherwise.
SimulationSpec load_simulation_spec(const std::filesystem::path& path);

} // namespace fdplens
