#pragma once
// The fdplens subcommands as plain functions returning exit codes, so tests
// can run them without a process boundary.
//
// Exit codes: 0 ok, 2 parse/config/flag error, 3 set resolution error,
// 4 environment (port in use, unwritable output).

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

namespace fdplens {

inline constexpr int kExitOk = 0;
inline constexpr int kExitParse = 2;
inline constexpr int kExitResolution = 3;
inline constexpr int kExitEnvironment = 4;

struct AnalyzeOptions {
    std::filesystem::path file;
    double alpha = 0.05;
    std::string set = "all";
    std::string format = "json";   // json | csv
};

struct ConcentrationOptions {
    std::filesystem::path file;
    double alpha = 0.05;
    std::string format = "json";
};

struct SimulateOptions {
    std::string kind;                    // coverage | scalability | consistency
    std::filesystem::path config;
    std::optional<std::uint64_t> seed;   // override the config file
    std::optional<std::size_t> reps;
    std::optional<double> alpha;
    std::optional<double> q;
    std::string out = "fdplens-sim";     // writes <out>.json and <out>.csv
    unsigned threads = 0;
};

struct ServeOptions {
    std::optional<std::filesystem::path> file;
    std::string host = "127.0.0.1";
    int port = 8080;
};

int run_analyze(const AnalyzeOptions& opts, std::ostream& out, std::ostream& err);
int run_concentration(const ConcentrationOptions& opts, std::ostream& out, std::ostream& err);
int run_simulate(const SimulateOptions& opts, std::ostream& out, std::ostream& err);
// Blocks until SIGINT or SIGTERM.
int run_serve(const ServeOptions& opts, std::ostream& out, std::ostream& err);

} // namespace fdplens
