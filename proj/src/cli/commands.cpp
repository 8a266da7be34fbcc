#include "fdplens/commands.hpp"

#include <csignal>
#include <fstream>
#include <pthread.h>
#include <thread>

#include <json.hpp>

#include "fdplens/config.hpp"
#include "fdplens/experiment.hpp"
#include "fdplens/hommel.hpp"
#include "fdplens/input.hpp"
#include "fdplens/report.hpp"
#include "fdplens/selection.hpp"
#include "fdplens/service.hpp"

namespace fdplens {

namespace {

bool valid_alpha(double alpha, std::ostream& err) {
    if (alpha >= 0.0 && alpha <= 1.0) return true;
    err << "error: --alpha must lie in [0, 1]\n";
    return false;
}

bool valid_format(const std::string& format, std::ostream& err) {
    if (format == "json" || format == "csv") return true;
    err << "error: --format must be json or csv\n";
    return false;
}

// Reads the table or reports the parse error; nullopt means exit 2.
std::optional<PValueStudy> load_study(const std::filesystem::path& file, std::ostream& err) {
    try {
        return read_table_file(file);
    } catch (const ParseError& e) {
        err << "error: " << file.string() << ": " << e.what() << '\n';
        return std::nullopt;
    }
}

} // namespace

int run_analyze(const AnalyzeOptions& opts, std::ostream& out, std::ostream& err) {
    if (!valid_alpha(opts.alpha, err) || !valid_format(opts.format, err)) return kExitParse;
    SetSpec spec;
    try {
        spec = parse_set_spec(opts.set);
    } catch (const std::invalid_argument& e) {
        err << "error: --set: " << e.what() << '\n';
        return kExitParse;
    }
    const auto study = load_study(opts.file, err);
    if (!study) return kExitParse;

    SubsetSelection S;
    try {
        S = resolve(spec, *study);
    } catch (const ResolutionError& e) {
        err << "error: --set: " << e.what() << '\n';
        return kExitResolution;
    }

    const HommelContext ctx = HommelContext::compute(*study, opts.alpha);
    const auto report = analyze_json(*study, ctx, S);
    if (opts.format == "json") {
        out << report.dump(2) << '\n';
        return kExitOk;
    }
    const auto& set = report["set"];
    out << "alpha,m,h,z,pi_hat,r_size,b,size,d,t,q\n";
    out << format_decimal(opts.alpha) << ',' << report["m"].get<std::size_t>() << ',' << ctx.h() << ',' << ctx.z()
        << ',' << report["pi_hat"].get<std::string>() << ',' << report["r_size"].get<std::size_t>() << ','
        << report["b"].get<std::size_t>() << ',' << set["size"].get<std::size_t>() << ','
        << set["d"].get<std::size_t>() << ',' << set["t"].get<std::size_t>() << ',' << set["q"].get<std::string>()
        << '\n';
    return kExitOk;
}

int run_concentration(const ConcentrationOptions& opts, std::ostream& out, std::ostream& err) {
    if (!valid_alpha(opts.alpha, err) || !valid_format(opts.format, err)) return kExitParse;
    const auto study = load_study(opts.file, err);
    if (!study) return kExitParse;

    const HommelContext ctx = HommelContext::compute(*study, opts.alpha);
    const auto report = concentration_json(*study, ctx);
    if (opts.format == "json") {
        out << report.dump(2) << '\n';
        return kExitOk;
    }
    std::string ids;
    for (const auto& id : report["concentration_ids"]) {
        if (!ids.empty()) ids += ';';
        ids += id.get<std::string>();
    }
    out << "alpha,m,h,m_minus_h,z,d_concentration,b,z_within_b,concentration_ids\n";
    out << format_decimal(opts.alpha) << ',' << study->size() << ',' << ctx.h() << ',' << study->size() - ctx.h()
        << ',' << ctx.z() << ',' << report["d_concentration"].get<std::size_t>() << ','
        << report["b"].get<std::size_t>() << ',' << (report["z_within_b"].get<bool>() ? "true" : "false") << ','
        << ids << '\n';
    return kExitOk;
}

int run_simulate(const SimulateOptions& opts, std::ostream& out, std::ostream& err) {
    if (opts.kind != "coverage" && opts.kind != "scalability" && opts.kind != "consistency") {
        err << "error: unknown simulation '" << opts.kind << "' (coverage, scalability, consistency)\n";
        return kExitParse;
    }
    SimulationSpec spec;
    try {
        spec = load_simulation_spec(opts.config);
        auto& mix = spec.mixture;
        if (opts.seed) mix.seed = *opts.seed;
        if (opts.reps) mix.reps = *opts.reps;
        if (opts.alpha) mix.alpha = *opts.alpha;
        if (opts.q) mix.q = *opts.q;
        mix.validate();
    } catch (const ConfigError& e) {
        err << "error: " << opts.config.string() << ": " << e.what() << '\n';
        return kExitParse;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitParse;
    }

    sim::ExperimentResult result;
    const sim::RunOptions run{opts.threads};
    try {
        if (opts.kind == "coverage") {
            result = sim::coverage_experiment(spec.mixture, run);
        } else if (opts.kind == "scalability") {
            result = sim::scalability_experiment(spec.mixture, spec.m_grid, run);
        } else {
            result = sim::consistency_experiment(spec.mixture, spec.m_grid, spec.mu_grid, spec.subset_fraction, run);
        }
    } catch (const std::invalid_argument& e) {
        err << "error: " << opts.config.string() << ": " << e.what() << '\n';
        return kExitParse;
    }

    const std::string json_path = opts.out + ".json";
    const std::string csv_path = opts.out + ".csv";
    std::ofstream json_file(json_path, std::ios::binary);
    std::ofstream csv_file(csv_path, std::ios::binary);
    if (!json_file || !csv_file) {
        err << "error: cannot write " << json_path << " / " << csv_path << '\n';
        return kExitEnvironment;
    }
    json_file << sim::to_json(result).dump(2) << '\n';
    csv_file << sim::to_csv(result);

    for (const auto& w : result.warnings) err << "warning: " << w << '\n';
    out << opts.kind << ' ' << (result.passed ? "PASS" : "FAIL") << ": " << result.verdict << '\n';
    return kExitOk;
}

int run_serve(const ServeOptions& opts, std::ostream& out, std::ostream& err) {
    service::Service svc;
    if (opts.file) {
        auto study = load_study(*opts.file, err);
        if (!study) return kExitParse;
        svc.preload(std::move(*study));
    }
    service::Server server(svc);
    if (!server.bind(opts.host, opts.port)) {
        err << "error: cannot bind " << opts.host << ':' << opts.port << " (address in use?)\n";
        return kExitEnvironment;
    }

    // Signals are taken synchronously by a watcher thread, which stops the
    // server from outside signal context.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);
    std::thread watcher([&] {
        int sig = 0;
        sigwait(&signals, &sig);
        server.stop();
    });

    out << "listening on http://" << opts.host << ':' << server.port() << '\n' << std::flush;
    server.listen();

    // listen() can also return on its own; wake the watcher either way.
    pthread_kill(watcher.native_handle(), SIGTERM);
    watcher.join();
    pthread_sigmask(SIG_UNBLOCK, &signals, nullptr);
    return kExitOk;
}

} // namespace fdplens
