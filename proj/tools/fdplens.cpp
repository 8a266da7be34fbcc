// fdplens: simultaneous false discovery bounds for arbitrary subsets of
// hypotheses, a mixture-model simulator and a query service.

#include <iostream>

#include <CLI11.hpp>

#include "fdplens/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Simultaneous confidence bounds on false discoveries in post-hoc selected sets"};
    app.require_subcommand(1);

    fdplens::AnalyzeOptions analyze;
    auto* cmd_analyze = app.add_subcommand("analyze", "Bound the false discoveries in one set");
    cmd_analyze->add_option("file", analyze.file, "CSV/TSV table of id,p")->required();
    cmd_analyze->add_option("--alpha", analyze.alpha, "Confidence level is 1 - alpha")->capture_default_str();
    cmd_analyze->add_option("--set", analyze.set, "all | none | top:k | ranks:a-b | p<=x | ids:a,b,...")
        ->capture_default_str();
    cmd_analyze->add_option("--format", analyze.format, "json | csv")->capture_default_str();

    fdplens::ConcentrationOptions conc;
    auto* cmd_conc = app.add_subcommand("concentration", "Report the set holding every confident discovery");
    cmd_conc->add_option("file", conc.file, "CSV/TSV table of id,p")->required();
    cmd_conc->add_option("--alpha", conc.alpha, "Confidence level is 1 - alpha")->capture_default_str();
    cmd_conc->add_option("--format", conc.format, "json | csv")->capture_default_str();

    fdplens::SimulateOptions simulate;
    auto* cmd_sim = app.add_subcommand("simulate", "Run a mixture-model experiment");
    cmd_sim->add_option("kind", simulate.kind, "coverage | scalability | consistency")->required();
    cmd_sim->add_option("config", simulate.config, "TOML or JSON config file")->required();
    cmd_sim->add_option("--seed", simulate.seed, "Override the configured seed");
    cmd_sim->add_option("--reps", simulate.reps, "Override the configured replication count");
    cmd_sim->add_option("--alpha", simulate.alpha, "Override the configured alpha");
    cmd_sim->add_option("--q", simulate.q, "Override the configured BH level");
    cmd_sim->add_option("--out", simulate.out, "Output prefix for .json and .csv")->capture_default_str();
    cmd_sim->add_option("--threads", simulate.threads, "Worker threads (0: FDPLENS_THREADS or all cores)");

    fdplens::ServeOptions serve;
    std::string preload;
    auto* cmd_serve = app.add_subcommand("serve", "Start the HTTP query service");
    cmd_serve->add_option("file", preload, "Study to preload, served at GET /study");
    cmd_serve->add_option("--port", serve.port, "TCP port (0 picks a free one)")->capture_default_str();
    cmd_serve->add_option("--host", serve.host, "Bind address")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return fdplens::kExitParse;
    }

    if (*cmd_analyze) return fdplens::run_analyze(analyze, std::cout, std::cerr);
    if (*cmd_conc) return fdplens::run_concentration(conc, std::cout, std::cerr);
    if (*cmd_sim) return fdplens::run_simulate(simulate, std::cout, std::cerr);
    if (!preload.empty()) serve.file = preload;
    return fdplens::run_serve(serve, std::cout, std::cerr);
}
