#include "fdplens/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "fdplens/hommel.hpp"

namespace fdplens::sim {

namespace {

std::uint64_t stream_id(std::size_t cell, std::size_t rep) {
    return (static_cast<std::uint64_t>(cell) << 32) | static_cast<std::uint64_t>(rep);
}

template <class Fn>
std::vector<RepRecord> run_parallel(std::size_t tasks, unsigned threads, Fn fn) {
    std::vector<RepRecord> out(tasks);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks) return;
            try {
                out[i] = fn(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(tasks);
                return;
            }
        }
    };

    if (threads == 0) threads = default_threads();
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, tasks));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

Stat mean_and_se(const std::vector<double>& xs) {
    Stat s;
    if (xs.empty()) return s;
    const auto n = static_cast<double>(xs.size());
    double sum = 0.0;
    for (double x : xs) sum += x;
    s.mean = sum / n;
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - s.mean) * (x - s.mean);
        s.se = std::sqrt(ss / (n - 1.0) / n);
    }
    return s;
}

double fraction(std::size_t count, std::size_t m) {
    return static_cast<double>(count) / static_cast<double>(m);
}

SubsetSelection members(const std::vector<bool>& flags) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < flags.size(); ++i) {
        if (flags[i]) idx.push_back(i);
    }
    return SubsetSelection::from_indices(std::move(idx), flags.size());
}

std::string format_number(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

} // namespace

unsigned default_threads() {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("FDPLENS_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end != env && cap > 0) n = std::min(n, static_cast<unsigned>(cap));
    }
    return n;
}

std::vector<CellSummary> summarize(const std::vector<RepRecord>& records) {
    std::vector<CellSummary> cells;
    std::map<std::size_t, std::size_t> slot;
    std::vector<std::vector<const RepRecord*>> groups;
    for (const auto& r : records) {
        auto [it, fresh] = slot.try_emplace(r.cell, groups.size());
        if (fresh) groups.emplace_back();
        groups[it->second].push_back(&r);
    }
    for (const auto& group : groups) {
        CellSummary c;
        c.cell = group.front()->cell;
        c.m = group.front()->m;
        c.mu = group.front()->mu;
        c.reps = group.size();
        std::vector<double> h, set, q, b, r, v;
        for (const RepRecord* rec : group) {
            h.push_back(rec->h_frac);
            set.push_back(rec->set_frac);
            q.push_back(rec->q_bound);
            b.push_back(rec->b_frac);
            r.push_back(rec->r_frac);
            v.push_back(rec->violation ? 1.0 : 0.0);
            if (!rec->bound_ok) ++c.bound_failures;
        }
        c.h_frac = mean_and_se(h);
        c.set_frac = mean_and_se(set);
        c.q_bound = mean_and_se(q);
        c.b_frac = mean_and_se(b);
        c.r_frac = mean_and_se(r);
        c.violation = mean_and_se(v);
        cells.push_back(c);
    }
    return cells;
}

ExperimentResult coverage_experiment(const MixtureConfig& cfg, RunOptions opts) {
    cfg.validate();
    ExperimentResult result;
    result.kind = "coverage";
    result.config = cfg;
    const PiBar pb = pi_bar(cfg);
    result.pi_bar = pb.value;
    result.detectable = pb.detectable;

    result.records = run_parallel(cfg.reps, opts.threads, [&](std::size_t rep) {
        const DrawnStudy drawn = draw_study(cfg, stream_id(0, rep));
        const auto ctx = HommelContext::compute(drawn.study, cfg.alpha);
        const SubsetSelection truth = members(drawn.truth);

        RepRecord rec;
        rec.m = cfg.m;
        rec.mu = cfg.mu;
        rec.rep = rep;
        rec.h_frac = fraction(ctx.h(), cfg.m);
        rec.set_frac = fraction(truth.size(), cfg.m);
        rec.b_frac = fraction(bh_count(drawn.study, cfg.alpha), cfg.m);
        rec.r_frac = fraction(hommel_rejection_count(drawn.study, ctx), cfg.m);
        const BoundReport on_truth = discoveries(drawn.study, truth, ctx);
        rec.q_bound = on_truth.q();
        rec.violation = !truth.empty() && in_closure(drawn.study, truth, ctx);
        // tau(S) > t(S) for some S exactly when T itself is rejected, i.e. d(T) > 0.
        rec.bound_ok = rec.violation == (on_truth.d > 0);
        return rec;
    });
    result.cells = summarize(result.records);

    const CellSummary& cell = result.cells.front();
    const double limit = cfg.alpha + 3.0 * std::sqrt(cfg.alpha * (1.0 - cfg.alpha) / static_cast<double>(cfg.reps));
    result.passed = cell.violation.mean <= limit && cell.bound_failures == 0;
    result.verdict = "violation_rate=" + format_number(cell.violation.mean) + " limit=" + format_number(limit);
    return result;
}

ExperimentResult scalability_experiment(const MixtureConfig& cfg, std::span<const std::size_t> m_grid,
                                        RunOptions opts) {
    cfg.validate();
    if (m_grid.empty()) throw std::invalid_argument("m_grid must not be empty");
    ExperimentResult result;
    result.kind = "scalability";
    result.config = cfg;
    const PiBar pb = pi_bar(cfg);
    result.pi_bar = pb.value;
    result.detectable = pb.detectable;

    MixtureConfig at_reduced = cfg;
    at_reduced.alpha = cfg.q * cfg.alpha;
    if (!pi_bar(at_reduced).detectable) {
        result.warnings.push_back("mixture is not Simes-detectable at q*alpha; |J_m|/m is expected to vanish");
    }

    const std::size_t reps = cfg.reps;
    const double pi_bar_value = pb.value;
    result.records = run_parallel(m_grid.size() * reps, opts.threads, [&](std::size_t task) {
        const std::size_t cell = task / reps;
        const std::size_t rep = task % reps;
        MixtureConfig local = cfg;
        local.m = m_grid[cell];
        const DrawnStudy drawn = draw_study(local, stream_id(cell, rep));
        const auto ctx = HommelContext::compute(drawn.study, cfg.alpha);

        const double pi_hat = ctx.pi_hat();
        const double level = pi_hat == 0.0 ? 1.0 : std::min(1.0, cfg.q * cfg.alpha * pi_bar_value / pi_hat);
        const BhCertificate cert = bh_fdp_certificate(drawn.study, ctx, level);

        RepRecord rec;
        rec.cell = cell;
        rec.m = local.m;
        rec.mu = cfg.mu;
        rec.rep = rep;
        rec.h_frac = fraction(ctx.h(), local.m);
        rec.set_frac = fraction(cert.bound.size, local.m);
        rec.q_bound = cert.bound.q();
        rec.b_frac = fraction(bh_count(drawn.study, cfg.alpha), local.m);
        rec.r_frac = fraction(hommel_rejection_count(drawn.study, ctx), local.m);
        const bool within = static_cast<double>(cert.bound.t) <=
                            pi_bar_value * cfg.q * static_cast<double>(cert.bound.size);
        rec.bound_ok = within && cert.holds;
        return rec;
    });
    result.cells = summarize(result.records);

    std::size_t failures = 0;
    std::string trend;
    for (const auto& c : result.cells) {
        failures += c.bound_failures;
        trend += " m=" + std::to_string(c.m) + ":J/m=" + format_number(c.set_frac.mean) +
                 ",R/m=" + format_number(c.r_frac.mean);
    }
    result.passed = failures == 0;
    result.verdict = "bound_failures=" + std::to_string(failures) + trend;
    return result;
}

ExperimentResult consistency_experiment(const MixtureConfig& cfg, std::span<const std::size_t> m_grid,
                                        std::span<const double> mu_grid, double c, RunOptions opts) {
    cfg.validate();
    if (!(c > 0.0 && c <= 1.0)) throw std::invalid_argument("subset fraction c must lie in (0, 1]");
    if (m_grid.empty() || mu_grid.empty()) throw std::invalid_argument("grids must not be empty");
    // Fails early on an infeasible gamma_subset/c combination.
    MixtureConfig probe = cfg;
    probe.m = 1;
    (void)draw_tagged_study(probe, c);

    ExperimentResult result;
    result.kind = "consistency";
    result.config = cfg;
    MixtureConfig last = cfg;
    last.mu = mu_grid.back();
    const PiBar pb = pi_bar(last);
    result.pi_bar = pb.value;
    result.detectable = pb.detectable;

    const std::size_t reps = cfg.reps;
    const std::size_t n_mu = mu_grid.size();
    result.records = run_parallel(m_grid.size() * n_mu * reps, opts.threads, [&](std::size_t task) {
        const std::size_t cell = task / reps;
        const std::size_t rep = task % reps;
        MixtureConfig local = cfg;
        local.m = m_grid[cell / n_mu];
        local.mu = mu_grid[cell % n_mu];
        const DrawnStudy drawn = draw_tagged_study(local, c, stream_id(cell, rep));
        const auto ctx = HommelContext::compute(drawn.study, cfg.alpha);
        const SubsetSelection subset = members(drawn.in_subset);
        const BoundReport bound = discoveries(drawn.study, subset, ctx);

        std::size_t false_in_subset = 0;
        for (std::size_t i : subset) {
            if (drawn.truth[i]) ++false_in_subset;
        }

        RepRecord rec;
        rec.cell = cell;
        rec.m = local.m;
        rec.mu = local.mu;
        rec.rep = rep;
        rec.h_frac = fraction(ctx.h(), local.m);
        rec.set_frac = fraction(subset.size(), local.m);
        rec.q_bound = bound.q();
        rec.b_frac = fraction(bh_count(drawn.study, cfg.alpha), local.m);
        rec.r_frac = fraction(hommel_rejection_count(drawn.study, ctx), local.m);
        rec.violation = false_in_subset > bound.t;
        return rec;
    });
    result.cells = summarize(result.records);

    const std::vector<double> gaps = consistency_gaps(result);
    const std::size_t diag = std::min(m_grid.size(), n_mu);
    bool decreasing = true;
    std::string along;
    for (std::size_t i = 0; i < diag; ++i) {
        const double gap = gaps[i * n_mu + i];
        if (i > 0 && !(gap < gaps[(i - 1) * n_mu + (i - 1)])) decreasing = false;
        along += (i ? "," : "") + format_number(gap);
    }
    result.passed = decreasing;
    result.verdict = "diagonal_gaps=" + along + " final_gap=" + format_number(gaps.back());
    return result;
}

std::vector<double> consistency_gaps(const ExperimentResult& result) {
    std::vector<double> gaps;
    gaps.reserve(result.cells.size());
    for (const auto& c : result.cells) gaps.push_back(std::fabs(c.q_bound.mean - result.config.gamma_subset));
    return gaps;
}

nlohmann::ordered_json to_json(const ExperimentResult& result) {
    using nlohmann::ordered_json;
    const auto stat = [](const Stat& s) { return ordered_json{{"mean", s.mean}, {"se", s.se}}; };

    ordered_json cfg{{"gamma", result.config.gamma},
                     {"mu", result.config.mu},
                     {"m", result.config.m},
                     {"reps", result.config.reps},
                     {"seed", result.config.seed},
                     {"alpha", result.config.alpha},
                     {"q", result.config.q},
                     {"gamma_subset", result.config.gamma_subset}};
    cfg["mu_subset"] = result.config.mu_subset ? ordered_json(*result.config.mu_subset) : ordered_json(nullptr);

    ordered_json cells = ordered_json::array();
    for (const auto& c : result.cells) {
        cells.push_back(ordered_json{{"cell", c.cell},
                                     {"m", c.m},
                                     {"mu", c.mu},
                                     {"reps", c.reps},
                                     {"h_frac", stat(c.h_frac)},
                                     {"set_frac", stat(c.set_frac)},
                                     {"q_bound", stat(c.q_bound)},
                                     {"b_frac", stat(c.b_frac)},
                                     {"r_frac", stat(c.r_frac)},
                                     {"violation_rate", stat(c.violation)},
                                     {"bound_failures", c.bound_failures}});
    }
    ordered_json records = ordered_json::array();
    for (const auto& r : result.records) {
        records.push_back(ordered_json{{"cell", r.cell},
                                       {"m", r.m},
                                       {"mu", r.mu},
                                       {"rep", r.rep},
                                       {"h_frac", r.h_frac},
                                       {"set_frac", r.set_frac},
                                       {"q_bound", r.q_bound},
                                       {"b_frac", r.b_frac},
                                       {"r_frac", r.r_frac},
                                       {"violation", r.violation},
                                       {"bound_ok", r.bound_ok}});
    }
    return ordered_json{{"schema_version", 1},
                        {"kind", result.kind},
                        {"config", cfg},
                        {"pi_bar", result.pi_bar},
                        {"detectable", result.detectable},
                        {"warnings", result.warnings},
                        {"passed", result.passed},
                        {"verdict", result.verdict},
                        {"cells", cells},
                        {"records", records}};
}

std::string to_csv(const ExperimentResult& result) {
    std::ostringstream out;
    out << "cell,m,mu,rep,h_frac,set_frac,q_bound,b_frac,r_frac,violation,bound_ok\n";
    char buf[64];
    const auto num = [&buf](double x) {
        std::snprintf(buf, sizeof buf, "%.17g", x);
        return std::string(buf);
    };
    for (const auto& r : result.records) {
        out << r.cell << ',' << r.m << ',' << num(r.mu) << ',' << r.rep << ',' << num(r.h_frac) << ','
            << num(r.set_frac) << ',' << num(r.q_bound) << ',' << num(r.b_frac) << ',' << num(r.r_frac) << ','
            << (r.violation ? 1 : 0) << ',' << (r.bound_ok ? 1 : 0) << '\n';
    }
    return out.str();
}

} // namespace fdplens::sim
