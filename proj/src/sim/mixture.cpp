#include "fdplens/mixture.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "fdplens/normal.hpp"

namespace fdplens::sim {

namespace {

bool is_probability(double x) { return x >= 0.0 && x <= 1.0; }

double alternative_p(RandomStream& rng, double mu) {
    return normal::sf(mu + normal::quantile(rng.uniform()));
}

} // namespace

void MixtureConfig::validate() const {
    if (!is_probability(gamma)) throw std::invalid_argument("gamma must lie in [0, 1]");
    if (!is_probability(gamma_subset)) throw std::invalid_argument("gamma_subset must lie in [0, 1]");
    if (!(mu >= 0.0) || !std::isfinite(mu)) throw std::invalid_argument("mu must be a finite nonnegative number");
    if (mu_subset && (!(*mu_subset >= 0.0) || !std::isfinite(*mu_subset))) {
        throw std::invalid_argument("mu_subset must be a finite nonnegative number");
    }
    if (m == 0) throw std::invalid_argument("m must be at least 1");
    if (reps == 0) throw std::invalid_argument("reps must be at least 1");
    if (!is_probability(alpha)) throw std::invalid_argument("alpha must lie in [0, 1]");
    if (!is_probability(q)) throw std::invalid_argument("q must lie in [0, 1]");
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream)
    : engine_(splitmix64(splitmix64(seed) ^ stream)) {}

double RandomStream::uniform() {
    constexpr double kScale = 0x1.0p-53;
    return (static_cast<double>(engine_() >> 11) + 0.5) * kScale;
}

double alternative_cdf(double x, double mu) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return normal::sf(normal::isf(x) - mu);
}

double mixture_cdf(double x, double gamma, double mu) {
    const double clamped = std::fmin(std::fmax(x, 0.0), 1.0);
    return gamma * clamped + (1.0 - gamma) * alternative_cdf(x, mu);
}

DrawnStudy draw_study(const MixtureConfig& cfg, std::uint64_t stream) {
    cfg.validate();
    RandomStream rng(cfg.seed, stream);
    std::vector<double> p(cfg.m);
    std::vector<bool> truth(cfg.m);
    for (std::size_t i = 0; i < cfg.m; ++i) {
        const bool null = rng.uniform() < cfg.gamma;
        truth[i] = null;
        p[i] = null ? rng.uniform() : alternative_p(rng, cfg.mu);
    }
    return DrawnStudy{PValueStudy::from_pvalues(std::move(p)), std::move(truth), std::vector<bool>(cfg.m, false)};
}

DrawnStudy draw_tagged_study(const MixtureConfig& cfg, double c, std::uint64_t stream) {
    cfg.validate();
    if (!(c > 0.0 && c <= 1.0)) throw std::invalid_argument("subset fraction c must lie in (0, 1]");
    double gamma_out = cfg.gamma;
    if (c < 1.0) {
        gamma_out = (cfg.gamma - c * cfg.gamma_subset) / (1.0 - c);
        // Rounding slack only; genuinely infeasible configurations are rejected.
        if (gamma_out < -1e-12 || gamma_out > 1.0 + 1e-12) {
            throw std::invalid_argument("gamma_subset and c are incompatible with the overall gamma");
        }
        gamma_out = std::fmin(std::fmax(gamma_out, 0.0), 1.0);
    }
    const double mu_in = cfg.mu_subset.value_or(cfg.mu);

    RandomStream rng(cfg.seed, stream);
    std::vector<double> p(cfg.m);
    std::vector<bool> truth(cfg.m);
    std::vector<bool> tagged(cfg.m);
    for (std::size_t i = 0; i < cfg.m; ++i) {
        const bool in = rng.uniform() < c;
        const bool null = rng.uniform() < (in ? cfg.gamma_subset : gamma_out);
        tagged[i] = in;
        truth[i] = null;
        p[i] = null ? rng.uniform() : alternative_p(rng, in ? mu_in : cfg.mu);
    }
    return DrawnStudy{PValueStudy::from_pvalues(std::move(p)), std::move(truth), std::move(tagged)};
}

PiBar pi_bar(const std::function<double(double)>& cdf, double alpha, std::size_t grid) {
    if (grid < 2) throw std::invalid_argument("pi_bar grid needs at least two points");
    PiBar out;
    if (cdf(alpha) >= 1.0) {
        out.value = 0.0;
        out.detectable = true;
        return out;
    }
    const auto objective = [&](double x) { return (1.0 - cdf(x * alpha)) / (1.0 - x); };

    const double step = 1.0 / static_cast<double>(grid);
    std::size_t best_k = 0;
    double best = objective(0.0);
    for (std::size_t k = 1; k < grid; ++k) {
        const double v = objective(static_cast<double>(k) * step);
        if (v < best) {
            best = v;
            best_k = k;
        }
    }
    double best_x = static_cast<double>(best_k) * step;

    // Golden-section refinement on the bracket around the grid minimum.
    double a = best_k == 0 ? 0.0 : best_x - step;
    double b = std::fmin(best_x + step, 1.0 - step / 4);
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = objective(c);
    double fd = objective(d);
    for (int iter = 0; iter < 200 && b - a > 1e-15; ++iter) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = objective(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = objective(d);
        }
    }
    const double refined_x = (a + b) / 2;
    const double refined = objective(refined_x);
    if (refined < best) {
        best = refined;
        best_x = refined_x;
    }

    out.value = best;
    out.argmin = best_x;
    out.detectable = best < 1.0;
    return out;
}

PiBar pi_bar(const MixtureConfig& cfg) {
    const double gamma = cfg.gamma;
    const double mu = cfg.mu;
    return pi_bar([gamma, mu](double x) { return mixture_cdf(x, gamma, mu); }, cfg.alpha);
}

} // namespace fdplens::sim
