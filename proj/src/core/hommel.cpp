#include "fdplens/hommel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "fdplens/simes.hpp"

namespace fdplens {

namespace {

void require_level(double level, const char* name) {
    if (!(level >= 0.0 && level <= 1.0)) {
        throw std::invalid_argument(std::string(name) + " must lie in [0, 1]");
    }
}

void require_within(const PValueStudy& study, const SubsetSelection& S) {
    if (!S.empty() && S.indices().back() >= study.size()) {
        throw std::out_of_range("subset index outside the study");
    }
}

void require_matching(const PValueStudy& study, const HommelContext& ctx) {
    if (ctx.m() != study.size()) throw std::invalid_argument("context was computed for a different study");
}

// Whether the i largest p-values, K_i, are rejected by the Simes test.
bool largest_rejected(const std::vector<double>& sorted, std::size_t i, double alpha) {
    if (i == 0) return false;
    return simes_rejects_sorted(std::span<const double>(sorted).last(i), alpha);
}

constexpr std::size_t kNever = std::numeric_limits<std::size_t>::max();

// Smallest integer u >= 0 with h·p <= u·alpha, or kNever if that u exceeds
// limit. The quotient only seeds the search; the product rule decides.
std::size_t critical_count(double h, double p, double alpha, std::size_t limit) {
    if (scaled_leq(h, p, 0.0, alpha)) return 0;
    if (alpha == 0.0) return kNever;
    const double guess = std::ceil(h * p / alpha);
    if (!(guess <= static_cast<double>(limit) + 1.0)) return kNever;
    auto u = std::max<std::size_t>(1, static_cast<std::size_t>(guess));
    while (u > 1 && scaled_leq(h, p, static_cast<double>(u - 1), alpha)) --u;
    while (!scaled_leq(h, p, static_cast<double>(u), alpha)) {
        if (++u > limit) return kNever;
    }
    return u <= limit ? u : kNever;
}

} // namespace

std::size_t compute_h(const PValueStudy& study, double alpha) {
    require_level(alpha, "alpha");
    const auto& sorted = study.sorted();
    // K_i rejected implies K_j rejected for all j >= i, and K_0 never is.
    std::size_t lo = 0;
    std::size_t hi = study.size() + 1;
    while (hi - lo > 1) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (largest_rejected(sorted, mid, alpha)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return lo;
}

std::size_t concentration_z(const PValueStudy& study, double alpha, std::size_t h) {
    const std::size_t m = study.size();
    if (h > m) throw std::invalid_argument("h exceeds the number of hypotheses");
    if (h == m) return 0;
    const auto& sorted = study.sorted();
    const auto hd = static_cast<double>(h);
    for (std::size_t i = m - h; i <= m; ++i) {
        if (scaled_leq(hd, sorted[i - 1], static_cast<double>(i + h + 1 - m), alpha)) return i;
    }
    // The definition of h guarantees a hit at some i <= m.
    throw std::logic_error("concentration index not found; h is inconsistent with alpha");
}

HommelContext HommelContext::compute(const PValueStudy& study, double alpha) {
    const std::size_t h = compute_h(study, alpha);
    const std::size_t z = concentration_z(study, alpha, h);
    return HommelContext(alpha, study.size(), h, z);
}

bool in_closure(const PValueStudy& study, const SubsetSelection& I, const HommelContext& ctx) {
    require_matching(study, ctx);
    require_within(study, I);
    if (I.empty()) throw std::invalid_argument("closure membership needs a nonempty index set");
    std::vector<double> values;
    values.reserve(I.size());
    for (std::size_t i : I) values.push_back(study.p(i));
    std::sort(values.begin(), values.end());
    const auto hd = static_cast<double>(ctx.h());
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (scaled_leq(hd, values[i], static_cast<double>(i + 1), ctx.alpha())) return true;
    }
    return false;
}

BoundReport discoveries(const PValueStudy& study, const SubsetSelection& S, const HommelContext& ctx) {
    require_matching(study, ctx);
    require_within(study, S);
    BoundReport report;
    report.size = S.size();
    if (S.empty()) return report;

    const std::size_t n = S.size();
    const std::size_t u_max = std::min(n, ctx.u_cap());
    const auto hd = static_cast<double>(ctx.h());

    // Counting sort of c_i = min{u : h·p_i <= u·alpha}, dropping c_i > u_max.
    std::vector<std::size_t> counts(u_max + 1, 0);
    for (std::size_t i : S) {
        const std::size_t c = critical_count(hd, study.p(i), ctx.alpha(), u_max);
        if (c != kNever) ++counts[c];
    }

    std::size_t covered = counts[0];
    std::size_t best = 0;
    for (std::size_t u = 1; u <= u_max; ++u) {
        covered += counts[u];
        // 1 - u + covered, kept nonnegative since covered >= 0 and u >= 1.
        if (covered + 1 >= u) best = std::max(best, covered + 1 - u);
        // Past this point the count is saturated and the objective only falls.
        if (covered == n) break;
    }
    report.d = best;
    report.t = n - best;
    return report;
}

std::size_t hommel_rejection_count(const PValueStudy& study, const HommelContext& ctx) {
    require_matching(study, ctx);
    const auto& sorted = study.sorted();
    const auto hd = static_cast<double>(ctx.h());
    const double alpha = ctx.alpha();
    const auto it = std::partition_point(sorted.begin(), sorted.end(),
                                         [&](double p) { return scaled_leq(hd, p, 1.0, alpha); });
    return static_cast<std::size_t>(it - sorted.begin());
}

SubsetSelection hommel_rejections(const PValueStudy& study, const HommelContext& ctx) {
    return SubsetSelection::smallest(study, hommel_rejection_count(study, ctx));
}

SubsetSelection concentration_set(const PValueStudy& study, const HommelContext& ctx) {
    require_matching(study, ctx);
    return SubsetSelection::smallest(study, ctx.z());
}

std::size_t bh_count(const PValueStudy& study, double q) {
    require_level(q, "q");
    const auto& sorted = study.sorted();
    const auto md = static_cast<double>(study.size());
    for (std::size_t i = study.size(); i >= 1; --i) {
        if (scaled_leq(md, sorted[i - 1], static_cast<double>(i), q)) return i;
    }
    return 0;
}

SubsetSelection bh_set(const PValueStudy& study, double q) {
    return SubsetSelection::smallest(study, bh_count(study, q));
}

BhCertificate bh_fdp_certificate(const PValueStudy& study, const HommelContext& ctx, double q) {
    require_matching(study, ctx);
    BhCertificate cert;
    cert.level = q;
    cert.bound = discoveries(study, bh_set(study, q), ctx);

    const double alpha = ctx.alpha();
    const double pi_hat = ctx.pi_hat();
    cert.scaled_bound = alpha * cert.bound.q();
    cert.budget = pi_hat * q;
    if (alpha > 0.0) {
        cert.certificate = cert.budget / alpha;
    } else {
        cert.certificate = cert.budget > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    }

    // Cross-multiplied: alpha·t·m versus h·q·b, all integers exact in double.
    const auto t = static_cast<double>(cert.bound.t);
    const auto b = static_cast<double>(cert.bound.size);
    const double lhs = alpha * t * static_cast<double>(ctx.m());
    const double rhs = static_cast<double>(ctx.h()) * q * b;
    if (b == 0.0) {
        cert.holds = true;
        cert.equality = cert.budget == 0.0;
    } else {
        cert.holds = lhs <= rhs;
        cert.equality = lhs == rhs;
    }
    return cert;
}

MedianEstimate median_fdp_estimate(const PValueStudy& study, double q) {
    const auto ctx = HommelContext::compute(study, 0.5);
    MedianEstimate est;
    est.estimate = discoveries(study, bh_set(study, q), ctx).q();
    est.ceiling = 2.0 * q * ctx.pi_hat();
    return est;
}

std::optional<double> min_alpha_for(const PValueStudy& study, const SubsetSelection& S,
                                    std::size_t k, double tol) {
    require_within(study, S);
    if (k > S.size()) throw std::invalid_argument("k exceeds the size of the subset");
    if (!(tol > 0.0 && tol < 1.0)) throw std::invalid_argument("tol must lie in (0, 1)");
    if (k == 0) return 0.0;

    const auto found = [&](double alpha) {
        return discoveries(study, S, HommelContext::compute(study, alpha)).d >= k;
    };
    if (found(0.0)) return 0.0;

    // d_alpha(S) is nondecreasing in alpha. At alpha = 1 every intersection
    // is rejected, so only levels below 1 carry information.
    double hi = 1.0 - tol;
    if (!found(hi)) return std::nullopt;
    double lo = 0.0;
    while (hi - lo > tol) {
        const double mid = lo + (hi - lo) / 2;
        if (found(mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return hi;
}

} // namespace fdplens
