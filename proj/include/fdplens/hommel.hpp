#pragma once
// Closed testing with Simes local tests: Hommel's h, the exact linear-time
// shortcut for simultaneous bounds on true discoveries, the concentration set
// and the Benjamini-Hochberg connections.

#include <cstddef>
#include <optional>

#include "fdplens/study.hpp"

namespace fdplens {

// Level-specific state shared by all subset queries against one study.
// Immutable; any number of threads may query the same context.
class HommelContext {
public:
    // alpha must lie in [0, 1]; throws std::invalid_argument otherwise.
    static HommelContext compute(const PValueStudy& study, double alpha);

    double alpha() const noexcept { return alpha_; }
    std::size_t m() const noexcept { return m_; }
    // Size of the largest intersection not rejected by closed testing.
    std::size_t h() const noexcept { return h_; }
    // Size of the concentration set Z (the z smallest p-values).
    std::size_t z() const noexcept { return z_; }
    // Upper confidence bound h/m for the proportion of true nulls.
    double pi_hat() const noexcept { return static_cast<double>(h_) / static_cast<double>(m_); }
    // Largest u the shortcut scan ever needs: z - m + h + 1.
    std::size_t u_cap() const noexcept { return z_ + h_ + 1 - m_; }

private:
    HommelContext(double alpha, std::size_t m, std::size_t h, std::size_t z)
        : alpha_(alpha), m_(m), h_(h), z_(z) {}

    double alpha_;
    std::size_t m_;
    std::size_t h_;
    std::size_t z_;
};

// Confidence statement for one subset S: at least d true discoveries, at most
// t false ones, false discovery proportion at most q.
struct BoundReport {
    std::size_t size = 0;
    std::size_t d = 0;
    std::size_t t = 0;

    double q() const noexcept {
        return size == 0 ? 0.0 : static_cast<double>(t) / static_cast<double>(size);
    }

    friend bool operator==(const BoundReport&, const BoundReport&) = default;
};

// max{0 <= i <= m : the i largest p-values are not Simes-rejected}, found by
// bisection over i.
std::size_t compute_h(const PValueStudy& study, double alpha);

// Given h, the smallest i in [m-h, m] with h·p_(i) <= (i-m+h+1)·alpha, or 0
// when h == m.
std::size_t concentration_z(const PValueStudy& study, double alpha, std::size_t h);

// Whether H_I is rejected by closed testing. Throws on empty I.
bool in_closure(const PValueStudy& study, const SubsetSelection& I, const HommelContext& ctx);

// d, t and q for S. Linear in |S|; S = {} gives the zero report.
BoundReport discoveries(const PValueStudy& study, const SubsetSelection& S, const HommelContext& ctx);

// Hommel's FWER rejections {i : h·p_i <= alpha}.
SubsetSelection hommel_rejections(const PValueStudy& study, const HommelContext& ctx);
std::size_t hommel_rejection_count(const PValueStudy& study, const HommelContext& ctx);

// The concentration set Z = L_z.
SubsetSelection concentration_set(const PValueStudy& study, const HommelContext& ctx);

// Benjamini-Hochberg: b_q = max{i : m·p_(i) <= i·q} (0 if none), B_q = L_b.
std::size_t bh_count(const PValueStudy& study, double q);
SubsetSelection bh_set(const PValueStudy& study, double q);

// FDP bound for the BH set B_q together with the certificate
// alpha·q_alpha(B_q) <= pi_hat·q (equality iff h·q == 0).
struct BhCertificate {
    double level = 0.0;             // q
    BoundReport bound;              // for B_q at ctx.alpha()
    double scaled_bound = 0.0;      // alpha · q_alpha(B_q)
    double budget = 0.0;            // pi_hat · q
    double certificate = 0.0;       // pi_hat · q / alpha; +inf when alpha == 0 < h·q
    bool holds = false;             // scaled_bound <= budget
    bool equality = false;          // scaled_bound == budget
};

BhCertificate bh_fdp_certificate(const PValueStudy& study, const HommelContext& ctx, double q);

// Median-unbiased FDP estimate q_{1/2}(B_q) and its ceiling 2·q·pi_hat_{1/2}.
struct MedianEstimate {
    double estimate = 0.0;
    double ceiling = 0.0;
};

MedianEstimate median_fdp_estimate(const PValueStudy& study, double q);

// Smallest alpha (to within tol, bisecting over (0, 1]) at which d_alpha(S) >= k.
// Returns 0 when k == 0 or when alpha = 0 already suffices. Returns nullopt when
// only the vacuous level alpha = 1 works, i.e. d_{1-tol}(S) < k.
// Throws std::invalid_argument when k > |S| or tol <= 0.
std::optional<double> min_alpha_for(const PValueStudy& study, const SubsetSelection& S,
                                    std::size_t k, double tol);

} // namespace fdplens
