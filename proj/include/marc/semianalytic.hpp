#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "marc/analytic_bounds.hpp"
#include "marc/rng.hpp"
#include "marc/special_functions.hpp"

namespace marc {

// Pooled bit error probability of the two users conditioned on the squared
// destination-link gains, for the uncoded system with the nulling detector.
// Every conditional probability below is a closed Gaussian tail expression,
// so averaging this quantity over channel draws estimates the end-to-end
// error rate without simulating noise or bits.
//
// For the full-cooperation outcome the two detection stages are worked out
// jointly: the first-stage statistic nulls the other user and its noise is
// uncorrelated with the second-stage combiner, so the propagation term
// conditions cleanly on a first-stage error (the subtracted symbol is then
// wrong by 2 sqrt(P), shifting the second decision by 2|h_rd|^2 sqrt(P)).
inline double conditional_pooled_bep(double h2_a, double h2_b, double h2_rd, double snr0,
                                     const StateProbs& probs, bool genie_sic = false) {
    if (!(h2_a >= 0.0 && h2_b >= 0.0 && h2_rd >= 0.0))
        throw std::domain_error("conditional_pooled_bep: squared gains must be nonnegative");
    if (!(snr0 > 0.0))
        throw std::domain_error("conditional_pooled_bep: snr0 must be positive");

    const double qa = sf::q_function(std::sqrt(2.0 * h2_a * snr0));
    const double qb = sf::q_function(std::sqrt(2.0 * h2_b * snr0));
    const double qa_mrc = sf::q_function(std::sqrt(2.0 * (h2_a + h2_rd) * snr0));
    const double qb_mrc = sf::q_function(std::sqrt(2.0 * (h2_b + h2_rd) * snr0));

    double pooled = probs.p0 * 0.5 * (qa + qb);
    pooled += probs.p1 * 0.5 * (qa_mrc + qb);
    pooled += probs.p2 * 0.5 * (qa + qb_mrc);

    if (probs.p3 > 0.0) {
        const double par_a = (h2_b + h2_rd) > 0.0 ? h2_b * h2_rd / (h2_b + h2_rd) : 0.0;
        const double par_b = (h2_a + h2_rd) > 0.0 ? h2_a * h2_rd / (h2_a + h2_rd) : 0.0;
        const double m_a = h2_a + par_a;
        const double m_b = h2_b + par_b;
        const double m1 = m_a >= m_b ? m_a : m_b;
        const double h2_second = m_a >= m_b ? h2_b : h2_a;

        const double p_first = sf::q_function(std::sqrt(2.0 * m1 * snr0));
        const double g2 = h2_second + h2_rd;
        double p_second;
        if (g2 > 0.0) {
            const double p_clean = sf::q_function(std::sqrt(2.0 * g2 * snr0));
            if (genie_sic) {
                p_second = p_clean;
            } else {
                const double scale = std::sqrt(2.0 * snr0 / g2);
                const double p_prop = 0.5 * (sf::q_function((g2 - 2.0 * h2_rd) * scale) +
                                             sf::q_function((g2 + 2.0 * h2_rd) * scale));
                p_second = (1.0 - p_first) * p_clean + p_first * p_prop;
            }
        } else {
            p_second = 0.5;
        }
        pooled += probs.p3 * 0.5 * (p_first + p_second);
    }
    return pooled;
}

struct SemiAnalyticResult {
    double bep = 0.0;
    double std_err = 0.0;
    std::uint64_t draws = 0;
};

namespace detail {

inline double exp_draw(rng::Stream& st, double rate) { return -std::log(st.uniform()) / rate; }

}  // namespace detail

// Plain Monte Carlo average of the conditional pooled error probability
// over independent exponential squared gains with rate lambda.
inline SemiAnalyticResult semianalytic_bep(double snr0, double lambda, const StateProbs& probs,
                                           std::uint64_t draws, std::uint64_t seed,
                                           bool genie_sic = false) {
    if (!(lambda > 0.0)) throw std::domain_error("semianalytic_bep: lambda must be positive");
    if (draws == 0) throw std::invalid_argument("semianalytic_bep: draws must be positive");
    probs.validate();
    double sum = 0.0, sum2 = 0.0;
    for (std::uint64_t i = 0; i < draws; ++i) {
        rng::Stream st(seed, i, 0);
        const double a = detail::exp_draw(st, lambda);
        const double b = detail::exp_draw(st, lambda);
        const double r = detail::exp_draw(st, lambda);
        const double v = conditional_pooled_bep(a, b, r, snr0, probs, genie_sic);
        sum += v;
        sum2 += v * v;
    }
    const double n = static_cast<double>(draws);
    const double mean = sum / n;
    const double var = (sum2 / n - mean * mean) / (n - 1.0);
    return SemiAnalyticResult{mean, var > 0.0 ? std::sqrt(var) : 0.0, draws};
}

// Importance-sampled version for the high-SNR tail, where errors come from
// rare fades and the plain estimator is dominated by a handful of draws.
// Each squared gain is drawn from the defensive mixture
//   q(x) = 1/2 Exp(lambda) + 1/2 Exp(lambda'),   lambda' = max(lambda, snr0/4),
// whose per-coordinate likelihood ratio is bounded by 2, so weights cannot
// blow up while the second component concentrates mass at the fade depths
// that matter around snr0 * x = O(1).
inline SemiAnalyticResult semianalytic_bep_is(double snr0, double lambda, const StateProbs& probs,
                                              std::uint64_t draws, std::uint64_t seed,
                                              bool genie_sic = false) {
    if (!(lambda > 0.0)) throw std::domain_error("semianalytic_bep_is: lambda must be positive");
    if (draws == 0) throw std::invalid_argument("semianalytic_bep_is: draws must be positive");
    probs.validate();
    const double sharp = std::max(lambda, snr0 / 4.0);
    double sum = 0.0, sum2 = 0.0;
    for (std::uint64_t i = 0; i < draws; ++i) {
        rng::Stream st(seed, i, 0);
        double g[3];
        double w = 1.0;
        for (double& x : g) {
            const bool heavy = st.uniform() < 0.5;
            x = detail::exp_draw(st, heavy ? sharp : lambda);
            w /= 0.5 + 0.5 * (sharp / lambda) * std::exp(-(sharp - lambda) * x);
        }
        const double v = w * conditional_pooled_bep(g[0], g[1], g[2], snr0, probs, genie_sic);
        sum += v;
        sum2 += v * v;
    }
    const double n = static_cast<double>(draws);
    const double mean = sum / n;
    const double var = (sum2 / n - mean * mean) / (n - 1.0);
    return SemiAnalyticResult{mean, var > 0.0 ? std::sqrt(var) : 0.0, draws};
}

}  // namespace marc
