#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "marc/quadrature.hpp"
#include "marc/special_functions.hpp"

namespace marc {

// Probabilities of the four relay outcomes for a frame: neither block
// accepted (p0), only user A's accepted (p1), only user B's (p2), both (p3).
struct StateProbs {
    double p0 = 0.0;
    double p1 = 0.0;
    double p2 = 0.0;
    double p3 = 1.0;

    void validate() const {
        const double v[4] = {p0, p1, p2, p3};
        double sum = 0.0;
        for (double p : v) {
            if (!(p >= 0.0 && p <= 1.0))
                throw std::domain_error("StateProbs: entries must lie in [0, 1]");
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw std::domain_error("StateProbs: entries must sum to 1");
    }
};

inline StateProbs state_probs(double fail_a, double fail_b) {
    if (!(fail_a >= 0.0 && fail_a <= 1.0) || !(fail_b >= 0.0 && fail_b <= 1.0))
        throw std::domain_error("state_probs: failure probabilities must lie in [0, 1]");
    StateProbs p;
    p.p0 = fail_a * fail_b;
    p.p1 = (1.0 - fail_a) * fail_b;
    p.p2 = fail_a * (1.0 - fail_b);
    p.p3 = (1.0 - fail_a) * (1.0 - fail_b);
    return p;
}

struct CodedParams {
    double rate = 1.0;      // information bits per coded bit
    int d_free = 0;         // free distance of the code
    int b_dfree = 0;        // error events at the free distance
    int block_info_bits = 50;
};

struct BoundInputs {
    double snr0 = 1.0;        // per-symbol SNR P/N0 of a unit-gain link
    double omega_rate = 1.0;  // rate parameter of the |h|^2 distribution (1/mean)
    StateProbs probs;
    std::optional<CodedParams> coded;

    void validate() const {
        if (!(snr0 > 0.0) || !std::isfinite(snr0))
            throw std::domain_error("BoundInputs: snr0 must be positive and finite");
        if (!(omega_rate > 0.0) || !std::isfinite(omega_rate))
            throw std::domain_error("BoundInputs: omega_rate must be positive and finite");
        probs.validate();
        if (coded) {
            if (!(coded->rate > 0.0 && coded->rate <= 1.0))
                throw std::domain_error("BoundInputs: code rate must lie in (0, 1]");
            if (coded->d_free <= 0 || coded->b_dfree <= 0 || coded->block_info_bits <= 0)
                throw std::domain_error("BoundInputs: coded parameters must be positive");
        }
    }
};

// Density of Z = UV/(U+V), the parallel combination of two i.i.d.
// exponential gains with rate lambda:
//   f(z) = 4 lambda^2 z e^{-2 lambda z} [K0(2 lambda z) + K1(2 lambda z)].
// Evaluated through the scaled Bessel functions so the e^{-2 lambda z}
// factor never meets the diverging K values head on.
inline double parallel_exp_pdf(double z, double lambda) {
    if (!(lambda > 0.0)) throw std::domain_error("parallel_exp_pdf: lambda must be positive");
    if (z < 0.0) throw std::domain_error("parallel_exp_pdf: z must be nonnegative");
    if (z == 0.0) return 2.0 * lambda;
    const double x = 2.0 * lambda * z;
    const double k0 = sf::bessel_k_scaled(0, x);
    const double k1 = sf::bessel_k_scaled(1, x);
    return 4.0 * lambda * lambda * z * std::exp(-2.0 * x) * (k0 + k1);
}

inline double parallel_exp_cdf(double z, double lambda) {
    if (!(lambda > 0.0)) throw std::domain_error("parallel_exp_cdf: lambda must be positive");
    if (z < 0.0) throw std::domain_error("parallel_exp_cdf: z must be nonnegative");
    if (z == 0.0) return 0.0;
    const double x = 2.0 * lambda * z;
    return 1.0 - x * std::exp(-2.0 * x) * sf::bessel_k_scaled(1, x);
}

// Laplace transform E[e^{-s X}] of an exponential gain with rate lambda.
inline double laplace_exp(double s, double lambda) {
    if (!(lambda > 0.0)) throw std::domain_error("laplace_exp: lambda must be positive");
    if (s < 0.0) throw std::domain_error("laplace_exp: s must be nonnegative");
    return lambda / (lambda + s);
}

// Laplace transform of the parallel combination Z in closed form,
//   E[e^{-s Z}] = sqrt(pi)/Gamma(5/2) * [ 32 lambda^3 F(3, 3/2; 5/2; zeta) / (s + 4 lambda)^3
//                                       +  4 lambda^2 F(2, 1/2; 5/2; zeta) / (s + 4 lambda)^2 ],
// with zeta = s / (s + 4 lambda).
inline double laplace_parallel_exp(double s, double lambda) {
    if (!(lambda > 0.0)) throw std::domain_error("laplace_parallel_exp: lambda must be positive");
    if (s < 0.0) throw std::domain_error("laplace_parallel_exp: s must be nonnegative");
    const double d = s + 4.0 * lambda;
    const double zeta = s / d;
    const double pre = std::sqrt(M_PI) / std::exp(sf::ln_gamma(2.5));
    const double t1 = 32.0 * lambda * lambda * lambda * sf::gauss_2f1(3.0, 1.5, 2.5, zeta) / (d * d * d);
    const double t2 = 4.0 * lambda * lambda * sf::gauss_2f1(2.0, 0.5, 2.5, zeta) / (d * d);
    return pre * (t1 + t2);
}

// Upper bound on the end-to-end bit error probability of an uncoded user,
// averaged over the relay outcomes. Each term applies the Chernoff bound
// Q(x) <= e^{-x^2/2}/2 to the conditional error probability of the
// corresponding combined decision statistic:
//   S0, S2: single direct branch, S1: two-branch diversity,
//   S3: detection-order average of the nulled branch (gain |h|^2 + Z)
//       and the post-cancellation branch (gain sum of two |h|^2 terms).
inline double bep_upper_bound(const BoundInputs& in) {
    in.validate();
    const double lam = in.omega_rate;
    const double fh = laplace_exp(in.snr0, lam);
    const double fz = laplace_parallel_exp(in.snr0, lam);
    return 0.5 * ((in.probs.p0 + in.probs.p2) * fh + in.probs.p1 * fh * fh) +
           0.25 * in.probs.p3 * (fh * fz + fh * fh);
}

// Same bound for the convolutionally coded system: the uncoded expression
// evaluated at the free-distance SNR snr0 * rate * d_free / 2, scaled by
// 2^{d_free/2} * B_dfree / k for a block of k information bits.
inline double coded_ber_upper_bound(const BoundInputs& in) {
    if (!in.coded) throw std::domain_error("coded_ber_upper_bound: coded parameters required");
    in.validate();
    BoundInputs flat = in;
    flat.snr0 = in.snr0 * in.coded->rate * in.coded->d_free / 2.0;
    flat.coded.reset();
    const double scale = std::exp2(in.coded->d_free / 2.0) * in.coded->b_dfree /
                         static_cast<double>(in.coded->block_info_bits);
    return scale * bep_upper_bound(flat);
}

namespace detail {

// E[Q(sqrt(2 s V))] for a gain V specified by its Laplace transform,
// computed with the finite-interval form of the Gaussian tail average:
//   E[Q(sqrt(2 s V))] = (1/pi) Int_0^{pi/2} phi_V(s / sin^2 t) dt.
template <typename Phi>
double exact_q_average(double s, Phi&& phi) {
    return quad::gauss_legendre_integrate(
               [&](double t) {
                   const double sn = std::sin(t);
                   return phi(s / (sn * sn));
               },
               0.0, M_PI / 2.0, 96) /
           M_PI;
}

}  // namespace detail

// Exact-Q counterpart of bep_upper_bound: the same mixture over relay
// outcomes and detection orders, with each Chernoff factor phi_V(s)/2
// replaced by the exact Gaussian tail average E[Q(sqrt(2 s V))].
// Used to measure how much of the bound's slack comes from the
// Chernoff step rather than from the decision model.
inline double bep_exact_q(const BoundInputs& in) {
    in.validate();
    const double lam = in.omega_rate;
    const double s = in.snr0;
    auto ph = [&](double x) { return laplace_exp(x, lam); };
    auto ph2 = [&](double x) { const double f = laplace_exp(x, lam); return f * f; };
    auto phz = [&](double x) { return laplace_exp(x, lam) * laplace_parallel_exp(x, lam); };
    const double direct = detail::exact_q_average(s, ph);
    const double two_branch = detail::exact_q_average(s, ph2);
    const double nulled = detail::exact_q_average(s, phz);
    return (in.probs.p0 + in.probs.p2) * direct + in.probs.p1 * two_branch +
           0.5 * in.probs.p3 * (nulled + two_branch);
}

// Least-squares slope of log10(ber) against snr_db/10. For a curve with
// asymptotic behaviour ber ~ c / snr^d the result approaches -d.
inline double diversity_slope(const std::vector<double>& snr_db, const std::vector<double>& ber) {
    if (snr_db.size() != ber.size())
        throw std::invalid_argument("diversity_slope: mismatched lengths");
    if (snr_db.size() < 3)
        throw std::invalid_argument("diversity_slope: need at least 3 points");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double n = static_cast<double>(snr_db.size());
    for (std::size_t i = 0; i < snr_db.size(); ++i) {
        if (!(ber[i] > 0.0))
            throw std::domain_error("diversity_slope: ber values must be positive");
        const double x = snr_db[i] / 10.0;
        const double y = std::log10(ber[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw std::domain_error("diversity_slope: degenerate abscissae");
    return (n * sxy - sx * sy) / denom;
}

}  // namespace marc
