#include <gtest/gtest.h>

#include <cmath>
#include <complex>

#include "marc/analytic_bounds.hpp"
#include "marc/baselines.hpp"
#include "marc/special_functions.hpp"

namespace {

using namespace marc;

// Exact block error rate of BPSK over two equal-power Rayleigh diversity
// branches with mean branch SNR g.
double two_branch_closed_form(double g) {
    const double mu = std::sqrt(g / (1.0 + g));
    const double p = 0.5 * (1.0 - mu);
    return p * p * (1.0 + 2.0 * (1.0 - p));
}

double run_direct(double snr, bool coded, const ConvCode* code, int k, std::uint64_t frames,
                  std::uint64_t seed, std::uint64_t* bits_out) {
    std::uint64_t errors = 0;
    for (std::uint64_t f = 0; f < frames; ++f) {
        rng::Stream st(seed, f, 0);
        errors += direct_trial(st, snr, coded, code, k);
    }
    *bits_out = frames * static_cast<std::uint64_t>(k);
    return static_cast<double>(errors) / static_cast<double>(*bits_out);
}

double run_alamouti(double snr, bool coded, const ConvCode* code, int k, std::uint64_t frames,
                    std::uint64_t seed) {
    std::uint64_t errors = 0;
    for (std::uint64_t f = 0; f < frames; ++f) {
        rng::Stream st(seed, f, 0);
        errors += alamouti_trial(st, snr, coded, code, k);
    }
    return static_cast<double>(errors) / static_cast<double>(frames * k);
}

TEST(DirectTrial, MatchesClosedFormRayleighBer) {
    std::uint64_t bits = 0;
    const double ber = run_direct(10.0, false, nullptr, 50, 60000, 1, &bits);
    const double want = 0.023268705377203824;
    EXPECT_NEAR(ber, want, 0.025 * want);
}

TEST(DirectTrial, NoiselessLimitIsErrorFree) {
    std::uint64_t bits = 0;
    EXPECT_EQ(run_direct(1e12, false, nullptr, 50, 300, 2, &bits), 0.0);
    const ConvCode code = make_conv_code({5, 7, 7}, 3);
    EXPECT_EQ(run_direct(1e12, true, &code, 50, 100, 3, &bits), 0.0);
}

TEST(DirectTrial, BerDecreasesAcrossSnrGrid) {
    std::uint64_t bits = 0;
    const double b5 = run_direct(std::pow(10.0, 0.5), false, nullptr, 50, 12000, 4, &bits);
    const double b10 = run_direct(10.0, false, nullptr, 50, 12000, 5, &bits);
    const double b15 = run_direct(std::pow(10.0, 1.5), false, nullptr, 50, 12000, 6, &bits);
    EXPECT_GT(b5, 1.3 * b10);
    EXPECT_GT(b10, 1.3 * b15);
}

TEST(DirectTrial, CodingHelpsAtModerateSnr) {
    const ConvCode code = make_conv_code({5, 7, 7}, 3);
    std::uint64_t bits = 0;
    const double uncoded = run_direct(std::pow(10.0, 1.5), false, nullptr, 50, 25000, 7, &bits);
    const double coded = run_direct(std::pow(10.0, 1.5), true, &code, 50, 25000, 8, &bits);
    EXPECT_LT(coded, 0.85 * uncoded);
    rng::Stream st(9, 0, 0);
    EXPECT_THROW(direct_trial(st, 10.0, true, nullptr, 50), std::invalid_argument);
    EXPECT_THROW(direct_trial(st, -1.0, false, nullptr, 50), std::domain_error);
    EXPECT_THROW(direct_trial(st, 10.0, false, nullptr, 0), std::domain_error);
}

TEST(AlamoutiTrial, DegenerateSecondAntennaIsHalfPowerDirect) {
    const std::complex<double> h1{1.3, 0.4};
    const double snr = 2.5;
    std::uint64_t errors = 0;
    const std::uint64_t frames = 20000;
    for (std::uint64_t f = 0; f < frames; ++f) {
        rng::Stream st(11, f, 0);
        errors += alamouti_trial_with_gains(st, h1, 0.0, snr, false, nullptr, 50);
    }
    const double ber = static_cast<double>(errors) / static_cast<double>(frames * 50);
    const double want = sf::q_function(std::sqrt(std::norm(h1) * snr));
    EXPECT_NEAR(ber, want, 0.03 * want);
}

TEST(AlamoutiTrial, MatchesHalfPowerTwoBranchOracle) {
    const double snr = 10.0;
    const double ber = run_alamouti(snr, false, nullptr, 50, 60000, 12);
    const double want = two_branch_closed_form(snr / 2.0);
    EXPECT_NEAR(want, 5.528246696725e-3, 1e-12);
    EXPECT_NEAR(ber, want, 0.04 * want);
}

TEST(AlamoutiTrial, OddBlockLengthsArePaddedSafely) {
    std::uint64_t errors = 0;
    for (std::uint64_t f = 0; f < 200; ++f) {
        rng::Stream st(13, f, 0);
        errors += alamouti_trial(st, 1e12, false, nullptr, 7);
    }
    EXPECT_EQ(errors, 0u);
    const ConvCode code = make_conv_code({7, 5}, 3);
    for (std::uint64_t f = 0; f < 50; ++f) {
        rng::Stream st(14, f, 0);
        errors += alamouti_trial(st, 1e12, true, &code, 7);
    }
    EXPECT_EQ(errors, 0u);
}

TEST(AlamoutiTrial, ClosedFormCurveShowsSecondOrderDiversity) {
    std::vector<double> db, val;
    for (double x = 25.0; x <= 40.0; x += 2.5) {
        db.push_back(x);
        val.push_back(two_branch_closed_form(std::pow(10.0, x / 10.0) / 2.0));
    }
    const double slope = diversity_slope(db, val);
    EXPECT_GE(slope, -2.2);
    EXPECT_LE(slope, -1.8);
}

TEST(AlamoutiTrial, CodedNoiselessRoundTrip) {
    const ConvCode code = make_conv_code({5, 7, 7}, 3);
    std::uint64_t errors = 0;
    for (std::uint64_t f = 0; f < 100; ++f) {
        rng::Stream st(15, f, 0);
        errors += alamouti_trial(st, 1e12, true, &code, 50);
    }
    EXPECT_EQ(errors, 0u);
}

}  // namespace
