#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "marc/channel.hpp"
#include "marc/coding.hpp"
#include "marc/phy.hpp"
#include "marc/protocol.hpp"
#include "marc/rng.hpp"

namespace marc {

enum class BaselineKind { Direct, Alamouti2x1 };

struct BaselineScheme {
    BaselineKind kind = BaselineKind::Direct;
    bool coded = false;
};

namespace detail {

// Shared transmit chain of both reference schemes: optional CRC + tail
// convolutional encoding of a k-bit block, so the coded baselines carry the
// same per-block overhead as the relayed scheme they are compared against.
inline BitVec baseline_codeword(const BitVec& info, bool coded, const ConvCode* code) {
    if (!coded) return info;
    if (code == nullptr)
        throw std::invalid_argument("baseline trial: coded mode requires a code");
    return conv_encode(crc_append(info), *code);
}

inline std::uint64_t baseline_errors(const BitVec& info, const CombinedStatistic& stat,
                                     bool coded, const ConvCode* code) {
    const BitVec hard = bpsk_demodulate_hard(stat);
    BitVec decided = hard;
    if (coded) decided = viterbi_decode_hard(hard, *code);
    std::uint64_t errors = 0;
    for (std::size_t i = 0; i < info.size(); ++i)
        if (decided[i] != info[i]) ++errors;
    return errors;
}

}  // namespace detail

// One block over a single Rayleigh branch with a fixed gain: BPSK at power
// p over a block-constant channel, matched-filter combining, optional hard
// Viterbi decoding. Returns the number of information bit errors.
inline std::uint64_t direct_trial_with_gain(rng::Stream& st, std::complex<double> h, double snr,
                                            bool coded, const ConvCode* code, int k) {
    if (!(snr > 0.0)) throw std::domain_error("direct_trial: snr must be positive");
    if (k <= 0) throw std::domain_error("direct_trial: k must be positive");
    const double p = 1.0;
    const NoisePsd noise{p / snr};
    const BitVec info = draw_info_bits(st, k);
    const BitVec tx = detail::baseline_codeword(info, coded, code);
    const SymbolBlock block = bpsk_modulate(tx, p);
    std::vector<std::complex<double>> y(block.symbols.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = h * block.symbols[i];
    y = add_awgn(st, y, noise);
    const CombinedStatistic stat = mrc_combine({{y, h}}, noise, p);
    return detail::baseline_errors(info, stat, coded, code);
}

inline std::uint64_t direct_trial(rng::Stream& st, double snr, bool coded, const ConvCode* code,
                                  int k) {
    const std::complex<double> h = st.cnormal(1.0);
    return direct_trial_with_gain(st, h, snr, coded, code, k);
}

// One block over a 2x1 orthogonal space-time code with fixed gains. Each
// antenna transmits at p/2 so the pair radiates the same total power as the
// single-antenna schemes. Symbols are sent in pairs,
//   slot 1: h1 s1 + h2 s2,    slot 2: -h1 s2 + h2 s1   (real BPSK symbols),
// and combining yields decision variables with gain |h1|^2 + |h2|^2 and
// per-branch noise power N0, i.e. an effective SNR of
// (|h1|^2 + |h2|^2) (p/2) / N0 per symbol. Odd trailing symbols are paired
// with a known placeholder that is excluded from the error count.
inline std::uint64_t alamouti_trial_with_gains(rng::Stream& st, std::complex<double> h1,
                                               std::complex<double> h2, double snr, bool coded,
                                               const ConvCode* code, int k) {
    if (!(snr > 0.0)) throw std::domain_error("alamouti_trial: snr must be positive");
    if (k <= 0) throw std::domain_error("alamouti_trial: k must be positive");
    const double p = 1.0;
    const NoisePsd noise{p / snr};
    const BitVec info = draw_info_bits(st, k);
    BitVec tx = detail::baseline_codeword(info, coded, code);
    const std::size_t payload = tx.size();
    if (payload % 2 != 0) tx.push_back(0);
    const SymbolBlock block = bpsk_modulate(tx, p / 2.0);

    std::vector<std::complex<double>> y(tx.size());
    for (std::size_t i = 0; i + 1 < tx.size(); i += 2) {
        const std::complex<double> s1 = block.symbols[i];
        const std::complex<double> s2 = block.symbols[i + 1];
        y[i] = h1 * s1 + h2 * s2;
        y[i + 1] = -h1 * s2 + h2 * s1;
    }
    y = add_awgn(st, y, noise);

    CombinedStatistic stat;
    stat.decision_values.resize(tx.size());
    const double g2 = std::norm(h1) + std::norm(h2);
    for (std::size_t i = 0; i + 1 < tx.size(); i += 2) {
        const std::complex<double> r1 = y[i];
        const std::complex<double> r2 = y[i + 1];
        stat.decision_values[i] = (std::conj(h1) * r1 + h2 * std::conj(r2)).real();
        stat.decision_values[i + 1] = (std::conj(h2) * r1 - h1 * std::conj(r2)).real();
    }
    stat.post_snr = g2 * (p / 2.0) / noise.n0;
    stat.decision_values.resize(payload);
    return detail::baseline_errors(info, stat, coded, code);
}

inline std::uint64_t alamouti_trial(rng::Stream& st, double snr, bool coded, const ConvCode* code,
                                    int k) {
    const std::complex<double> h1 = st.cnormal(1.0);
    const std::complex<double> h2 = st.cnormal(1.0);
    return alamouti_trial_with_gains(st, h1, h2, snr, coded, code, k);
}

}  // namespace marc
