#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "marc/bits.hpp"
#include "marc/channel.hpp"

namespace marc {

// BPSK block with per-symbol energy P; (1/n)sum|x_i|^2 == P exactly.
struct SymbolBlock {
    std::vector<std::complex<double>> symbols;
    double per_symbol_power = 1.0;
};

struct CombinedStatistic {
    std::vector<double> decision_values;
    double post_snr = 0.0;
};

// One diversity branch: a received vector and the (perfectly known) gain that
// multiplied the transmitted block on that branch.
struct MrcBranch {
    std::vector<std::complex<double>> observation;
    std::complex<double> gain;
};

// Fixed mapping: bit 0 -> +sqrt(p), bit 1 -> -sqrt(p).
inline SymbolBlock bpsk_modulate(const BitVec& bits, double p) {
    if (!(p > 0.0)) throw std::domain_error("bpsk_modulate: p must be > 0");
    SymbolBlock out;
    out.per_symbol_power = p;
    out.symbols.reserve(bits.size());
    const double a = std::sqrt(p);
    for (const auto b : bits) out.symbols.emplace_back(b ? -a : a, 0.0);
    return out;
}

// Decision value per symbol is Re(sum_i conj(gain_i) y_i); with unit-variance
// branch noise the post-combining SNR is (sum_i |gain_i|^2) * P / N0.
inline CombinedStatistic mrc_combine(const std::vector<MrcBranch>& branches,
                                     const NoisePsd& noise, double per_symbol_power) {
    if (branches.empty()) throw std::invalid_argument("mrc_combine: need at least one branch");
    validate(noise);
    const std::size_t n = branches.front().observation.size();
    double gain2 = 0.0;
    for (const auto& br : branches) {
        if (br.observation.size() != n)
            throw std::invalid_argument("mrc_combine: branch length mismatch");
        gain2 += std::norm(br.gain);
    }
    CombinedStatistic out;
    out.post_snr = gain2 * per_symbol_power / noise.n0;
    out.decision_values.assign(n, 0.0);
    for (const auto& br : branches) {
        const auto g = std::conj(br.gain);
        for (std::size_t i = 0; i < n; ++i)
            out.decision_values[i] += (g * br.observation[i]).real();
    }
    return out;
}

// Sign detector; the tie at exactly 0 maps to bit 0.
inline BitVec bpsk_demodulate_hard(const CombinedStatistic& stat) {
    BitVec bits;
    bits.reserve(stat.decision_values.size());
    for (const double v : stat.decision_values) bits.push_back(v < 0.0 ? 1 : 0);
    return bits;
}

} // namespace marc
