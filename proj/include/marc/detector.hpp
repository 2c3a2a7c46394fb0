#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "marc/channel.hpp"
#include "marc/coding.hpp"
#include "marc/phy.hpp"
#include "marc/protocol.hpp"

namespace marc {

enum class User { A, B };

// Orthonormal basis of the null space of the interferer's direction in the
// stacked (target slot, interferer slot, relay slot) observation space. The
// direction always has a zero first component because the interferer is
// silent during the target user's own slot.
struct NullingBasis {
    std::array<std::complex<double>, 3> u1, u2;
};

inline NullingBasis build_nulling_basis(const std::array<std::complex<double>, 3>& dir) {
    if (std::abs(dir[0]) != 0.0)
        throw std::invalid_argument("build_nulling_basis: direction must have a zero first entry");
    const double nu2 = std::norm(dir[1]) + std::norm(dir[2]);
    if (!(nu2 > 0.0))
        throw std::domain_error("build_nulling_basis: degenerate direction");
    const double nu = std::sqrt(nu2);
    NullingBasis b;
    b.u1 = {std::complex<double>{0.0, 0.0}, -std::conj(dir[2]) / nu, std::conj(dir[1]) / nu};
    b.u2 = {std::complex<double>{1.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}};
    return b;
}

// SIC ordering metric: |h_u|^2 plus the harmonic combination of the remaining
// users' direct gains with the relay gain. The second term is exactly the
// post-nulling relay-branch power for that stage.
inline double sic_order_metric(double h2_u, const std::vector<double>& h2_others, double h2_rd) {
    double s = 1.0 / h2_rd;
    for (const double v : h2_others) s += 1.0 / v;
    return h2_u + 1.0 / s;
}

struct DetectionOrder {
    User first_user = User::A;
    User second_user = User::B;
    double first_snr = 0.0;
    double second_snr = 0.0;
};

inline DetectionOrder order_users(const ChannelRealization& g, double p, double n0) {
    const double a2 = std::norm(g.h_ad), b2 = std::norm(g.h_bd), r2 = std::norm(g.h_rd);
    const double ma = sic_order_metric(a2, {b2}, r2);
    const double mb = sic_order_metric(b2, {a2}, r2);
    DetectionOrder o;
    if (mb > ma) {
        o.first_user = User::B;
        o.second_user = User::A;
        o.first_snr = mb * p / n0;
        o.second_snr = (a2 + r2) * p / n0;
    } else {
        o.first_user = User::A;
        o.second_user = User::B;
        o.first_snr = ma * p / n0;
        o.second_snr = (b2 + r2) * p / n0;
    }
    return o;
}

namespace detail {

// First-stage statistic for a target user: null the interferer across the
// stacked observations, then MRC the direct slot with the projected branch.
// Degenerate gains (both interferer and relay links at exactly zero power)
// fall back to direct-only detection.
inline CombinedStatistic nulling_stage(const std::vector<std::complex<double>>& y_td,
                                       const std::vector<std::complex<double>>& y_vd,
                                       const std::vector<std::complex<double>>& y_rd,
                                       std::complex<double> h_td, std::complex<double> h_vd,
                                       std::complex<double> h_rd, const NoisePsd& n0, double p) {
    const double nu2 = std::norm(h_vd) + std::norm(h_rd);
    if (!(nu2 > 0.0) || y_rd.empty())
        return mrc_combine({{y_td, h_td}}, n0, p);
    const double nu = std::sqrt(nu2);
    std::vector<std::complex<double>> z(y_td.size());
    for (std::size_t i = 0; i < z.size(); ++i)
        z[i] = (-h_rd * y_vd[i] + h_vd * y_rd[i]) / nu;
    const std::complex<double> gz = h_vd * h_rd / nu;
    return mrc_combine({{y_td, h_td}, {z, gz}}, n0, p);
}

inline std::vector<std::complex<double>> remodulated_decision(const BitVec& hard,
                                                              const ConvCode* code, double p) {
    if (code) return bpsk_modulate(conv_encode(viterbi_decode_hard(hard, *code), *code), p).symbols;
    return bpsk_modulate(hard, p).symbols;
}

} // namespace detail

// First-stage statistic for one user of an S3 frame (interferer nulled, both
// copies MRC-combined).
inline CombinedStatistic project_and_mrc(const FrameSignals& f, const ChannelRealization& g,
                                         const NoisePsd& n0, double p, User target) {
    if (target == User::A)
        return detail::nulling_stage(f.y_ad, f.y_bd, f.y_rd, g.h_ad, g.h_bd, g.h_rd, n0, p);
    return detail::nulling_stage(f.y_bd, f.y_ad, f.y_rd, g.h_bd, g.h_ad, g.h_rd, n0, p);
}

struct SicResult {
    DetectionOrder order;
    CombinedStatistic stat_a, stat_b;
    BitVec hard_a, hard_b;
};

// Per-state detection dispatch. S0: direct decisions only. S1/S2: the
// assisted user gets a two-branch MRC with the relay copy. S3: nulling for
// the stronger user, subtraction of its re-modulated decisions from the relay
// slot, then two-branch MRC for the weaker user. genie_first_stage replaces
// the subtracted decisions with the true transmitted bits.
inline SicResult sic_detect(const FrameSignals& f, const RelayState& st,
                            const ChannelRealization& g, const NoisePsd& n0, double p,
                            const ConvCode* code, bool genie_first_stage = false,
                            const BitVec* tx_bits_a = nullptr, const BitVec* tx_bits_b = nullptr) {
    validate(st);
    SicResult r;
    switch (st.state) {
    case RelayStateKind::S0:
        r.stat_a = mrc_combine({{f.y_ad, g.h_ad}}, n0, p);
        r.stat_b = mrc_combine({{f.y_bd, g.h_bd}}, n0, p);
        break;
    case RelayStateKind::S1:
        r.stat_a = mrc_combine({{f.y_ad, g.h_ad}, {f.y_rd, g.h_rd}}, n0, p);
        r.stat_b = mrc_combine({{f.y_bd, g.h_bd}}, n0, p);
        break;
    case RelayStateKind::S2:
        r.stat_a = mrc_combine({{f.y_ad, g.h_ad}}, n0, p);
        r.stat_b = mrc_combine({{f.y_bd, g.h_bd}, {f.y_rd, g.h_rd}}, n0, p);
        break;
    case RelayStateKind::S3: {
        r.order = order_users(g, p, n0.n0);
        const bool a_first = r.order.first_user == User::A;
        auto& stat_first = a_first ? r.stat_a : r.stat_b;
        auto& stat_second = a_first ? r.stat_b : r.stat_a;
        stat_first = project_and_mrc(f, g, n0, p, r.order.first_user);
        const BitVec hard_first = bpsk_demodulate_hard(stat_first);

        std::vector<std::complex<double>> x_hat;
        if (genie_first_stage) {
            const BitVec* truth = a_first ? tx_bits_a : tx_bits_b;
            if (truth == nullptr)
                throw std::invalid_argument("sic_detect: genie_first_stage needs true bits");
            x_hat = bpsk_modulate(*truth, p).symbols;
        } else {
            x_hat = detail::remodulated_decision(hard_first, code, p);
        }
        auto y_rd = f.y_rd;
        const auto h_rd = g.h_rd;
        for (std::size_t i = 0; i < y_rd.size(); ++i) y_rd[i] -= h_rd * x_hat[i];

        const auto& y_second = a_first ? f.y_bd : f.y_ad;
        const auto h_second = a_first ? g.h_bd : g.h_ad;
        stat_second = mrc_combine({{y_second, h_second}, {y_rd, h_rd}}, n0, p);
        break;
    }
    }
    r.hard_a = bpsk_demodulate_hard(r.stat_a);
    r.hard_b = bpsk_demodulate_hard(r.stat_b);
    return r;
}

struct Sic3Result {
    std::array<CombinedStatistic, 3> stat;
    std::array<BitVec, 3> hard;
    std::array<int, 3> order{0, 1, 2};
};

// Three-user SIC. Each stage nulls the not-yet-decoded interferers out of the
// relay slot by the weighted combination
//   w = y_rd - sum_v (h_rd / h_vd) y_vd,
// whose noise grows by kappa^2 = 1 + |h_rd|^2 sum_v |h_vd|^-2; normalizing by
// kappa leaves a white branch with gain h_rd/kappa, so the stage SNR equals
// the ordering metric times P/N0. After each stage the decided user's signal
// is subtracted from the relay slot.
inline Sic3Result sic_detect3(const FrameSignals3& f, const ChannelRealization3& g,
                              const NoisePsd& n0, double p, const ConvCode* code,
                              bool genie_first_stages = false,
                              const std::array<BitVec, 3>* tx_bits = nullptr,
                              const std::array<bool, 3>* forwarded = nullptr) {
    const std::array<bool, 3> fwd = forwarded ? *forwarded : std::array<bool, 3>{true, true, true};
    Sic3Result r;
    std::vector<int> remaining{0, 1, 2};
    auto y_rd = f.y_rd;

    // Ordering metric for user u at the current stage. Only users the relay
    // actually forwarded appear in the relay slot, as signal or interference.
    auto metric = [&](int u) {
        const double h2_u = std::norm(g.h_ud[static_cast<std::size_t>(u)]);
        if (!fwd[static_cast<std::size_t>(u)] || y_rd.empty()) return h2_u;
        std::vector<double> h2_others;
        for (const int v : remaining)
            if (v != u && fwd[static_cast<std::size_t>(v)])
                h2_others.push_back(std::norm(g.h_ud[static_cast<std::size_t>(v)]));
        return sic_order_metric(h2_u, h2_others, std::norm(g.h_rd));
    };

    for (int stage = 0; stage < 3; ++stage) {
        int best = remaining.front();
        double best_m = -1.0;
        for (const int u : remaining) {
            const double m = metric(u);
            if (m > best_m) {
                best_m = m;
                best = u;
            }
        }
        const auto u = static_cast<std::size_t>(best);
        r.order[static_cast<std::size_t>(stage)] = best;

        std::vector<int> interferers;
        for (const int v : remaining)
            if (v != best && fwd[static_cast<std::size_t>(v)]) interferers.push_back(v);

        CombinedStatistic stat;
        if (!fwd[u] || y_rd.empty()) {
            stat = mrc_combine({{f.y_ud[u], g.h_ud[u]}}, n0, p);
        } else if (interferers.empty()) {
            stat = mrc_combine({{f.y_ud[u], g.h_ud[u]}, {y_rd, g.h_rd}}, n0, p);
        } else {
            double kappa2 = 1.0;
            for (const int v : interferers)
                kappa2 += std::norm(g.h_rd) / std::norm(g.h_ud[static_cast<std::size_t>(v)]);
            if (std::isfinite(kappa2)) {
                const double kappa = std::sqrt(kappa2);
                std::vector<std::complex<double>> w = y_rd;
                for (const int v : interferers) {
                    const auto vv = static_cast<std::size_t>(v);
                    const auto c = g.h_rd / g.h_ud[vv];
                    for (std::size_t i = 0; i < w.size(); ++i) w[i] -= c * f.y_ud[vv][i];
                }
                for (auto& v : w) v /= kappa;
                stat = mrc_combine({{f.y_ud[u], g.h_ud[u]}, {w, g.h_rd / kappa}}, n0, p);
            } else {
                stat = mrc_combine({{f.y_ud[u], g.h_ud[u]}}, n0, p);
            }
        }
        r.stat[u] = stat;
        r.hard[u] = bpsk_demodulate_hard(stat);

        if (fwd[u] && !y_rd.empty()) {
            std::vector<std::complex<double>> x_hat;
            if (genie_first_stages) {
                if (tx_bits == nullptr)
                    throw std::invalid_argument("sic_detect3: genie mode needs true bits");
                x_hat = bpsk_modulate((*tx_bits)[u], p).symbols;
            } else {
                x_hat = detail::remodulated_decision(r.hard[u], code, p);
            }
            for (std::size_t i = 0; i < y_rd.size(); ++i) y_rd[i] -= g.h_rd * x_hat[i];
        }
        remaining.erase(std::find(remaining.begin(), remaining.end(), best));
    }
    return r;
}

} // namespace marc
