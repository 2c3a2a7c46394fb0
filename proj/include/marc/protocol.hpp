#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "marc/bits.hpp"
#include "marc/channel.hpp"
#include "marc/coding.hpp"
#include "marc/phy.hpp"
#include "marc/rng.hpp"

namespace marc {

// Draw-tag layout for the per-frame substreams. Fixed so that any quantity is
// reproducible from (seed, frame) alone.
namespace tag {
inline constexpr std::uint32_t gains = 0;
inline constexpr std::uint32_t bits_a = 1;
inline constexpr std::uint32_t bits_b = 2;
inline constexpr std::uint32_t noise_ad = 3;
inline constexpr std::uint32_t noise_ar = 4;
inline constexpr std::uint32_t noise_bd = 5;
inline constexpr std::uint32_t noise_br = 6;
inline constexpr std::uint32_t noise_rd = 7;
inline constexpr std::uint32_t bits_c = 8;
inline constexpr std::uint32_t noise_cd = 9;
inline constexpr std::uint32_t noise_cr = 10;
} // namespace tag

enum class RelayStateKind { S0, S1, S2, S3 };

// Relay outcome for one frame: which users' blocks were accepted and, for
// those, the decoded encoder-input blocks the relay will re-encode.
struct RelayState {
    RelayStateKind state = RelayStateKind::S0;
    std::optional<BitVec> decoded_a;
    std::optional<BitVec> decoded_b;
};

inline void validate(const RelayState& st) {
    const bool has_a = st.decoded_a.has_value();
    const bool has_b = st.decoded_b.has_value();
    const bool want_a =
        st.state == RelayStateKind::S1 || st.state == RelayStateKind::S3;
    const bool want_b =
        st.state == RelayStateKind::S2 || st.state == RelayStateKind::S3;
    if (has_a != want_a || has_b != want_b)
        throw std::logic_error("RelayState: decoded blocks inconsistent with state");
}

// Destination observations for the three slots; y_rd stays empty when the
// relay kept silent.
struct FrameSignals {
    std::vector<std::complex<double>> y_ad, y_bd, y_rd;
};

struct FrameConfig {
    double p = 1.0;
    double n0 = 1.0;
    double omega_to_d = 1.0;
    double omega_to_r = 1.0;
    bool coded = false;
    bool genie_relay = true;
    int k = 50;
    const ConvCode* code = nullptr;
    std::uint64_t seed = 0;
};

inline void validate(const FrameConfig& c) {
    if (!(c.p > 0.0)) throw std::domain_error("FrameConfig: p must be > 0");
    if (!(c.n0 > 0.0)) throw std::domain_error("FrameConfig: n0 must be > 0");
    if (!(c.omega_to_d > 0.0) || !(c.omega_to_r > 0.0))
        throw std::domain_error("FrameConfig: link powers must be > 0");
    if (c.k <= 0) throw std::domain_error("FrameConfig: k must be > 0");
    if (c.coded && c.code == nullptr)
        throw std::invalid_argument("FrameConfig: coded mode needs a code");
}

struct FrameResult {
    FrameSignals signals;
    RelayState relay;
    ChannelRealization gains;
    BitVec info_a, info_b;       // k information bits per user
    BitVec block_a, block_b;     // encoder input (info + CRC when coded)
    BitVec tx_bits_a, tx_bits_b; // channel bits actually modulated
};

inline BitVec draw_info_bits(rng::Stream& s, int k) {
    BitVec b(static_cast<std::size_t>(k));
    for (auto& v : b) v = static_cast<std::uint8_t>(s.next_u32() & 1u);
    return b;
}

namespace detail {

inline std::vector<std::complex<double>> faded(const std::vector<std::complex<double>>& x,
                                               std::complex<double> h) {
    std::vector<std::complex<double>> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = h * x[i];
    return y;
}

inline BitVec decode_one(const std::vector<std::complex<double>>& y, std::complex<double> h,
                         const ConvCode& code) {
    CombinedStatistic stat;
    stat.decision_values.reserve(y.size());
    const auto g = std::conj(h);
    for (const auto& v : y) stat.decision_values.push_back((g * v).real());
    return viterbi_decode_hard(bpsk_demodulate_hard(stat), code);
}

} // namespace detail

// Relay-side decision per Table I: a user's block is accepted iff its
// coherently demodulated, Viterbi-decoded block passes the CRC.
inline RelayState relay_process(const std::vector<std::complex<double>>& y_ar,
                                const std::vector<std::complex<double>>& y_br,
                                const ChannelRealization& gains, const ConvCode& code) {
    RelayState st;
    auto dec_a = detail::decode_one(y_ar, gains.h_ar, code);
    auto dec_b = detail::decode_one(y_br, gains.h_br, code);
    const bool ok_a = crc_check(dec_a);
    const bool ok_b = crc_check(dec_b);
    if (ok_a && ok_b)
        st.state = RelayStateKind::S3;
    else if (ok_a)
        st.state = RelayStateKind::S1;
    else if (ok_b)
        st.state = RelayStateKind::S2;
    else
        st.state = RelayStateKind::S0;
    if (ok_a) st.decoded_a = std::move(dec_a);
    if (ok_b) st.decoded_b = std::move(dec_b);
    return st;
}

// Relay slot-3 signal. S1/S2 re-encode and re-modulate the accepted block at
// power P; S3 transmits the literal elementwise sum of both blocks, whose
// average power is 2P (the n-user relay budget with n = 2).
inline std::optional<std::vector<std::complex<double>>>
relay_transmit(const RelayState& st, const ConvCode* code, double p) {
    validate(st);
    auto remod = [&](const BitVec& block) {
        return bpsk_modulate(code ? conv_encode(block, *code) : block, p).symbols;
    };
    switch (st.state) {
    case RelayStateKind::S0:
        return std::nullopt;
    case RelayStateKind::S1:
        return remod(*st.decoded_a);
    case RelayStateKind::S2:
        return remod(*st.decoded_b);
    case RelayStateKind::S3: {
        auto xa = remod(*st.decoded_a);
        const auto xb = remod(*st.decoded_b);
        if (xa.size() != xb.size())
            throw std::logic_error("relay_transmit: mismatched block lengths");
        for (std::size_t i = 0; i < xa.size(); ++i) xa[i] += xb[i];
        return xa;
    }
    }
    return std::nullopt;
}

// One full frame: three TDMA slots with independent AWGN per observation.
// genie_relay bypasses relay decoding (error-free cooperation, always S3);
// uncoded mode has no CRC, so it always runs with the genie relay.
inline FrameResult run_frame(const FrameConfig& cfg, std::uint64_t frame) {
    validate(cfg);
    FrameResult r;
    const NoisePsd n0{cfg.n0};
    const LinkPowers lp{cfg.omega_to_r, cfg.omega_to_d};

    rng::Stream gs(cfg.seed, frame, tag::gains);
    r.gains = draw_channel(gs, lp);

    rng::Stream ba(cfg.seed, frame, tag::bits_a), bb(cfg.seed, frame, tag::bits_b);
    r.info_a = draw_info_bits(ba, cfg.k);
    r.info_b = draw_info_bits(bb, cfg.k);
    r.block_a = cfg.coded ? crc_append(r.info_a) : r.info_a;
    r.block_b = cfg.coded ? crc_append(r.info_b) : r.info_b;
    r.tx_bits_a = cfg.coded ? conv_encode(r.block_a, *cfg.code) : r.block_a;
    r.tx_bits_b = cfg.coded ? conv_encode(r.block_b, *cfg.code) : r.block_b;

    const auto xa = bpsk_modulate(r.tx_bits_a, cfg.p).symbols;
    const auto xb = bpsk_modulate(r.tx_bits_b, cfg.p).symbols;

    rng::Stream s_ad(cfg.seed, frame, tag::noise_ad), s_ar(cfg.seed, frame, tag::noise_ar);
    rng::Stream s_bd(cfg.seed, frame, tag::noise_bd), s_br(cfg.seed, frame, tag::noise_br);
    r.signals.y_ad = add_awgn(s_ad, detail::faded(xa, r.gains.h_ad), n0);
    r.signals.y_bd = add_awgn(s_bd, detail::faded(xb, r.gains.h_bd), n0);

    const bool genie = cfg.genie_relay || !cfg.coded;
    if (genie) {
        r.relay.state = RelayStateKind::S3;
        r.relay.decoded_a = r.block_a;
        r.relay.decoded_b = r.block_b;
    } else {
        const auto y_ar = add_awgn(s_ar, detail::faded(xa, r.gains.h_ar), n0);
        const auto y_br = add_awgn(s_br, detail::faded(xb, r.gains.h_br), n0);
        r.relay = relay_process(y_ar, y_br, r.gains, *cfg.code);
    }

    if (const auto xr = relay_transmit(r.relay, cfg.coded ? cfg.code : nullptr, cfg.p)) {
        rng::Stream s_rd(cfg.seed, frame, tag::noise_rd);
        r.signals.y_rd = add_awgn(s_rd, detail::faded(*xr, r.gains.h_rd), n0);
    }
    return r;
}

// Three-user variant: four slots, relay budget 3P via the literal sum.
struct FrameSignals3 {
    std::array<std::vector<std::complex<double>>, 3> y_ud;
    std::vector<std::complex<double>> y_rd;
};

struct FrameResult3 {
    FrameSignals3 signals;
    ChannelRealization3 gains;
    std::array<BitVec, 3> info;
    std::array<BitVec, 3> block;
    std::array<BitVec, 3> tx_bits;
    std::array<bool, 3> relay_ok{true, true, true};
};

inline FrameResult3 run_frame3(const FrameConfig& cfg, std::uint64_t frame) {
    validate(cfg);
    FrameResult3 r;
    const NoisePsd n0{cfg.n0};
    const LinkPowers lp{cfg.omega_to_r, cfg.omega_to_d};

    rng::Stream gs(cfg.seed, frame, tag::gains);
    r.gains = draw_channel3(gs, lp);

    const std::array<std::uint32_t, 3> bit_tags{tag::bits_a, tag::bits_b, tag::bits_c};
    const std::array<std::uint32_t, 3> nd_tags{tag::noise_ad, tag::noise_bd, tag::noise_cd};
    const std::array<std::uint32_t, 3> nr_tags{tag::noise_ar, tag::noise_br, tag::noise_cr};

    std::vector<std::complex<double>> sum;
    for (int u = 0; u < 3; ++u) {
        const auto uu = static_cast<std::size_t>(u);
        rng::Stream bs(cfg.seed, frame, bit_tags[uu]);
        r.info[uu] = draw_info_bits(bs, cfg.k);
        r.block[uu] = cfg.coded ? crc_append(r.info[uu]) : r.info[uu];
        r.tx_bits[uu] = cfg.coded ? conv_encode(r.block[uu], *cfg.code) : r.block[uu];
        const auto x = bpsk_modulate(r.tx_bits[uu], cfg.p).symbols;

        rng::Stream sd(cfg.seed, frame, nd_tags[uu]);
        r.signals.y_ud[uu] = add_awgn(sd, detail::faded(x, r.gains.h_ud[uu]), n0);

        const bool genie = cfg.genie_relay || !cfg.coded;
        BitVec fwd = r.block[uu];
        if (!genie) {
            rng::Stream sr(cfg.seed, frame, nr_tags[uu]);
            const auto y_ur = add_awgn(sr, detail::faded(x, r.gains.h_ur[uu]), n0);
            fwd = detail::decode_one(y_ur, r.gains.h_ur[uu], *cfg.code);
            r.relay_ok[uu] = crc_check(fwd);
        }
        if (r.relay_ok[uu]) {
            const auto xf =
                bpsk_modulate(cfg.coded ? conv_encode(fwd, *cfg.code) : fwd, cfg.p).symbols;
            if (sum.empty()) sum.assign(xf.size(), {0.0, 0.0});
            for (std::size_t i = 0; i < xf.size(); ++i) sum[i] += xf[i];
        }
    }
    if (!sum.empty()) {
        rng::Stream s_rd(cfg.seed, frame, tag::noise_rd);
        r.signals.y_rd = add_awgn(s_rd, detail::faded(sum, r.gains.h_rd), n0);
    }
    return r;
}

} // namespace marc
