#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "marc/analytic_bounds.hpp"
#include "marc/baselines.hpp"
#include "marc/config.hpp"
#include "marc/detector.hpp"
#include "marc/protocol.hpp"
#include "marc/stats.hpp"

namespace marc {

struct BerPoint {
    std::string scheme;
    double snr_db = 0.0;
    double ebn0_db = 0.0;
    std::uint64_t frames = 0;
    std::uint64_t bits = 0;
    std::uint64_t bit_errors = 0;
    double ber = 0.0;
    double ci_low = 0.0;
    double ci_high = 1.0;
    std::array<double, 4> state_hist{0.0, 0.0, 0.0, 1.0};
};

struct BoundPoint {
    std::string scheme;
    double snr_db = 0.0;
    double ebn0_db = 0.0;
    double bound = 0.0;
    StateProbs probs;
};

namespace detail {

// Frames are processed in fixed batches, and the stop rule is evaluated only
// after fixed-size groups of batches. Both constants are independent of the
// worker count, so the set of simulated frames, and therefore every output
// byte, is identical no matter how the batches were distributed over threads.
constexpr std::uint64_t kBatchFrames = 250;
constexpr std::uint64_t kBatchesPerWave = 16;
constexpr std::uint64_t kPointFrameStride = std::uint64_t{1} << 40;
constexpr std::uint32_t kBaselineStreamTag = 32;

struct BatchTally {
    std::uint64_t frames = 0;
    std::uint64_t bits = 0;
    std::uint64_t errors = 0;
    std::array<std::uint64_t, 4> states{0, 0, 0, 0};
    std::uint64_t relay_units = 0;  // accepted uplink blocks, for energy accounting
};

inline int state_index(RelayStateKind s) {
    switch (s) {
        case RelayStateKind::S0: return 0;
        case RelayStateKind::S1: return 1;
        case RelayStateKind::S2: return 2;
        case RelayStateKind::S3: return 3;
    }
    return 0;
}

inline std::uint64_t info_errors(const BitVec& hard, const BitVec& info, bool coded,
                                 const ConvCode* code) {
    std::uint64_t e = 0;
    if (coded) {
        const BitVec decoded = viterbi_decode_hard(hard, *code);
        for (std::size_t i = 0; i < info.size(); ++i)
            if (decoded[i] != info[i]) ++e;
    } else {
        for (std::size_t i = 0; i < info.size(); ++i)
            if (hard[i] != info[i]) ++e;
    }
    return e;
}

struct MarcTrialResult {
    std::uint64_t errors_a = 0;
    std::uint64_t errors_b = 0;
    int state = 3;
};

inline MarcTrialResult marc_trial(const FrameConfig& fc, const ConvCode* code, bool genie_sic,
                                  std::uint64_t frame) {
    const FrameResult fr = run_frame(fc, frame);
    const NoisePsd noise{fc.n0};
    const SicResult det = sic_detect(fr.signals, fr.relay, fr.gains, noise, fc.p, code, genie_sic,
                                     &fr.tx_bits_a, &fr.tx_bits_b);
    MarcTrialResult out;
    out.errors_a = info_errors(det.hard_a, fr.info_a, fc.coded, code);
    out.errors_b = info_errors(det.hard_b, fr.info_b, fc.coded, code);
    out.state = state_index(fr.relay.state);
    return out;
}

inline BatchTally run_batch(const SweepConfig& cfg, const ConvCode* code, double snr0,
                            std::uint64_t point_index, std::uint64_t first_frame,
                            std::uint64_t n_frames) {
    BatchTally t;
    const double p = 1.0;
    const double n0 = p / snr0;
    FrameConfig fc;
    fc.p = p;
    fc.n0 = n0;
    fc.omega_to_d = 1.0;
    fc.omega_to_r = cfg.urc_ideal ? 1.0 : std::pow(10.0, cfg.urc_offset_db / 10.0);
    fc.coded = cfg.coded;
    fc.genie_relay = cfg.urc_ideal;
    fc.k = cfg.k;
    fc.code = code;
    fc.seed = cfg.seed;

    for (std::uint64_t i = 0; i < n_frames; ++i) {
        const std::uint64_t frame = point_index * kPointFrameStride + first_frame + i;
        switch (cfg.scheme) {
            case Scheme::Marc: {
                const MarcTrialResult r = marc_trial(fc, code, cfg.genie_sic, frame);
                t.errors += r.errors_a + r.errors_b;
                t.bits += 2 * static_cast<std::uint64_t>(cfg.k);
                t.states[static_cast<std::size_t>(r.state)] += 1;
                t.relay_units += static_cast<std::uint64_t>(
                    r.state == 3 ? 2 : (r.state == 0 ? 0 : 1));
                break;
            }
            case Scheme::Marc3: {
                const FrameResult3 fr = run_frame3(fc, frame);
                const NoisePsd noise{fc.n0};
                const Sic3Result det = sic_detect3(fr.signals, fr.gains, noise, fc.p, code,
                                                   cfg.genie_sic, &fr.tx_bits, &fr.relay_ok);
                int accepted = 0;
                for (int u = 0; u < 3; ++u) {
                    t.errors += info_errors(det.hard[static_cast<std::size_t>(u)],
                                            fr.info[static_cast<std::size_t>(u)], fc.coded, code);
                    if (fr.relay_ok[static_cast<std::size_t>(u)]) ++accepted;
                }
                t.bits += 3 * static_cast<std::uint64_t>(cfg.k);
                t.states[static_cast<std::size_t>(accepted > 3 ? 3 : accepted)] += 1;
                t.relay_units += static_cast<std::uint64_t>(accepted);
                break;
            }
            case Scheme::Direct: {
                rng::Stream st(cfg.seed, frame, kBaselineStreamTag);
                t.errors += direct_trial(st, snr0, cfg.coded, code, cfg.k);
                t.bits += static_cast<std::uint64_t>(cfg.k);
                break;
            }
            case Scheme::Alamouti: {
                rng::Stream st(cfg.seed, frame, kBaselineStreamTag);
                t.errors += alamouti_trial(st, snr0, cfg.coded, code, cfg.k);
                t.bits += static_cast<std::uint64_t>(cfg.k);
                break;
            }
        }
        t.frames += 1;
    }
    return t;
}

// Coded blocks carry a CRC and a terminating tail, so each information bit
// costs n_out * (k + 16 + K - 1) / k channel symbols.
inline double symbol_overhead(const SweepConfig& cfg, const ConvCode* code) {
    if (!cfg.coded) return 1.0;
    const double block = static_cast<double>(cfg.k) + 16.0 +
                         static_cast<double>(code->constraint_length - 1);
    return static_cast<double>(code->n_out()) * block / static_cast<double>(cfg.k);
}

// Transmitted energy per information bit, in units of P, for the SNR axis
// conversion. Users radiate one symbol per channel bit at power P; the relay
// slot adds one unit per forwarded block (two when it transmits the sum, the
// elementwise sum of two unit-power streams having mean power 2P).
inline double energy_factor(const SweepConfig& cfg, const ConvCode* code, double relay_units,
                            double n_users) {
    const double overhead = symbol_overhead(cfg, code);
    if (cfg.scheme == Scheme::Direct || cfg.scheme == Scheme::Alamouti) return overhead;
    return overhead * (n_users + relay_units) / n_users;
}

}  // namespace detail

inline BerPoint run_point(const SweepConfig& cfg, const ConvCode* code, double snr_db,
                          std::uint64_t point_index) {
    const double snr0 = std::pow(10.0, snr_db / 10.0);
    const std::uint64_t total_batches =
        (cfg.max_frames + detail::kBatchFrames - 1) / detail::kBatchFrames;

    detail::BatchTally acc;
    std::uint64_t next_batch = 0;
    while (next_batch < total_batches && acc.errors < cfg.target_bit_errors) {
        const std::uint64_t wave_end = std::min(total_batches, next_batch + detail::kBatchesPerWave);
        const std::uint64_t wave_n = wave_end - next_batch;
        std::vector<detail::BatchTally> slots(wave_n);
        auto work = [&](std::uint64_t offset, std::uint64_t stride) {
            for (std::uint64_t j = offset; j < wave_n; j += stride) {
                const std::uint64_t b = next_batch + j;
                const std::uint64_t first = b * detail::kBatchFrames;
                const std::uint64_t n =
                    std::min(cfg.max_frames, first + detail::kBatchFrames) - first;
                slots[j] = detail::run_batch(cfg, code, snr0, point_index, first, n);
            }
        };
        if (cfg.workers == 1) {
            work(0, 1);
        } else {
            std::vector<std::thread> pool;
            const std::uint64_t nthreads =
                std::min<std::uint64_t>(static_cast<std::uint64_t>(cfg.workers), wave_n);
            pool.reserve(nthreads);
            for (std::uint64_t tix = 0; tix < nthreads; ++tix)
                pool.emplace_back(work, tix, nthreads);
            for (auto& th : pool) th.join();
        }
        for (const auto& s : slots) {
            acc.frames += s.frames;
            acc.bits += s.bits;
            acc.errors += s.errors;
            for (int i = 0; i < 4; ++i)
                acc.states[static_cast<std::size_t>(i)] += s.states[static_cast<std::size_t>(i)];
            acc.relay_units += s.relay_units;
        }
        next_batch = wave_end;
    }

    BerPoint pt;
    pt.scheme = scheme_name(cfg.scheme);
    pt.snr_db = snr_db;
    pt.frames = acc.frames;
    pt.bits = acc.bits;
    pt.bit_errors = acc.errors;
    pt.ber = acc.bits ? static_cast<double>(acc.errors) / static_cast<double>(acc.bits) : 0.0;
    const auto ci = stats::wilson(acc.errors, acc.bits);
    pt.ci_low = ci.low;
    pt.ci_high = ci.high;
    double relay_units_per_frame;
    if (cfg.scheme == Scheme::Marc || cfg.scheme == Scheme::Marc3) {
        for (int i = 0; i < 4; ++i)
            pt.state_hist[static_cast<std::size_t>(i)] =
                acc.frames ? static_cast<double>(acc.states[static_cast<std::size_t>(i)]) /
                                 static_cast<double>(acc.frames)
                           : 0.0;
        relay_units_per_frame =
            acc.frames ? static_cast<double>(acc.relay_units) / static_cast<double>(acc.frames)
                       : 0.0;
    } else {
        pt.state_hist = {1.0, 0.0, 0.0, 0.0};
        relay_units_per_frame = 0.0;
    }
    const double users = cfg.scheme == Scheme::Marc3 ? 3.0 : 2.0;
    pt.ebn0_db = snr_db + 10.0 * std::log10(detail::energy_factor(cfg, code, relay_units_per_frame,
                                                                  users));
    return pt;
}

inline std::vector<BerPoint> run_sweep(const SweepConfig& cfg) {
    cfg.validate();
    std::optional<ConvCode> code;
    if (cfg.coded) code = make_conv_code(cfg.code_generators, cfg.constraint_length);
    std::vector<BerPoint> out;
    out.reserve(cfg.snr_grid_db.size());
    for (std::size_t i = 0; i < cfg.snr_grid_db.size(); ++i)
        out.push_back(run_point(cfg, code ? &*code : nullptr, cfg.snr_grid_db[i], i));
    return out;
}

// Failure probability of one user-to-relay link: the relay decodes the coded
// uplink block and checks the CRC. Estimated from a fixed number of frames
// with counter-based streams, so the value is reproducible for a given seed.
inline double calibrate_urc_failure(double snr0, double omega_r, const ConvCode& code, int k,
                                    std::uint64_t seed, std::uint32_t bit_tag,
                                    std::uint32_t noise_tag, std::uint64_t frames = 20000) {
    const double p = 1.0;
    const NoisePsd noise{p / snr0};
    std::uint64_t failures = 0;
    for (std::uint64_t f = 0; f < frames; ++f) {
        rng::Stream gs(seed, f, noise_tag + 64);
        const std::complex<double> h = gs.cnormal(omega_r);
        rng::Stream bs(seed, f, bit_tag);
        const BitVec info = draw_info_bits(bs, k);
        const BitVec block = crc_append(info);
        const SymbolBlock tx = bpsk_modulate(conv_encode(block, code), p);
        std::vector<std::complex<double>> y(tx.symbols.size());
        for (std::size_t i = 0; i < y.size(); ++i) y[i] = h * tx.symbols[i];
        rng::Stream ns(seed, f, noise_tag);
        y = add_awgn(ns, y, noise);
        const CombinedStatistic stat = mrc_combine({{y, h}}, noise, p);
        const BitVec decoded = viterbi_decode_hard(bpsk_demodulate_hard(stat), code);
        if (!crc_check(decoded)) ++failures;
    }
    return static_cast<double>(failures) / static_cast<double>(frames);
}

inline std::vector<BoundPoint> run_bound(const SweepConfig& cfg) {
    cfg.validate();
    if (cfg.scheme != Scheme::Marc)
        throw ConfigError("scheme", "bound curves are defined for the two-user scheme only");
    std::optional<ConvCode> code;
    if (cfg.coded) code = make_conv_code(cfg.code_generators, cfg.constraint_length);

    std::vector<BoundPoint> out;
    out.reserve(cfg.snr_grid_db.size());
    for (double snr_db : cfg.snr_grid_db) {
        const double snr0 = std::pow(10.0, snr_db / 10.0);
        BoundPoint bp;
        bp.scheme = scheme_name(cfg.scheme) + "-bound";
        bp.snr_db = snr_db;
        if (cfg.urc_ideal) {
            bp.probs = state_probs(0.0, 0.0);
        } else {
            const double omega_r = std::pow(10.0, cfg.urc_offset_db / 10.0);
            const double fail_a = calibrate_urc_failure(snr0, omega_r, *code, cfg.k, cfg.seed,
                                                        tag::bits_a, tag::noise_ar);
            const double fail_b = calibrate_urc_failure(snr0, omega_r, *code, cfg.k, cfg.seed,
                                                        tag::bits_b, tag::noise_br);
            bp.probs = state_probs(fail_a, fail_b);
        }
        BoundInputs in;
        in.snr0 = snr0;
        in.omega_rate = 1.0;
        in.probs = bp.probs;
        if (cfg.coded) {
            const auto [d_free, b_dfree] =
                compute_distance_spectrum(cfg.code_generators, cfg.constraint_length);
            in.coded = CodedParams{1.0 / code->n_out(), d_free, b_dfree, cfg.k};
            bp.bound = coded_ber_upper_bound(in);
        } else {
            bp.bound = bep_upper_bound(in);
        }
        const double e_r = bp.probs.p1 + bp.probs.p2 + 2.0 * bp.probs.p3;
        bp.ebn0_db =
            snr_db + 10.0 * std::log10(detail::symbol_overhead(cfg, code ? &*code : nullptr) *
                                       (2.0 + e_r) / 2.0);
        out.push_back(bp);
    }
    return out;
}

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

inline std::string ber_csv_header() {
    return "scheme,snr_db,ebn0_db,frames,bits,bit_errors,ber,ci_low,ci_high,p0,p1,p2,p3";
}

inline std::string to_csv(const std::vector<BerPoint>& points) {
    std::string out = ber_csv_header() + "\n";
    for (const auto& p : points) {
        out += p.scheme + ',' + format_double(p.snr_db) + ',' + format_double(p.ebn0_db) + ',' +
               std::to_string(p.frames) + ',' + std::to_string(p.bits) + ',' +
               std::to_string(p.bit_errors) + ',' + format_double(p.ber) + ',' +
               format_double(p.ci_low) + ',' + format_double(p.ci_high) + ',' +
               format_double(p.state_hist[0]) + ',' + format_double(p.state_hist[1]) + ',' +
               format_double(p.state_hist[2]) + ',' + format_double(p.state_hist[3]) + '\n';
    }
    return out;
}

inline std::string bound_csv_header() { return "scheme,snr_db,ebn0_db,bound,p0,p1,p2,p3"; }

inline std::string to_csv(const std::vector<BoundPoint>& points) {
    std::string out = bound_csv_header() + "\n";
    for (const auto& p : points) {
        out += p.scheme + ',' + format_double(p.snr_db) + ',' + format_double(p.ebn0_db) + ',' +
               format_double(p.bound) + ',' + format_double(p.probs.p0) + ',' +
               format_double(p.probs.p1) + ',' + format_double(p.probs.p2) + ',' +
               format_double(p.probs.p3) + '\n';
    }
    return out;
}

}  // namespace marc
