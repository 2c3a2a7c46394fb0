#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "marc/bits.hpp"

namespace marc {

// Feedforward convolutional code. Generators are tap masks in the convention
// "most significant octal digit = oldest register tap", i.e. bit 0 of a mask
// taps the current input and bit (constraint_length-1) the oldest one.
// d_free / b_dfree are derived by exhaustive trellis search, never assumed.
struct ConvCode {
    std::vector<unsigned> generators;
    int constraint_length = 0;
    int d_free = 0;
    int b_dfree = 0;

    int n_out() const { return static_cast<int>(generators.size()); }
    int n_states() const { return 1 << (constraint_length - 1); }
};

struct InfoBlock {
    BitVec bits;
    int k = 0;
};

namespace detail {

inline int parity(unsigned v) { return std::popcount(v) & 1; }

// Output weight of the branch taken from `state` on input `b`.
inline int branch_weight(const ConvCode& c, unsigned state, unsigned b) {
    const unsigned window = (state << 1) | b;
    int w = 0;
    for (const unsigned g : c.generators) w += parity(window & g);
    return w;
}

inline unsigned next_state(const ConvCode& c, unsigned state, unsigned b) {
    return ((state << 1) | b) & static_cast<unsigned>(c.n_states() - 1);
}

} // namespace detail

// Exact (d_free, b_dfree) over paths that diverge from the zero state and
// first remerge to it. b_dfree counts the minimum-weight error events.
inline std::pair<int, int> compute_distance_spectrum(const std::vector<unsigned>& generators,
                                                     int constraint_length,
                                                     long node_budget = 10'000'000) {
    if (constraint_length < 2 || constraint_length > 10)
        throw std::invalid_argument("compute_distance_spectrum: constraint_length must be in [2, 10]");
    for (const unsigned g : generators)
        if (g == 0) throw std::invalid_argument("compute_distance_spectrum: zero generator");
    ConvCode c;
    c.generators = generators;
    c.constraint_length = constraint_length;

    // Dijkstra for the cheapest diverge->remerge weight, then a bounded DFS
    // to count paths that attain it.
    const int ns = c.n_states();
    const int big = std::numeric_limits<int>::max() / 2;
    std::vector<int> dist(static_cast<std::size_t>(ns), big);
    const unsigned start = detail::next_state(c, 0, 1);
    dist[start] = detail::branch_weight(c, 0, 1);
    std::vector<std::pair<int, unsigned>> heap{{dist[start], start}};
    auto cmp = [](const auto& a, const auto& b) { return a.first > b.first; };
    int d_free = -1;
    long visited = 0;
    while (!heap.empty()) {
        std::pop_heap(heap.begin(), heap.end(), cmp);
        const auto [d, s] = heap.back();
        heap.pop_back();
        if (++visited > node_budget)
            throw std::runtime_error("compute_distance_spectrum: search budget exceeded");
        if (d > dist[s]) continue;
        for (unsigned b = 0; b <= 1; ++b) {
            const unsigned t = detail::next_state(c, s, b);
            const int nd = d + detail::branch_weight(c, s, b);
            if (t == 0) {
                if (d_free < 0 || nd < d_free) d_free = nd;
                continue;
            }
            if (nd < dist[t]) {
                dist[t] = nd;
                heap.emplace_back(nd, t);
                std::push_heap(heap.begin(), heap.end(), cmp);
            }
        }
    }
    if (d_free <= 0) throw std::runtime_error("compute_distance_spectrum: no remerging path");

    long count = 0;
    long dfs_nodes = 0;
    // Iterative DFS over (state, accumulated weight), pruning above d_free.
    std::vector<std::pair<unsigned, int>> stack{{start, dist[start]}};
    while (!stack.empty()) {
        const auto [s, w] = stack.back();
        stack.pop_back();
        if (++dfs_nodes > node_budget)
            throw std::runtime_error("compute_distance_spectrum: search budget exceeded");
        for (unsigned b = 0; b <= 1; ++b) {
            const int nw = w + detail::branch_weight(c, s, b);
            if (nw > d_free) continue;
            const unsigned t = detail::next_state(c, s, b);
            if (t == 0) {
                if (nw == d_free) ++count;
                continue;
            }
            stack.emplace_back(t, nw);
        }
    }
    if (count <= 0 || count > std::numeric_limits<int>::max())
        throw std::runtime_error("compute_distance_spectrum: inconsistent path count");
    return {d_free, static_cast<int>(count)};
}

inline ConvCode make_conv_code(std::vector<unsigned> generators, int constraint_length) {
    const auto [d_free, b_dfree] = compute_distance_spectrum(generators, constraint_length);
    ConvCode c;
    c.generators = std::move(generators);
    c.constraint_length = constraint_length;
    c.d_free = d_free;
    c.b_dfree = b_dfree;
    return c;
}

// Terminated encoding: constraint_length - 1 zero tail bits flush the
// register, so output length is (info + tail) * n_out.
inline BitVec conv_encode(const BitVec& info, const ConvCode& code) {
    const int tail = code.constraint_length - 1;
    BitVec out;
    out.reserve((info.size() + static_cast<std::size_t>(tail)) * code.generators.size());
    unsigned state = 0;
    auto step = [&](unsigned b) {
        const unsigned window = (state << 1) | b;
        for (const unsigned g : code.generators)
            out.push_back(static_cast<std::uint8_t>(detail::parity(window & g)));
        state = window & static_cast<unsigned>(code.n_states() - 1);
    };
    for (const auto b : info) step(b & 1u);
    for (int i = 0; i < tail; ++i) step(0);
    return out;
}

// Hard-input Viterbi over the terminated trellis (starts and ends in state 0).
// Metric ties keep the survivor through the smaller predecessor state.
inline BitVec viterbi_decode_hard(const BitVec& received, const ConvCode& code) {
    const int n_out = code.n_out();
    const int tail = code.constraint_length - 1;
    if (received.size() % static_cast<std::size_t>(n_out) != 0)
        throw std::invalid_argument("viterbi_decode_hard: length not a multiple of the code rate");
    const int steps = static_cast<int>(received.size()) / n_out;
    if (steps <= tail)
        throw std::invalid_argument("viterbi_decode_hard: block too short for the zero tail");
    const int k = steps - tail;
    const int ns = code.n_states();
    const int big = std::numeric_limits<int>::max() / 2;

    std::vector<int> metric(static_cast<std::size_t>(ns), big), next_metric;
    metric[0] = 0;
    std::vector<std::uint8_t> choice(static_cast<std::size_t>(ns) * static_cast<std::size_t>(steps));

    for (int t = 0; t < steps; ++t) {
        next_metric.assign(static_cast<std::size_t>(ns), big);
        const std::uint8_t* rx = received.data() + static_cast<std::size_t>(t) * n_out;
        const unsigned bmax = (t < k) ? 1u : 0u;
        for (int s = 0; s < ns; ++s) {
            if (metric[static_cast<std::size_t>(s)] >= big) continue;
            for (unsigned b = 0; b <= bmax; ++b) {
                const unsigned window = (static_cast<unsigned>(s) << 1) | b;
                int d = 0;
                for (int j = 0; j < n_out; ++j)
                    d += detail::parity(window & code.generators[static_cast<std::size_t>(j)]) ^ rx[j];
                const unsigned nxt = window & static_cast<unsigned>(ns - 1);
                const int m = metric[static_cast<std::size_t>(s)] + d;
                if (m < next_metric[nxt]) {
                    next_metric[nxt] = m;
                    choice[static_cast<std::size_t>(t) * ns + nxt] =
                        static_cast<std::uint8_t>(window >> (code.constraint_length - 1));
                }
            }
        }
        metric.swap(next_metric);
    }

    BitVec decoded(static_cast<std::size_t>(steps));
    unsigned s = 0;
    for (int t = steps - 1; t >= 0; --t) {
        const unsigned oldest = choice[static_cast<std::size_t>(t) * ns + s];
        const unsigned b = s & 1u;
        decoded[static_cast<std::size_t>(t)] = static_cast<std::uint8_t>(b);
        s = (s >> 1) | (oldest << (code.constraint_length - 2));
    }
    decoded.resize(static_cast<std::size_t>(k));
    return decoded;
}

// CRC-16 with polynomial 0x1021, zero initial remainder, bitwise MSB-first.
inline std::uint16_t crc16(const BitVec& bits) {
    std::uint16_t r = 0;
    for (const auto b : bits) {
        const unsigned fb = ((r >> 15) ^ b) & 1u;
        r = static_cast<std::uint16_t>(r << 1);
        if (fb) r ^= 0x1021u;
    }
    return r;
}

inline BitVec crc_append(const BitVec& bits) {
    BitVec out = bits;
    const std::uint16_t r = crc16(bits);
    for (int i = 15; i >= 0; --i) out.push_back(static_cast<std::uint8_t>((r >> i) & 1u));
    return out;
}

inline bool crc_check(const BitVec& bits) {
    if (bits.size() < 16) return false;
    return crc16(bits) == 0;
}

} // namespace marc
