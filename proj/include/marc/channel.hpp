#pragma once

#include <array>
#include <complex>
#include <stdexcept>
#include <vector>

#include "marc/rng.hpp"

namespace marc {

// Mean received powers E[|h|^2] per link class: user->relay and
// {user,relay}->destination.
struct LinkPowers {
    double omega_to_r = 1.0;
    double omega_to_d = 1.0;
};

struct NoisePsd {
    double n0 = 1.0;
};

// Block-fading gains for one frame: two users A/B toward destination and
// relay, plus the relay->destination link. Constant within the frame.
struct ChannelRealization {
    std::complex<double> h_ad, h_bd, h_rd, h_ar, h_br;
};

// Three-user variant (users indexed 0..2), used by the 4-slot mode.
struct ChannelRealization3 {
    std::array<std::complex<double>, 3> h_ud;
    std::array<std::complex<double>, 3> h_ur;
    std::complex<double> h_rd;
};

inline void validate(const LinkPowers& p) {
    if (!(p.omega_to_r > 0.0) || !(p.omega_to_d > 0.0))
        throw std::domain_error("LinkPowers: mean link powers must be > 0");
}

inline void validate(const NoisePsd& n) {
    if (!(n.n0 > 0.0))
        throw std::domain_error("NoisePsd: n0 must be > 0");
}

// Each gain is circularly-symmetric complex Gaussian with E[|h|^2] equal to
// the link's mean power, so |h|^2 is exponential with that mean.
inline ChannelRealization draw_channel(rng::Stream& s, const LinkPowers& p) {
    validate(p);
    ChannelRealization h;
    h.h_ad = s.cnormal(p.omega_to_d);
    h.h_bd = s.cnormal(p.omega_to_d);
    h.h_rd = s.cnormal(p.omega_to_d);
    h.h_ar = s.cnormal(p.omega_to_r);
    h.h_br = s.cnormal(p.omega_to_r);
    return h;
}

inline ChannelRealization3 draw_channel3(rng::Stream& s, const LinkPowers& p) {
    validate(p);
    ChannelRealization3 h;
    for (auto& g : h.h_ud) g = s.cnormal(p.omega_to_d);
    h.h_rd = s.cnormal(p.omega_to_d);
    for (auto& g : h.h_ur) g = s.cnormal(p.omega_to_r);
    return h;
}

// y = x + n with n i.i.d. circular complex Gaussian, variance n0 per sample.
inline std::vector<std::complex<double>> add_awgn(rng::Stream& s,
                                                  const std::vector<std::complex<double>>& x,
                                                  const NoisePsd& noise) {
    validate(noise);
    std::vector<std::complex<double>> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + s.cnormal(noise.n0);
    return y;
}

} // namespace marc
