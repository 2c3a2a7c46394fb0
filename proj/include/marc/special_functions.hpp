#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

namespace marc::sf {

inline double ln_gamma(double x) {
    if (!(x > 0.0))
        throw std::domain_error("ln_gamma: requires x > 0");
    return std::lgamma(x);
}

// Gaussian tail probability P(N(0,1) > x).
inline double q_function(double x) {
    return 0.5 * std::erfc(x * M_SQRT1_2);
}

namespace detail {

inline constexpr double kEulerGamma = 0.57721566490153286060651209008;

// I0, I1 power series, adequate for |x| <= 2.
inline double bessel_i0_series(double x) {
    const double q = 0.25 * x * x;
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 40; ++k) {
        term *= q / (static_cast<double>(k) * k);
        sum += term;
        if (term < sum * 1e-17) break;
    }
    return sum;
}

inline double bessel_i1_series(double x) {
    const double q = 0.25 * x * x;
    double term = 0.5 * x, sum = term;
    for (int k = 1; k < 40; ++k) {
        term *= q / (static_cast<double>(k) * (k + 1));
        sum += term;
        if (term < sum * 1e-17) break;
    }
    return sum;
}

// K0 ascending series; K1 via the Wronskian I1*K0 + I0*K1 = 1/x.
inline void bessel_k01_small(double x, double& k0, double& k1) {
    const double q = 0.25 * x * x;
    const double lead = -(std::log(0.5 * x) + kEulerGamma);
    double term = 1.0, h = 0.0, sum = 0.0;
    for (int k = 1; k < 40; ++k) {
        term *= q / (static_cast<double>(k) * k);
        h += 1.0 / k;
        sum += term * h;
        if (term * h < (sum + 1.0) * 1e-17) break;
    }
    const double i0 = bessel_i0_series(x);
    const double i1 = bessel_i1_series(x);
    k0 = lead * i0 + sum;
    k1 = (1.0 / x - i1 * k0) / i0;
}

// Steed continued fraction for x >= 2; yields exp(x)*K0 and exp(x)*K1.
inline void bessel_k01_scaled_large(double x, double& k0s, double& k1s) {
    constexpr double eps = std::numeric_limits<double>::epsilon();
    const double a1 = 0.25;
    double b = 2.0 * (1.0 + x);
    double d = 1.0 / b;
    double h = d, delh = d;
    double q1 = 0.0, q2 = 1.0;
    double a = -a1;
    double c = a1, q = c;
    double s = 1.0 + q * delh;
    for (int i = 2; i <= 10000; ++i) {
        a -= 2 * (i - 1);
        c = -a * c / i;
        const double qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        const double dels = q * delh;
        s += dels;
        if (std::abs(dels / s) <= eps) break;
    }
    h = a1 * h;
    k0s = std::sqrt(M_PI / (2.0 * x)) / s;
    k1s = k0s * (x + 0.5 - h) / x;
}

} // namespace detail

// exp(x) * K_order(x); avoids underflow of the bare value at large x.
inline double bessel_k_scaled(int order, double x) {
    if (order != 0 && order != 1)
        throw std::domain_error("bessel_k: order must be 0 or 1");
    if (!(x > 0.0))
        throw std::domain_error("bessel_k: requires x > 0");
    double k0, k1;
    if (x < 2.0) {
        detail::bessel_k01_small(x, k0, k1);
        const double e = std::exp(x);
        k0 *= e;
        k1 *= e;
    } else {
        detail::bessel_k01_scaled_large(x, k0, k1);
    }
    return order == 0 ? k0 : k1;
}

inline double bessel_k(int order, double x) {
    return bessel_k_scaled(order, x) * std::exp(-x);
}

inline double digamma(double x) {
    if (!(x > 0.0))
        throw std::domain_error("digamma: requires x > 0");
    double result = 0.0;
    while (x < 10.0) {
        result -= 1.0 / x;
        x += 1.0;
    }
    const double inv = 1.0 / x, inv2 = inv * inv;
    result += std::log(x) - 0.5 * inv
        - inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 * (1.0 / 252.0 - inv2 * (1.0 / 240.0 - inv2 / 132.0))));
    return result;
}

namespace detail {

// 1/Gamma(x), zero at the poles.
inline double inv_gamma(double x) {
    if (x <= 0.0 && x == std::floor(x)) return 0.0;
    return 1.0 / std::tgamma(x);
}

inline double hyp2f1_series(double a, double b, double c, double z) {
    double term = 1.0, sum = 1.0;
    for (int n = 0; n < 100000; ++n) {
        term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z;
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-17) return sum;
    }
    return sum;
}

// c = a + b: logarithmic connection at z -> 1.
inline double hyp2f1_cab0(double a, double b, double z) {
    const double w = 1.0 - z;
    const double lw = std::log(w);
    const double pre = std::tgamma(a + b) * inv_gamma(a) * inv_gamma(b);
    double poch = 1.0, sum = 0.0;
    for (int n = 0; n < 10000; ++n) {
        const double bracket = 2.0 * digamma(n + 1.0) - digamma(a + n) - digamma(b + n) - lw;
        const double t = poch * bracket;
        sum += t;
        if (n > 2 && std::abs(t) < std::abs(sum) * 1e-17) break;
        poch *= (a + n) * (b + n) / ((n + 1.0) * (n + 1.0)) * w;
    }
    return pre * sum;
}

// c = a + b + m, integer m >= 1: logarithmic connection at z -> 1.
inline double hyp2f1_cab_posint(double a, double b, int m, double z) {
    const double w = 1.0 - z;
    const double lw = std::log(w);
    const double c = a + b + m;
    double finite = 0.0;
    double num = 1.0;
    for (int n = 0; n <= m - 1; ++n) {
        if (n > 0) num *= (a + n - 1.0) * (b + n - 1.0) * w / (static_cast<double>(n) * (n - m));
        finite += num;
    }
    finite *= std::tgamma(static_cast<double>(m)) * std::tgamma(c) * inv_gamma(a + m) * inv_gamma(b + m);

    const double pre = std::tgamma(c) * inv_gamma(a) * inv_gamma(b);
    double poch = 1.0 / std::tgamma(m + 1.0);
    double sum = 0.0;
    for (int n = 0; n < 10000; ++n) {
        const double bracket = lw - digamma(n + 1.0) - digamma(static_cast<double>(n + m + 1))
            + digamma(a + m + n) + digamma(b + m + n);
        const double t = poch * bracket;
        sum += t;
        if (n > 2 && std::abs(t) < (std::abs(sum) + 1e-300) * 1e-17) break;
        poch *= (a + m + n) * (b + m + n) / ((n + 1.0) * static_cast<double>(n + m + 1)) * w;
    }
    const double sgn = (m % 2 == 0) ? 1.0 : -1.0;
    return finite - sgn * pre * std::pow(w, m) * sum;
}

// non-integer c - a - b: two-series connection at z -> 1.
inline double hyp2f1_noninteger(double a, double b, double c, double z) {
    const double s = c - a - b;
    const double w = 1.0 - z;
    const double g1 = std::tgamma(c) * std::tgamma(s) * inv_gamma(c - a) * inv_gamma(c - b);
    const double g2 = std::tgamma(c) * std::tgamma(-s) * inv_gamma(a) * inv_gamma(b);
    return g1 * hyp2f1_series(a, b, 1.0 - s, w) + g2 * std::pow(w, s) * hyp2f1_series(c - a, c - b, 1.0 + s, w);
}

inline double hyp2f1_impl(double a, double b, double c, double z);

inline double hyp2f1_near1(double a, double b, double c, double z) {
    const double s = c - a - b;
    if (s < -1e-9) {
        // Euler transform flips a deficit into a surplus.
        return std::pow(1.0 - z, s) * hyp2f1_impl(c - a, c - b, c, z);
    }
    const double r = std::round(s);
    if (std::abs(s - r) < 1e-9) {
        const int m = static_cast<int>(r);
        if (m == 0) return hyp2f1_cab0(a, b, z);
        return hyp2f1_cab_posint(a, b, m, z);
    }
    return hyp2f1_noninteger(a, b, c, z);
}

inline double hyp2f1_impl(double a, double b, double c, double z) {
    if (z == 0.0) return 1.0;
    if (z <= 0.95) return hyp2f1_series(a, b, c, z);
    return hyp2f1_near1(a, b, c, z);
}

} // namespace detail

inline double gauss_2f1(double a, double b, double c, double z) {
    if (c <= 0.0 && c == std::floor(c))
        throw std::domain_error("gauss_2f1: c must not be a non-positive integer");
    if (!(z >= 0.0 && z < 1.0))
        throw std::domain_error("gauss_2f1: requires 0 <= z < 1");
    return detail::hyp2f1_impl(a, b, c, z);
}

} // namespace marc::sf
