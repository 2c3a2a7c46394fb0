#pragma once

#include <cmath>
#include <vector>

namespace marc::quad {

// Tanh-sinh rule on (a, b). Handles integrable endpoint singularities
// (e.g. log blowups) since abscissae never reach the endpoints.
template <typename F>
double tanh_sinh(F&& f, double a, double b, double rel_tol = 1e-12, int max_level = 10) {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    constexpr double pi_half = 1.5707963267948966;

    auto eval_pair = [&](double t) -> double {
        const double u = pi_half * std::sinh(t);
        const double c = std::cosh(u);
        const double w = pi_half * std::cosh(t) / (c * c);
        if (w < 1e-300) return 0.0;
        // Distance to the endpoints via 1 - tanh(u) computed from exponentials;
        // the naive mid - half*tanh(u) collapses onto the endpoint once tanh
        // rounds to 1 and silently drops mass of singular integrands.
        const double e = std::exp(-2.0 * u);
        const double omx = 2.0 * e / (1.0 + e);
        double contrib = 0.0;
        const double xp = b - half * omx;
        const double xm = a + half * omx;
        if (xp > a && xp < b) contrib += f(xp) * w;
        if (t > 0.0 && xm > a && xm < b) contrib += f(xm) * w;
        return contrib;
    };

    double h = 1.0;
    double sum = eval_pair(0.0);
    for (double t = h; t <= 6.5; t += h) sum += eval_pair(t);
    double prev = sum * h * half;
    for (int level = 1; level <= max_level; ++level) {
        h *= 0.5;
        for (double t = h; t <= 6.5; t += 2.0 * h) sum += eval_pair(t);
        const double integral = sum * h * half;
        if (level >= 2 && std::abs(integral - prev) <= rel_tol * std::abs(integral))
            return integral;
        prev = integral;
    }
    return prev;
}

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration.
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
}

// Fixed-order Gauss-Legendre on [a, b].
template <typename F>
double gauss_legendre_integrate(F&& f, double a, double b, int n = 96) {
    static thread_local std::vector<double> x, w;
    static thread_local int cached_n = 0;
    if (cached_n != n) {
        gauss_legendre(n, x, w);
        cached_n = n;
    }
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += w[i] * f(mid + half * x[i]);
    return s * half;
}

} // namespace marc::quad
