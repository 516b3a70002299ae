#pragma once

// Reference computations kept independent of the library code paths.

#include "ddbs/array_model.hpp"

#include <cmath>
#include <complex>
#include <functional>

namespace oracle {

inline double pos(int n_t, int i) { return i - 0.5 * (n_t - 1); }

// (1/N) |sum_n exp(j n d x - j n^2 d^2 y)| by plain summation.
inline double kernel(int n_t, double d, double x, double y) {
    std::complex<double> acc = 0.0;
    for (int i = 0; i < n_t; ++i) {
        const double nd = pos(n_t, i) * d;
        acc += std::polar(1.0, nd * x - nd * nd * y);
    }
    return std::abs(acc) / n_t;
}

// C(b) + jS(b) = int_0^b exp(j pi t^2 / 2) dt by its power series.
inline std::complex<double> fresnel_series(double b) {
    const std::complex<double> z(0.0, 0.5 * ddbs::kPi);
    std::complex<double> term = b;  // n = 0
    std::complex<double> sum = term;
    const double b2 = b * b;
    for (int n = 1; n < 400; ++n) {
        term *= z * b2 * (2.0 * n - 1.0) / (static_cast<double>(n) * (2.0 * n + 1.0));
        sum += term;
        if (std::abs(term) < 1e-18) break;
    }
    return sum;
}

inline double bisect(const std::function<double(double)>& f, double lo, double hi, int iters = 200) {
    double flo = f(lo);
    for (int i = 0; i < iters; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm > 0) == (flo > 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// First point in (0, limit] where f drops below level, refined by bisection.
inline double first_crossing(const std::function<double(double)>& f, double level, double step, double limit) {
    double prev = 0.0;
    for (double x = step; x <= limit; x += step) {
        if (f(x) < level) return bisect([&](double t) { return f(t) - level; }, prev, x);
        prev = x;
    }
    return std::nan("");
}

inline ddbs::SystemConfig half_wave(int n_t, double fc, double bw, int m) {
    ddbs::SystemConfig c;
    c.n_antennas = n_t;
    c.carrier_freq = fc;
    c.bandwidth = bw;
    c.n_subcarriers = m;
    return c;
}

}  // namespace oracle
