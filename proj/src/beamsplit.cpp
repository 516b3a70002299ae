#include "ddbs/beamsplit.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

namespace ddbs {

namespace {

SteeringVector chirp_vector(const SystemConfig& cfg, double k, double theta, double alpha, double sign) {
    const int n_t = cfg.n_antennas;
    const double d = cfg.spacing();
    const double scale = 1.0 / std::sqrt(static_cast<double>(n_t));
    SteeringVector v(n_t);
    for (int i = 0; i < n_t; ++i) {
        const double nd = cfg.antenna_index(i) * d;
        v[i] = std::polar(scale, sign * k * (nd * theta - nd * nd * alpha));
    }
    return v;
}

constexpr double kVisibleSlack = 1e-9;

double focus_theta(const TdPsParams& prm, double ratio, int p) {
    return prm.theta_t + ratio * (prm.theta_p + 2.0 * p);
}

BeamFocus make_focus(const TdPsParams& prm, const SystemConfig& cfg, double freq, int p) {
    const double ratio = cfg.carrier_freq / freq;
    BeamFocus b;
    b.freq = freq;
    b.p = p;
    b.q = prm.q;
    b.theta = focus_theta(prm, ratio, p);
    b.alpha = prm.alpha_t + ratio * (prm.alpha_p + 2.0 * prm.q / cfg.spacing());
    return b;
}

// Visible strip per the wrap-in rule; nullopt when none is visible.
std::optional<int> select_strip(const TdPsParams& prm, const SystemConfig& cfg, double freq, const FocusOptions& opt) {
    const double ratio = cfg.carrier_freq / freq;
    auto visible = [&](int p) {
        const double th = focus_theta(prm, ratio, p);
        return th >= -1.0 - kVisibleSlack && th <= 1.0 + kVisibleSlack;
    };
    if (opt.forced_p) {
        if (visible(*opt.forced_p)) return opt.forced_p;
        return std::nullopt;
    }
    const double centre = (-prm.theta_t / ratio - prm.theta_p) / 2.0;
    const int pc = static_cast<int>(std::lround(centre));
    std::vector<int> all;
    std::vector<int> inside;
    const auto [lo, hi] = cfg.angle_range;
    for (int p = pc - 2; p <= pc + 2; ++p) {
        if (!visible(p)) continue;
        all.push_back(p);
        const double th = focus_theta(prm, ratio, p);
        if (th >= lo && th <= hi) inside.push_back(p);
    }
    const auto& pool = (opt.prefer_angle_range && !inside.empty()) ? inside : all;
    if (pool.empty()) return std::nullopt;
    double mean = 0.0;
    for (int p : pool) mean += p;
    mean /= static_cast<double>(pool.size());
    // Beams move toward -1 as f grows when theta_p + 2p > 0, so new strips enter at +1.
    if (prm.theta_p + 2.0 * mean >= 0.0) return *std::max_element(pool.begin(), pool.end());
    return *std::min_element(pool.begin(), pool.end());
}

double simpson(const std::function<double(double)>& fn, double a, double b, double fa, double fm, double fb,
               double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = fn(lm);
    const double frm = fn(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return simpson(fn, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           simpson(fn, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

double integrate(const std::function<double(double)>& fn, double a, double b, double tol) {
    const double fa = fn(a);
    const double fb = fn(b);
    const double fm = fn(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson(fn, a, b, fa, fm, fb, whole, tol, 48);
}

}  // namespace

SteeringVector td_vector(const TdPsParams& prm, const SystemConfig& cfg, double freq) {
    // Phase 2 pi f tau, with tau the true-time delay of each element.
    const int n_t = cfg.n_antennas;
    const double d = cfg.spacing();
    const double scale = 1.0 / std::sqrt(static_cast<double>(n_t));
    SteeringVector v(n_t);
    for (int i = 0; i < n_t; ++i) {
        const double nd = cfg.antenna_index(i) * d;
        const double tau = (nd * prm.theta_t - nd * nd * prm.alpha_t) / kSpeedOfLight;
        v[i] = std::polar(scale, -2.0 * kPi * freq * tau);
    }
    return v;
}

SteeringVector ps_vector(const TdPsParams& prm, const SystemConfig& cfg) {
    return chirp_vector(cfg, wavenumber(cfg.carrier_freq), prm.theta_p, prm.alpha_p, -1.0);
}

SteeringVector combined_beamformer(const TdPsParams& prm, const SystemConfig& cfg, double freq) {
    SteeringVector w = td_vector(prm, cfg, freq).cwiseProduct(ps_vector(prm, cfg));
    w.normalize();
    return w;
}

double gain_kernel(const SystemConfig& cfg, double x, double y) {
    const double d = cfg.spacing();
    cdouble acc{0.0, 0.0};
    for (int i = 0; i < cfg.n_antennas; ++i) {
        const double nd = cfg.antenna_index(i) * d;
        acc += std::polar(1.0, nd * x - nd * nd * y);
    }
    return std::abs(acc) / cfg.n_antennas;
}

double array_gain(const SteeringVector& w, const SystemConfig& cfg, const PolarLocation& loc, double freq) {
    return std::abs(bilinear(w, approx_steering(cfg, loc, freq)));
}

std::pair<double, double> kernel_args(const TdPsParams& prm, const SystemConfig& cfg, const PolarLocation& loc,
                                      double freq) {
    const double k = wavenumber(freq);
    const double kc = wavenumber(cfg.carrier_freq);
    return {k * loc.theta - k * prm.theta_t - kc * prm.theta_p, k * loc.alpha - k * prm.alpha_t - kc * prm.alpha_p};
}

double tdps_gain(const TdPsParams& prm, const SystemConfig& cfg, const PolarLocation& loc, double freq) {
    const auto [x, y] = kernel_args(prm, cfg, loc, freq);
    return gain_kernel(cfg, x, y);
}

BeamFocus predicted_focus(const TdPsParams& prm, const SystemConfig& cfg, double freq, const FocusOptions& opt) {
    const auto p = select_strip(prm, cfg, freq, opt);
    if (!p)
        throw InfeasibleFocus("no integer p places the focus inside [-1, 1] at f = " + std::to_string(freq) + " Hz");
    BeamFocus b = make_focus(prm, cfg, freq, *p);
    b.theta = std::clamp(b.theta, -1.0, 1.0);
    return b;
}

BeamFocus focus_at_subcarrier(const TdPsParams& prm, const SystemConfig& cfg, int m, const FocusOptions& opt) {
    BeamFocus b = predicted_focus(prm, cfg, subcarrier_freq(cfg, m), opt);
    b.subcarrier = m;
    return b;
}

BeamFocus nearest_focus(const TdPsParams& prm, const SystemConfig& cfg, int m, const FocusOptions& opt) {
    const double freq = subcarrier_freq(cfg, m);
    if (const auto p = select_strip(prm, cfg, freq, opt)) {
        BeamFocus b = make_focus(prm, cfg, freq, *p);
        b.theta = std::clamp(b.theta, -1.0, 1.0);
        b.subcarrier = m;
        return b;
    }
    const double ratio = cfg.carrier_freq / freq;
    int best = opt.forced_p.value_or(0);
    if (!opt.forced_p) {
        const int pc = static_cast<int>(std::lround((-prm.theta_t / ratio - prm.theta_p) / 2.0));
        double dist = std::numeric_limits<double>::infinity();
        for (int p = pc - 2; p <= pc + 2; ++p) {
            const double th = focus_theta(prm, ratio, p);
            const double miss = std::max(std::abs(th) - 1.0, 0.0);
            if (miss < dist) {
                dist = miss;
                best = p;
            }
        }
    }
    BeamFocus b = make_focus(prm, cfg, freq, best);
    b.theta = std::clamp(b.theta, -1.0, 1.0);
    b.subcarrier = m;
    b.clamped = true;
    return b;
}

double dirichlet_sinc(const SystemConfig& cfg, double x) {
    const double n = cfg.n_antennas;
    const double den = std::sin(kPi * x / 2.0);
    if (std::abs(den) < 1e-12) {
        // x near 2j: limit is cos(N pi x / 2) / cos(pi x / 2)
        return std::cos(n * kPi * x / 2.0) / std::cos(kPi * x / 2.0);
    }
    return std::sin(n * kPi * x / 2.0) / (n * den);
}

std::pair<double, double> fresnel(double beta) {
    if (beta < 0.0) throw std::invalid_argument("fresnel: beta must be non-negative");
    if (beta == 0.0) return {0.0, 0.0};
    auto c_fn = [](double t) { return std::cos(kPi * t * t / 2.0); };
    auto s_fn = [](double t) { return std::sin(kPi * t * t / 2.0); };
    const int pieces = static_cast<int>(std::ceil(beta));
    const double tol = 1e-10 / pieces;
    double c = 0.0;
    double s = 0.0;
    for (int i = 0; i < pieces; ++i) {
        const double a = beta * i / pieces;
        const double b = beta * (i + 1) / pieces;
        c += integrate(c_fn, a, b, tol);
        s += integrate(s_fn, a, b, tol);
    }
    return {c, s};
}

double fresnel_amplitude(double beta) {
    if (beta < 1e-6) return 1.0 - kPi * kPi * std::pow(beta, 4) / 90.0;
    const auto [c, s] = fresnel(beta);
    return std::hypot(c, s) / beta;
}

double fresnel_argument(const SystemConfig& cfg, double delta_alpha, double freq) {
    const double n = cfg.n_antennas;
    const double d = cfg.spacing();
    const double lambda = kSpeedOfLight / freq;
    return std::sqrt(n * n * d * d * std::abs(delta_alpha) / lambda);
}

double distance_gain(const SystemConfig& cfg, double delta_alpha, double freq) {
    return fresnel_amplitude(fresnel_argument(cfg, delta_alpha, freq));
}

double angle_beamwidth(const SystemConfig& cfg, double freq) {
    if (!(freq > 0.0)) throw std::invalid_argument("angle_beamwidth: frequency must be positive");
    return 0.88 * cfg.carrier_freq / (cfg.n_antennas * freq);
}

double distance_beamwidth(const SystemConfig& cfg, double freq) {
    if (!(freq > 0.0)) throw std::invalid_argument("distance_beamwidth: frequency must be positive");
    const double n = cfg.n_antennas;
    return 4.0 * kFresnelBeta * kFresnelBeta * cfg.carrier_freq * cfg.carrier_freq / (n * n * kSpeedOfLight * freq);
}

EllipseCoeffs ellipse_coeffs(const SystemConfig& cfg, double freq) {
    const double n = cfg.n_antennas;
    const double d = cfg.spacing();
    const double ratio = freq / cfg.carrier_freq;
    const double lambda = kSpeedOfLight / freq;
    return {n * n * kPi * kPi * ratio * ratio / 24.0, kPi * kPi * std::pow(n, 4) * std::pow(d, 4) / (90.0 * lambda * lambda)};
}

double ellipse_gain(const SystemConfig& cfg, const PolarLocation& focus, const PolarLocation& probe, double freq) {
    const auto [s1, s2] = ellipse_coeffs(cfg, freq);
    const double dt = probe.theta - focus.theta;
    const double da = probe.alpha - focus.alpha;
    return 1.0 - s1 * dt * dt - s2 * da * da;
}

Eigen::MatrixXcd linear_phase_matrix(const SystemConfig& cfg, const Eigen::VectorXd& x) {
    const int n_t = cfg.n_antennas;
    const double d = cfg.spacing();
    Eigen::MatrixXcd out(x.size(), n_t);
    for (Eigen::Index l = 0; l < x.size(); ++l) {
        const cdouble step = std::polar(1.0, d * x[l]);
        cdouble v;
        for (int i = 0; i < n_t; ++i) {
            // Exact phase every 16 elements, recurrence in between.
            v = (i % 16 == 0) ? std::polar(1.0, cfg.antenna_index(i) * d * x[l]) : v * step;
            out(l, i) = v;
        }
    }
    return out;
}

Eigen::MatrixXcd quadratic_phase_matrix(const SystemConfig& cfg, const Eigen::VectorXd& y, const SteeringVector* weights) {
    const int n_t = cfg.n_antennas;
    const double d = cfg.spacing();
    Eigen::MatrixXcd out(n_t, y.size());
    for (Eigen::Index s = 0; s < y.size(); ++s)
        for (int i = 0; i < n_t; ++i) {
            const double nd = cfg.antenna_index(i) * d;
            const cdouble c = weights ? (*weights)[i] : cdouble(1.0 / n_t, 0.0);
            out(i, s) = c * std::polar(1.0, -nd * nd * y[s]);
        }
    return out;
}

}  // namespace ddbs
