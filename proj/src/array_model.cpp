#include "ddbs/array_model.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace ddbs {

void SystemConfig::validate() const {
    if (n_antennas < 1) throw std::invalid_argument("n_antennas must be >= 1");
    if (!(carrier_freq > 0.0)) throw std::invalid_argument("carrier_freq must be positive");
    if (!(bandwidth >= 0.0) || !(bandwidth < carrier_freq))
        throw std::invalid_argument("bandwidth must satisfy 0 <= B < f_c");
    if (n_subcarriers < 1) throw std::invalid_argument("n_subcarriers must be >= 1");
    if (antenna_spacing < 0.0) throw std::invalid_argument("antenna_spacing must be non-negative");
    const auto [lo, hi] = angle_range;
    if (!(lo < hi) || lo < -1.0 || hi > 1.0)
        throw std::invalid_argument("angle_range must be an increasing pair inside [-1, 1]");
    const auto [rmin, rmax] = distance_range;
    if (!(rmin > 0.0) || !(rmin <= rmax)) throw std::invalid_argument("distance_range must satisfy 0 < r_min <= r_max");
}

double SystemConfig::spacing() const {
    return antenna_spacing > 0.0 ? antenna_spacing : wavelength_c() / 2.0;
}

PolarLocation PolarLocation::from_distance(double theta, double r) {
    if (!(r > 0.0)) throw std::invalid_argument("distance must be positive");
    return {theta, (1.0 - theta * theta) / (2.0 * r)};
}

double PolarLocation::distance() const {
    if (alpha == 0.0) return std::numeric_limits<double>::infinity();
    return (1.0 - theta * theta) / (2.0 * alpha);
}

double subcarrier_freq(const SystemConfig& cfg, int m) {
    if (m < 1 || m > cfg.n_subcarriers)
        throw std::out_of_range("subcarrier index " + std::to_string(m) + " outside 1.." +
                                std::to_string(cfg.n_subcarriers));
    const double M = cfg.n_subcarriers;
    return cfg.carrier_freq + cfg.bandwidth / M * ((m - 1) - (M - 1) / 2.0);
}

std::vector<double> subcarrier_freqs(const SystemConfig& cfg) {
    std::vector<double> f(static_cast<std::size_t>(cfg.n_subcarriers));
    for (int m = 1; m <= cfg.n_subcarriers; ++m) f[m - 1] = subcarrier_freq(cfg, m);
    return f;
}

SteeringVector exact_steering(const SystemConfig& cfg, double theta, double r, double freq) {
    if (!(r > 0.0)) throw std::invalid_argument("exact_steering: distance must be positive");
    const int n_t = cfg.n_antennas;
    const double d = cfg.spacing();
    const double k = wavenumber(freq);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n_t));
    SteeringVector v(n_t);
    for (int i = 0; i < n_t; ++i) {
        const double nd = cfg.antenna_index(i) * d;
        const double rn = std::sqrt(r * r + nd * nd - 2.0 * r * theta * nd);
        v[i] = std::polar(scale, -k * (rn - r));
    }
    return v;
}

SteeringVector approx_steering(const SystemConfig& cfg, const PolarLocation& loc, double freq) {
    const int n_t = cfg.n_antennas;
    const double d = cfg.spacing();
    const double k = wavenumber(freq);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n_t));
    SteeringVector v(n_t);
    for (int i = 0; i < n_t; ++i) {
        const double nd = cfg.antenna_index(i) * d;
        v[i] = std::polar(scale, k * (nd * loc.theta - nd * nd * loc.alpha));
    }
    return v;
}

Channel los_channel(const SystemConfig& cfg, double theta, double r) {
    if (!(r > 0.0)) throw std::invalid_argument("los_channel: distance must be positive");
    Channel ch;
    const int M = cfg.n_subcarriers;
    ch.per_subcarrier.reserve(M);
    ch.path_gains.reserve(M);
    ch.beta_c = cfg.wavelength_c() / (4.0 * kPi * r);
    const double sqrt_nt = std::sqrt(static_cast<double>(cfg.n_antennas));
    for (int m = 1; m <= M; ++m) {
        const double f = subcarrier_freq(cfg, m);
        const double beta_m = (kSpeedOfLight / f) / (4.0 * kPi * r);
        const cdouble lead = std::polar(sqrt_nt * beta_m, -wavenumber(f) * r);
        ch.per_subcarrier.push_back(lead * exact_steering(cfg, theta, r, f));
        ch.path_gains.push_back(beta_m);
    }
    ch.paths.push_back({ch.beta_c, r / kSpeedOfLight, theta, r});
    return ch;
}

Channel multipath_channel(const SystemConfig& cfg, std::span<const Path> paths) {
    if (paths.empty()) throw std::invalid_argument("multipath_channel: empty path list");
    Channel ch;
    ch.paths.assign(paths.begin(), paths.end());
    ch.beta_c = paths.front().gain;
    const int M = cfg.n_subcarriers;
    const double norm = std::sqrt(static_cast<double>(cfg.n_antennas) / static_cast<double>(paths.size()));
    for (int m = 1; m <= M; ++m) {
        const double f = subcarrier_freq(cfg, m);
        SteeringVector h = SteeringVector::Zero(cfg.n_antennas);
        for (const auto& p : paths) {
            const double beta_ml = cfg.carrier_freq / f * p.gain;
            h += std::polar(norm * beta_ml, -2.0 * kPi * f * p.delay) * exact_steering(cfg, p.theta, p.r, f);
        }
        ch.per_subcarrier.push_back(std::move(h));
        ch.path_gains.push_back(cfg.carrier_freq / f * ch.beta_c);
    }
    return ch;
}

PolarCodebook::PolarCodebook(const SystemConfig& cfg, int angle_samples, std::vector<int> distance_samples)
    : cfg_(cfg), angle_samples_(angle_samples) {
    if (angle_samples < 1) throw std::invalid_argument("PolarCodebook: angle_samples must be >= 1");
    if (static_cast<int>(distance_samples.size()) != angle_samples)
        throw std::invalid_argument("PolarCodebook: one distance count per angle sample required");
    const auto [lo, hi] = cfg.angle_range;
    angle_step_ = (hi - lo) / angle_samples;
    const double amin = cfg.alpha_min();
    const double amax = cfg.alpha_max();
    grid_.reserve(static_cast<std::size_t>(std::accumulate(distance_samples.begin(), distance_samples.end(), 0)));
    for (int l = 0; l < angle_samples; ++l) {
        const int S = distance_samples[l];
        if (S < 1) throw std::invalid_argument("PolarCodebook: distance counts must be >= 1");
        const double theta = cell_center(lo, hi, l, angle_samples);
        for (int s = 0; s < S; ++s) grid_.push_back({theta, cell_center(amin, amax, s, S)});
    }
}

PolarCodebook::PolarCodebook(const SystemConfig& cfg, int angle_samples, int distance_samples)
    : PolarCodebook(cfg, angle_samples, std::vector<int>(static_cast<std::size_t>(std::max(angle_samples, 0)), distance_samples)) {}

SteeringVector PolarCodebook::codeword(std::size_t g, double freq) const {
    return approx_steering(cfg_, grid_.at(g), freq);
}

}  // namespace ddbs
