#pragma once

#include <Eigen/Core>

#include <complex>
#include <span>
#include <utility>
#include <vector>

namespace ddbs {

using cdouble = std::complex<double>;
using SteeringVector = Eigen::VectorXcd;

inline constexpr double kSpeedOfLight = 299792458.0;
inline constexpr double kPi = 3.14159265358979323846;

/// Uniform linear array with an OFDM carrier and a rectangular service region
/// in (sine-angle, distance) coordinates.
///
/// Antenna positions are symmetric about the array center: n = -N..N for
/// N_t = 2N + 1, and half-integer offsets when N_t is even. A zero
/// antenna_spacing means half a wavelength at the carrier.
struct SystemConfig {
    int n_antennas = 256;
    double carrier_freq = 30e9;
    double bandwidth = 5e9;
    int n_subcarriers = 1024;
    double antenna_spacing = 0.0;
    std::pair<double, double> angle_range{-0.8660254037844386, 0.8660254037844386};
    std::pair<double, double> distance_range{5.0, 200.0};

    /// Throws std::invalid_argument when any field is out of its domain.
    void validate() const;

    /// Position index of antenna i (0-based), in units of the spacing.
    [[nodiscard]] double antenna_index(int i) const { return i - 0.5 * (n_antennas - 1); }
    [[nodiscard]] double spacing() const;
    [[nodiscard]] double wavelength_c() const { return kSpeedOfLight / carrier_freq; }
    [[nodiscard]] double lowest_freq() const { return carrier_freq - bandwidth / 2.0; }
    [[nodiscard]] double highest_freq() const { return carrier_freq + bandwidth / 2.0; }
    // Distance-ring bounds, taken at broadside (theta = 0).
    [[nodiscard]] double alpha_min() const { return 1.0 / (2.0 * distance_range.second); }
    [[nodiscard]] double alpha_max() const { return 1.0 / (2.0 * distance_range.first); }
};

/// Unconjugated product a^T b.
[[nodiscard]] inline cdouble bilinear(const SteeringVector& a, const SteeringVector& b) { return a.cwiseProduct(b).sum(); }

[[nodiscard]] inline double wavenumber(double freq) { return 2.0 * kPi * freq / kSpeedOfLight; }

/// A point on the (theta, alpha) plane; alpha = (1 - theta^2) / (2 r).
struct PolarLocation {
    double theta = 0.0;
    double alpha = 0.0;

    [[nodiscard]] static PolarLocation from_distance(double theta, double r);
    /// Infinite for alpha == 0 (far field).
    [[nodiscard]] double distance() const;
};

/// Frequency of subcarrier m, 1-based.
[[nodiscard]] double subcarrier_freq(const SystemConfig& cfg, int m);
[[nodiscard]] std::vector<double> subcarrier_freqs(const SystemConfig& cfg);

/// Spherical-wave response; element n is exp(-j k (r_n - r)) / sqrt(N_t).
[[nodiscard]] SteeringVector exact_steering(const SystemConfig& cfg, double theta, double r, double freq);

/// Second-order (Fresnel) approximation; element n is
/// exp(j k (n d theta - n^2 d^2 alpha)) / sqrt(N_t).
[[nodiscard]] SteeringVector approx_steering(const SystemConfig& cfg, const PolarLocation& loc, double freq);

struct Path {
    double gain = 0.0;   // path gain at the carrier
    double delay = 0.0;  // seconds
    double theta = 0.0;
    double r = 0.0;
};

struct Channel {
    std::vector<SteeringVector> per_subcarrier;
    // Gain magnitude per subcarrier; for the LoS form this is lambda_m / (4 pi r).
    std::vector<double> path_gains;
    double beta_c = 0.0;
    std::vector<Path> paths;

    [[nodiscard]] int n_subcarriers() const { return static_cast<int>(per_subcarrier.size()); }
};

/// h_m = sqrt(N_t) beta_m exp(-j k_m r) a_m(theta, r).
[[nodiscard]] Channel los_channel(const SystemConfig& cfg, double theta, double r);

/// h_m = sqrt(N_t / L) sum_l beta_{m,l} exp(-j 2 pi f_m tau_l) a_m(theta_l, r_l),
/// with beta_{m,l} = (f_c / f_m) gain_l.
[[nodiscard]] Channel multipath_channel(const SystemConfig& cfg, std::span<const Path> paths);

/// Polar-domain codebook: cell-centered uniform samples in theta over the
/// angle range and, per angle, uniform samples in alpha over
/// [alpha_min, alpha_max].
class PolarCodebook {
public:
    PolarCodebook(const SystemConfig& cfg, int angle_samples, std::vector<int> distance_samples);
    PolarCodebook(const SystemConfig& cfg, int angle_samples, int distance_samples);

    [[nodiscard]] std::size_t size() const { return grid_.size(); }
    [[nodiscard]] const std::vector<PolarLocation>& grid() const { return grid_; }
    [[nodiscard]] const PolarLocation& location(std::size_t g) const { return grid_.at(g); }
    [[nodiscard]] int angle_samples() const { return angle_samples_; }
    [[nodiscard]] double angle_step() const { return angle_step_; }
    /// Codeword for grid point g at frequency freq: b(theta_g, alpha_g).
    [[nodiscard]] SteeringVector codeword(std::size_t g, double freq) const;

private:
    SystemConfig cfg_;
    int angle_samples_;
    double angle_step_;
    std::vector<PolarLocation> grid_;
};

/// Cell-centered uniform sample i of count over [lo, hi].
[[nodiscard]] inline double cell_center(double lo, double hi, int i, int count) {
    return lo + (hi - lo) * (static_cast<double>(i) + 0.5) / static_cast<double>(count);
}

}  // namespace ddbs
