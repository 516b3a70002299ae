#pragma once

#include "ddbs/array_model.hpp"
#include "ddbs/beamsplit.hpp"
#include "ddbs/pilot_design.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

namespace ddbs {

using Rng = std::mt19937_64;

/// Independent stream for (master seed, trial, tag).
[[nodiscard]] Rng make_rng(std::uint64_t master, std::uint64_t trial, std::uint64_t tag = 0);

inline constexpr double kNoiseOff = std::numeric_limits<double>::infinity();

/// Received magnitudes g(m, k): rows are subcarriers, columns pilots.
struct ObservationGrid {
    Eigen::MatrixXd magnitudes;
    double snr = kNoiseOff;
    std::uint64_t seed = 0;

    [[nodiscard]] int n_subcarriers() const { return static_cast<int>(magnitudes.rows()); }
    [[nodiscard]] int n_pilots() const { return static_cast<int>(magnitudes.cols()); }
};

struct TrainingEstimate {
    double theta_hat = 0.0;
    double alpha_hat = 0.0;
    int m_hat = 0;  // 1-based selection, 0 when not applicable
    int k_hat = 0;
    long codeword = -1;
    std::string scheme;
    int pilots_used = 0;
    bool clamped = false;
    bool fallback = false;
};

/// Unit-norm TD-PS beamformers w_{m,k}, cached per (pilot, subcarrier).
class PilotBeams {
public:
    PilotBeams(const PilotPlan& plan, const SystemConfig& cfg);

    [[nodiscard]] const SteeringVector& beam(int k, int m) const {
        return beams_[static_cast<std::size_t>(k) * static_cast<std::size_t>(n_sub_) + static_cast<std::size_t>(m - 1)];
    }
    [[nodiscard]] int n_pilots() const { return n_pilots_; }
    [[nodiscard]] int n_subcarriers() const { return n_sub_; }

private:
    int n_pilots_;
    int n_sub_;
    std::vector<SteeringVector> beams_;
};

/// Noise variance sigma^2 = P_t N_t beta_c^2 / snr with P_t = 1.
[[nodiscard]] double noise_variance(const SystemConfig& cfg, const Channel& ch, double snr);
[[nodiscard]] cdouble complex_noise(double variance, Rng& rng);

/// Column k (0-based) of the observation grid: |h_m^T w_{m,k} + n_m|.
[[nodiscard]] Eigen::VectorXd simulate_pilot(const Channel& ch, const PilotBeams& beams, const SystemConfig& cfg, int k,
                                             double snr, Rng& rng);
/// First n_pilots pilots (all when negative), drawn pilot by pilot.
[[nodiscard]] ObservationGrid simulate_observations(const Channel& ch, const PilotBeams& beams, const SystemConfig& cfg,
                                                    double snr, Rng& rng, int n_pilots = -1);

/// Strongest (m, k), smaller m then smaller k on ties, mapped to its focus.
[[nodiscard]] TrainingEstimate ongrid_train(const ObservationGrid& obs, const PilotPlan& plan, const SystemConfig& cfg);

/// Two-ellipse refinement around the strongest subcarrier and its stronger
/// neighbour; falls back to the on-grid estimate (flagged) when unusable.
[[nodiscard]] TrainingEstimate aux_pair_train(const ObservationGrid& obs, const PilotPlan& plan, const SystemConfig& cfg);

struct NewtonResult {
    double theta = 0.0;
    double alpha = 0.0;
    bool converged = false;
    int iterations = 0;
};

/// Solves sigma1_i (theta_i - theta)^2 + sigma2_i (alpha_i - alpha)^2 = 1 - G_i, i in {a, b}.
[[nodiscard]] NewtonResult solve_ellipse_pair(const EllipseCoeffs& ca, const EllipseCoeffs& cb, const PolarLocation& fa,
                                              const PolarLocation& fb, double gain_a, double gain_b,
                                              const PolarLocation& start);

class MatchFilterBank {
public:
    MatchFilterBank(const PilotPlan& plan, const SystemConfig& cfg, int L, int S);

    [[nodiscard]] const PolarCodebook& grid() const { return grid_; }
    [[nodiscard]] const PilotPlan& plan() const { return plan_; }
    /// Row g holds |w_{m,k}^T b_m(theta_g, alpha_g)| at column (m - 1) + k M.
    [[nodiscard]] const Eigen::MatrixXd& signatures() const { return sig_; }
    [[nodiscard]] int n_subcarriers() const { return n_sub_; }
    /// Index of the maximal centered correlation over the first n_pilots pilots.
    [[nodiscard]] std::size_t best_match(const Eigen::VectorXd& flat_obs, int n_pilots) const;

private:
    PilotPlan plan_;
    PolarCodebook grid_;
    int n_sub_;
    Eigen::MatrixXd sig_;
    // Per pilot prefix: row means and centered norms.
    std::vector<Eigen::VectorXd> means_;
    std::vector<Eigen::VectorXd> cnorms_;
};

[[nodiscard]] MatchFilterBank build_match_filter_bank(const PilotPlan& plan, const SystemConfig& cfg, int L, int S);
[[nodiscard]] TrainingEstimate match_filter_train(const ObservationGrid& obs, const MatchFilterBank& bank);

/// One noisy observation per codeword and subcarrier; the codeword with the
/// largest summed power wins. budget limits the codewords tried (in grid order).
[[nodiscard]] TrainingEstimate exhaustive_polar_train(const Channel& ch, const PolarCodebook& codebook,
                                                      const SystemConfig& cfg, double snr, Rng& rng, long budget = -1);

/// Rainbow sweep: the band covers [-1, 1] once at distance ring alpha_ring.
[[nodiscard]] TdPsParams rainbow_params(const SystemConfig& cfg, double alpha_ring);
[[nodiscard]] TrainingEstimate nearfield_rainbow_train(const Channel& ch, const SystemConfig& cfg, int S, double snr,
                                                       Rng& rng, int budget = -1);
[[nodiscard]] TrainingEstimate farfield_rainbow_train(const Channel& ch, const SystemConfig& cfg, double snr, Rng& rng);

/// conj(b_m(theta_hat, alpha_hat)): gain |v^T w| = 1 for v = b_m at the estimate.
[[nodiscard]] SteeringVector serve_beamformer(const TrainingEstimate& est, const SystemConfig& cfg, int m);
[[nodiscard]] SteeringVector perfect_csi_beamformer(const Channel& ch, int m);

}  // namespace ddbs
