#pragma once

#include "ddbs/array_model.hpp"
#include "ddbs/beamsplit.hpp"

#include <Eigen/Core>

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ddbs {

struct DesignInputs {
    SystemConfig cfg;
    double gamma = 1.0;
    // Default to the config's distance-ring bounds.
    std::optional<double> alpha_min;
    std::optional<double> alpha_max;
    std::optional<int> k_override;
    std::optional<double> alpha_p_override;

    void validate() const;
    [[nodiscard]] double a_min() const { return alpha_min.value_or(cfg.alpha_min()); }
    [[nodiscard]] double a_max() const { return alpha_max.value_or(cfg.alpha_max()); }
};

struct AngleParams {
    double theta_p = 0.0;
    int pM = 0;
};

struct DistanceParams {
    double ratio = 0.0;
    double alpha_p = 0.0;
    int q = 0;
    std::pair<double, double> alpha_t_interval;
    double alpha_t = 0.0;
};

struct PilotPlan {
    double theta_p = 0.0;
    std::vector<double> theta_t_list;
    double alpha_p = 0.0;
    double alpha_t = 0.0;
    std::pair<double, double> alpha_t_interval;
    double ratio = 0.0;
    int p1 = 0;
    int pM = 0;
    int q = 0;
    int K = 1;
    int K_formula = 1;
    std::vector<double> ending_directions;
    std::vector<std::string> warnings;

    /// TD-PS parameters of pilot k (0-based).
    [[nodiscard]] TdPsParams pilot(int k) const;
};

/// p_M = floor(0.88 gamma f_L M / (N_t B)), theta_p = 1.76 gamma f_L M / (N_t B) - 2 p_M.
[[nodiscard]] AngleParams design_angle_params(const DesignInputs& in);
/// theta_t^1 = 1 - (f_c / f_M)(theta_p + 2 p_M).
[[nodiscard]] double first_intercept(const DesignInputs& in, double theta_p, int pM);
/// round((-theta_t^1 f_L / f_c - theta_p) / 2), half away from zero.
[[nodiscard]] int compute_p1(const DesignInputs& in, double theta_t_1, double theta_p);
[[nodiscard]] DistanceParams design_distance_params(const DesignInputs& in);
/// Pilot count from the distance beamwidth at f_H; returns {K, K_formula}.
[[nodiscard]] std::pair<int, int> pilot_count(const DesignInputs& in, double theta_p, int p1, double alpha_p, int q);
/// theta_t^k = (1 - 2(k-1)/K) - (f_c / f_M)(theta_p + 2 p_M).
[[nodiscard]] std::vector<double> intercepts_for_pilots(const DesignInputs& in, int K, double theta_p, int pM);
[[nodiscard]] PilotPlan design(const DesignInputs& in);

/// Per-antenna true-time delays of the K pilots and the selector width.
struct FixedTdNetwork {
    Eigen::MatrixXd delays;  // N_t x K, seconds
    int selection_bits = 0;

    /// TD vector of pilot k (0-based) rebuilt from the stored delays.
    [[nodiscard]] SteeringVector beam(int k, double freq) const;
};

[[nodiscard]] FixedTdNetwork fixed_td_network(const PilotPlan& plan, const SystemConfig& cfg);
/// tau^(n) = (n d theta_t - n^2 d^2 alpha_t) / c.
[[nodiscard]] double td_delay(const SystemConfig& cfg, int antenna, double theta_t, double alpha_t);

}  // namespace ddbs
