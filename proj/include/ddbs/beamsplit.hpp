#pragma once

#include "ddbs/array_model.hpp"

#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace ddbs {

/// Root of F(beta) = 1/sqrt(2) for the Fresnel amplitude.
inline constexpr double kFresnelBeta = 1.318;

/// TD phase (theta_t, alpha_t) and PS phase (theta_p, alpha_p) parameters.
/// q is the fixed distance wrap integer the plan pairs with alpha_p.
struct TdPsParams {
    double theta_t = 0.0;
    double theta_p = 0.0;
    double alpha_t = 0.0;
    double alpha_p = 0.0;
    int q = 0;
};

struct BeamFocus {
    int subcarrier = 0;  // 1-based; 0 when queried by raw frequency
    double freq = 0.0;
    double theta = 0.0;
    double alpha = 0.0;
    int p = 0;
    int q = 0;
    bool clamped = false;  // no integer p reaches [-1, 1]; theta was clamped
};

class InfeasibleFocus : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

struct FocusOptions {
    std::optional<int> forced_p;
    // Prefer strips whose focus lies inside cfg.angle_range.
    bool prefer_angle_range = true;
};

[[nodiscard]] SteeringVector td_vector(const TdPsParams& prm, const SystemConfig& cfg, double freq);
[[nodiscard]] SteeringVector ps_vector(const TdPsParams& prm, const SystemConfig& cfg);
/// Element-wise product of the TD and PS vectors, rescaled to unit norm.
[[nodiscard]] SteeringVector combined_beamformer(const TdPsParams& prm, const SystemConfig& cfg, double freq);

/// G(x, y) = |sum_n exp(j n d x - j n^2 d^2 y)| / N_t.
[[nodiscard]] double gain_kernel(const SystemConfig& cfg, double x, double y);

/// |w^T b(theta, alpha)| at frequency freq.
[[nodiscard]] double array_gain(const SteeringVector& w, const SystemConfig& cfg, const PolarLocation& loc, double freq);

/// Kernel arguments of a TD-PS beam probed at loc.
[[nodiscard]] std::pair<double, double> kernel_args(const TdPsParams& prm, const SystemConfig& cfg,
                                                    const PolarLocation& loc, double freq);
[[nodiscard]] double tdps_gain(const TdPsParams& prm, const SystemConfig& cfg, const PolarLocation& loc, double freq);

/// Focus of a TD-PS beam at freq: theta = theta_t + (f_c/f)(theta_p + 2p),
/// alpha = alpha_t + (f_c/f)(alpha_p + 2q/d). Among the integers p that put
/// theta in [-1, 1], the strip inside the angle range that entered most
/// recently wins. Throws InfeasibleFocus when no p is visible.
[[nodiscard]] BeamFocus predicted_focus(const TdPsParams& prm, const SystemConfig& cfg, double freq,
                                        const FocusOptions& opt = {});
[[nodiscard]] BeamFocus focus_at_subcarrier(const TdPsParams& prm, const SystemConfig& cfg, int m,
                                            const FocusOptions& opt = {});
/// Non-throwing variant: an infeasible query returns the nearest strip with
/// theta clamped and the clamped flag set.
[[nodiscard]] BeamFocus nearest_focus(const TdPsParams& prm, const SystemConfig& cfg, int m,
                                      const FocusOptions& opt = {});

/// sin(N pi x / 2) / (N sin(pi x / 2)), signed; +-1 at the removable points.
[[nodiscard]] double dirichlet_sinc(const SystemConfig& cfg, double x);

/// (C(beta), S(beta)) by adaptive Simpson quadrature.
[[nodiscard]] std::pair<double, double> fresnel(double beta);
/// |C + jS| / beta, with the limit 1 at beta = 0.
[[nodiscard]] double fresnel_amplitude(double beta);
/// beta(dalpha) = sqrt(N_t^2 d^2 |dalpha| / lambda).
[[nodiscard]] double fresnel_argument(const SystemConfig& cfg, double delta_alpha, double freq);
[[nodiscard]] double distance_gain(const SystemConfig& cfg, double delta_alpha, double freq);

[[nodiscard]] double angle_beamwidth(const SystemConfig& cfg, double freq);
[[nodiscard]] double distance_beamwidth(const SystemConfig& cfg, double freq);

struct EllipseCoeffs {
    double sigma1 = 0.0;
    double sigma2 = 0.0;
};
[[nodiscard]] EllipseCoeffs ellipse_coeffs(const SystemConfig& cfg, double freq);
/// 1 - sigma1 (theta - theta_f)^2 - sigma2 (alpha - alpha_f)^2.
[[nodiscard]] double ellipse_gain(const SystemConfig& cfg, const PolarLocation& focus, const PolarLocation& probe,
                                  double freq);

/// Row l holds exp(j n_i d x_l) over the antenna positions n_i.
[[nodiscard]] Eigen::MatrixXcd linear_phase_matrix(const SystemConfig& cfg, const Eigen::VectorXd& x);
/// Column s holds c_i exp(-j n_i^2 d^2 y_s), with c = weights or 1/N_t.
[[nodiscard]] Eigen::MatrixXcd quadratic_phase_matrix(const SystemConfig& cfg, const Eigen::VectorXd& y,
                                                      const SteeringVector* weights = nullptr);

}  // namespace ddbs
