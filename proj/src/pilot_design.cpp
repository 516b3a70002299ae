#include "ddbs/pilot_design.hpp"

#include <cmath>
#include <stdexcept>

namespace ddbs {

void DesignInputs::validate() const {
    cfg.validate();
    if (!(gamma > 0.0) || gamma > 1.0) throw std::invalid_argument("gamma must lie in (0, 1]");
    if (!(a_min() <= a_max())) throw std::invalid_argument("alpha_min must not exceed alpha_max");
    if (k_override && *k_override < 1) throw std::invalid_argument("k_override must be >= 1");
}

TdPsParams PilotPlan::pilot(int k) const {
    return {theta_t_list.at(static_cast<std::size_t>(k)), theta_p, alpha_t, alpha_p, q};
}

namespace {

double split_bound(const DesignInputs& in) {
    const auto& c = in.cfg;
    return 0.88 * in.gamma * c.lowest_freq() * c.n_subcarriers / (c.n_antennas * c.bandwidth);
}

double top_freq(const DesignInputs& in) { return subcarrier_freq(in.cfg, in.cfg.n_subcarriers); }

}  // namespace

AngleParams design_angle_params(const DesignInputs& in) {
    if (!(in.gamma > 0.0) || in.gamma > 1.0) throw std::invalid_argument("gamma must lie in (0, 1]");
    if (!(in.cfg.bandwidth > 0.0)) throw std::invalid_argument("angle design needs a positive bandwidth");
    const double b = split_bound(in);
    const int pM = static_cast<int>(std::floor(b));
    return {2.0 * b - 2.0 * pM, pM};
}

double first_intercept(const DesignInputs& in, double theta_p, int pM) {
    return 1.0 - in.cfg.carrier_freq / top_freq(in) * (theta_p + 2.0 * pM);
}

int compute_p1(const DesignInputs& in, double theta_t_1, double theta_p) {
    const double v = (-theta_t_1 * in.cfg.lowest_freq() / in.cfg.carrier_freq - theta_p) / 2.0;
    return static_cast<int>(std::round(v));
}

DistanceParams design_distance_params(const DesignInputs& in) {
    const auto& c = in.cfg;
    const double amin = in.a_min();
    const double amax = in.a_max();
    if (!(amin <= amax)) throw std::invalid_argument("alpha_min must not exceed alpha_max");
    const double d = c.spacing();
    const double span = c.carrier_freq / c.lowest_freq() - c.carrier_freq / c.highest_freq();
    DistanceParams out;
    out.ratio = span > 0.0 ? (amax - amin) / span : 0.0;
    out.q = static_cast<int>(std::floor(out.ratio * d / 2.0));
    out.alpha_p = out.ratio - 2.0 * out.q / d;
    if (in.alpha_p_override) {
        const double s = *in.alpha_p_override + 2.0 * out.q / d;
        if (s < out.ratio - 1e-9)
            throw std::invalid_argument("alpha_p override below the distance coverage bound");
        out.alpha_p = *in.alpha_p_override;
    }
    const double s = out.alpha_p + 2.0 * out.q / d;
    const double lo = amax - c.carrier_freq / c.lowest_freq() * s;
    const double hi = amin - c.carrier_freq / c.highest_freq() * s;
    if (hi - lo < -1e-9) throw std::invalid_argument("empty alpha_t interval");
    out.alpha_t_interval = {lo, hi};
    out.alpha_t = 0.5 * (lo + hi);
    return out;
}

std::pair<int, int> pilot_count(const DesignInputs& in, double theta_p, int p1, double alpha_p, int q) {
    const auto& c = in.cfg;
    const double lead = theta_p + 2.0 * p1;
    if (!(lead > 0.0)) throw std::invalid_argument("degenerate design: theta_p + 2 p_1 must be positive");
    const double s = alpha_p + 2.0 * q / c.spacing();
    const double n = c.n_antennas;
    const double raw = s * n * n * kSpeedOfLight * c.highest_freq() /
                       (4.0 * lead * kFresnelBeta * kFresnelBeta * c.carrier_freq * c.carrier_freq);
    const int formula = std::max(1, static_cast<int>(std::ceil(raw - 1e-12)));
    return {in.k_override.value_or(formula), formula};
}

std::vector<double> intercepts_for_pilots(const DesignInputs& in, int K, double theta_p, int pM) {
    if (K < 1) throw std::invalid_argument("K must be >= 1");
    const double shift = in.cfg.carrier_freq / top_freq(in) * (theta_p + 2.0 * pM);
    std::vector<double> out(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) out[k] = 1.0 - 2.0 * k / K - shift;
    return out;
}

PilotPlan design(const DesignInputs& in) {
    in.validate();
    PilotPlan plan;
    const AngleParams ang = design_angle_params(in);
    plan.theta_p = ang.theta_p;
    plan.pM = ang.pM;
    if (ang.pM == 0 && ang.theta_p < 1e-3) plan.warnings.emplace_back("degenerate angle design: theta_p + 2 p_M is near zero");
    const double tt1 = first_intercept(in, plan.theta_p, plan.pM);
    plan.p1 = compute_p1(in, tt1, plan.theta_p);
    const DistanceParams dist = design_distance_params(in);
    plan.ratio = dist.ratio;
    plan.alpha_p = dist.alpha_p;
    plan.q = dist.q;
    plan.alpha_t_interval = dist.alpha_t_interval;
    plan.alpha_t = dist.alpha_t;
    const auto [K, formula] = pilot_count(in, plan.theta_p, plan.p1, plan.alpha_p, plan.q);
    plan.K = K;
    plan.K_formula = formula;
    if (in.k_override && *in.k_override < formula)
        plan.warnings.emplace_back("k_override below the formula value; coverage may fall short of gamma");
    plan.theta_t_list = intercepts_for_pilots(in, K, plan.theta_p, plan.pM);
    for (int k = 0; k < K; ++k) plan.ending_directions.push_back(1.0 - 2.0 * k / K);
    return plan;
}

double td_delay(const SystemConfig& cfg, int antenna, double theta_t, double alpha_t) {
    const double nd = cfg.antenna_index(antenna) * cfg.spacing();
    return (nd * theta_t - nd * nd * alpha_t) / kSpeedOfLight;
}

FixedTdNetwork fixed_td_network(const PilotPlan& plan, const SystemConfig& cfg) {
    FixedTdNetwork net;
    const int K = plan.K;
    net.delays.resize(cfg.n_antennas, K);
    for (int k = 0; k < K; ++k)
        for (int i = 0; i < cfg.n_antennas; ++i) net.delays(i, k) = td_delay(cfg, i, plan.theta_t_list.at(k), plan.alpha_t);
    net.selection_bits = K <= 1 ? 0 : static_cast<int>(std::ceil(std::log2(static_cast<double>(K)) - 1e-12));
    return net;
}

SteeringVector FixedTdNetwork::beam(int k, double freq) const {
    const auto n_t = delays.rows();
    const double scale = 1.0 / std::sqrt(static_cast<double>(n_t));
    SteeringVector v(n_t);
    for (Eigen::Index i = 0; i < n_t; ++i) v[i] = std::polar(scale, -2.0 * kPi * freq * delays(i, k));
    return v;
}

}  // namespace ddbs
