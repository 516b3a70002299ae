#include "ddbs/harness.hpp"
#include "ddbs/io.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace ddbs {

namespace {

constexpr std::pair<Scheme, std::string_view> kSchemeNames[] = {
    {Scheme::perfect_csi, "perfect_csi"}, {Scheme::exhaustive, "exhaustive"}, {Scheme::match_filter, "match_filter"},
    {Scheme::ongrid, "ongrid"},           {Scheme::aux_pair, "aux_pair"},     {Scheme::nf_rainbow, "nf_rainbow"},
    {Scheme::ff_rainbow, "ff_rainbow"},
};

constexpr std::pair<SweepAxis, std::string_view> kAxisNames[] = {
    {SweepAxis::snr_db, "snr_db"}, {SweepAxis::overhead, "overhead"}, {SweepAxis::distance_m, "distance_m"}};

SystemConfig make_config(int n, double fc, double b, int m) {
    SystemConfig c;
    c.n_antennas = n;
    c.carrier_freq = fc;
    c.bandwidth = b;
    c.n_subcarriers = m;
    return c;
}

enum StreamTag : std::uint64_t { kUserStream = 1, kPilotStream, kExhaustiveStream, kNfRainbowStream, kFfRainbowStream };

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 1469598103934665603ull;
    for (const unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

}  // namespace

std::string_view to_string(Scheme s) {
    for (const auto& [k, v] : kSchemeNames)
        if (k == s) return v;
    return "unknown";
}

std::string_view to_string(SweepAxis a) {
    for (const auto& [k, v] : kAxisNames)
        if (k == a) return v;
    return "unknown";
}

Scheme scheme_from_string(std::string_view s) {
    for (const auto& [k, v] : kSchemeNames)
        if (v == s) return k;
    throw std::invalid_argument("unknown scheme '" + std::string(s) + "'");
}

SweepAxis axis_from_string(std::string_view s) {
    for (const auto& [k, v] : kAxisNames)
        if (v == s) return k;
    throw std::invalid_argument("unknown sweep axis '" + std::string(s) + "'");
}

std::vector<Scheme> all_schemes() {
    std::vector<Scheme> out;
    for (const auto& [k, v] : kSchemeNames) out.push_back(k);
    return out;
}

SystemConfig config_a() { return make_config(128, 10e9, 2e9, 512); }
SystemConfig main_config() { return make_config(256, 30e9, 5e9, 1024); }
SystemConfig desk_config() { return make_config(64, 1.875e9, 312.5e6, 256); }

double rate_metric(const SystemConfig& cfg, double theta0, double r0, const TrainingEstimate& est, double snr,
                   ResponseModel model) {
    const PolarLocation user = PolarLocation::from_distance(theta0, r0);
    double sum = 0.0;
    for (int m = 1; m <= cfg.n_subcarriers; ++m) {
        const double f = subcarrier_freq(cfg, m);
        const SteeringVector v =
            model == ResponseModel::exact ? exact_steering(cfg, theta0, r0, f) : approx_steering(cfg, user, f);
        const double g = std::abs(bilinear(v, serve_beamformer(est, cfg, m)));
        sum += std::log2(1.0 + snr * g * g);
    }
    return sum / cfg.n_subcarriers;
}

double rate_metric_location(const SystemConfig& cfg, const PolarLocation& user, const TrainingEstimate& est, double snr) {
    double sum = 0.0;
    for (int m = 1; m <= cfg.n_subcarriers; ++m) {
        const double f = subcarrier_freq(cfg, m);
        const double g = std::abs(bilinear(approx_steering(cfg, user, f), serve_beamformer(est, cfg, m)));
        sum += std::log2(1.0 + snr * g * g);
    }
    return sum / cfg.n_subcarriers;
}

double perfect_csi_rate(const SystemConfig& cfg, const Channel& ch, double theta0, double r0, double snr) {
    double sum = 0.0;
    for (int m = 1; m <= cfg.n_subcarriers; ++m) {
        const double f = subcarrier_freq(cfg, m);
        const double g = std::abs(bilinear(exact_steering(cfg, theta0, r0, f), perfect_csi_beamformer(ch, m)));
        sum += std::log2(1.0 + snr * g * g);
    }
    return sum / cfg.n_subcarriers;
}

void ExperimentSpec::validate() const {
    cfg.validate();
    if (n_trials < 1) throw std::invalid_argument("n_trials must be >= 1");
    if (schemes.empty()) throw std::invalid_argument("at least one scheme is required");
    if (axis_values.empty()) throw std::invalid_argument("axis_values must be non-empty");
    if (!std::is_sorted(axis_values.begin(), axis_values.end()))
        throw std::invalid_argument("axis_values must be sorted");
    if (bank_L < 1 || bank_S < 1 || rainbow_S < 1) throw std::invalid_argument("grid dimensions must be >= 1");
    if (axis == SweepAxis::overhead && axis_values.front() < 1.0)
        throw std::invalid_argument("overhead axis values must be >= 1");
    if (axis == SweepAxis::distance_m && !(axis_values.front() > 0.0))
        throw std::invalid_argument("distance axis values must be positive");
    if (pilot_cap && *pilot_cap < 1) throw std::invalid_argument("pilot_cap must be >= 1");
}

ExperimentSpec desk_spec() {
    ExperimentSpec s;
    s.cfg = desk_config();
    s.design.cfg = s.cfg;
    s.design.gamma = 0.95;
    s.design.k_override = 3;
    s.schemes = all_schemes();
    s.axis = SweepAxis::snr_db;
    s.axis_values = {5.0, 10.0, 15.0, 20.0};
    s.n_trials = 200;
    s.bank_L = 256;
    s.bank_S = 10;
    s.rainbow_S = 10;
    return s;
}

ExperimentSpec full_scale_spec() {
    ExperimentSpec s = desk_spec();
    s.cfg = main_config();
    s.design.cfg = s.cfg;
    s.n_trials = 1000;
    s.bank_L = 1024;
    return s;
}

const SweepPoint& SweepResult::at(Scheme s, double axis_value) const {
    for (const auto& p : points)
        if (p.scheme == s && p.axis_value == axis_value) return p;
    throw std::out_of_range("no sweep point for " + std::string(to_string(s)));
}

UserDraw draw_user(const SystemConfig& cfg, Rng& rng) {
    std::uniform_real_distribution<double> ang(std::asin(cfg.angle_range.first), std::asin(cfg.angle_range.second));
    std::uniform_real_distribution<double> dist(cfg.distance_range.first, cfg.distance_range.second);
    UserDraw u;
    u.theta = std::sin(ang(rng));
    u.r = dist(rng);
    return u;
}

namespace {

bool is_proposed(Scheme s) { return s == Scheme::ongrid || s == Scheme::aux_pair || s == Scheme::match_filter; }

// Trial-independent state shared by every trial of a scheme set.
struct SchemeTools {
    const PilotPlan& plan;
    std::optional<PilotBeams> beams;
    std::optional<MatchFilterBank> bank;
    std::optional<PolarCodebook> codebook;

    SchemeTools(const ExperimentSpec& spec, const PilotPlan& p, const std::vector<Scheme>& schemes) : plan(p) {
        auto uses = [&](Scheme s) { return std::find(schemes.begin(), schemes.end(), s) != schemes.end(); };
        if (std::any_of(schemes.begin(), schemes.end(), is_proposed)) beams.emplace(plan, spec.cfg);
        if (uses(Scheme::match_filter)) bank.emplace(build_match_filter_bank(plan, spec.cfg, spec.bank_L, spec.bank_S));
        if (uses(Scheme::exhaustive)) codebook.emplace(spec.cfg, spec.bank_L, spec.bank_S);
    }
};

TrialResult evaluate_scheme(const ExperimentSpec& spec, Scheme sch, const SchemeTools& tools, const Channel& ch,
                            const UserDraw& user, double snr, const ObservationGrid* obs, long budget, std::size_t t) {
    const SystemConfig& cfg = spec.cfg;
    TrialResult out;
    if (sch == Scheme::perfect_csi) {
        out.estimate.scheme = "perfect_csi";
        out.estimate.theta_hat = user.theta;
        out.estimate.alpha_hat = PolarLocation::from_distance(user.theta, user.r).alpha;
        out.rate = perfect_csi_rate(cfg, ch, user.theta, user.r, snr);
        return out;
    }
    TrainingEstimate& est = out.estimate;
    switch (sch) {
        case Scheme::exhaustive: {
            Rng r = make_rng(spec.master_seed, t, kExhaustiveStream);
            est = exhaustive_polar_train(ch, *tools.codebook, cfg, snr, r, budget);
            break;
        }
        case Scheme::match_filter: est = match_filter_train(*obs, *tools.bank); break;
        case Scheme::ongrid: est = ongrid_train(*obs, tools.plan, cfg); break;
        case Scheme::aux_pair: est = aux_pair_train(*obs, tools.plan, cfg); break;
        case Scheme::nf_rainbow: {
            Rng r = make_rng(spec.master_seed, t, kNfRainbowStream);
            const int rings = budget < 0 ? -1 : static_cast<int>(std::min<long>(budget, spec.rainbow_S));
            est = nearfield_rainbow_train(ch, cfg, spec.rainbow_S, snr, r, rings);
            break;
        }
        case Scheme::ff_rainbow: {
            Rng r = make_rng(spec.master_seed, t, kFfRainbowStream);
            est = farfield_rainbow_train(ch, cfg, snr, r);
            break;
        }
        case Scheme::perfect_csi: break;
    }
    out.rate = rate_metric(cfg, user.theta, user.r, est, snr);
    return out;
}

}  // namespace

TrialResult run_single_trial(const ExperimentSpec& spec, Scheme scheme, double theta, double r, double snr_db,
                             std::uint64_t trial) {
    spec.validate();
    if (theta < -1.0 || theta > 1.0) throw std::invalid_argument("user sine-angle outside [-1, 1]");
    if (!(r > 0.0)) throw std::invalid_argument("user distance must be positive");
    ExperimentSpec local = spec;
    local.design.cfg = spec.cfg;
    const PilotPlan plan = design(local.design);
    const SchemeTools tools(local, plan, {scheme});
    const double snr = std::pow(10.0, snr_db / 10.0);
    const long budget = spec.pilot_cap.value_or(-1);
    const Channel ch = los_channel(spec.cfg, theta, r);
    std::optional<ObservationGrid> obs;
    if (tools.beams) {
        Rng prng = make_rng(spec.master_seed, trial, kPilotStream);
        const int k_used = budget < 0 ? plan.K : static_cast<int>(std::min<long>(budget, plan.K));
        obs = simulate_observations(ch, *tools.beams, spec.cfg, snr, prng, k_used);
    }
    return evaluate_scheme(local, scheme, tools, ch, {theta, r}, snr, obs ? &*obs : nullptr, budget, trial);
}

SweepResult run_sweep(const ExperimentSpec& spec_in) {
    ExperimentSpec spec = spec_in;
    spec.design.cfg = spec.cfg;
    spec.validate();

    SweepResult res;
    res.axis = spec.axis;
    res.seed = spec.master_seed;
    res.timestamp = utc_timestamp();
    res.spec_hash = fnv1a_hex(json(spec).dump());
    res.plan = design(spec.design);
    const SystemConfig& cfg = spec.cfg;
    const PilotPlan& plan = res.plan;

    const SchemeTools tools(spec, plan, spec.schemes);
    const bool proposed = tools.beams.has_value();

    const std::size_t n_axis = spec.axis_values.size();
    const std::size_t n_sch = spec.schemes.size();
    const auto n_tr = static_cast<std::size_t>(spec.n_trials);
    struct Cell {
        double rate = 0.0;
        int pilots = 0;
        bool fallback = false;
    };
    std::vector<Cell> cells(n_axis * n_sch * n_tr);
    auto cell = [&](std::size_t v, std::size_t s, std::size_t t) -> Cell& { return cells[(v * n_sch + s) * n_tr + t]; };

    auto run_item = [&](std::size_t v, std::size_t t) {
        const double value = spec.axis_values[v];
        const double snr_db = spec.axis == SweepAxis::snr_db ? value : spec.snr_db;
        const double snr = std::pow(10.0, snr_db / 10.0);
        long budget = spec.pilot_cap.value_or(-1);
        if (spec.axis == SweepAxis::overhead) budget = static_cast<long>(std::floor(value));
        Rng urng = make_rng(spec.master_seed, t, kUserStream);
        UserDraw user = draw_user(cfg, urng);
        if (spec.axis == SweepAxis::distance_m) user.r = value;
        const Channel ch = los_channel(cfg, user.theta, user.r);

        std::optional<ObservationGrid> obs;
        if (proposed) {
            Rng prng = make_rng(spec.master_seed, t, kPilotStream);
            const int k_used = budget < 0 ? plan.K : static_cast<int>(std::min<long>(budget, plan.K));
            obs = simulate_observations(ch, *tools.beams, cfg, snr, prng, k_used);
        }
        for (std::size_t s = 0; s < n_sch; ++s) {
            Cell& c = cell(v, s, t);
            const TrialResult r = evaluate_scheme(spec, spec.schemes[s], tools, ch, user, snr, obs ? &*obs : nullptr, budget, t);
            c.rate = r.rate;
            c.pilots = r.estimate.pilots_used;
            c.fallback = r.estimate.fallback;
        }
    };

    const std::size_t total = n_axis * n_tr;
    unsigned workers = spec.threads > 0 ? static_cast<unsigned>(spec.threads) : std::thread::hardware_concurrency();
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(total)));
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= total) return;
            try {
                run_item(i / n_tr, i % n_tr);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mu);
                if (!failure) failure = std::current_exception();
                next.store(total);
                return;
            }
        }
    };
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);

    for (std::size_t v = 0; v < n_axis; ++v) {
        for (std::size_t s = 0; s < n_sch; ++s) {
            SweepPoint p;
            p.scheme = spec.schemes[s];
            p.axis_value = spec.axis_values[v];
            p.rates.reserve(n_tr);
            double sum = 0.0;
            for (std::size_t t = 0; t < n_tr; ++t) {
                const Cell& c = cell(v, s, t);
                p.rates.push_back(c.rate);
                sum += c.rate;
                p.pilots_used = std::max(p.pilots_used, c.pilots);
                p.fallbacks += c.fallback ? 1 : 0;
            }
            p.mean_rate = sum / static_cast<double>(n_tr);
            if (n_tr > 1) {
                double ss = 0.0;
                for (const double r : p.rates) ss += (r - p.mean_rate) * (r - p.mean_rate);
                p.std_error = std::sqrt(ss / static_cast<double>(n_tr - 1)) / std::sqrt(static_cast<double>(n_tr));
            }
            res.points.push_back(std::move(p));
        }
    }
    return res;
}

namespace {
// Pattern dumps report the most recently entered strip even outside the service range.
FocusOptions pattern_rule() {
    FocusOptions o;
    o.prefer_angle_range = false;
    return o;
}
}  // namespace

std::vector<PatternRow> dump_beam_pattern(const PilotPlan& plan, const SystemConfig& cfg) {
    std::vector<PatternRow> rows;
    for (int k = 0; k < plan.K; ++k) {
        const TdPsParams prm = plan.pilot(k);
        for (int m = 1; m <= cfg.n_subcarriers; ++m) {
            BeamFocus f;
            try {
                f = focus_at_subcarrier(prm, cfg, m, pattern_rule());
            } catch (const InfeasibleFocus&) {
                continue;
            }
            PatternRow row;
            row.k = k + 1;
            row.m = m;
            row.freq = f.freq;
            row.theta = f.theta;
            row.alpha = f.alpha;
            row.far_field = !(f.alpha > 0.0);
            row.r = row.far_field ? 0.0 : (1.0 - f.theta * f.theta) / (2.0 * f.alpha);
            rows.push_back(row);
        }
    }
    return rows;
}

std::vector<int> strip_indices(const PilotPlan& plan, const SystemConfig& cfg, int k) {
    std::vector<int> out;
    const TdPsParams prm = plan.pilot(k);
    for (int m = 1; m <= cfg.n_subcarriers; ++m) {
        try {
            const int p = focus_at_subcarrier(prm, cfg, m, pattern_rule()).p;
            if (out.empty() || out.back() != p) out.push_back(p);
        } catch (const InfeasibleFocus&) {
        }
    }
    return out;
}

double coverage_fraction(const PilotPlan& plan, const SystemConfig& cfg, int n_theta, int n_alpha) {
    if (n_theta < 1 || n_alpha < 1) throw std::invalid_argument("coverage grid must be non-empty");
    const double threshold = 1.0 / std::sqrt(2.0);
    const double kc = wavenumber(cfg.carrier_freq);
    const auto [lo, hi] = cfg.angle_range;
    Eigen::VectorXd thetas(n_theta), alphas(n_alpha);
    for (int i = 0; i < n_theta; ++i) thetas[i] = cell_center(lo, hi, i, n_theta);
    for (int j = 0; j < n_alpha; ++j) alphas[j] = cell_center(cfg.alpha_min(), cfg.alpha_max(), j, n_alpha);
    Eigen::MatrixXd best = Eigen::MatrixXd::Zero(n_theta, n_alpha);
    for (int k = 0; k < plan.K; ++k) {
        const TdPsParams prm = plan.pilot(k);
        for (int m = 1; m <= cfg.n_subcarriers; ++m) {
            const double km = wavenumber(subcarrier_freq(cfg, m));
            const Eigen::VectorXd x = (km * thetas).array() - (km * prm.theta_t + kc * prm.theta_p);
            const Eigen::VectorXd y = (km * alphas).array() - (km * prm.alpha_t + kc * prm.alpha_p);
            best = best.cwiseMax((linear_phase_matrix(cfg, x) * quadratic_phase_matrix(cfg, y)).cwiseAbs());
        }
    }
    const long covered_total = (best.array() >= threshold).count();
    return static_cast<double>(covered_total) / (static_cast<double>(n_theta) * n_alpha);
}

}  // namespace ddbs
