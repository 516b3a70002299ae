#pragma once

#include "ddbs/array_model.hpp"
#include "ddbs/pilot_design.hpp"
#include "ddbs/training.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ddbs {

enum class Scheme { perfect_csi, exhaustive, match_filter, ongrid, aux_pair, nf_rainbow, ff_rainbow };
enum class SweepAxis { snr_db, overhead, distance_m };
enum class ResponseModel { exact, approximate };

[[nodiscard]] std::string_view to_string(Scheme s);
[[nodiscard]] std::string_view to_string(SweepAxis a);
[[nodiscard]] Scheme scheme_from_string(std::string_view s);
[[nodiscard]] SweepAxis axis_from_string(std::string_view s);
[[nodiscard]] std::vector<Scheme> all_schemes();

/// N_t = 128, f_c = 10 GHz, B = 2 GHz, M = 512.
[[nodiscard]] SystemConfig config_a();
/// N_t = 256, f_c = 30 GHz, B = 5 GHz, M = 1024.
[[nodiscard]] SystemConfig main_config();
/// N_t = 64, M = 256; carrier and bandwidth scaled so the design integers
/// and the distance design match main_config.
[[nodiscard]] SystemConfig desk_config();

/// R = (1/M) sum_m log2(1 + snr |v_m^T w_m|^2), with v_m the user response
/// (exact spherical or second-order) and w_m the serving beam.
[[nodiscard]] double rate_metric(const SystemConfig& cfg, double theta0, double r0, const TrainingEstimate& est, double snr,
                                 ResponseModel model = ResponseModel::exact);
[[nodiscard]] double rate_metric_location(const SystemConfig& cfg, const PolarLocation& user, const TrainingEstimate& est,
                                          double snr);
[[nodiscard]] double perfect_csi_rate(const SystemConfig& cfg, const Channel& ch, double theta0, double r0, double snr);

struct ExperimentSpec {
    SystemConfig cfg;
    DesignInputs design;
    std::vector<Scheme> schemes;
    SweepAxis axis = SweepAxis::snr_db;
    std::vector<double> axis_values;
    int n_trials = 200;
    std::uint64_t master_seed = 1;
    int bank_L = 256;
    int bank_S = 10;
    int rainbow_S = 10;
    double snr_db = 15.0;            // used when the axis is not snr_db
    std::optional<long> pilot_cap;   // budget for every scheme when the axis is not overhead
    int threads = 0;                 // 0: hardware concurrency

    void validate() const;
};

/// Desk-scale default: desk_config, K = 3, L = 256, S = 10, 200 trials.
[[nodiscard]] ExperimentSpec desk_spec();
/// main_config, K = 3, L = 1024, S = 10, 1000 trials.
[[nodiscard]] ExperimentSpec full_scale_spec();

struct SweepPoint {
    Scheme scheme = Scheme::ongrid;
    double axis_value = 0.0;
    double mean_rate = 0.0;
    double std_error = 0.0;
    int pilots_used = 0;
    int fallbacks = 0;
    std::vector<double> rates;  // per trial, in trial order
};

struct SweepResult {
    SweepAxis axis = SweepAxis::snr_db;
    std::vector<SweepPoint> points;
    std::string spec_hash;
    std::uint64_t seed = 0;
    std::string timestamp;
    PilotPlan plan;

    [[nodiscard]] const SweepPoint& at(Scheme s, double axis_value) const;
};

[[nodiscard]] SweepResult run_sweep(const ExperimentSpec& spec);

struct TrialResult {
    TrainingEstimate estimate;  // the user location itself for perfect_csi
    double rate = 0.0;
};

/// One trial for a fixed user, drawing noise from the same streams as trial
/// `trial` of run_sweep.
[[nodiscard]] TrialResult run_single_trial(const ExperimentSpec& spec, Scheme scheme, double theta, double r,
                                           double snr_db, std::uint64_t trial = 0);

struct UserDraw {
    double theta = 0.0;
    double r = 0.0;
};
/// Physical angle uniform over asin(angle_range), distance uniform over the range.
[[nodiscard]] UserDraw draw_user(const SystemConfig& cfg, Rng& rng);

struct PatternRow {
    int k = 1;
    int m = 1;
    double freq = 0.0;
    double theta = 0.0;
    double alpha = 0.0;
    double r = 0.0;
    bool far_field = false;
};

/// One row per (pilot, subcarrier) with a visible focus; the strip is the
/// most recently entered one, ignoring the service angle range.
[[nodiscard]] std::vector<PatternRow> dump_beam_pattern(const PilotPlan& plan, const SystemConfig& cfg);
/// Number of distinct strips (p values) of pilot k (0-based) across the band.
[[nodiscard]] std::vector<int> strip_indices(const PilotPlan& plan, const SystemConfig& cfg, int k);
/// Fraction of an n_theta x n_alpha cell-centred grid over the service region
/// where max over (m, k) of the array gain reaches 1/sqrt(2).
[[nodiscard]] double coverage_fraction(const PilotPlan& plan, const SystemConfig& cfg, int n_theta, int n_alpha);

}  // namespace ddbs
