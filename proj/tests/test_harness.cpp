#include "ddbs/harness.hpp"
#include "ddbs/io.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using namespace ddbs;

namespace {
ExperimentSpec small_spec(std::vector<Scheme> schemes, std::vector<double> snrs, int trials) {
    ExperimentSpec s = desk_spec();
    s.schemes = std::move(schemes);
    s.axis_values = std::move(snrs);
    s.n_trials = trials;
    s.bank_L = 64;
    return s;
}
}  // namespace

TEST_CASE("scheme and axis names round trip") {
    for (Scheme s : all_schemes()) CHECK(scheme_from_string(to_string(s)) == s);
    for (SweepAxis a : {SweepAxis::snr_db, SweepAxis::overhead, SweepAxis::distance_m}) CHECK(axis_from_string(to_string(a)) == a);
    CHECK_THROWS_AS((void)scheme_from_string("nope"), std::invalid_argument);
}

TEST_CASE("user draws stay in the service region") {
    const SystemConfig c = desk_config();
    Rng rng = make_rng(1, 0, 1);
    for (int i = 0; i < 1000; ++i) {
        const UserDraw u = draw_user(c, rng);
        CHECK(u.theta >= c.angle_range.first);
        CHECK(u.theta <= c.angle_range.second);
        CHECK(u.r >= c.distance_range.first);
        CHECK(u.r <= c.distance_range.second);
    }
}

TEST_CASE("rate metric of a perfect estimate equals the matched-beam rate") {
    const SystemConfig c = desk_config();
    const double theta = 0.25, r = 30.0, s = 10.0;
    TrainingEstimate est;
    est.theta_hat = theta;
    est.alpha_hat = PolarLocation::from_distance(theta, r).alpha;
    const double approx = rate_metric(c, theta, r, est, s, ResponseModel::approximate);
    CHECK(approx == doctest::Approx(std::log2(1 + s)).epsilon(1e-12));
    const Channel ch = los_channel(c, theta, r);
    CHECK(perfect_csi_rate(c, ch, theta, r, s) == doctest::Approx(std::log2(1 + s)).epsilon(1e-12));
    CHECK(rate_metric(c, theta, r, est, s) <= perfect_csi_rate(c, ch, theta, r, s) + 1e-12);
}

TEST_CASE("sweeps are deterministic and thread-count independent") {
    ExperimentSpec s = small_spec({Scheme::ongrid, Scheme::match_filter, Scheme::ff_rainbow}, {10.0}, 12);
    s.threads = 1;
    const SweepResult a = run_sweep(s);
    s.threads = 3;
    const SweepResult b = run_sweep(s);
    for (Scheme sc : s.schemes) CHECK(a.at(sc, 10.0).rates == b.at(sc, 10.0).rates);
    CHECK(a.spec_hash == b.spec_hash);
    s.master_seed = 2;
    CHECK(run_sweep(s).at(Scheme::ongrid, 10.0).rates != a.at(Scheme::ongrid, 10.0).rates);
}

TEST_CASE("rates grow with SNR") {
    const ExperimentSpec s = small_spec({Scheme::perfect_csi, Scheme::ongrid, Scheme::match_filter}, {0.0, 10.0, 20.0}, 60);
    const SweepResult r = run_sweep(s);
    for (Scheme sc : s.schemes) {
        CHECK(r.at(sc, 0.0).mean_rate < r.at(sc, 10.0).mean_rate);
        CHECK(r.at(sc, 10.0).mean_rate < r.at(sc, 20.0).mean_rate);
    }
}

TEST_CASE("standard error shrinks as one over root n") {
    const SweepResult a = run_sweep(small_spec({Scheme::ongrid}, {10.0}, 100));
    const SweepResult b = run_sweep(small_spec({Scheme::ongrid}, {10.0}, 400));
    const auto& pa = a.at(Scheme::ongrid, 10.0);
    const auto& pb = b.at(Scheme::ongrid, 10.0);
    CHECK(pa.rates.size() == 100);
    CHECK(pa.std_error / pb.std_error == doctest::Approx(2.0).epsilon(0.25));
    // Common random numbers: the first 100 trials coincide.
    for (int i = 0; i < 100; ++i) CHECK(pa.rates[i] == pb.rates[i]);
}

TEST_CASE("pilot overheads per scheme") {
    ExperimentSpec s = desk_spec();
    s.schemes = {Scheme::exhaustive, Scheme::nf_rainbow, Scheme::ff_rainbow, Scheme::ongrid, Scheme::aux_pair,
                 Scheme::match_filter};
    s.axis_values = {15.0};
    s.n_trials = 1;
    s.bank_L = 64;
    const SweepResult r = run_sweep(s);
    CHECK(r.at(Scheme::exhaustive, 15.0).pilots_used == 64 * 10);
    CHECK(r.at(Scheme::nf_rainbow, 15.0).pilots_used == 10);
    CHECK(r.at(Scheme::ff_rainbow, 15.0).pilots_used == 1);
    CHECK(r.at(Scheme::ongrid, 15.0).pilots_used == 3);
    CHECK(r.at(Scheme::aux_pair, 15.0).pilots_used == 3);
    CHECK(r.at(Scheme::match_filter, 15.0).pilots_used == 3);
}

TEST_CASE("overhead axis caps each scheme at the budget") {
    ExperimentSpec s = desk_spec();
    s.schemes = {Scheme::ongrid, Scheme::nf_rainbow};
    s.axis = SweepAxis::overhead;
    s.axis_values = {1.0, 2.0, 5.0};
    s.n_trials = 4;
    const SweepResult r = run_sweep(s);
    CHECK(r.at(Scheme::ongrid, 1.0).pilots_used == 1);
    CHECK(r.at(Scheme::ongrid, 5.0).pilots_used == 3);
    CHECK(r.at(Scheme::nf_rainbow, 2.0).pilots_used == 2);
    CHECK(r.at(Scheme::nf_rainbow, 5.0).pilots_used == 5);
}

TEST_CASE("invalid specs are rejected") {
    ExperimentSpec s = desk_spec();
    s.n_trials = 0;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s = desk_spec();
    s.schemes.clear();
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s = desk_spec();
    s.axis_values.clear();
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("config A pattern: four strips per pilot and near-full coverage") {
    DesignInputs in;
    in.cfg = config_a();
    in.alpha_p_override = 0.5;
    in.k_override = 1;
    const PilotPlan one = design(in);
    const auto strips = strip_indices(one, in.cfg, 0);
    CHECK(std::set<int>(strips.begin(), strips.end()) == std::set<int>{12, 13, 14, 15});
    const auto rows = dump_beam_pattern(one, in.cfg);
    for (const auto& row : rows) {
        CHECK(row.theta >= -1.0);
        CHECK(row.theta <= 1.0);
    }
    CHECK(rows.size() <= static_cast<std::size_t>(in.cfg.n_subcarriers));
    in.k_override.reset();
    const PilotPlan two = design(in);
    REQUIRE(two.K == 2);
    CHECK(coverage_fraction(two, in.cfg, 200, 50) >= 0.97);
}
