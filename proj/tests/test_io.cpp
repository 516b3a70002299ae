#include "ddbs/harness.hpp"
#include "ddbs/io.hpp"

#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <regex>
#include <sstream>

using namespace ddbs;

TEST_CASE("config JSON round trip and presets") {
    SystemConfig c = config_a();
    c.antenna_spacing = 0.0151;
    const json j = c;
    const SystemConfig back = j.get<SystemConfig>();
    CHECK(back.n_antennas == c.n_antennas);
    CHECK(back.carrier_freq == c.carrier_freq);
    CHECK(back.bandwidth == c.bandwidth);
    CHECK(back.n_subcarriers == c.n_subcarriers);
    CHECK(back.antenna_spacing == c.antenna_spacing);
    CHECK(back.angle_range == c.angle_range);
    CHECK(back.distance_range == c.distance_range);

    const auto p = json::parse(R"({"preset": "main", "n_subcarriers": 64})").get<SystemConfig>();
    CHECK(p.n_antennas == 256);
    CHECK(p.n_subcarriers == 64);
}

TEST_CASE("config JSON rejects unknown keys and bad values") {
    CHECK_THROWS_AS(json::parse(R"({"n_antenas": 64})").get<SystemConfig>(), std::invalid_argument);
    CHECK_THROWS_AS(json::parse(R"({"n_antennas": -3})").get<SystemConfig>(), std::invalid_argument);
    CHECK_THROWS_AS(json::parse(R"({"preset": "nope"})").get<SystemConfig>(), std::invalid_argument);
    CHECK_THROWS(json::parse(R"({"n_antennas": "many"})").get<SystemConfig>());
}

TEST_CASE("design inputs and plan JSON round trip") {
    DesignInputs in;
    in.cfg = main_config();
    in.gamma = 0.95;
    in.k_override = 3;
    const DesignInputs back = json(in).get<DesignInputs>();
    CHECK(back.gamma == 0.95);
    CHECK(back.k_override == 3);
    const PilotPlan plan = design(in);
    const PilotPlan pb = json(plan).get<PilotPlan>();
    CHECK(pb.theta_t_list == plan.theta_t_list);
    CHECK(pb.alpha_t == plan.alpha_t);
    CHECK(pb.K == plan.K);
    CHECK(pb.q == plan.q);
    CHECK(plan_summary(plan, in.cfg).find("K = 3") != std::string::npos);
}

TEST_CASE("experiment spec JSON round trip") {
    ExperimentSpec s = desk_spec();
    s.n_trials = 17;
    s.schemes = {Scheme::ongrid, Scheme::exhaustive};
    const ExperimentSpec b = json(s).get<ExperimentSpec>();
    CHECK(b.n_trials == 17);
    CHECK(b.schemes == s.schemes);
    CHECK(b.axis_values == s.axis_values);
    CHECK(b.cfg.n_antennas == s.cfg.n_antennas);
    CHECK(json(b).dump() == json(s).dump());
}

TEST_CASE("delay CSV carries 17 significant digits") {
    DesignInputs in;
    in.cfg = main_config();
    in.gamma = 0.95;
    const PilotPlan plan = design(in);
    const FixedTdNetwork net = fixed_td_network(plan, in.cfg);
    const std::string csv = delays_csv(net);
    std::istringstream is(csv);
    std::string line;
    std::getline(is, line);
    CHECK(line.rfind("antenna,pilot_1", 0) == 0);
    const std::regex num(R"(-?\d\.\d{16}e[+-]\d{2,3})");
    int row = 0;
    while (std::getline(is, line)) {
        std::istringstream ls(line);
        std::string cell;
        std::getline(ls, cell, ',');
        CHECK(std::stoi(cell) == row);
        int col = 0;
        while (std::getline(ls, cell, ',')) {
            CHECK(std::regex_match(cell, num));
            CHECK(std::strtod(cell.c_str(), nullptr) == net.delays(row, col));
            ++col;
        }
        CHECK(col == plan.K);
        ++row;
    }
    CHECK(row == in.cfg.n_antennas);
}

TEST_CASE("beam pattern CSV round trip is byte identical") {
    DesignInputs in;
    in.cfg = config_a();
    in.alpha_p_override = 0.5;
    const PilotPlan plan = design(in);
    const auto rows = dump_beam_pattern(plan, in.cfg);
    const std::string a = pattern_csv(rows);
    const auto parsed = parse_pattern_csv(a);
    REQUIRE(parsed.size() == rows.size());
    CHECK(pattern_csv(parsed) == a);
    for (std::size_t i = 0; i < rows.size(); i += 97) {
        CHECK(parsed[i].theta == rows[i].theta);
        CHECK(parsed[i].alpha == rows[i].alpha);
        CHECK(parsed[i].far_field == rows[i].far_field);
    }
    // Far-field rows keep an empty distance cell.
    std::vector<PatternRow> ff{{1, 2, 1e10, 0.25, 0.0, 0.0, true}};
    const std::string t = pattern_csv(ff);
    CHECK(t.find(",,1\n") != std::string::npos);
    CHECK(pattern_csv(parse_pattern_csv(t)) == t);
    CHECK_THROWS_AS((void)parse_pattern_csv("k,m\n1,2\n"), std::invalid_argument);
}

TEST_CASE("sweep CSV and summary") {
    ExperimentSpec s = desk_spec();
    s.schemes = {Scheme::ongrid, Scheme::perfect_csi};
    s.axis_values = {5.0, 15.0};
    s.n_trials = 3;
    const SweepResult r = run_sweep(s);
    const std::string csv = sweep_csv(r);
    CHECK(csv.rfind("scheme,snr_db,mean_rate,std_error,pilots_used,n_trials,fallbacks\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
    const json sum = sweep_summary(r);
    CHECK(sum.at("seed") == 1);
    CHECK(sum.at("spec_hash").get<std::string>().size() == 16);
}
