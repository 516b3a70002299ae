#include "ddbs/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace ddbs {

namespace {

void reject_unknown(const json& j, const std::set<std::string>& known, const char* what) {
    if (!j.is_object()) throw std::invalid_argument(std::string(what) + " must be a JSON object");
    for (const auto& [key, value] : j.items())
        if (!known.contains(key)) throw std::invalid_argument(std::string("unknown key '") + key + "' in " + what);
}

template <typename T>
void read_opt(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

std::pair<double, double> read_pair(const json& j, const char* key) {
    const json& v = j.at(key);
    if (!v.is_array() || v.size() != 2) throw std::invalid_argument(std::string(key) + " must be a two-element array");
    return {v[0].get<double>(), v[1].get<double>()};
}

std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

SystemConfig preset(const std::string& name) {
    if (name == "config_a") return config_a();
    if (name == "main") return main_config();
    if (name == "desk") return desk_config();
    throw std::invalid_argument("unknown preset '" + name + "' (expected config_a, main or desk)");
}

}  // namespace

void to_json(json& j, const SystemConfig& c) {
    j = json{{"n_antennas", c.n_antennas},
             {"carrier_freq", c.carrier_freq},
             {"bandwidth", c.bandwidth},
             {"n_subcarriers", c.n_subcarriers},
             {"antenna_spacing", c.spacing()},
             {"angle_range", {c.angle_range.first, c.angle_range.second}},
             {"distance_range", {c.distance_range.first, c.distance_range.second}}};
}

void from_json(const json& j, SystemConfig& c) {
    reject_unknown(j,
                   {"preset", "n_antennas", "carrier_freq", "bandwidth", "n_subcarriers", "antenna_spacing", "angle_range",
                    "distance_range"},
                   "config");
    if (j.contains("preset")) c = preset(j.at("preset").get<std::string>());
    read_opt(j, "n_antennas", c.n_antennas);
    read_opt(j, "carrier_freq", c.carrier_freq);
    read_opt(j, "bandwidth", c.bandwidth);
    read_opt(j, "n_subcarriers", c.n_subcarriers);
    read_opt(j, "antenna_spacing", c.antenna_spacing);
    if (j.contains("angle_range")) c.angle_range = read_pair(j, "angle_range");
    if (j.contains("distance_range")) c.distance_range = read_pair(j, "distance_range");
    c.validate();
}

void to_json(json& j, const DesignInputs& d) {
    j = json{{"cfg", d.cfg}, {"gamma", d.gamma}, {"alpha_min", d.a_min()}, {"alpha_max", d.a_max()}};
    if (d.k_override) j["k_override"] = *d.k_override;
    if (d.alpha_p_override) j["alpha_p_override"] = *d.alpha_p_override;
}

void from_json(const json& j, DesignInputs& d) {
    reject_unknown(j, {"cfg", "gamma", "alpha_min", "alpha_max", "k_override", "alpha_p_override"}, "design inputs");
    if (j.contains("cfg")) d.cfg = j.at("cfg").get<SystemConfig>();
    read_opt(j, "gamma", d.gamma);
    if (j.contains("alpha_min")) d.alpha_min = j.at("alpha_min").get<double>();
    if (j.contains("alpha_max")) d.alpha_max = j.at("alpha_max").get<double>();
    if (j.contains("k_override") && !j.at("k_override").is_null()) d.k_override = j.at("k_override").get<int>();
    if (j.contains("alpha_p_override") && !j.at("alpha_p_override").is_null())
        d.alpha_p_override = j.at("alpha_p_override").get<double>();
    d.validate();
}

void to_json(json& j, const PilotPlan& p) {
    j = json{{"theta_p", p.theta_p},
             {"theta_t_list", p.theta_t_list},
             {"alpha_p", p.alpha_p},
             {"alpha_t", p.alpha_t},
             {"alpha_t_interval", {p.alpha_t_interval.first, p.alpha_t_interval.second}},
             {"ratio", p.ratio},
             {"p1", p.p1},
             {"pM", p.pM},
             {"q", p.q},
             {"K", p.K},
             {"K_formula", p.K_formula},
             {"ending_directions", p.ending_directions},
             {"warnings", p.warnings}};
}

void from_json(const json& j, PilotPlan& p) {
    p.theta_p = j.at("theta_p").get<double>();
    p.theta_t_list = j.at("theta_t_list").get<std::vector<double>>();
    p.alpha_p = j.at("alpha_p").get<double>();
    p.alpha_t = j.at("alpha_t").get<double>();
    if (j.contains("alpha_t_interval")) p.alpha_t_interval = read_pair(j, "alpha_t_interval");
    read_opt(j, "ratio", p.ratio);
    p.p1 = j.at("p1").get<int>();
    p.pM = j.at("pM").get<int>();
    p.q = j.at("q").get<int>();
    p.K = j.at("K").get<int>();
    read_opt(j, "K_formula", p.K_formula);
    read_opt(j, "ending_directions", p.ending_directions);
    read_opt(j, "warnings", p.warnings);
    if (p.K < 1 || static_cast<int>(p.theta_t_list.size()) != p.K)
        throw std::invalid_argument("plan: theta_t_list must hold K entries");
}

void to_json(json& j, const TrainingEstimate& e) {
    j = json{{"theta_hat", e.theta_hat},
             {"alpha_hat", e.alpha_hat},
             {"r_hat", e.alpha_hat > 0.0 ? json((1.0 - e.theta_hat * e.theta_hat) / (2.0 * e.alpha_hat)) : json(nullptr)},
             {"scheme", e.scheme},
             {"pilots_used", e.pilots_used},
             {"clamped", e.clamped},
             {"fallback", e.fallback}};
    if (e.m_hat > 0) j["selected"] = {{"m", e.m_hat}, {"k", e.k_hat}};
    if (e.codeword >= 0) j["selected"] = {{"codeword", e.codeword}};
}

void to_json(json& j, const ExperimentSpec& s) {
    std::vector<std::string> names;
    for (const Scheme sc : s.schemes) names.emplace_back(to_string(sc));
    json design = s.design;
    design.erase("cfg");
    j = json{{"cfg", s.cfg},
             {"design", design},
             {"schemes", names},
             {"sweep_axis", std::string(to_string(s.axis))},
             {"axis_values", s.axis_values},
             {"n_trials", s.n_trials},
             {"master_seed", s.master_seed},
             {"bank_dims", {s.bank_L, s.bank_S}},
             {"rainbow_S", s.rainbow_S},
             {"snr_db", s.snr_db},
             {"pilot_cap", s.pilot_cap ? json(*s.pilot_cap) : json(nullptr)}};
}

void from_json(const json& j, ExperimentSpec& s) {
    reject_unknown(j,
                   {"preset", "cfg", "design", "schemes", "sweep_axis", "axis_values", "n_trials", "master_seed", "bank_dims",
                    "rainbow_S", "snr_db", "pilot_cap", "threads"},
                   "experiment spec");
    if (j.contains("preset")) {
        const auto name = j.at("preset").get<std::string>();
        if (name == "desk") s = desk_spec();
        else if (name == "full") s = full_scale_spec();
        else throw std::invalid_argument("unknown experiment preset '" + name + "' (expected desk or full)");
    }
    if (j.contains("cfg")) s.cfg = j.at("cfg").get<SystemConfig>();
    if (j.contains("design")) {
        json d = j.at("design");
        if (d.contains("cfg")) throw std::invalid_argument("design must not carry its own cfg inside an experiment spec");
        d["cfg"] = s.cfg;
        s.design = d.get<DesignInputs>();
    }
    s.design.cfg = s.cfg;
    if (j.contains("schemes")) {
        s.schemes.clear();
        for (const auto& n : j.at("schemes")) s.schemes.push_back(scheme_from_string(n.get<std::string>()));
    }
    if (j.contains("sweep_axis")) s.axis = axis_from_string(j.at("sweep_axis").get<std::string>());
    read_opt(j, "axis_values", s.axis_values);
    read_opt(j, "n_trials", s.n_trials);
    read_opt(j, "master_seed", s.master_seed);
    if (j.contains("bank_dims")) {
        const auto [L, S] = read_pair(j, "bank_dims");
        s.bank_L = static_cast<int>(L);
        s.bank_S = static_cast<int>(S);
    }
    read_opt(j, "rainbow_S", s.rainbow_S);
    read_opt(j, "snr_db", s.snr_db);
    if (j.contains("pilot_cap")) {
        if (j.at("pilot_cap").is_null()) s.pilot_cap.reset();
        else s.pilot_cap = j.at("pilot_cap").get<long>();
    }
    read_opt(j, "threads", s.threads);
    s.validate();
}

void to_json(json& j, const SweepResult& r) { j = sweep_summary(r); }

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open '" + path + "'");
    return json::parse(in);
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << text;
}

std::string plan_summary(const PilotPlan& p, const SystemConfig& cfg) {
    std::ostringstream os;
    os << "Pilot plan: N_t=" << cfg.n_antennas << ", f_c=" << cfg.carrier_freq / 1e9 << " GHz, B=" << cfg.bandwidth / 1e9
       << " GHz, M=" << cfg.n_subcarriers << "\n";
    os << "  angle:    theta_p' = " << fmt("%.6f", p.theta_p) << ", p_M = " << p.pM << ", p_1 = " << p.p1 << "\n";
    os << "  distance: ratio = " << fmt("%.6f", p.ratio) << ", alpha_p' = " << fmt("%.6f", p.alpha_p) << ", q = " << p.q
       << ", alpha_t' = " << fmt("%.6f", p.alpha_t) << " in [" << fmt("%.6f", p.alpha_t_interval.first) << ", "
       << fmt("%.6f", p.alpha_t_interval.second) << "]\n";
    os << "  pilots:   K = " << p.K << " (formula " << p.K_formula << ")\n";
    for (int k = 0; k < p.K; ++k)
        os << "    k=" << k + 1 << ": theta_t' = " << fmt("%.6f", p.theta_t_list[k])
           << ", ending direction = " << fmt("%.6f", p.ending_directions[k]) << "\n";
    for (const auto& w : p.warnings) os << "  warning: " << w << "\n";
    return os.str();
}

std::string delays_csv(const FixedTdNetwork& net) {
    std::string out = "antenna";
    for (Eigen::Index k = 0; k < net.delays.cols(); ++k) out += ",pilot_" + std::to_string(k + 1);
    out += "\n";
    for (Eigen::Index i = 0; i < net.delays.rows(); ++i) {
        out += std::to_string(i);
        for (Eigen::Index k = 0; k < net.delays.cols(); ++k) out += "," + fmt("%.16e", net.delays(i, k));
        out += "\n";
    }
    return out;
}

namespace {
constexpr const char* kPatternHeader = "k,m,freq_hz,theta,alpha,r_m,far_field";
}

std::string pattern_csv(const std::vector<PatternRow>& rows) {
    std::string out = std::string(kPatternHeader) + "\n";
    for (const auto& r : rows) {
        out += std::to_string(r.k) + "," + std::to_string(r.m) + "," + fmt("%.17g", r.freq) + "," + fmt("%.17g", r.theta) +
               "," + fmt("%.17g", r.alpha) + "," + (r.far_field ? std::string() : fmt("%.17g", r.r)) + "," +
               (r.far_field ? "1" : "0") + "\n";
    }
    return out;
}

std::vector<PatternRow> parse_pattern_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != kPatternHeader) throw std::invalid_argument("pattern CSV: bad header");
    std::vector<PatternRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) f.push_back(cell);
        if (line.back() == ',') f.emplace_back();
        if (f.size() != 7) throw std::invalid_argument("pattern CSV: expected 7 fields in '" + line + "'");
        PatternRow r;
        r.k = std::stoi(f[0]);
        r.m = std::stoi(f[1]);
        r.freq = std::stod(f[2]);
        r.theta = std::stod(f[3]);
        r.alpha = std::stod(f[4]);
        r.far_field = f[6] == "1";
        r.r = f[5].empty() ? 0.0 : std::stod(f[5]);
        rows.push_back(r);
    }
    return rows;
}

std::string sweep_csv(const SweepResult& r) {
    std::string out = "scheme," + std::string(to_string(r.axis)) + ",mean_rate,std_error,pilots_used,n_trials,fallbacks\n";
    for (const auto& p : r.points) {
        out += std::string(to_string(p.scheme)) + "," + fmt("%.17g", p.axis_value) + "," + fmt("%.17g", p.mean_rate) + "," +
               fmt("%.17g", p.std_error) + "," + std::to_string(p.pilots_used) + "," + std::to_string(p.rates.size()) +
               "," + std::to_string(p.fallbacks) + "\n";
    }
    return out;
}

json sweep_summary(const SweepResult& r) {
    json pts = json::array();
    for (const auto& p : r.points)
        pts.push_back({{"scheme", std::string(to_string(p.scheme))},
                       {"axis_value", p.axis_value},
                       {"mean_rate", p.mean_rate},
                       {"std_error", p.std_error},
                       {"pilots_used", p.pilots_used},
                       {"n_trials", p.rates.size()},
                       {"fallbacks", p.fallbacks}});
    return json{{"sweep_axis", std::string(to_string(r.axis))},
                {"seed", r.seed},
                {"spec_hash", r.spec_hash},
                {"timestamp", r.timestamp},
                {"plan", r.plan},
                {"points", pts}};
}

}  // namespace ddbs
