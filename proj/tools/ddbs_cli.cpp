#include "ddbs/harness.hpp"
#include "ddbs/io.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>

using namespace ddbs;

namespace {

struct CommonFlags {
    std::optional<std::uint64_t> seed;
    std::optional<int> trials;
    std::string out;
    bool full_scale = false;
};

void add_common(CLI::App* app, CommonFlags& f) {
    app->add_option("--seed", f.seed, "Master RNG seed");
    app->add_option("--trials", f.trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
    app->add_option("--out", f.out, "Output path or prefix");
    app->add_flag("--full-scale", f.full_scale, "Use the full-scale configuration instead of the desk one");
}

int emit_error(const std::string& kind, const std::string& message, int code) {
    const json err = {{"error", {{"type", kind}, {"message", message}}}};
    std::cerr << err.dump() << std::endl;
    return code;
}

DesignInputs default_inputs(bool full_scale) {
    const ExperimentSpec s = full_scale ? full_scale_spec() : desk_spec();
    return s.design;
}

DesignInputs load_inputs(const std::string& path, bool full_scale) {
    if (path.empty()) return default_inputs(full_scale);
    json j = read_json_file(path);
    if (j.contains("theta_t_list")) throw std::invalid_argument("expected design inputs, got a pilot plan");
    return j.get<DesignInputs>();
}

void emit(const std::string& out, const std::string& suffix, const std::string& text) {
    if (out.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
    } else {
        write_text_file(out + suffix, text);
    }
}

int run_design(const std::string& input, const CommonFlags& f) {
    const DesignInputs in = load_inputs(input, f.full_scale);
    const PilotPlan plan = design(in);
    json j = plan;
    j["cfg"] = in.cfg;
    const std::string summary = plan_summary(plan, in.cfg);
    if (f.out.empty()) {
        std::cout << j.dump(2) << "\n";
        std::cerr << summary;
        return 0;
    }
    write_text_file(f.out + ".plan.json", j.dump(2) + "\n");
    write_text_file(f.out + ".summary.txt", summary);
    write_text_file(f.out + ".delays.csv", delays_csv(fixed_td_network(plan, in.cfg)));
    std::cout << summary;
    return 0;
}

int run_pattern(const std::string& input, const CommonFlags& f) {
    SystemConfig cfg;
    PilotPlan plan;
    if (!input.empty()) {
        const json j = read_json_file(input);
        if (j.contains("theta_t_list")) {
            if (!j.contains("cfg")) throw std::invalid_argument("pilot plan file lacks its cfg");
            cfg = j.at("cfg").get<SystemConfig>();
            plan = j.get<PilotPlan>();
        } else {
            const auto in = j.get<DesignInputs>();
            cfg = in.cfg;
            plan = design(in);
        }
    } else {
        const DesignInputs in = default_inputs(f.full_scale);
        cfg = in.cfg;
        plan = design(in);
    }
    emit(f.out, "", pattern_csv(dump_beam_pattern(plan, cfg)));
    return 0;
}

struct TrainFlags {
    std::string scheme = "ongrid";
    std::optional<double> theta;
    std::optional<double> angle_deg;
    double r = 20.0;
    double snr_db = 15.0;
    int bank_L = 0;
    int bank_S = 0;
    int rainbow_S = 0;
};

int run_train(const std::string& input, const TrainFlags& t, const CommonFlags& f) {
    ExperimentSpec spec = f.full_scale ? full_scale_spec() : desk_spec();
    if (!input.empty()) spec = read_json_file(input).get<ExperimentSpec>();
    if (t.bank_L > 0) spec.bank_L = t.bank_L;
    if (t.bank_S > 0) spec.bank_S = t.bank_S;
    if (t.rainbow_S > 0) spec.rainbow_S = t.rainbow_S;
    if (t.theta && t.angle_deg) throw std::invalid_argument("give either --theta or --angle-deg, not both");
    double theta = 0.0;
    if (t.theta) theta = *t.theta;
    if (t.angle_deg) theta = std::sin(*t.angle_deg * kPi / 180.0);
    const Scheme scheme = scheme_from_string(t.scheme);
    if (f.seed) spec.master_seed = *f.seed;
    const TrialResult res = run_single_trial(spec, scheme, theta, t.r, t.snr_db);
    json j = res.estimate;
    j["user"] = {{"theta", theta}, {"r", t.r}};
    j["snr_db"] = t.snr_db;
    j["seed"] = spec.master_seed;
    j["rate"] = res.rate;
    emit(f.out, "", j.dump(2));
    return 0;
}

int run_sweep_cmd(const std::string& input, const CommonFlags& f) {
    ExperimentSpec spec = f.full_scale ? full_scale_spec() : desk_spec();
    if (!input.empty()) spec = read_json_file(input).get<ExperimentSpec>();
    if (f.seed) spec.master_seed = *f.seed;
    if (f.trials) spec.n_trials = *f.trials;
    const SweepResult res = run_sweep(spec);
    const std::string prefix = f.out.empty() ? "sweep" : f.out;
    write_text_file(prefix + ".csv", sweep_csv(res));
    write_text_file(prefix + ".json", sweep_summary(res).dump(2) + "\n");
    std::cout << sweep_csv(res);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Distance-dependent beam-split training simulator"};
    app.require_subcommand(1);

    CommonFlags design_f, pattern_f, train_f, sweep_f;
    std::string design_in, pattern_in, train_in, sweep_in;
    TrainFlags tf;

    auto* d = app.add_subcommand("design", "Design TD-PS pilot parameters from a DesignInputs JSON");
    d->add_option("inputs", design_in, "DesignInputs JSON (default: desk or full-scale preset)");
    add_common(d, design_f);

    auto* p = app.add_subcommand("pattern", "Dump the predicted beam foci of a plan as CSV");
    p->add_option("plan", pattern_in, "Plan JSON written by 'design', or DesignInputs JSON");
    add_common(p, pattern_f);

    auto* t = app.add_subcommand("train", "Run one training trial and print the estimate as JSON");
    t->add_option("spec", train_in, "ExperimentSpec JSON supplying config, design and grids");
    t->add_option("--scheme", tf.scheme, "perfect_csi|exhaustive|match_filter|ongrid|aux_pair|nf_rainbow|ff_rainbow");
    t->add_option("--theta", tf.theta, "User sine-angle");
    t->add_option("--angle-deg", tf.angle_deg, "User physical angle in degrees");
    t->add_option("--r", tf.r, "User distance in meters");
    t->add_option("--snr-db", tf.snr_db, "SNR in dB");
    t->add_option("--bank-L", tf.bank_L, "Angle samples of the bank / codebook");
    t->add_option("--bank-S", tf.bank_S, "Distance samples of the bank / codebook");
    t->add_option("--rainbow-S", tf.rainbow_S, "Distance rings of the near-field rainbow");
    add_common(t, train_f);

    auto* s = app.add_subcommand("sweep", "Monte Carlo sweep; writes <out>.csv and <out>.json");
    s->add_option("spec", sweep_in, "ExperimentSpec JSON (default: desk or full-scale preset)");
    add_common(s, sweep_f);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return emit_error("usage", e.what(), 2);
    }

    try {
        if (d->parsed()) return run_design(design_in, design_f);
        if (p->parsed()) return run_pattern(pattern_in, pattern_f);
        if (t->parsed()) return run_train(train_in, tf, train_f);
        if (s->parsed()) return run_sweep_cmd(sweep_in, sweep_f);
    } catch (const json::exception& e) {
        return emit_error("invalid_spec", e.what(), 2);
    } catch (const std::invalid_argument& e) {
        return emit_error("invalid_spec", e.what(), 2);
    } catch (const std::out_of_range& e) {
        return emit_error("invalid_spec", e.what(), 2);
    } catch (const std::exception& e) {
        return emit_error("runtime", e.what(), 1);
    }
    return 0;
}
