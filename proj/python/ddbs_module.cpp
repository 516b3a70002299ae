#include "ddbs/harness.hpp"
#include "ddbs/io.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <stdexcept>

namespace py = pybind11;
using namespace ddbs;

namespace {

struct PlanWithConfig {
    PilotPlan plan;
    SystemConfig cfg;
};

// Accepts either a design-inputs document or a plan written by design().
PlanWithConfig resolve_plan(const std::string& text) {
    const json j = json::parse(text);
    if (j.contains("theta_t_list")) {
        if (!j.contains("cfg")) throw std::invalid_argument("pilot plan lacks its cfg");
        return {j.get<PilotPlan>(), j.at("cfg").get<SystemConfig>()};
    }
    const auto in = j.get<DesignInputs>();
    return {design(in), in.cfg};
}

ExperimentSpec resolve_spec(const std::string& text) {
    if (text.empty()) return desk_spec();
    return json::parse(text).get<ExperimentSpec>();
}

}  // namespace

PYBIND11_MODULE(_ddbs, m) {
    m.doc() = "Distance-dependent beam-split training simulator";
    m.attr("__version__") = "0.1.0";

    py::register_exception<InfeasibleFocus>(m, "InfeasibleFocus", PyExc_ValueError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const json::exception& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        }
    });

    m.def("preset_json", [](const std::string& name) {
        if (name == "desk") return json(desk_spec()).dump();
        if (name == "full") return json(full_scale_spec()).dump();
        throw std::invalid_argument("unknown preset '" + name + "' (expected desk or full)");
    });

    m.def("design_json", [](const std::string& inputs) {
        const auto in = json::parse(inputs).get<DesignInputs>();
        const PilotPlan plan = design(in);
        json j = plan;
        j["cfg"] = in.cfg;
        return py::make_tuple(j.dump(), plan_summary(plan, in.cfg));
    });

    m.def("delays", [](const std::string& plan) {
        const auto pc = resolve_plan(plan);
        const FixedTdNetwork net = fixed_td_network(pc.plan, pc.cfg);
        return py::make_tuple(net.delays, net.selection_bits);
    });

    m.def("delays_csv", [](const std::string& plan) {
        const auto pc = resolve_plan(plan);
        return delays_csv(fixed_td_network(pc.plan, pc.cfg));
    });

    m.def("pattern_csv", [](const std::string& plan) {
        const auto pc = resolve_plan(plan);
        return pattern_csv(dump_beam_pattern(pc.plan, pc.cfg));
    });

    m.def("roundtrip_pattern_csv", [](const std::string& csv) { return pattern_csv(parse_pattern_csv(csv)); });

    m.def("coverage_fraction", [](const std::string& plan, int n_theta, int n_alpha) {
        const auto pc = resolve_plan(plan);
        return coverage_fraction(pc.plan, pc.cfg, n_theta, n_alpha);
    }, py::arg("plan"), py::arg("n_theta") = 200, py::arg("n_alpha") = 50);

    m.def("train_json", [](const std::string& spec, const std::string& scheme, double theta, double r, double snr_db,
                           std::uint64_t trial) {
        ExperimentSpec s = resolve_spec(spec);
        TrialResult res;
        {
            py::gil_scoped_release release;
            res = run_single_trial(s, scheme_from_string(scheme), theta, r, snr_db, trial);
        }
        json j = res.estimate;
        j["rate"] = res.rate;
        return j.dump();
    }, py::arg("spec"), py::arg("scheme"), py::arg("theta"), py::arg("r"), py::arg("snr_db") = 15.0, py::arg("trial") = 0);

    m.def("sweep_json", [](const std::string& spec) {
        const ExperimentSpec s = resolve_spec(spec);
        SweepResult res;
        {
            py::gil_scoped_release release;
            res = run_sweep(s);
        }
        return py::make_tuple(sweep_csv(res), sweep_summary(res).dump());
    });

    m.def("gain_kernel", [](const std::string& cfg, double x, double y) {
        return gain_kernel(json::parse(cfg).get<SystemConfig>(), x, y);
    });
    m.def("fresnel_amplitude", &fresnel_amplitude);
    m.def("angle_beamwidth", [](const std::string& cfg, double f) { return angle_beamwidth(json::parse(cfg).get<SystemConfig>(), f); });
    m.def("distance_beamwidth", [](const std::string& cfg, double f) {
        return distance_beamwidth(json::parse(cfg).get<SystemConfig>(), f);
    });
}
