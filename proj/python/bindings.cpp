#include <dampwave/studies.hpp>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace dampwave;

namespace {

// Summaries and reports cross the boundary as JSON text; the Python side
// decodes them.
struct RunOutput {
    std::string summary;
    std::string trace;
    bool checks_pass;
};

RunOutput run_and_serialize(const Scenario& sc) {
    ScenarioResult r;
    {
        py::gil_scoped_release release;
        r = run_scenario(sc);
    }
    return {r.summary.dump(), trace_csv(r.trace.samples), r.checks_pass};
}

} // namespace

PYBIND11_MODULE(_dampwave, m) {
    m.doc() = "Damped wave equation lab (native core)";

    static py::exception<InstabilityError> instability(m, "InstabilityError", PyExc_FloatingPointError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const InstabilityError& e) {
            instability(e.what());
        }
    });

    py::class_<DampingProfile>(m, "DampingProfile")
        .def_static("dead_zone", &DampingProfile::dead_zone, py::arg("amplitude"), py::arg("dead_zone_end"),
                    py::arg("L2"))
        .def_static("pure_critical", &DampingProfile::pure_critical, py::arg("amplitude"), py::arg("L2") = 0.0)
        .def_static("constant", &DampingProfile::constant, py::arg("value"))
        .def_static("zero", &DampingProfile::zero)
        .def("__call__", &DampingProfile::operator(), py::arg("x"))
        .def("sample",
             [](const DampingProfile& p, const std::vector<double>& xs) {
                 std::vector<double> out(xs.size());
                 for (std::size_t i = 0; i < xs.size(); ++i) out[i] = p(xs[i]);
                 return out;
             })
        .def_property_readonly("kind", [](const DampingProfile& p) { return std::string(to_string(p.kind())); })
        .def_property_readonly("amplitude", &DampingProfile::amplitude)
        .def_property_readonly("L2", &DampingProfile::L2)
        .def_property_readonly("dead_zone_end", &DampingProfile::dead_zone_end);

    m.def(
        "validate_profile",
        [](const DampingProfile& p, double resolution, double x_max) {
            return to_json(validate_assumption_A(p, resolution, x_max)).dump();
        },
        py::arg("profile"), py::arg("sample_resolution") = 0.01, py::arg("x_max") = 200.0);

    m.def(
        "derive_constants",
        [](const DampingProfile& p, double resolution) {
            const auto k = derive_constants(p, resolution);
            return py::dict(py::arg("V0") = k.V0, py::arg("V1") = k.V1, py::arg("L1") = k.L1, py::arg("L2") = k.L2,
                            py::arg("V_m") = k.V_m, py::arg("V_M") = k.V_M, py::arg("V_star") = k.V_star);
        },
        py::arg("profile"), py::arg("sample_resolution") = 0.01);

    m.def(
        "default_params",
        [](double V0, double V_star) {
            const auto p = default_params(V0, V_star);
            return py::dict(py::arg("eps1") = p.eps1, py::arg("eps2") = p.eps2, py::arg("eps3") = p.eps3,
                            py::arg("k") = p.k);
        },
        py::arg("V0"), py::arg("V_star"));

    m.def(
        "feasibility_margins",
        [](double V0, double V_star) {
            ProfileConstants c;
            c.V0 = c.V1 = V0;
            c.V_star = c.V_M = V_star;
            return to_json(check_feasibility(default_params(V0, V_star), c)).dump();
        },
        py::arg("V0"), py::arg("V_star"));

    m.def(
        "find_t0",
        [](const DampingProfile& p, double R, double t_max, double t_resolution) -> py::object {
            const auto mult = default_multipliers(p, 0.01);
            if (!mult) throw ConfigError("profile does not satisfy the hypotheses for the default multipliers");
            T0Grid grid;
            grid.t_max = t_max;
            grid.t_resolution = t_resolution;
            ActivationSearch s;
            {
                py::gil_scoped_release release;
                s = find_t0(*mult, p, R, grid);
            }
            return py::dict(py::arg("t0") = s.t0 ? py::float_(*s.t0) : py::object(py::none()),
                            py::arg("min_margin") = s.min_margin, py::arg("last_failure") = s.last_failure);
        },
        py::arg("profile"), py::arg("R"), py::arg("t_max") = 1e4, py::arg("t_resolution") = 1.0);

    py::class_<RunOutput>(m, "RunOutput")
        .def_readonly("summary_json", &RunOutput::summary)
        .def_readonly("trace_csv", &RunOutput::trace)
        .def_readonly("checks_pass", &RunOutput::checks_pass);

    m.def(
        "run_config_text",
        [](const std::string& text, const std::map<std::string, double>& overrides) {
            Scenario sc = scenario_from_config(parse_config(text));
            for (const auto& [k, v] : overrides) set_parameter(sc, k, v);
            return run_and_serialize(sc);
        },
        py::arg("text"), py::arg("overrides") = std::map<std::string, double>{});

    m.def(
        "run_config_file",
        [](const std::string& path, const std::map<std::string, double>& overrides) {
            Scenario sc = load_scenario(path);
            for (const auto& [k, v] : overrides) set_parameter(sc, k, v);
            return run_and_serialize(sc);
        },
        py::arg("path"), py::arg("overrides") = std::map<std::string, double>{});

    m.def(
        "fit_trace",
        [](const std::string& csv, double t_lo, double t_hi) {
            const auto fit = fit_decay(parse_trace_csv(csv), {t_lo, t_hi});
            auto j = to_json(fit.plain);
            j["envelope"] = fit.envelope ? to_json(*fit.envelope) : nlohmann::json(nullptr);
            return j.dump();
        },
        py::arg("trace_csv"), py::arg("t_lo"), py::arg("t_hi"));

    m.attr("TRACE_HEADER") = kTraceHeader;
}
