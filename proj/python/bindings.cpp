#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "larmor/acceptance.hpp"
#include "larmor/adiabatic.hpp"
#include "larmor/evolver.hpp"
#include "larmor/observables.hpp"
#include "larmor/profiles.hpp"
#include "larmor/scenario.hpp"
#include "larmor/spectra.hpp"

namespace py = pybind11;
using namespace larmor;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Auxiliary-oscillator evolution for a charged particle in a sign-changing magnetic field";
    m.attr("__version__") = std::string(io::version);

    auto base = py::register_exception<Error>(m, "LarmorError", PyExc_RuntimeError);
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<PreconditionError>(m, "PreconditionError", base.ptr());
    py::register_exception<SingularPointError>(m, "SingularPointError", base.ptr());
    py::register_exception<UnreliableExtractionError>(m, "UnreliableExtractionError", base.ptr());
    py::register_exception<TruncationError>(m, "TruncationError", base.ptr());
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());

    py::enum_<ZeroKind>(m, "ZeroKind").value("SignChange", ZeroKind::SignChange).value("Tangency", ZeroKind::Tangency);

    py::class_<FrequencyProfile>(m, "FrequencyProfile")
        .def_static("power_law", &FrequencyProfile::power_law, py::arg("omega0"), py::arg("tau"), py::arg("k"))
        .def_static("tanh", &FrequencyProfile::tanh, py::arg("omega_i"), py::arg("omega_f"), py::arg("kappa"))
        .def_static("constant", &FrequencyProfile::constant, py::arg("omega"))
        .def_static("sampled", &FrequencyProfile::sampled, py::arg("t"), py::arg("omega"))
        .def("value", &FrequencyProfile::value)
        .def("derivative", &FrequencyProfile::derivative)
        .def("domain", [](const FrequencyProfile& p) { return std::pair{p.domain().lo, p.domain().hi}; })
        .def("zeros",
             [](const FrequencyProfile& p) {
                 std::vector<std::pair<double, ZeroKind>> z;
                 for (const auto& x : p.zeros()) z.emplace_back(x.t, x.kind);
                 return z;
             })
        .def_property_readonly("type_name", &FrequencyProfile::type_name);

    py::class_<OscillatorState>(m, "OscillatorState")
        .def_readonly("t", &OscillatorState::t)
        .def_readonly("eps", &OscillatorState::eps)
        .def_readonly("deps", &OscillatorState::deps)
        .def_readonly("phi", &OscillatorState::phi)
        .def_readonly("phi_tilde", &OscillatorState::phi_tilde)
        .def("wronskian_residual", &OscillatorState::wronskian_residual);

    py::class_<CrossingEvent>(m, "CrossingEvent")
        .def_readonly("t", &CrossingEvent::t)
        .def_readonly("Phi", &CrossingEvent::Phi)
        .def_readonly("kind", &CrossingEvent::kind);

    py::class_<Trajectory>(m, "Trajectory")
        .def_property_readonly("samples", &Trajectory::samples)
        .def_property_readonly("crossings", &Trajectory::crossings)
        .def_property_readonly("max_wronskian_residual", &Trajectory::max_wronskian_residual)
        .def_property_readonly("t_begin", &Trajectory::t_begin)
        .def_property_readonly("t_end", &Trajectory::t_end)
        .def("state_at", &Trajectory::state_at);

    m.def(
        "integrate",
        [](const FrequencyProfile& p, double t_i, double t_f, double tol) {
            IntegrationOptions o;
            o.tol = tol;
            py::gil_scoped_release release;
            return integrate(p, t_i, t_f, o);
        },
        py::arg("profile"), py::arg("t_i"), py::arg("t_f"), py::arg("tol") = 1e-12);

    py::class_<BogoliubovPair>(m, "BogoliubovPair")
        .def(py::init([](complex up, complex um) { return BogoliubovPair{up, um}; }), py::arg("u_plus"),
             py::arg("u_minus"))
        .def_readwrite("u_plus", &BogoliubovPair::u_plus)
        .def_readwrite("u_minus", &BogoliubovPair::u_minus)
        .def("identity_residual", &BogoliubovPair::identity_residual)
        .def("__repr__", [](const BogoliubovPair& b) {
            std::ostringstream s;
            s << "BogoliubovPair(u_plus=" << b.u_plus << ", u_minus=" << b.u_minus << ")";
            return s.str();
        });

    py::class_<Extraction>(m, "Extraction")
        .def_readonly("pair", &Extraction::pair)
        .def_readonly("error_estimate", &Extraction::error_estimate)
        .def_readonly("adiabaticity", &Extraction::adiabaticity)
        .def_readonly("mean_u_minus_sq", &Extraction::mean_u_minus_sq);

    m.def(
        "extract", [](const Trajectory& tr, double t) { return extract(tr, t); }, py::arg("trajectory"), py::arg("t"));
    m.def("analytic_powerlaw", &analytic_powerlaw, py::arg("k"));
    m.def("analytic_tanh", &analytic_tanh, py::arg("omega_i"), py::arg("omega_f"), py::arg("kappa"));
    m.def("analytic_tanh_symmetric", &analytic_tanh_symmetric, py::arg("omega0"), py::arg("kappa"));
    m.def("compose", &compose, py::arg("crossings"), "Chain of (pair, Phi) crossings into one pair");

    py::class_<FockLabel>(m, "FockLabel")
        .def(py::init([](int n, int mm) { return FockLabel{n, mm}; }), py::arg("n_r"), py::arg("m"))
        .def_readwrite("n_r", &FockLabel::n_r)
        .def_readwrite("m", &FockLabel::m);

    py::class_<SpectralDistribution>(m, "SpectralDistribution")
        .def_readonly("probabilities", &SpectralDistribution::probabilities)
        .def_readonly("jacobi_signs", &SpectralDistribution::jacobi_signs)
        .def_readonly("tail_bound", &SpectralDistribution::tail_bound)
        .def_readonly("u_minus_abs", &SpectralDistribution::u_minus_abs);

    m.def(
        "distribution",
        [](int n, int mm, double u_minus_abs, double tail_tol) {
            DistributionOptions o;
            o.tail_tol = tail_tol;
            return distribution({n, mm}, u_minus_abs, o);
        },
        py::arg("n_r"), py::arg("m"), py::arg("u_minus_abs"), py::arg("tail_tol") = 1e-12);
    m.def("transition_probability", &transition_probability, py::arg("n"), py::arg("q"), py::arg("m"),
          py::arg("u_minus_abs"));
    m.def("mean_q", &mean_q, py::arg("initial"), py::arg("u_minus_sq"));

    m.def(
        "fock_moment_mean",
        [](int n, int mm, double omega, double e2) { return fock_moment_mean({n, mm}, omega, e2); }, py::arg("n_r"),
        py::arg("m"), py::arg("omega"), py::arg("eps_abs_sq"));
    m.def(
        "energy",
        [](int n, int mm, const OscillatorState& s, double omega) { return energy_eps(FockLabel{n, mm}, s, omega); },
        py::arg("n_r"), py::arg("m"), py::arg("state"), py::arg("omega"));

    m.def(
        "run_config",
        [](const std::string& text, const std::string& out_dir, bool header_timestamp) {
            const auto s = scenario::parse(text);
            scenario::RunOptions o;
            o.out_dir = out_dir;
            o.header_timestamp = header_timestamp;
            std::ostringstream log;
            auto written = scenario::run(s, o, log);
            return std::pair{written, log.str()};
        },
        py::arg("text"), py::arg("out_dir"), py::arg("header_timestamp") = true,
        "Runs a TOML scenario; returns (written paths, warnings)");

    m.def("selftest", [](double tol) {
        acceptance::Options o;
        o.tol = tol;
        const auto r = acceptance::run(o);
        std::vector<std::string> lines;
        for (const auto& c : r.criteria) lines.push_back(acceptance::format_line(c));
        return std::pair{r.all_pass(), lines};
    }, py::arg("tol") = 1e-12);
}
