#include <sstream>
#include <stdexcept>

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "icrb/errors.hpp"
#include "icrb/fisher.hpp"
#include "icrb/iekf.hpp"
#include "icrb/parallel.hpp"
#include "icrb/report.hpp"
#include "icrb/rng.hpp"
#include "icrb/runner.hpp"
#include "icrb/scenario.hpp"
#include "icrb/so3.hpp"
#include "icrb/wahba.hpp"

namespace py = pybind11;
using namespace icrb;

PYBIND11_MODULE(_icrb, m) {
    m.doc() = "Intrinsic Cramer-Rao bounds, Wahba solver, and invariant EKF "
              "for attitude estimation on SO(3)";

    py::register_exception<AngleNearPiError>(m, "AngleNearPiError",
                                             PyExc_ValueError);
    py::register_exception<UnobservableError>(m, "UnobservableError",
                                              PyExc_ValueError);
    py::register_exception<SingularInformationError>(
        m, "SingularInformationError", PyExc_ValueError);
    py::register_exception<InvalidScenarioError>(m, "InvalidScenarioError",
                                                 PyExc_ValueError);

    // ---- random streams ----

    py::class_<RngStream>(m, "RngStream")
        .def(py::init<std::uint64_t>(), py::arg("seed"))
        .def("split", &RngStream::split, py::arg("index"))
        .def("next_u64", &RngStream::next_u64)
        .def("uniform01", &RngStream::uniform01)
        .def("normal", &RngStream::normal)
        .def("normal3", &RngStream::normal3, py::arg("sigma"))
        .def_property_readonly("seed", &RngStream::seed);
    m.def("splitmix64", &splitmix64, py::arg("x"));

    // ---- rotations ----

    py::class_<Rotation>(m, "Rotation")
        .def(py::init<>())
        .def_static("identity", &Rotation::identity)
        .def_static("from_matrix", &Rotation::from_matrix, py::arg("m"))
        .def("matrix", &Rotation::matrix, py::return_value_policy::copy)
        .def("inverse", &Rotation::inverse)
        .def("orthogonality_defect", &Rotation::orthogonality_defect)
        .def("renormalized", &Rotation::renormalized)
        .def("is_approx", &Rotation::is_approx, py::arg("other"),
             py::arg("tol") = 1e-12)
        .def(
            "__mul__",
            [](const Rotation& a, const Rotation& b) { return a * b; },
            py::arg("other"))
        .def(
            "rotate", [](const Rotation& r, const Vec3& v) { return r * v; },
            py::arg("v"))
        .def("__repr__", [](const Rotation& r) {
            std::ostringstream os;
            os << "Rotation(" << r.matrix().format(Eigen::IOFormat(
                      Eigen::StreamPrecision, 0, ", ", "; ", "", "", "[", "]"))
               << ")";
            return os.str();
        });

    m.def("hat", &hat, py::arg("v"));
    m.def("vee", &vee, py::arg("s"));
    m.def("exp_so3", &exp_so3, py::arg("v"));
    m.def("log_so3", &log_so3, py::arg("r"));
    m.def("distance", &distance, py::arg("r1"), py::arg("r2"));
    m.def("dlog_bch", &dlog_bch, py::arg("q"), py::arg("xi"));
    m.def("sample_tangent_gaussian", &sample_tangent_gaussian, py::arg("sigma"),
          py::arg("rng"));

    // ---- Fisher information and the intrinsic bound ----

    py::class_<Reference>(m, "Reference")
        .def(py::init([](const Vec3& d, double sigma) {
                 return Reference{d, sigma};
             }),
             py::arg("d"), py::arg("sigma"))
        .def_readwrite("d", &Reference::d)
        .def_readwrite("sigma", &Reference::sigma);

    py::class_<InfoMatrix>(m, "InfoMatrix")
        .def_static("from_matrix", &InfoMatrix::from_matrix, py::arg("m"))
        .def_readonly("j", &InfoMatrix::j);

    py::class_<CovMatrix>(m, "CovMatrix")
        .def_static("from_matrix", &CovMatrix::from_matrix, py::arg("m"))
        .def_readonly("p", &CovMatrix::p);

    py::class_<CurvatureTerm>(m, "CurvatureTerm")
        .def_readonly("r", &CurvatureTerm::r);

    m.def("fisher_single_vector", &fisher_single_vector, py::arg("d"),
          py::arg("sigma"));
    m.def("fisher_wahba", &fisher_wahba, py::arg("refs"));
    m.def("fisher_score_oracle", &fisher_score_oracle, py::arg("r"),
          py::arg("refs"), py::arg("n_samples"), py::arg("rng"));
    m.def("invert_information", &invert_information, py::arg("j"));
    m.def("icrlb", &icrlb, py::arg("j"), py::arg("p"));
    m.def("icrlb_squared_form", &icrlb_squared_form, py::arg("j"), py::arg("p"));
    m.def("curvature_operator", &curvature_operator, py::arg("p"));
    m.def("smith_form_check", &smith_form_check, py::arg("j"), py::arg("p"));
    m.def("loewner_geq", &loewner_geq, py::arg("a"), py::arg("b"),
          py::arg("tol"));

    // ---- Wahba solver ----

    py::class_<VectorMeasurement>(m, "VectorMeasurement")
        .def(py::init([](const Vec3& d, const Vec3& y, double sigma) {
                 return VectorMeasurement{d, y, sigma};
             }),
             py::arg("d"), py::arg("y"), py::arg("sigma"))
        .def_readwrite("d", &VectorMeasurement::d)
        .def_readwrite("y", &VectorMeasurement::y)
        .def_readwrite("sigma", &VectorMeasurement::sigma);

    m.def("simulate_measurements", &simulate_measurements, py::arg("r"),
          py::arg("refs"), py::arg("rng"));
    m.def("wahba_cost", &wahba_cost, py::arg("r"), py::arg("measurements"));
    m.def("solve_wahba", &solve_wahba, py::arg("measurements"));
    m.def("static_trial_error", &static_trial_error, py::arg("r"),
          py::arg("refs"), py::arg("rng"));

    // ---- invariant EKF ----

    py::class_<MeasurementEpoch>(m, "MeasurementEpoch")
        .def(py::init([](double t_n, const Vec3& d0, const Vec3& d1,
                         const Vec3& y0, const Vec3& y1, double sigma0,
                         double sigma1) {
                 return MeasurementEpoch{t_n, d0, d1, y0, y1, sigma0, sigma1};
             }),
             py::arg("t_n"), py::arg("d0"), py::arg("d1"), py::arg("y0"),
             py::arg("y1"), py::arg("sigma0"), py::arg("sigma1"))
        .def_readwrite("t_n", &MeasurementEpoch::t_n)
        .def_readwrite("d0", &MeasurementEpoch::d0)
        .def_readwrite("d1", &MeasurementEpoch::d1)
        .def_readwrite("y0", &MeasurementEpoch::y0)
        .def_readwrite("y1", &MeasurementEpoch::y1)
        .def_readwrite("sigma0", &MeasurementEpoch::sigma0)
        .def_readwrite("sigma1", &MeasurementEpoch::sigma1);

    py::class_<IekfState>(m, "IekfState")
        .def_property_readonly("r_hat", &IekfState::r_hat)
        .def_property_readonly("p",
                               [](const IekfState& s) { return s.p().p; })
        .def_property_readonly(
            "info_accum", [](const IekfState& s) { return s.info_accum().j; })
        .def_property_readonly("t", &IekfState::t);

    m.def("stack_measurement_matrix", &stack_measurement_matrix, py::arg("d0"),
          py::arg("d1"));
    m.def("epoch_information", &epoch_information, py::arg("d0"), py::arg("d1"),
          py::arg("sigma0"), py::arg("sigma1"));
    m.def("initialize", &initialize, py::arg("epoch"));
    m.def("propagate", &propagate, py::arg("state"), py::arg("omega"),
          py::arg("t_next"));
    m.def(
        "compute_gain",
        [](const Mat3& p, const Vec3& d0, const Vec3& d1, double sigma0,
           double sigma1) {
            return compute_gain(CovMatrix{p}, d0, d1, sigma0, sigma1);
        },
        py::arg("p"), py::arg("d0"), py::arg("d1"), py::arg("sigma0"),
        py::arg("sigma1"));
    m.def("update", &update, py::arg("state"), py::arg("epoch"));
    m.def("linearized_error_step", &linearized_error_step, py::arg("xi"),
          py::arg("k"), py::arg("d0"), py::arg("d1"), py::arg("v0"),
          py::arg("v1"));

    // ---- scenarios, runs, reports ----

    py::enum_<ScenarioMode>(m, "ScenarioMode")
        .value("static_wahba", ScenarioMode::static_wahba)
        .value("dynamic_iekf", ScenarioMode::dynamic_iekf);

    py::class_<OmegaSegment>(m, "OmegaSegment")
        .def(py::init([](double t_start, double t_end, const Vec3& omega) {
                 return OmegaSegment{t_start, t_end, omega};
             }),
             py::arg("t_start"), py::arg("t_end"), py::arg("omega"))
        .def_readwrite("t_start", &OmegaSegment::t_start)
        .def_readwrite("t_end", &OmegaSegment::t_end)
        .def_readwrite("omega", &OmegaSegment::omega);

    py::class_<EpochSpec>(m, "EpochSpec")
        .def(py::init([](double t_n, const Vec3& d0, const Vec3& d1,
                         double sigma0, double sigma1) {
                 return EpochSpec{t_n, d0, d1, sigma0, sigma1};
             }),
             py::arg("t_n"), py::arg("d0"), py::arg("d1"), py::arg("sigma0"),
             py::arg("sigma1"))
        .def_readwrite("t_n", &EpochSpec::t_n)
        .def_readwrite("d0", &EpochSpec::d0)
        .def_readwrite("d1", &EpochSpec::d1)
        .def_readwrite("sigma0", &EpochSpec::sigma0)
        .def_readwrite("sigma1", &EpochSpec::sigma1);

    py::class_<Scenario>(m, "Scenario")
        .def(py::init<>())
        .def_readwrite("seed", &Scenario::seed)
        .def_readwrite("mode", &Scenario::mode)
        .def_readwrite("refs", &Scenario::refs)
        .def_readwrite("epochs", &Scenario::epochs)
        .def_readwrite("omega_profile", &Scenario::omega_profile)
        .def_readwrite("true_initial_attitude", &Scenario::true_initial_attitude)
        .def_readwrite("n_trials", &Scenario::n_trials);

    m.def(
        "parse_scenario",
        [](const std::string& text) {
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(text);
            } catch (const nlohmann::json::parse_error& e) {
                throw InvalidScenarioError(e.what());
            }
            return parse_scenario(j);
        },
        py::arg("text"), "Parse and validate a scenario from JSON text.");
    m.def("load_scenario", &load_scenario, py::arg("path"));
    m.def(
        "scenario_to_json",
        [](const Scenario& s) { return scenario_to_json(s).dump(2) + "\n"; },
        py::arg("scenario"));
    m.def("validate_scenario", &validate_scenario, py::arg("scenario"));
    m.def("omega_at", &omega_at, py::arg("profile"), py::arg("t"));

    py::class_<Report>(m, "Report")
        .def_readonly("empirical_p", &Report::empirical_p)
        .def_readonly("bound_first_order", &Report::bound_first_order)
        .def_readonly("bound_curvature", &Report::bound_curvature)
        .def_readonly("iekf_p", &Report::iekf_p)
        .def_readonly("bias", &Report::bias)
        .def_readonly("trial_count", &Report::trial_count)
        .def_readonly("rejected_trials", &Report::rejected_trials)
        .def_readonly("loewner_ok", &Report::loewner_ok)
        .def_readonly("timing", &Report::timing)
        .def("__eq__",
             [](const Report& a, const Report& b) { return a == b; })
        .def("to_canonical_string", &report_to_canonical_string);

    m.def(
        "run_static",
        [](const Scenario& s, unsigned jobs) { return run_static(s, jobs); },
        py::arg("scenario"), py::arg("jobs") = 1,
        py::call_guard<py::gil_scoped_release>());
    m.def(
        "run_dynamic",
        [](const Scenario& s, unsigned jobs) { return run_dynamic(s, jobs); },
        py::arg("scenario"), py::arg("jobs") = 1,
        py::call_guard<py::gil_scoped_release>());
    m.def("iekf_covariance_sequence", &iekf_covariance_sequence,
          py::arg("scenario"));
    m.def("scenario_information", &scenario_information, py::arg("scenario"));
    m.def("loewner_tolerance", &loewner_tolerance, py::arg("empirical_p"),
          py::arg("n_trials"));
    m.def("default_jobs", &default_jobs);
    m.def(
        "verify",
        []() {
            std::ostringstream diag;
            const int failures = run_verify(diag);
            return py::make_tuple(failures, diag.str());
        },
        "Run the built-in identity checks; returns (failures, diagnostics).");
}
