#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "boolcd/descent.hpp"
#include "boolcd/fits.hpp"
#include "boolcd/objective.hpp"
#include "boolcd/reservoir.hpp"
#include "boolcd/tasks.hpp"
#include "boolcd/theory.hpp"

namespace py = pybind11;
using namespace boolcd;

namespace {

BooleanWeights weights_from_list(const std::vector<int>& bits) {
    std::vector<std::uint8_t> b;
    b.reserve(bits.size());
    for (int v : bits) {
        if (v != 0 && v != 1) throw std::invalid_argument("bits must be 0 or 1");
        b.push_back(static_cast<std::uint8_t>(v));
    }
    return BooleanWeights(std::move(b));
}

std::vector<int> weights_to_list(const BooleanWeights& w) {
    return std::vector<int>(w.bits().begin(), w.bits().end());
}

py::dict trace_to_dict(const DescentTrace& trace) {
    py::dict d;
    std::vector<int> epochs, flipped, rewards;
    std::vector<double> errors, test_errors;
    for (const auto& r : trace.records) {
        epochs.push_back(r.epoch);
        flipped.push_back(r.flipped_index);
        errors.push_back(r.error);
        rewards.push_back(r.reward);
        test_errors.push_back(r.test_error);
    }
    d["epoch"] = epochs;
    d["flipped_index"] = flipped;
    d["error"] = errors;
    d["reward"] = rewards;
    d["test_error"] = test_errors;
    d["final_weights"] = weights_to_list(trace.final_weights);
    d["K"] = trace.epochs_to_converge;
    d["total_epochs"] = trace.total_epochs;
    d["converged_reason"] = to_string(trace.converged_reason);
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Boolean coordinate-descent reservoir readout training";

    py::class_<ReservoirConfig>(m, "ReservoirConfig")
        .def(py::init<>())
        .def_readwrite("n_nodes", &ReservoirConfig::n_nodes)
        .def_readwrite("spectral_radius", &ReservoirConfig::spectral_radius)
        .def_readwrite("leak_rate", &ReservoirConfig::leak_rate)
        .def_readwrite("input_scale", &ReservoirConfig::input_scale)
        .def_readwrite("connectivity", &ReservoirConfig::connectivity)
        .def_readwrite("seed", &ReservoirConfig::seed);

    m.def(
        "drive_reservoir",
        [](const ReservoirConfig& cfg, const std::vector<double>& input, int washout) {
            return drive_reservoir(cfg, input, washout).values();
        },
        py::arg("config"), py::arg("input"), py::arg("washout") = 100);

    m.def(
        "random_state_matrix",
        [](int n, int t, const std::string& distribution, std::uint64_t seed) {
            return random_state_matrix(n, t, entry_distribution_from_string(distribution), seed)
                .values();
        },
        py::arg("n"), py::arg("t"), py::arg("distribution") = "uniform01", py::arg("seed") = 0);

    m.def("mackey_glass", &mackey_glass, py::arg("length"), py::arg("tau") = 17,
          py::arg("dt") = 0.1, py::arg("seed") = 0);

    m.def(
        "readout",
        [](const Eigen::MatrixXd& state, const std::vector<int>& w) {
            return readout(StateMatrix(state), weights_from_list(w));
        },
        py::arg("state"), py::arg("weights"));

    m.def(
        "mse",
        [](const Eigen::MatrixXd& state, const std::vector<int>& w, const Eigen::VectorXd& target) {
            return mse(StateMatrix(state), weights_from_list(w), target);
        },
        py::arg("state"), py::arg("weights"), py::arg("target"));

    m.def(
        "lambda_max",
        [](const Eigen::MatrixXd& state, double eta) {
            const LambdaMax lm = lambda_max(StateMatrix(state), eta);
            return py::make_tuple(lm.raw, lm.hessian);
        },
        py::arg("state"), py::arg("eta") = 0.0, "Returns (lambda_max(E^t E), hessian lambda)");

    m.def(
        "run_descent",
        [](const Eigen::MatrixXd& state, const Eigen::VectorXd& target,
           const std::vector<int>& w0, const std::string& policy, int max_epochs, double epsilon,
           bool stop_on_local_min, std::uint64_t seed, double eta) {
            StateMatrix sm(state);
            Objective obj = eta >= 0.0 ? Objective(sm, target, eta) : Objective(sm, target);
            DescentConfig cfg;
            cfg.policy = SelectorPolicy{policy_from_string(policy), seed};
            cfg.max_epochs = max_epochs;
            cfg.target_error = epsilon;
            cfg.stop_on_local_min = stop_on_local_min;
            return trace_to_dict(run_descent(obj, weights_from_list(w0), cfg));
        },
        py::arg("state"), py::arg("target"), py::arg("w0"), py::arg("policy") = "greedy",
        py::arg("max_epochs") = 4000, py::arg("epsilon") = 0.0,
        py::arg("stop_on_local_min") = true, py::arg("seed") = 0, py::arg("eta") = -1.0);

    m.def(
        "synthetic_target",
        [](const Eigen::MatrixXd& state, const std::vector<int>& planted, double noise_std,
           std::uint64_t seed) {
            return synthetic_target(StateMatrix(state), weights_from_list(planted), noise_std,
                                    seed);
        },
        py::arg("state"), py::arg("planted"), py::arg("noise_std") = 0.0, py::arg("seed") = 0);

    m.def(
        "kappa",
        [](const Eigen::MatrixXd& state, const Eigen::VectorXd& target, double eta,
           const std::string& mode) {
            SmallInstance inst(Objective(StateMatrix(state), target, eta));
            const KappaResult k = kappa(inst, mode == "uniform_only" ? SimplexMode::uniform_only
                                                                     : SimplexMode::exact_vertex);
            py::dict d;
            d["kappa"] = k.kappa;
            d["kappa_variant"] = k.kappa_variant;
            d["degenerate"] = k.degenerate;
            d["lambda"] = k.lambda;
            return d;
        },
        py::arg("state"), py::arg("target"), py::arg("eta"), py::arg("mode") = "exact_vertex");

    m.def("predicted_epochs", &predicted_epochs, py::arg("eps"), py::arg("rho"));

    m.def(
        "fit_exponential",
        [](const std::vector<double>& curve) {
            const FitResult f = fit_exponential(curve);
            py::dict d;
            d["phi_inf"] = f.phi_inf;
            d["amplitude"] = f.amplitude;
            d["tau"] = f.tau;
            d["r_squared"] = f.r_squared;
            d["degenerate"] = f.degenerate;
            return d;
        },
        py::arg("curve"));

    m.def(
        "fit_power_law",
        [](const std::vector<double>& sizes, const std::vector<double>& k_means) {
            const FitResult f = fit_power_law(sizes, k_means);
            py::dict d;
            d["prefactor"] = f.prefactor;
            d["exponent"] = f.exponent;
            d["r_squared"] = f.r_squared;
            return d;
        },
        py::arg("sizes"), py::arg("k_means"));

#ifdef BOOLCD_VERSION_INFO
    m.attr("__version__") = BOOLCD_VERSION_INFO;
#else
    m.attr("__version__") = "dev";
#endif
}
