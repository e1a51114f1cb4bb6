#include "boolcd/sweep.hpp"

#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <stdexcept>

#include "boolcd/format.hpp"
#include "boolcd/objective.hpp"
#include "boolcd/tasks.hpp"

namespace boolcd {

void SweepConfig::validate() const {
    if (sizes.empty()) throw std::invalid_argument("sweep: need at least one size");
    for (std::size_t i = 1; i < sizes.size(); ++i)
        if (sizes[i] <= sizes[i - 1])
            throw std::invalid_argument("sweep: sizes must be strictly increasing");
    if (minimizers_per_size < 1) throw std::invalid_argument("sweep: minimizers_per_size >= 1");
    if (policies.empty()) throw std::invalid_argument("sweep: need at least one policy");
    if (epsilon < 0.0) throw std::invalid_argument("sweep: epsilon must be >= 0");
    if (max_epochs_factor < 1) throw std::invalid_argument("sweep: max_epochs_factor >= 1");
    if (task.kind != "mackey_glass" && task.kind != "synthetic")
        throw std::invalid_argument("sweep: unknown task kind " + task.kind);
    if (task.t_train < 1) throw std::invalid_argument("sweep: t_train must be >= 1");
    if (task.t_test < 0) throw std::invalid_argument("sweep: t_test must be >= 0");
}

BuiltProblem build_problem(const SweepConfig& cfg, int size) {
    const TaskSpec& spec = cfg.task;
    if (spec.kind == "mackey_glass") {
        ReservoirConfig rc = spec.reservoir;
        rc.n_nodes = size;
        rc.seed = derive_seed(cfg.seed_base, 0x7265736572ULL, static_cast<std::uint64_t>(size));
        const int needed = spec.washout + spec.t_train + spec.t_test + 1;
        const std::vector<double> series =
            mackey_glass(needed, spec.mg_tau, spec.mg_dt,
                         derive_seed(cfg.seed_base, 0x6d67ULL));
        TaskData task = make_task(rc, series, spec.t_train, spec.t_test, spec.washout,
                                  spec.target_offset);
        std::optional<TestSet> test;
        if (task.has_test()) test = TestSet{*task.state_test, task.target_test};
        return BuiltProblem{Objective(std::move(task.state_train), std::move(task.target_train)),
                            std::move(test)};
    }
    // synthetic: random nonnegative states with a planted Boolean solution
    const int total = spec.t_train + spec.t_test;
    const StateMatrix full = random_state_matrix(
        size, total, EntryDistribution::uniform01,
        derive_seed(cfg.seed_base, 0x73796e7468ULL, static_cast<std::uint64_t>(size)));
    const BooleanWeights planted = BooleanWeights::random(
        size, derive_seed(cfg.seed_base, 0x706c616e74ULL, static_cast<std::uint64_t>(size)));
    const Eigen::VectorXd target =
        synthetic_target(full, planted, spec.synthetic_noise,
                         derive_seed(cfg.seed_base, 0x74617267ULL, static_cast<std::uint64_t>(size)));
    StateMatrix train(full.values().topRows(spec.t_train));
    std::optional<TestSet> test;
    if (spec.t_test > 0)
        test = TestSet{StateMatrix(full.values().bottomRows(spec.t_test)),
                       target.tail(spec.t_test)};
    return BuiltProblem{Objective(std::move(train), target.head(spec.t_train)), std::move(test)};
}

SweepReport run_sweep(const SweepConfig& cfg) {
    cfg.validate();
    SweepReport report;
    report.config = cfg;

    for (int size : cfg.sizes) {
        std::optional<BuiltProblem> problem;
        std::string build_error;
        try {
            problem = build_problem(cfg, size);
        } catch (const std::exception& ex) {
            build_error = ex.what();
        }
        const BooleanWeights w0 = BooleanWeights::random(
            size, derive_seed(cfg.seed_base, 0x7730ULL, static_cast<std::uint64_t>(size)));

        for (std::size_t pi = 0; pi < cfg.policies.size(); ++pi) {
            const PolicyKind policy = cfg.policies[pi];
            SweepCell cell;
            cell.size = size;
            cell.policy = policy;
            if (!problem) {
                cell.failed = true;
                cell.error = build_error;
                report.cells.push_back(std::move(cell));
                continue;
            }
            try {
                DescentConfig dc;
                dc.policy.kind = policy;
                dc.max_epochs = cfg.max_epochs_factor * size;
                dc.target_error = cfg.epsilon;
                dc.stop_on_local_min = true;
                dc.record_test_error = problem->test.has_value();
                std::vector<std::uint64_t> seeds;
                seeds.reserve(static_cast<std::size_t>(cfg.minimizers_per_size));
                for (int m = 0; m < cfg.minimizers_per_size; ++m)
                    seeds.push_back(derive_seed(cfg.seed_base, static_cast<std::uint64_t>(size),
                                                pi + 1, static_cast<std::uint64_t>(m)));
                cell.ensemble = run_ensemble(problem->objective, w0, dc, cfg.minimizers_per_size,
                                             std::move(seeds),
                                             problem->test ? &*problem->test : nullptr,
                                             cfg.threads);
                for (const auto& trace : cell.ensemble.traces)
                    cell.final_test_errors.push_back(trace.records.back().test_error);
            } catch (const std::exception& ex) {
                cell.failed = true;
                cell.error = ex.what();
            }
            report.cells.push_back(std::move(cell));
        }
    }

    // K_mean vs N per policy (needs >= 3 successful sizes)
    for (PolicyKind policy : cfg.policies) {
        std::vector<double> ns, ks;
        for (const auto& cell : report.cells)
            if (!cell.failed && cell.policy == policy && cell.ensemble.k_mean > 0.0) {
                ns.push_back(cell.size);
                ks.push_back(cell.ensemble.k_mean);
            }
        FitResult fit;
        fit.model = FitModel::power_law;
        if (ns.size() >= 3) {
            fit = fit_power_law(ns, ks);
        } else {
            fit.degenerate = true;
        }
        report.scaling_fits[to_string(policy)] = fit;
    }

    // exponential fit of each cell's mean curve
    for (const auto& cell : report.cells) {
        if (cell.failed || cell.ensemble.mean_error.size() < 10) continue;
        const std::string key = std::to_string(cell.size) + "_" + to_string(cell.policy);
        report.convergence_fits[key] = fit_exponential(cell.ensemble.mean_error);
    }
    return report;
}

void write_sweep_outputs(const SweepReport& report, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    fs::create_directories(out_dir + "/curves");

    std::ofstream sweep_csv(out_dir + "/sweep.csv", std::ios::binary);
    sweep_csv << "size,policy,minimizer,K,final_train_error,final_test_error\n";
    for (const auto& cell : report.cells) {
        if (cell.failed) continue;
        for (std::size_t m = 0; m < cell.ensemble.traces.size(); ++m) {
            const auto& trace = cell.ensemble.traces[m];
            sweep_csv << cell.size << ',' << to_string(cell.policy) << ',' << m << ','
                      << trace.epochs_to_converge << ',' << format_double(trace.final_error())
                      << ',';
            const double te = cell.final_test_errors.empty()
                                  ? std::numeric_limits<double>::quiet_NaN()
                                  : cell.final_test_errors[m];
            if (!std::isnan(te)) sweep_csv << format_double(te);
            sweep_csv << '\n';
        }
    }

    for (const auto& cell : report.cells) {
        if (cell.failed) continue;
        const std::string name = std::to_string(cell.size) + "_" + to_string(cell.policy);
        std::ofstream curve(out_dir + "/curves/" + name + ".csv", std::ios::binary);
        curve << "epoch,mean_error,std_error\n";
        for (std::size_t k = 0; k < cell.ensemble.mean_error.size(); ++k)
            curve << k << ',' << format_double(cell.ensemble.mean_error[k]) << ','
                  << format_double(cell.ensemble.std_error[k]) << '\n';
    }

    nlohmann::json j;
    j["padding"] = "stopped traces carry their final error forward in mean/std curves";
    for (const auto& [policy, fit] : report.scaling_fits)
        j["scaling"][policy] = nlohmann::json::parse(fit_to_json(fit));
    for (const auto& [key, fit] : report.convergence_fits)
        j["convergence"][key] = nlohmann::json::parse(fit_to_json(fit));
    for (const auto& cell : report.cells) {
        nlohmann::json c;
        c["size"] = cell.size;
        c["policy"] = to_string(cell.policy);
        if (cell.failed) {
            c["failed"] = true;
            c["error"] = cell.error;
        } else {
            c["K_mean"] = cell.ensemble.k_mean;
            c["K_std"] = cell.ensemble.k_std;
            c["final_error_mean"] = cell.ensemble.mean_error.back();
            c["converged_reason"] = cell.ensemble.reason_counts;
        }
        j["cells"].push_back(c);
    }
    std::ofstream fits(out_dir + "/fits.json", std::ios::binary);
    fits << j.dump(2) << '\n';
}

}  // namespace boolcd
