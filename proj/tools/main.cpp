// boolcd: Boolean coordinate-descent readout training and its convergence
// diagnostics. Subcommands: train, sweep, theory, gen-task.

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "boolcd/descent.hpp"
#include "boolcd/format.hpp"
#include "boolcd/objective.hpp"
#include "boolcd/reservoir.hpp"
#include "boolcd/sweep.hpp"
#include "boolcd/tasks.hpp"
#include "boolcd/theory.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

void write_manifest(const std::string& out_dir, const std::string& command, const json& config,
                    std::uint64_t seed, const std::vector<std::string>& outputs,
                    double wall_clock_seconds) {
    json j;
    j["command"] = command;
    j["config"] = config;
    j["seed"] = seed;
    j["tool_version"] = boolcd::kVersion;
    j["outputs"] = outputs;
    j["wall_clock_seconds"] = wall_clock_seconds;
    std::ofstream out(out_dir + "/manifest.json", std::ios::binary);
    out << j.dump(2) << '\n';
}

std::uint64_t resolve_seed(const CLI::Option* seed_opt, std::uint64_t seed) {
    if (seed_opt->count() == 0) {
        if (const char* env = std::getenv("BOOLCD_SEED")) return std::stoull(env);
    }
    return seed;
}

struct TaskOptions {
    std::string kind = "mackey_glass";
    int t_train = 1000;
    int t_test = 200;
    int washout = 100;
    int mg_tau = 17;
    double mg_dt = 0.1;
    double synthetic_noise = 0.05;
    double target_offset = 3.0;
    double spectral_radius = 0.9;
    double leak_rate = 0.3;
    double input_scale = 1.0;
    double connectivity = 0.1;

    void add_options(CLI::App* cmd) {
        cmd->add_option("--task", kind, "Task kind: mackey_glass|synthetic")
            ->check(CLI::IsMember({"mackey_glass", "synthetic"}));
        cmd->add_option("--t-train", t_train, "Training horizon T");
        cmd->add_option("--t-test", t_test, "Held-out horizon");
        cmd->add_option("--washout", washout, "Reservoir washout steps");
        cmd->add_option("--tau", mg_tau, "Mackey-Glass delay");
        cmd->add_option("--dt", mg_dt, "Mackey-Glass integration step");
        cmd->add_option("--noise", synthetic_noise, "Synthetic target noise std");
        cmd->add_option("--target-offset", target_offset, "Positive shift applied to the series");
        cmd->add_option("--spectral-radius", spectral_radius, "Recurrent weight scaling");
        cmd->add_option("--leak-rate", leak_rate, "Leak rate in (0,1]");
        cmd->add_option("--input-scale", input_scale, "Input weight scale");
        cmd->add_option("--connectivity", connectivity, "Recurrent connectivity in (0,1]");
    }

    boolcd::TaskSpec to_spec() const {
        boolcd::TaskSpec spec;
        spec.kind = kind;
        spec.t_train = t_train;
        spec.t_test = t_test;
        spec.washout = washout;
        spec.mg_tau = mg_tau;
        spec.mg_dt = mg_dt;
        spec.synthetic_noise = synthetic_noise;
        spec.target_offset = target_offset;
        spec.reservoir.spectral_radius = spectral_radius;
        spec.reservoir.leak_rate = leak_rate;
        spec.reservoir.input_scale = input_scale;
        spec.reservoir.connectivity = connectivity;
        return spec;
    }

    json to_json() const {
        return json{{"task", kind},
                    {"t_train", t_train},
                    {"t_test", t_test},
                    {"washout", washout},
                    {"tau", mg_tau},
                    {"dt", mg_dt},
                    {"noise", synthetic_noise},
                    {"target_offset", target_offset},
                    {"spectral_radius", spectral_radius},
                    {"leak_rate", leak_rate},
                    {"input_scale", input_scale},
                    {"connectivity", connectivity}};
    }
};

int cmd_train(int n, const std::string& policy_name, int epochs, double epsilon, int minimizers,
              std::uint64_t seed, int threads, const TaskOptions& task, const std::string& out) {
    Stopwatch watch;
    boolcd::SweepConfig cfg;  // task construction shared with the sweep
    cfg.sizes = {n};
    cfg.minimizers_per_size = minimizers;
    cfg.policies = {boolcd::policy_from_string(policy_name)};
    cfg.task = task.to_spec();
    cfg.epsilon = epsilon;
    cfg.seed_base = seed;
    cfg.threads = threads;
    cfg.validate();

    boolcd::BuiltProblem problem = boolcd::build_problem(cfg, n);
    const boolcd::BooleanWeights w0 =
        boolcd::BooleanWeights::random(n, boolcd::derive_seed(seed, 0x7730ULL, n));
    boolcd::DescentConfig dc;
    dc.policy.kind = cfg.policies.front();
    dc.max_epochs = epochs > 0 ? epochs : 30 * n;
    dc.target_error = epsilon;
    dc.stop_on_local_min = true;
    dc.record_test_error = problem.test.has_value();
    std::vector<std::uint64_t> seeds;
    for (int m = 0; m < minimizers; ++m)
        seeds.push_back(boolcd::derive_seed(seed, static_cast<std::uint64_t>(n), 1,
                                            static_cast<std::uint64_t>(m)));
    const boolcd::EnsembleResult ensemble =
        boolcd::run_ensemble(problem.objective, w0, dc, minimizers, std::move(seeds),
                             problem.test ? &*problem.test : nullptr, threads);

    fs::create_directories(out);
    std::vector<std::string> outputs;
    for (std::size_t i = 0; i < ensemble.traces.size(); ++i) {
        const std::string path = out + "/trace_" + std::to_string(i) + ".csv";
        std::ofstream f(path, std::ios::binary);
        boolcd::trace_to_csv(ensemble.traces[i], f);
        outputs.push_back(path);
    }
    {
        std::ofstream f(out + "/summary.json", std::ios::binary);
        f << boolcd::ensemble_summary_json(ensemble) << '\n';
        outputs.push_back(out + "/summary.json");
    }
    json config = task.to_json();
    config["n"] = n;
    config["policy"] = policy_name;
    config["epochs"] = dc.max_epochs;
    config["epsilon"] = epsilon;
    config["minimizers"] = minimizers;
    config["threads"] = threads;
    write_manifest(out, "train", config, seed, outputs, watch.seconds());
    std::cout << "K_mean " << boolcd::format_double(ensemble.k_mean) << " K_std "
              << boolcd::format_double(ensemble.k_std) << " final_error "
              << boolcd::format_double(ensemble.mean_error.back()) << "\n";
    return kExitOk;
}

int cmd_sweep(std::vector<int> sizes, int minimizers, std::vector<std::string> policy_names,
              double epsilon, int epochs_factor, std::uint64_t seed, int threads,
              const TaskOptions& task, const std::string& fixture, const std::string& out) {
    Stopwatch watch;
    fs::create_directories(out);

    if (fixture == "linear_k") {
        // planted K = 10 * N data: exercises the fit + output path end to end
        std::vector<double> ns, ks;
        for (int n : sizes) {
            ns.push_back(n);
            ks.push_back(10.0 * n);
        }
        json j;
        std::vector<std::string> outputs;
        for (const auto& name : policy_names) {
            const boolcd::FitResult fit = boolcd::fit_power_law(ns, ks);
            std::printf("scaling_exponent %s %.2f %.2f\n", name.c_str(), fit.exponent,
                        fit.r_squared);
            j["scaling"][name] = json::parse(boolcd::fit_to_json(fit));
        }
        std::ofstream f(out + "/fits.json", std::ios::binary);
        f << j.dump(2) << '\n';
        outputs.push_back(out + "/fits.json");
        write_manifest(out, "sweep", json{{"fixture", fixture}}, seed, outputs, watch.seconds());
        return kExitOk;
    }

    boolcd::SweepConfig cfg;
    cfg.sizes = sizes;
    cfg.minimizers_per_size = minimizers;
    cfg.policies.clear();
    for (const auto& name : policy_names) cfg.policies.push_back(boolcd::policy_from_string(name));
    cfg.task = task.to_spec();
    cfg.epsilon = epsilon;
    cfg.seed_base = seed;
    cfg.max_epochs_factor = epochs_factor;
    cfg.threads = threads;
    cfg.validate();

    const boolcd::SweepReport report = boolcd::run_sweep(cfg);
    boolcd::write_sweep_outputs(report, out);
    for (const auto& [policy, fit] : report.scaling_fits) {
        if (fit.degenerate) continue;
        std::printf("scaling_exponent %s %.2f %.2f\n", policy.c_str(), fit.exponent,
                    fit.r_squared);
    }
    json config = task.to_json();
    config["sizes"] = sizes;
    config["minimizers"] = minimizers;
    config["policies"] = policy_names;
    config["epsilon"] = epsilon;
    config["epochs_factor"] = epochs_factor;
    config["threads"] = threads;
    write_manifest(out, "sweep", config, seed,
                   {out + "/sweep.csv", out + "/fits.json", out + "/curves"}, watch.seconds());
    return kExitOk;
}

int cmd_theory(int n, int t, int instances, int trials, const std::string& policy_name,
               const std::string& distribution_name, double eta_scale,
               std::vector<int> beta_sizes, int beta_trials, std::uint64_t seed,
               const std::string& out) {
    Stopwatch watch;
    const auto distribution = boolcd::entry_distribution_from_string(distribution_name);
    const boolcd::PolicyKind policy_kind = boolcd::policy_from_string(policy_name);

    json instance_reports = json::array();
    double worst_ratio = 0.0;
    double fraction_sum = 0.0;
    int flagged = 0;
    boolcd::KappaResult first_kappa;
    boolcd::RhoResult first_rho;

    for (int i = 0; i < instances; ++i) {
        const boolcd::StateMatrix states = boolcd::random_state_matrix(
            n, t, distribution, boolcd::derive_seed(seed, 0x696e7374ULL, i));
        const double lambda_raw = boolcd::lambda_max(states).raw;
        boolcd::Objective obj(states, boolcd::synthetic_target(
                                          states, boolcd::BooleanWeights::random(
                                                      n, boolcd::derive_seed(seed, 0x77ULL, i)),
                                          0.25, boolcd::derive_seed(seed, 0x74ULL, i)),
                              eta_scale * lambda_raw);
        const boolcd::SmallInstance inst(std::move(obj));
        const boolcd::KappaResult kap = boolcd::kappa(inst);
        boolcd::SelectorPolicy policy{policy_kind, boolcd::derive_seed(seed, 0x70ULL, i)};
        const boolcd::RhoResult rho_result = boolcd::rho(inst, policy, kap);
        const boolcd::ContractionReport contraction =
            boolcd::verify_contraction(inst, policy, trials);
        if (i == 0) {
            first_kappa = kap;
            first_rho = rho_result;
        }
        if (rho_result.vacuous)
            ++flagged;
        else
            worst_ratio = std::max(worst_ratio, contraction.worst_ratio);
        fraction_sum += contraction.fraction_satisfied;
        json ji;
        ji["kappa"] = kap.kappa;
        ji["kappa_variant"] = kap.kappa_variant;
        ji["kappa_degenerate"] = kap.degenerate;
        ji["rho"] = rho_result.rho;
        ji["rho_vacuous"] = rho_result.vacuous;
        ji["worst_ratio"] = contraction.worst_ratio;
        ji["fraction_satisfied"] = contraction.fraction_satisfied;
        ji["steps_checked"] = contraction.steps_checked;
        instance_reports.push_back(ji);
    }

    const boolcd::BetaEstimate beta =
        boolcd::estimate_beta(beta_sizes, distribution, beta_trials,
                              boolcd::derive_seed(seed, 0x62657461ULL));

    std::vector<std::string> notes;
    notes.push_back("flagged_instances " + std::to_string(flagged) + "/" +
                    std::to_string(instances));
    notes.push_back("eta = " + std::to_string(eta_scale) + " * lambda_max(E^t E)");
    if (flagged == instances)
        notes.push_back("all instances had rho outside (0,1): contraction bound vacuous");

    boolcd::ContractionReport aggregate;
    aggregate.rho = first_rho.rho;
    aggregate.rho_vacuous = first_rho.vacuous;
    aggregate.kappa = first_kappa.kappa;
    aggregate.kappa_variant = first_kappa.kappa_variant;
    aggregate.worst_ratio = worst_ratio;
    aggregate.fraction_satisfied = instances > 0 ? fraction_sum / instances : 1.0;

    json report = json::parse(
        boolcd::theory_report_json(first_kappa, first_rho, aggregate, beta, notes));
    report["instances"] = instance_reports;

    fs::create_directories(out);
    {
        std::ofstream f(out + "/theory_report.json", std::ios::binary);
        f << report.dump(2) << '\n';
    }
    json config{{"n", n},           {"t", t},
                {"instances", instances}, {"trials", trials},
                {"policy", policy_name},  {"distribution", distribution_name},
                {"eta_scale", eta_scale}, {"beta_sizes", beta_sizes},
                {"beta_trials", beta_trials}};
    write_manifest(out, "theory", config, seed, {out + "/theory_report.json"}, watch.seconds());
    std::cout << "theory_report " << out << "/theory_report.json\n";
    return kExitOk;
}

int cmd_gen_task(int n, std::uint64_t seed, const TaskOptions& task, const std::string& format,
                 const std::string& out) {
    Stopwatch watch;
    boolcd::ReservoirConfig rc;
    rc.n_nodes = n;
    rc.spectral_radius = task.spectral_radius;
    rc.leak_rate = task.leak_rate;
    rc.input_scale = task.input_scale;
    rc.connectivity = task.connectivity;
    rc.seed = boolcd::derive_seed(seed, 0x7265736572ULL, static_cast<std::uint64_t>(n));

    const int needed = task.washout + task.t_train + task.t_test + 1;
    const std::vector<double> series =
        boolcd::mackey_glass(needed, task.mg_tau, task.mg_dt, boolcd::derive_seed(seed, 0x6d67ULL));
    const boolcd::TaskData data = boolcd::make_task(rc, series, task.t_train, task.t_test,
                                                     task.washout, task.target_offset);
    boolcd::save_task(data, out, format == "bin", rc);

    json config = task.to_json();
    config["n"] = n;
    config["format"] = format;
    write_manifest(out, "gen-task", config, seed,
                   {out + "/state_train." + format, out + "/task.json"}, watch.seconds());
    std::cout << "task written to " << out << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Boolean coordinate-descent training for reservoir readouts"};
    app.require_subcommand(1);
    app.set_config("--config", "", "INI config file; sections name subcommands");

    // train
    auto* train = app.add_subcommand("train", "Run one descent ensemble and export traces");
    int train_n = 961;
    std::string train_policy = "greedy";
    int train_epochs = 0;
    double train_epsilon = 0.0;
    int train_minimizers = 8;
    std::uint64_t train_seed = 0;
    int train_threads = 0;
    std::string train_out = "train_out";
    TaskOptions train_task;
    train->add_option("--n", train_n, "Number of reservoir nodes");
    train->add_option("--policy", train_policy, "markovian|greedy")
        ->check(CLI::IsMember({"markovian", "greedy"}));
    train->add_option("--epochs", train_epochs, "Max epochs (0 = 30*N)");
    train->add_option("--epsilon", train_epsilon, "Target mean-square error");
    train->add_option("--minimizers", train_minimizers, "Descents in the ensemble");
    auto* train_seed_opt = train->add_option("--seed", train_seed, "Base RNG seed");
    train->add_option("--threads", train_threads, "Parallel traces (0 = cores)");
    train->add_option("--out", train_out, "Output directory");
    train_task.add_options(train);

    // sweep
    auto* sweep = app.add_subcommand("sweep", "K-vs-N scaling sweep with fits");
    std::vector<int> sweep_sizes{64, 128, 256, 512, 961};
    int sweep_minimizers = 8;
    std::vector<std::string> sweep_policies{"greedy", "markovian"};
    double sweep_epsilon = 0.35;
    int sweep_epochs_factor = 30;
    std::uint64_t sweep_seed = 0;
    int sweep_threads = 0;
    std::string sweep_fixture;
    std::string sweep_out = "sweep_out";
    TaskOptions sweep_task;
    sweep->add_option("--sizes", sweep_sizes, "N grid (strictly increasing)");
    sweep->add_option("--minimizers", sweep_minimizers, "Descents per cell");
    sweep->add_option("--policies", sweep_policies, "Policies to sweep");
    sweep->add_option("--epsilon", sweep_epsilon, "Target mean-square error");
    sweep->add_option("--epochs-factor", sweep_epochs_factor, "max_epochs = factor * N");
    auto* sweep_seed_opt = sweep->add_option("--seed", sweep_seed, "Base RNG seed");
    sweep->add_option("--threads", sweep_threads, "Parallel traces (0 = cores)");
    sweep->add_option("--fixture", sweep_fixture, "Fixture mode (linear_k)")
        ->check(CLI::IsMember({"", "linear_k"}));
    sweep->add_option("--out", sweep_out, "Output directory");
    sweep_task.add_options(sweep);

    // theory
    auto* theory = app.add_subcommand("theory", "Contraction constants and Theorem checks");
    int theory_n = 8;
    int theory_t = 16;
    int theory_instances = 20;
    int theory_trials = 10;
    std::string theory_policy = "markovian";
    std::string theory_distribution = "uniform01";
    double theory_eta_scale = 0.45;
    std::vector<int> theory_beta_sizes{100, 200, 400};
    int theory_beta_trials = 10;
    std::uint64_t theory_seed = 0;
    std::string theory_out = "theory_out";
    theory->add_option("--n", theory_n, "Instance dimension (<= 12)");
    theory->add_option("--t", theory_t, "Instance horizon (<= 32)");
    theory->add_option("--instances", theory_instances, "Random instances");
    theory->add_option("--trials", theory_trials, "Descent trials per instance");
    theory->add_option("--policy", theory_policy, "markovian|greedy")
        ->check(CLI::IsMember({"markovian", "greedy"}));
    theory->add_option("--distribution", theory_distribution,
                       "uniform01|abs_gaussian|squared_gaussian");
    theory->add_option("--eta-scale", theory_eta_scale, "eta = scale * lambda_max(E^t E)");
    theory->add_option("--beta-sizes", theory_beta_sizes, "Sizes for the beta regression");
    theory->add_option("--beta-trials", theory_beta_trials, "Trials per beta size");
    auto* theory_seed_opt = theory->add_option("--seed", theory_seed, "Base RNG seed");
    theory->add_option("--out", theory_out, "Output directory");

    // gen-task
    auto* gen = app.add_subcommand("gen-task", "Generate and export a prediction task");
    int gen_n = 100;
    std::uint64_t gen_seed = 0;
    std::string gen_format = "csv";
    std::string gen_out = "task_out";
    TaskOptions gen_task_opts;
    gen->add_option("--n", gen_n, "Number of reservoir nodes");
    auto* gen_seed_opt = gen->add_option("--seed", gen_seed, "Base RNG seed");
    gen->add_option("--format", gen_format, "csv|bin")->check(CLI::IsMember({"csv", "bin"}));
    gen->add_option("--out", gen_out, "Output directory");
    gen_task_opts.add_options(gen);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (*train) {
            return cmd_train(train_n, train_policy, train_epochs, train_epsilon,
                             train_minimizers, resolve_seed(train_seed_opt, train_seed),
                             train_threads, train_task, train_out);
        }
        if (*sweep) {
            return cmd_sweep(sweep_sizes, sweep_minimizers, sweep_policies, sweep_epsilon,
                             sweep_epochs_factor, resolve_seed(sweep_seed_opt, sweep_seed),
                             sweep_threads, sweep_task, sweep_fixture, sweep_out);
        }
        if (*theory) {
            if (theory_n > 12 || theory_n < 1) {
                std::cerr << "theory: --n must be in [1,12], got " << theory_n << "\n";
                return kExitConfig;
            }
            return cmd_theory(theory_n, theory_t, theory_instances, theory_trials, theory_policy,
                              theory_distribution, theory_eta_scale, theory_beta_sizes,
                              theory_beta_trials, resolve_seed(theory_seed_opt, theory_seed),
                              theory_out);
        }
        if (*gen) {
            return cmd_gen_task(gen_n, resolve_seed(gen_seed_opt, gen_seed), gen_task_opts,
                                gen_format, gen_out);
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitConfig;
}
