#include "boolcd/tasks.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <stdexcept>

#include "boolcd/format.hpp"
#include "boolcd/rng.hpp"

namespace boolcd {

namespace {

double mg_derivative(double x_now, double x_delayed) {
    constexpr double kBeta = 0.2, kGamma = 0.1, kExponent = 10.0;
    return kBeta * x_delayed / (1.0 + std::pow(x_delayed, kExponent)) - kGamma * x_now;
}

/// RK4 step with the delayed value frozen across the step.
double mg_rk4(double x, double x_delayed, double dt) {
    const double k1 = dt * mg_derivative(x, x_delayed);
    const double k2 = dt * mg_derivative(x + 0.5 * k1, x_delayed);
    const double k3 = dt * mg_derivative(x + 0.5 * k2, x_delayed);
    const double k4 = dt * mg_derivative(x + k3, x_delayed);
    return x + k1 / 6.0 + k2 / 3.0 + k3 / 3.0 + k4 / 6.0;
}

}  // namespace

std::vector<double> mackey_glass(int length, int tau, double dt, std::uint64_t seed) {
    if (length < 1) throw std::invalid_argument("length must be >= 1");
    if (tau < 0) throw std::invalid_argument("tau must be >= 0");
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");

    const int delay_steps = static_cast<int>(std::lround(tau / dt));
    const int transient = delay_steps > 0 ? 2000 + 2 * delay_steps : 200;
    Rng rng(derive_seed(seed, 0x6d61636b6579ULL));

    // seeded perturbation of the classic 1.2 starting level
    std::vector<double> history(static_cast<std::size_t>(std::max(delay_steps, 1)));
    for (auto& h : history) h = 1.2 + 0.2 * (rng.uniform01() - 0.5);

    std::vector<double> series;
    series.reserve(static_cast<std::size_t>(length));
    double x = history.back();
    std::size_t ring = 0;
    for (int step_idx = 0; step_idx < transient + length; ++step_idx) {
        const double delayed = delay_steps == 0 ? x : history[ring];
        const double next = mg_rk4(x, delayed, dt);
        if (delay_steps > 0) {
            history[ring] = next;
            ring = (ring + 1) % history.size();
        }
        x = next;
        if (step_idx >= transient) series.push_back(x);
    }

    double mean = 0.0;
    for (double v : series) mean += v;
    mean /= static_cast<double>(series.size());
    double var = 0.0;
    for (double v : series) var += (v - mean) * (v - mean);
    var /= static_cast<double>(series.size());
    const double scale = var > 0.0 ? 1.0 / std::sqrt(var) : 1.0;
    for (double& v : series) v = (v - mean) * scale;
    return series;
}

Eigen::VectorXd synthetic_target(const StateMatrix& state, const BooleanWeights& planted_w,
                                 double noise_std, std::uint64_t seed) {
    if (planted_w.size() != state.nodes())
        throw std::invalid_argument("synthetic_target: dimension mismatch");
    if (noise_std < 0.0) throw std::invalid_argument("noise_std must be >= 0");
    Eigen::VectorXd target = state.values() * planted_w.to_real();
    if (noise_std > 0.0) {
        Rng rng(derive_seed(seed, 0x6e6f697365ULL));
        for (Eigen::Index i = 0; i < target.size(); ++i)
            target[i] += noise_std * rng.gaussian();
    }
    return target;
}

TaskData make_task(const ReservoirConfig& cfg, std::span<const double> series, int t_train,
                   int t_test, int washout, double target_offset) {
    if (t_train < 1) throw std::invalid_argument("t_train must be >= 1");
    if (t_test < 0) throw std::invalid_argument("t_test must be >= 0");
    if (washout < 0) throw std::invalid_argument("washout must be >= 0");
    const long total = t_train + t_test;
    const long needed = washout + total + 1;  // +1 for the one-step-ahead target
    if (static_cast<long>(series.size()) < needed)
        throw std::invalid_argument("series too short: need " + std::to_string(needed) +
                                    " samples, got " + std::to_string(series.size()));

    std::vector<double> shifted(series.begin(), series.end());
    for (double& v : shifted) v += target_offset;

    const StateMatrix raw = drive_reservoir(
        cfg, std::span<const double>(shifted).subspan(0, static_cast<std::size_t>(washout + total)),
        washout);

    double target_mean = 0.0;
    for (int n = 0; n < t_train; ++n)
        target_mean += shifted[static_cast<std::size_t>(washout + n + 1)];
    target_mean /= static_cast<double>(t_train);
    const double mean_row_sum = raw.values().topRows(t_train).sum() / static_cast<double>(t_train);
    const double gain = mean_row_sum > 0.0 ? 1.0 * target_mean / mean_row_sum : 1.0;
    const StateMatrix full(raw.values() * gain);

    TaskData task{
        std::move(shifted),
        StateMatrix(full.values().topRows(t_train)),
        Eigen::VectorXd(t_train),
        std::nullopt,
        Eigen::VectorXd(t_test),
        washout,
        target_offset,
        gain,
    };
    for (int n = 0; n < t_train; ++n)
        task.target_train[n] = task.input[static_cast<std::size_t>(washout + n + 1)];
    if (t_test > 0) {
        task.state_test.emplace(full.values().bottomRows(t_test));
        for (int n = 0; n < t_test; ++n)
            task.target_test[n] =
                task.input[static_cast<std::size_t>(washout + t_train + n + 1)];
    }
    return task;
}

void save_task(const TaskData& task, const std::string& dir, bool binary,
               const ReservoirConfig& cfg) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const std::string ext = binary ? ".bin" : ".csv";
    const auto save = [&](const StateMatrix& m, const std::string& name) {
        if (binary)
            m.save_binary(dir + "/" + name + ext);
        else
            m.save_csv(dir + "/" + name + ext);
    };
    save(task.state_train, "state_train");
    if (task.has_test()) save(*task.state_test, "state_test");

    const auto save_vector = [&](const Eigen::VectorXd& v, const std::string& name) {
        std::ofstream out(dir + "/" + name + ".csv", std::ios::binary);
        out << "target\n";
        for (Eigen::Index i = 0; i < v.size(); ++i) out << format_double(v[i]) << '\n';
    };
    save_vector(task.target_train, "target_train");
    if (task.target_test.size() > 0) save_vector(task.target_test, "target_test");

    nlohmann::json j;
    j["t_train"] = task.state_train.horizon();
    j["t_test"] = task.has_test() ? task.state_test->horizon() : 0;
    j["n_nodes"] = task.state_train.nodes();
    j["washout"] = task.washout;
    j["input_length"] = task.input.size();
    j["target_offset"] = task.target_offset;
    j["intensity_gain"] = task.intensity_gain;
    j["shift_convention"] = "target[n] = input[washout + n + 1] (one-step-ahead)";
    j["format"] = binary ? "bin" : "csv";
    j["reservoir"] = {{"n_nodes", cfg.n_nodes},
                      {"spectral_radius", cfg.spectral_radius},
                      {"leak_rate", cfg.leak_rate},
                      {"input_scale", cfg.input_scale},
                      {"connectivity", cfg.connectivity},
                      {"seed", cfg.seed}};
    std::ofstream meta(dir + "/task.json", std::ios::binary);
    meta << j.dump(2) << '\n';
}

}  // namespace boolcd
