#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>
#include <sstream>

#include "boolcd/descent.hpp"
#include "boolcd/theory.hpp"
#include "oracle_helpers.hpp"

using namespace boolcd;

namespace {

SelectorPolicy greedy_with_bias(std::initializer_list<double> bias, std::uint64_t seed = 1) {
    SelectorPolicy p{PolicyKind::greedy, seed};
    Eigen::VectorXd b(static_cast<Eigen::Index>(bias.size()));
    Eigen::Index i = 0;
    for (double v : bias) b[i++] = v;
    p.initial_bias = b;
    return p;
}

}  // namespace

TEST_CASE("greedy argmax is forced by a single nonzero bias") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        CoordinateSelector selector(greedy_with_bias({0.0, 5.0, 0.0}, seed), 3);
        CHECK(selector.select() == 1);
        // selected coordinate has bias zero afterwards, so it cannot win again
        CHECK(selector.bias()[1] == 0.0);
        CHECK(selector.select() != 1);
    }
}

TEST_CASE("all-zero bias products fall back to the lowest index") {
    CoordinateSelector selector(greedy_with_bias({0.0, 0.0, 0.0}), 3);
    CHECK(selector.select() == 0);
}

TEST_CASE("greedy bias dynamics: +1/N per epoch, selected reset, max age has max bias") {
    const int n = 16;
    SelectorPolicy policy{PolicyKind::greedy, 5};
    CoordinateSelector selector(policy, n);
    std::vector<int> age(n, -1);  // epochs since last selection; -1 = never
    for (int epoch = 0; epoch < 40 * n; ++epoch) {
        const int l = selector.select();
        for (auto& a : age)
            if (a >= 0) ++a;
        age[static_cast<std::size_t>(l)] = 0;
        CHECK(selector.bias()[l] == 0.0);
        if (epoch > 2 * n) {
            // after warm-up every bias equals age/N, so a coordinate unselected
            // for N epochs has bias >= 1 and the oldest has the max bias
            int oldest = 0;
            for (int i = 0; i < n; ++i) {
                REQUIRE(age[static_cast<std::size_t>(i)] >= 0);
                CHECK(selector.bias()[i] ==
                      doctest::Approx(age[static_cast<std::size_t>(i)] / static_cast<double>(n)));
                if (age[static_cast<std::size_t>(i)] > age[static_cast<std::size_t>(oldest)])
                    oldest = i;
            }
            if (age[static_cast<std::size_t>(oldest)] >= n)
                CHECK(selector.bias()[oldest] >= 1.0);
            CHECK(selector.bias()[oldest] == selector.bias().maxCoeff());
        }
    }
}

TEST_CASE("greedy coverage: N-epoch windows hit at least N/2 distinct coordinates") {
    const int n = 32;
    CoordinateSelector selector(SelectorPolicy{PolicyKind::greedy, 17}, n);
    std::vector<int> picks;
    for (int epoch = 0; epoch < 20 * n; ++epoch) picks.push_back(selector.select());
    for (std::size_t start = static_cast<std::size_t>(2 * n); start + n < picks.size();
         start += n) {
        std::set<int> distinct(picks.begin() + static_cast<long>(start),
                               picks.begin() + static_cast<long>(start + n));
        CHECK(distinct.size() >= static_cast<std::size_t>(n / 2));
    }
}

TEST_CASE("markovian selection is uniform (1e5 draws, 0.25 +- 0.01)") {
    CoordinateSelector selector(SelectorPolicy{PolicyKind::markovian, 23}, 4);
    std::vector<int> counts(4, 0);
    const int draws = 100000;
    for (int k = 0; k < draws; ++k) ++counts[static_cast<std::size_t>(selector.select())];
    double chi2 = 0.0;
    for (int c : counts) {
        CHECK(std::abs(c / static_cast<double>(draws) - 0.25) <= 0.01);
        const double expected = draws / 4.0;
        chi2 += (c - expected) * (c - expected) / expected;
    }
    CHECK(chi2 < 16.3);  // chi-square_3 at the 0.001 level
}

TEST_CASE("bias access on a markovian selector is a state error") {
    CoordinateSelector selector(SelectorPolicy{PolicyKind::markovian, 1}, 4);
    CHECK_THROWS_AS(selector.bias(), std::logic_error);
    SelectorPolicy bad{PolicyKind::greedy, 1};
    bad.initial_bias = Eigen::VectorXd::Ones(3);
    CHECK_THROWS_AS(CoordinateSelector(bad, 4), std::invalid_argument);
}

TEST_CASE("step keeps improving flips and reverts the rest") {
    Eigen::MatrixXd e(2, 2);
    e << 1, 2, 3, 4;
    const Eigen::Vector2d target(1, 3);  // exactly column 0
    const Objective obj(StateMatrix(e), target, 0.0);

    const BooleanWeights w0 = oracle::weights_from_index(0, 2);  // (0,0)
    const StepResult improve = step(obj, w0, 0);
    CHECK(improve.reward == 1);
    CHECK(improve.error == 0.0);
    CHECK(improve.weights.bit(0) == 1);

    // a rejected flip leaves weights and error untouched (idempotent reversion)
    const BooleanWeights w1 = improve.weights;
    const StepResult reject = step(obj, w1, 1);
    CHECK(reject.reward == 0);
    CHECK(reject.weights == w1);
    CHECK(reject.error == 0.0);
    const StepResult again = step(obj, reject.weights, 1);
    CHECK(again.weights == w1);
    CHECK(again.error == reject.error);
}

TEST_CASE("step agrees with the flip-compare-revert oracle on all states x coordinates") {
    const Objective obj = oracle::random_instance(3, 4, 55);
    for (std::uint32_t idx = 0; idx < 8; ++idx) {
        for (int l = 0; l < 3; ++l) {
            const BooleanWeights w = oracle::weights_from_index(idx, 3);
            const StepResult got = step(obj, w, l);

            BooleanWeights flipped = w;  // oracle: full recomputation, then compare
            flipped.flip(l);
            const double before = obj.mse(w);
            const double after = obj.mse(flipped);
            if (after < before) {
                CHECK(got.reward == 1);
                CHECK(got.weights == flipped);
                CHECK(got.error == doctest::Approx(after).epsilon(1e-9));
            } else {
                CHECK(got.reward == 0);
                CHECK(got.weights == w);
                CHECK(got.error == doctest::Approx(before).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("descent from a constructed local minimum certifies with zero accepted flips") {
    const Objective obj = oracle::random_instance(8, 16, 91);
    // exhaustive search for a local minimizer
    std::optional<BooleanWeights> local_min;
    for (std::uint32_t idx = 0; idx < 256 && !local_min; ++idx) {
        const BooleanWeights w = oracle::weights_from_index(idx, 8);
        if (oracle::is_local_min_exhaustive(obj.state(), obj.target(), w)) local_min = w;
    }
    REQUIRE(local_min.has_value());

    DescentConfig cfg;
    cfg.policy = SelectorPolicy{PolicyKind::markovian, 7};
    cfg.max_epochs = 10000;
    const DescentTrace trace = run_descent(obj, *local_min, cfg);
    CHECK(trace.converged_reason == StopReason::local_min);
    CHECK(trace.epochs_to_converge == 0);
    CHECK(trace.final_weights == *local_min);
}

TEST_CASE("epsilon equal to the initial error stops immediately with K = 0") {
    const Objective obj = oracle::random_instance(6, 12, 13);
    const BooleanWeights w0 = BooleanWeights::random(6, 3);
    DescentConfig cfg;
    cfg.policy = SelectorPolicy{PolicyKind::greedy, 3};
    cfg.target_error = obj.mse(w0);
    const DescentTrace trace = run_descent(obj, w0, cfg);
    CHECK(trace.converged_reason == StopReason::epsilon);
    CHECK(trace.epochs_to_converge == 0);
    CHECK(trace.total_epochs == 0);
    CHECK(trace.records.size() == 1);
}

TEST_CASE("terminal states are exhaustively verified local minimizers (50 seeds)") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const Objective obj = oracle::random_instance(8, 16, 1000 + seed);
        DescentConfig cfg;
        cfg.policy = SelectorPolicy{seed % 2 ? PolicyKind::greedy : PolicyKind::markovian, seed};
        cfg.max_epochs = 20000;
        const DescentTrace trace =
            run_descent(obj, BooleanWeights::random(8, seed ^ 0xFFULL), cfg);
        REQUIRE(trace.converged_reason == StopReason::local_min);
        CHECK(oracle::is_local_min_exhaustive(obj.state(), obj.target(), trace.final_weights));
    }
}

TEST_CASE("accepted-state error sequence is non-increasing for both policies") {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const int n = 4 + static_cast<int>(seed % 13) * 4;
        const Objective obj = oracle::random_instance(n, 2 * n, 7000 + seed);
        DescentConfig cfg;
        cfg.policy = SelectorPolicy{seed % 2 ? PolicyKind::greedy : PolicyKind::markovian, seed};
        cfg.max_epochs = 50 * n;
        const DescentTrace trace = run_descent(obj, BooleanWeights::random(n, seed), cfg);
        for (std::size_t k = 1; k < trace.records.size(); ++k)
            REQUIRE(trace.records[k].error <= trace.records[k - 1].error);
    }
}

TEST_CASE("reachable fixed points equal the enumerated local minimizers at N = 6") {
    const Objective obj = oracle::random_instance(6, 12, 321);
    const SmallInstance inst(obj);
    const std::vector<SpinVector> minimizers = local_minimizers(inst);
    std::set<std::uint32_t> minimizer_ids;
    for (const auto& m : minimizers) minimizer_ids.insert(inst.index_of(m));

    std::set<std::uint32_t> reached;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        DescentConfig cfg;
        cfg.policy = SelectorPolicy{seed % 2 ? PolicyKind::greedy : PolicyKind::markovian, seed};
        cfg.max_epochs = 5000;
        const DescentTrace trace =
            run_descent(obj, BooleanWeights::random(6, seed * 31 + 1), cfg);
        reached.insert(inst.index_of(spin_of(trace.final_weights)));
    }
    for (std::uint32_t id : reached) CHECK(minimizer_ids.count(id) == 1);
    // every enumerated minimizer is itself reachable: starting there stays there
    for (std::uint32_t id : minimizer_ids) {
        DescentConfig cfg;
        cfg.policy = SelectorPolicy{PolicyKind::markovian, id};
        cfg.max_epochs = 5000;
        const DescentTrace trace = run_descent(obj, bool_of(inst.spin_at(id)), cfg);
        CHECK(inst.index_of(spin_of(trace.final_weights)) == id);
    }
}

TEST_CASE("greedy and markovian traces coincide at N = 1") {
    Eigen::MatrixXd e(3, 1);
    e << 0.5, 1.0, 0.25;
    const Objective obj(StateMatrix(e), Eigen::Vector3d(0.4, 0.9, 0.3), 0.0);
    DescentConfig cfg;
    cfg.max_epochs = 10;
    cfg.policy = SelectorPolicy{PolicyKind::markovian, 5};
    const DescentTrace markovian = run_descent(obj, BooleanWeights::zeros(1), cfg);
    cfg.policy = SelectorPolicy{PolicyKind::greedy, 99};
    const DescentTrace greedy = run_descent(obj, BooleanWeights::zeros(1), cfg);
    REQUIRE(markovian.records.size() == greedy.records.size());
    for (std::size_t k = 0; k < markovian.records.size(); ++k) {
        CHECK(markovian.records[k].flipped_index == greedy.records[k].flipped_index);
        CHECK(markovian.records[k].error == greedy.records[k].error);
        CHECK(markovian.records[k].reward == greedy.records[k].reward);
    }
    CHECK(markovian.epochs_to_converge == greedy.epochs_to_converge);
}

TEST_CASE("ensembles: single trace has zero std, equal seeds match, order fixed") {
    const Objective obj = oracle::random_instance(10, 20, 404);
    const BooleanWeights w0 = BooleanWeights::random(10, 1);
    DescentConfig cfg;
    cfg.policy = SelectorPolicy{PolicyKind::greedy, 11};
    cfg.max_epochs = 2000;

    const EnsembleResult solo = run_ensemble(obj, w0, cfg, 1);
    for (double s : solo.std_error) CHECK(s == 0.0);
    CHECK(solo.k_std == 0.0);

    const EnsembleResult twin = run_ensemble(obj, w0, cfg, 2, {42, 42});
    REQUIRE(twin.traces.size() == 2);
    CHECK(twin.traces[0].records.size() == twin.traces[1].records.size());
    CHECK(twin.traces[0].final_weights == twin.traces[1].final_weights);
    for (double s : twin.std_error) CHECK(s == doctest::Approx(0.0));

    const EnsembleResult a = run_ensemble(obj, w0, cfg, 4, {}, nullptr, 1);
    const EnsembleResult b = run_ensemble(obj, w0, cfg, 4, {}, nullptr, 4);
    REQUIRE(a.traces.size() == b.traces.size());
    for (std::size_t i = 0; i < a.traces.size(); ++i) {
        CHECK(a.traces[i].epochs_to_converge == b.traces[i].epochs_to_converge);
        CHECK(a.traces[i].final_error() == b.traces[i].final_error());
    }
    CHECK(a.mean_error == b.mean_error);
}

TEST_CASE("trace csv format") {
    const Objective obj = oracle::random_instance(4, 8, 17);
    DescentConfig cfg;
    cfg.policy = SelectorPolicy{PolicyKind::markovian, 2};
    cfg.max_epochs = 20;
    cfg.stop_on_local_min = false;
    const DescentTrace trace = run_descent(obj, BooleanWeights::zeros(4), cfg);
    std::ostringstream out;
    trace_to_csv(trace, out);
    const std::string text = out.str();
    CHECK(text.rfind("epoch,flipped_index,error,reward,test_error\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == static_cast<long>(trace.records.size()) + 1);
}

TEST_CASE("ensemble summary json carries the documented keys") {
    const Objective obj = oracle::random_instance(5, 10, 3);
    DescentConfig cfg;
    cfg.policy = SelectorPolicy{PolicyKind::greedy, 1};
    cfg.max_epochs = 500;
    const EnsembleResult ens = run_ensemble(obj, BooleanWeights::zeros(5), cfg, 3);
    const std::string json = ensemble_summary_json(ens);
    for (const char* key : {"mean_error", "std_error", "K_mean", "K_std", "converged_reason"})
        CHECK(json.find(key) != std::string::npos);
}
