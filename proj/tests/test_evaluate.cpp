#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "fixtures.hpp"
#include "pdm/evaluate.hpp"
#include "pdm/synth.hpp"

using namespace pdm;
using test::at;

namespace {

/// Rows for `machines` x `hours` with failures labelled at the given hours
/// (the same hours on every machine).
std::vector<MachineStateRow> label_grid(int machines, int hours, std::set<int> positive_hours) {
    std::vector<MachineStateRow> rows;
    for (int m = 1; m <= machines; ++m)
        for (int h = 0; h < hours; ++h) {
            MachineStateRow r;
            r.machine_id = MachineId{m};
            r.datetime = at(2015, 1, 1, 0).plus_hours(h);
            r.volt = 170 + ((m * 31 + h * 17) % 13);
            r.rotate = 450 + ((m * 7 + h * 3) % 11);
            r.pressure = 100 + ((m + h * 5) % 7);
            r.vibration = 40 + ((m * 3 + h) % 5);
            r.age = m;
            r.model[static_cast<std::size_t>(m % 4)] = true;
            r.day_of_week = r.datetime.weekday();
            r.label = positive_hours.contains(h);
            r.error[0] = r.label;
            rows.push_back(r);
        }
    return rows;
}

std::vector<MachineStateRow> fixture_rows() {
    static const auto rows = build_event_stream(generate({.n_machines = 20, .n_days = 180, .seed = 7}), {});
    return rows;
}

WeightReport report_of(std::vector<std::pair<std::string, double>> weights) {
    WeightReport r;
    int rank = 0;
    for (auto& [name, w] : weights) r.entries.push_back({name, w, 0.0, ++rank});
    return r;
}

bool contains_telemetry(const std::vector<Feature>& fs) {
    for (Feature f : {Feature::Volt, Feature::Rotate, Feature::Pressure, Feature::Vibration})
        if (std::find(fs.begin(), fs.end(), f) != fs.end()) return true;
    return false;
}

}  // namespace

TEST_CASE("folds: three machines, three folds, one test machine each") {
    const auto rows = label_grid(3, 20, {2, 4, 12, 15});
    const auto folds = make_folds(rows, 3, 42);
    REQUIRE(folds.size() == 3);
    std::set<std::int64_t> tested;
    for (const auto& f : folds) {
        REQUIRE(f.test_machines.size() == 1);
        CHECK(f.train_machines.size() == 2);
        tested.insert(f.test_machines[0].value);
    }
    CHECK(tested == std::set<std::int64_t>{1, 2, 3});
}

TEST_CASE("folds: brute-force oracle on two machines and ten hours") {
    const auto rows = label_grid(2, 10, {1, 7});
    const auto folds = make_folds(rows, 2, 5);
    REQUIRE(folds.size() == 2);
    const Timestamp cutoff = at(2015, 1, 1, 5);  // sorted distinct hours [10 / 2]
    for (const auto& f : folds) {
        CHECK(f.time_cutoff == cutoff);
        REQUIRE(f.test_machines.size() == 1);
        const auto test_m = f.test_machines[0].value;
        std::vector<std::size_t> want_train, want_test;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const bool is_test_machine = rows[i].machine_id.value == test_m;
            const bool late = rows[i].datetime.hours() >= cutoff.hours();
            if (is_test_machine && late) want_test.push_back(i);
            if (!is_test_machine && !late) want_train.push_back(i);
        }
        CHECK(f.train_rows == want_train);
        CHECK(f.test_rows == want_test);
        CHECK(want_train.size() == 5);
        CHECK(want_test.size() == 5);
    }
    CHECK(folds[0].test_machines[0] != folds[1].test_machines[0]);
}

TEST_CASE("folds: machine-disjoint and temporally ordered") {
    const auto rows = build_event_stream(generate({.n_machines = 11, .n_days = 40, .seed = 2}), {});
    for (int k : {2, 3, 5}) {
        for (std::uint64_t seed : {0ULL, 42ULL, 999ULL}) {
            const auto folds = make_folds(rows, k, seed);
            REQUIRE(folds.size() == static_cast<std::size_t>(k));
            std::set<MachineId> all_test;
            for (const auto& f : folds) {
                const std::set<MachineId> test(f.test_machines.begin(), f.test_machines.end());
                const std::set<MachineId> train(f.train_machines.begin(), f.train_machines.end());
                for (const auto& m : test) CHECK(!train.contains(m));
                CHECK(test.size() + train.size() == 11);
                CHECK((test.size() == 11 / static_cast<std::size_t>(k) ||
                       test.size() == 11 / static_cast<std::size_t>(k) + 1));
                for (std::size_t i : f.train_rows) {
                    CHECK(rows[i].datetime < f.time_cutoff);
                    CHECK(train.contains(rows[i].machine_id));
                }
                for (std::size_t i : f.test_rows) {
                    CHECK(rows[i].datetime >= f.time_cutoff);
                    CHECK(test.contains(rows[i].machine_id));
                }
                for (const auto& m : test) CHECK(all_test.insert(m).second);
            }
            CHECK(all_test.size() == 11);
        }
    }
}

TEST_CASE("folds: deterministic in the seed") {
    const auto rows = label_grid(9, 30, {3, 20, 25});
    const auto a = make_folds(rows, 3, 42), b = make_folds(rows, 3, 42);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].test_machines == b[i].test_machines);
        CHECK(a[i].train_rows == b[i].train_rows);
    }
    bool differs = false;
    for (std::uint64_t s = 0; s < 10 && !differs; ++s)
        differs = make_folds(rows, 3, s)[0].test_machines != a[0].test_machines;
    CHECK(differs);
}

TEST_CASE("folds: errors") {
    const auto rows = label_grid(3, 20, {2, 15});
    try {
        (void)make_folds(rows, 5, 42);
        FAIL("expected FoldError");
    } catch (const FoldError& e) {
        CHECK(std::string(e.what()) == "need at least 5 machines for 5 folds, found 3");
    }
    CHECK_THROWS_AS(make_folds(rows, 1, 42), FoldError);

    // no failures after the cutoff: every test side is single-class
    const auto early = label_grid(3, 20, {2});
    try {
        (void)make_folds(early, 3, 42);
        FAIL("expected FoldError");
    } catch (const FoldError& e) {
        CHECK(e.fold() == 0);
        CHECK(std::string(e.what()).find("fold 0") != std::string::npos);
    }
}

TEST_CASE("confusion: counts and normalisation") {
    ConfusionMatrix c;
    // all-negative predictor
    for (int i = 0; i < 90; ++i) c.add(false, false);
    for (int i = 0; i < 10; ++i) c.add(true, false);
    CHECK(c.total() == 100);
    const auto n = c.normalized();
    CHECK(n[0][0] == 1.0);
    CHECK(n[0][1] == 0.0);
    CHECK(n[1][0] == 1.0);
    CHECK(n[1][1] == 0.0);
    CHECK(failure_recall(n) == 0.0);

    ConfusionMatrix d;
    d.add(true, true);
    d.add(true, true);
    d.add(true, false);
    d.add(false, true);
    d.add(false, false);
    d.add(false, false);
    d.add(false, false);
    const auto m = d.normalized();
    CHECK(m[1][1] == doctest::Approx(2.0 / 3.0));
    CHECK(m[0][1] == doctest::Approx(0.25));
    for (const auto& row : m) CHECK(row[0] + row[1] == doctest::Approx(1.0));

    const ConfusionMatrix both[] = {c, d};
    const auto avg = average_normalized(both);
    CHECK(avg[1][1] == doctest::Approx(1.0 / 3.0));
    CHECK(avg[0][1] == doctest::Approx(0.125));
    CHECK(false_negative_rate(avg) == doctest::Approx(1.0 - 1.0 / 3.0));
    CHECK(ConfusionMatrix{}.normalized()[0][0] == 0.0);
}

TEST_CASE("weight report: ordering, sample std and constant entry") {
    LogisticModel a, b;
    a.encoding.features = b.encoding.features = {Feature::Error1, Feature::Volt, Feature::Age};
    a.beta = Eigen::Vector3d(1.0, -5.0, 0.5);
    b.beta = Eigen::Vector3d(3.0, -7.0, 0.5);
    a.alpha = -2.0;
    b.alpha = -2.0;
    const LogisticModel models[] = {a, b};
    const auto r = summarize_weights(models);
    REQUIRE(r.entries.size() == 4);
    CHECK(r.entries[0].feature == "volt");
    CHECK(r.entries[0].mean == -6.0);
    CHECK(r.entries[0].std_dev == doctest::Approx(std::sqrt(2.0)));
    CHECK(r.entries[0].abs_rank == 1);
    // tie between error_1 (mean 2) and the constant (mean -2): constant last
    CHECK(r.entries[1].feature == "error_1");
    CHECK(r.entries[2].feature == "constant");
    CHECK(r.entries[3].feature == "age");
    CHECK(r.entries[3].std_dev == 0.0);
    CHECK(r.find("constant")->mean == -2.0);
    CHECK(r.find("dow_mon") == nullptr);
}

TEST_CASE("pruning: relative rule") {
    const auto r = report_of({{"error_2", 9.0}, {"constant", -4.0}, {"age", 0.95}, {"volt", -0.92},
                              {"error_1", 0.91}, {"model_3", 0.1}});
    const auto kept = prune_features(r, {});
    CHECK(kept == std::vector<Feature>{Feature::Error1, Feature::Error2, Feature::Volt, Feature::Age});
    // pruning keeps canonical order, whatever the report order
    auto shuffled = r;
    std::reverse(shuffled.entries.begin(), shuffled.entries.end());
    CHECK(prune_features(shuffled, {}) == kept);

    const auto single = report_of({{"error_4", 12.0}, {"constant", 100.0}, {"volt", 0.5}, {"dow_sat", -0.3}});
    CHECK(prune_features(single, {}) == std::vector<Feature>{Feature::Error4});

    CHECK(prune_features(r, {PruningKind::Relative, 0.5}) == std::vector<Feature>{Feature::Error2});
    CHECK_THROWS_AS(prune_features(report_of({{"constant", 1.0}, {"volt", 0.0}}), {}),
                    std::invalid_argument);
}

TEST_CASE("pruning: reduced preset keeps ten features") {
    WeightReport full;
    for (Feature f : all_features()) full.entries.push_back({std::string(feature_name(f)), 1.0, 0.0, 0});
    full.entries.push_back({"constant", 1.0, 0.0, 0});
    const auto kept = prune_features(full, {PruningKind::ReducedPreset});
    REQUIRE(kept.size() == 10);
    CHECK(kept == reduced_preset_features());
    CHECK(!contains_telemetry(kept));
}

TEST_CASE("cv: encoding and model see only training rows") {
    auto rows = build_event_stream(generate({.n_machines = 6, .n_days = 40, .seed = 4}), {});
    const auto folds = make_folds(rows, 3, 42);
    const auto base = evaluate_cv(rows, folds, {});

    // perturb every row that is test-side in fold 0
    auto perturbed = rows;
    for (std::size_t i : folds[0].test_rows) {
        perturbed[i].volt += 500.0;
        perturbed[i].age += 40;
    }
    const std::span<const FoldSplit> first(folds.data(), 1);
    const auto a = evaluate_cv(rows, first, {});
    const auto b = evaluate_cv(perturbed, first, {});
    CHECK(a.folds[0].model.alpha == b.folds[0].model.alpha);
    CHECK(a.folds[0].model.beta == b.folds[0].model.beta);
    CHECK(a.folds[0].model.encoding == b.folds[0].model.encoding);
    CHECK(a.folds[0].model.beta == base.folds[0].model.beta);
    CHECK(a.folds[0].train_rows == folds[0].train_rows.size());
    CHECK(a.folds[0].test_rows == folds[0].test_rows.size());
}

TEST_CASE("cv: rescaling a raw measurement does not change predictions (no penalty)") {
    auto rows = build_event_stream(generate({.n_machines = 6, .n_days = 40, .seed = 8}), {});
    const auto folds = make_folds(rows, 2, 1);
    CvConfig cfg;
    cfg.fit.l2_strength = 0.0;
    // drop the one-hot groups that are collinear with the intercept
    cfg.features = {Feature::Error1, Feature::Error2, Feature::Error3, Feature::Error4, Feature::Error5,
                    Feature::Volt,   Feature::Rotate, Feature::Pressure, Feature::Vibration, Feature::Age};
    const auto a = evaluate_cv(rows, folds, cfg);
    for (auto& r : rows) {
        r.volt = r.volt * 1000.0 + 7.0;
        r.vibration *= 0.001;
    }
    const auto b = evaluate_cv(rows, folds, cfg);
    for (std::size_t f = 0; f < folds.size(); ++f) {
        CHECK(a.folds[f].confusion.counts == b.folds[f].confusion.counts);
        // equal up to solver tolerance; no penalty leaves some directions weakly curved
        CHECK((a.folds[f].model.beta - b.folds[f].model.beta).cwiseAbs().maxCoeff() < 1e-4);
    }
}

TEST_CASE("cv: errors inside a fold name the fold") {
    auto rows = build_event_stream(generate({.n_machines = 6, .n_days = 40, .seed = 4}), {});
    const auto folds = make_folds(rows, 3, 42);
    // constant pressure on fold 1's training rows only
    for (std::size_t i : folds[1].train_rows) rows[i].pressure = 100.0;
    try {
        (void)evaluate_cv(rows, folds, {});
        FAIL("expected FoldError");
    } catch (const FoldError& e) {
        CHECK(e.fold() == 1);
        CHECK(std::string(e.what()).find("degenerate") != std::string::npos);
    }
}

TEST_CASE("planted fixture: errors dominate and recall is high") {
    const auto rows = fixture_rows();
    const auto folds = make_folds(rows, 3, 42);
    const auto full = evaluate_cv(rows, folds, {});
    CHECK(failure_recall(full.average) >= 0.95);
    for (const auto& row : full.average) CHECK(row[0] + row[1] == doctest::Approx(1.0));

    // the top five non-constant weights are the error flags
    int seen = 0;
    for (const auto& e : full.weights.entries) {
        if (e.feature == kConstantName) continue;
        CHECK(e.feature.rfind("error_", 0) == 0);
        if (++seen == 5) break;
    }

    // relative rule and preset agree on dropping telemetry
    const auto relative = prune_features(full.weights, {});
    const auto preset = prune_features(full.weights, {PruningKind::ReducedPreset});
    CHECK(!contains_telemetry(relative));
    CHECK(!contains_telemetry(preset));

    CvConfig reduced;
    reduced.features = preset;
    const auto red = evaluate_cv(rows, folds, reduced);
    CHECK(red.features.size() == 10);
    CHECK(failure_recall(red.average) >= failure_recall(full.average) - 0.02);
}

TEST_CASE("positive-class weight raises recall") {
    const auto rows = fixture_rows();
    const auto folds = make_folds(rows, 3, 42);
    CvConfig heavy, light;
    light.weight_positive = 1.0;
    const auto h = evaluate_cv(rows, folds, heavy), l = evaluate_cv(rows, folds, light);
    CHECK(failure_recall(h.average) >= failure_recall(l.average));
    CHECK(false_positive_rate(h.average) >= false_positive_rate(l.average));
}
