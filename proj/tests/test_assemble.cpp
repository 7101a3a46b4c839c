#include "doctest.h"

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "pdm/assemble.hpp"

using namespace pdm;
using test::at;

namespace {

DatasetBundle grid_bundle(int machines, int hours) {
    DatasetBundle b;
    for (int m = 1; m <= machines; ++m) {
        b.machines.push_back({MachineId{m}, 10 + m, {m == 1, m == 2, m == 3, m >= 4}});
        for (int h = 0; h < hours; ++h)
            b.telemetry.push_back({MachineId{m}, at(2015, 6, 1, 0).plus_hours(h), 170.0 + h,
                                   450.0 - h, 100.0 + m, 40.0 + 0.5 * h});
    }
    return b;
}

const MachineStateRow& row_at(const std::vector<MachineStateRow>& rows, int machine, Timestamp t) {
    for (const auto& r : rows)
        if (r.machine_id.value == machine && r.datetime == t) return r;
    throw std::runtime_error("row not found");
}

bool has_row(const std::vector<MachineStateRow>& rows, int machine, Timestamp t) {
    for (const auto& r : rows)
        if (r.machine_id.value == machine && r.datetime == t) return true;
    return false;
}

}  // namespace

TEST_CASE("rows without events have all event flags false") {
    const auto rows = build_event_stream(grid_bundle(2, 48), {});
    REQUIRE(rows.size() == 2u * 24u);
    for (const auto& r : rows) {
        for (bool f : r.error) CHECK(!f);
        for (bool f : r.comp) CHECK(!f);
        for (bool f : r.comp_fail) CHECK(!f);
        CHECK(!r.label);
    }
}

TEST_CASE("label is the failure state horizon hours later") {
    auto b = grid_bundle(3, 72);
    b.failures.push_back({MachineId{3}, at(2015, 6, 2, 10), {true, false, false, false}});
    const auto rows = build_event_stream(b, {});
    CHECK(row_at(rows, 3, at(2015, 6, 1, 10)).label);
    int positives = 0;
    for (const auto& r : rows) positives += r.label ? 1 : 0;
    CHECK(positives == 1);
    // the failure hour itself, one hour before and one after are not labelled
    CHECK(!row_at(rows, 3, at(2015, 6, 2, 10)).label);
    CHECK(!row_at(rows, 3, at(2015, 6, 1, 9)).label);
    CHECK(!row_at(rows, 3, at(2015, 6, 1, 11)).label);
}

TEST_CASE("window mode labels every row within the horizon") {
    auto b = grid_bundle(1, 72);
    b.failures.push_back({MachineId{1}, at(2015, 6, 2, 10), {false, true, false, false}});
    const auto rows = build_event_stream(b, {24, true});
    for (const auto& r : rows) {
        const auto lead = r.datetime.hours_until(at(2015, 6, 2, 10));
        CHECK(r.label == (lead >= 1 && lead <= 24));
    }
}

TEST_CASE("rows past the last horizon are truncated") {
    const auto b = grid_bundle(3, 72);
    for (int h : {1, 24, 48, 71}) {
        const auto rows = build_event_stream(b, {h, false});
        CHECK(rows.size() == static_cast<std::size_t>(3 * (72 - h)));
        CHECK(!has_row(rows, 1, at(2015, 6, 1, 0).plus_hours(72 - h)));
        CHECK(has_row(rows, 1, at(2015, 6, 1, 0).plus_hours(71 - h)));
    }
    CHECK(build_event_stream(b, {72, false}).empty());
    CHECK_THROWS_AS(build_event_stream(b, {0, false}), std::invalid_argument);
}

TEST_CASE("colliding events are OR-merged") {
    auto b = grid_bundle(1, 48);
    const auto t = at(2015, 6, 1, 5);
    b.errors.push_back({MachineId{1}, t, {true, false, false, false, false}});
    b.errors.push_back({MachineId{1}, t, {false, false, true, false, false}});
    b.maintenance.push_back({MachineId{1}, t, {true, false, false, false}, {true, false, false, false}});
    b.maintenance.push_back({MachineId{1}, t, {false, false, false, true}, {}});
    const auto& r = row_at(build_event_stream(b, {}), 1, t);
    CHECK(r.error == std::array<bool, 5>{true, false, true, false, false});
    CHECK(r.comp == std::array<bool, 4>{true, false, false, true});
    CHECK(r.comp_fail == std::array<bool, 4>{true, false, false, false});
}

TEST_CASE("join matches the nested-loop oracle") {
    for (std::uint32_t seed = 1; seed <= 25; ++seed) {
        test::MicroShape shape;
        shape.gap_p = seed % 3 == 0 ? 0.1 : 0.0;
        const auto b = test::micro_bundle(seed, shape);
        for (const HorizonConfig h : {HorizonConfig{24, false}, HorizonConfig{24, true},
                                      HorizonConfig{5, false}, HorizonConfig{7, true}}) {
            const auto got = build_event_stream(b, h);
            const auto want = test::brute_force_stream(b, h.horizon_hours, h.label_window);
            CHECK_MESSAGE(got == want, "seed " << seed << " horizon " << h.horizon_hours
                                               << (h.label_window ? " window" : ""));
        }
    }
}

TEST_CASE("machine missing from descriptors is an assembly error") {
    auto b = grid_bundle(2, 30);
    b.machines.pop_back();
    try {
        (void)build_event_stream(b, {});
        FAIL("expected AssemblyError");
    } catch (const AssemblyError& e) {
        CHECK(e.machine().value == 2);
    }
}

// ---------------------------------------------------------------------------
// Encoding

TEST_CASE("encode: column means map to zero on the fit rows") {
    const auto rows = build_event_stream(test::micro_bundle(4), {});
    const auto fit = test::all_rows(rows.size());
    const auto d = encode(rows, 100.0, fit);
    REQUIRE(d.features() == 29);
    for (Feature f : {Feature::Volt, Feature::Rotate, Feature::Pressure, Feature::Vibration, Feature::Age}) {
        const auto col = static_cast<Eigen::Index>(f);
        CHECK(std::abs(d.x.col(col).mean()) < 1e-12);
        const double var = (d.x.col(col).array() - d.x.col(col).mean()).square().mean();
        CHECK(var == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("encode: a row at the fit mean encodes to zero") {
    std::vector<MachineStateRow> rows(3);
    for (int i = 0; i < 3; ++i) {
        rows[i].machine_id = MachineId{i + 1};
        rows[i].volt = 160 + 10 * i;
        rows[i].rotate = 400 + 50 * i;
        rows[i].pressure = 90 + 10 * i;
        rows[i].vibration = 30 + 10 * i;
        rows[i].age = 5 + 5 * i;
        rows[i].model[0] = true;
    }
    const std::size_t fit[] = {0, 1, 2};
    const auto d = encode(rows, 100.0, fit);
    for (Feature f : {Feature::Volt, Feature::Rotate, Feature::Pressure, Feature::Vibration, Feature::Age})
        CHECK(d.x(1, static_cast<Eigen::Index>(f)) == doctest::Approx(0.0));
    CHECK(d.x(2, static_cast<Eigen::Index>(Feature::Volt)) == doctest::Approx(std::sqrt(1.5)));
}

TEST_CASE("encode: weights and weekday one-hot") {
    auto b = grid_bundle(2, 96);
    b.failures.push_back({MachineId{1}, at(2015, 6, 2, 10), {true, false, false, false}});
    const auto rows = build_event_stream(b, {});
    const auto d = encode(rows, 100.0, test::all_rows(rows.size()));
    for (Eigen::Index i = 0; i < d.rows(); ++i) {
        CHECK(d.weights[i] == (d.labels[i] > 0.5 ? 100.0 : 1.0));
        double dow = 0;
        for (auto f = static_cast<Eigen::Index>(Feature::DowMon); f <= static_cast<Eigen::Index>(Feature::DowSun); ++f)
            dow += d.x(i, f);
        CHECK(dow == 1.0);
    }
    // 2015-06-03 is a Wednesday
    REQUIRE(has_row(rows, 1, at(2015, 6, 3, 7)));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].datetime != at(2015, 6, 3, 7)) continue;
        const auto r = static_cast<Eigen::Index>(i);
        CHECK(d.x(r, static_cast<Eigen::Index>(Feature::DowWed)) == 1.0);
        CHECK(d.x(r, static_cast<Eigen::Index>(Feature::DowTue)) == 0.0);
        CHECK(d.x(r, static_cast<Eigen::Index>(Feature::DowThu)) == 0.0);
    }
    CHECK_THROWS_AS(apply_encoding(rows, d.encoding, 0.0), std::invalid_argument);
}

TEST_CASE("encode: constant continuous column is degenerate") {
    auto rows = build_event_stream(grid_bundle(2, 30), {});
    for (auto& r : rows) r.pressure = 100.0;
    try {
        (void)encode(rows, 100.0, test::all_rows(rows.size()));
        FAIL("expected DegenerateEncodingError");
    } catch (const DegenerateEncodingError& e) {
        CHECK(e.column() == Feature::Pressure);
    }
    // excluding the column makes it encodable
    std::vector<Feature> keep;
    for (Feature f : all_features())
        if (f != Feature::Pressure) keep.push_back(f);
    CHECK_NOTHROW((void)encode(rows, 100.0, test::all_rows(rows.size()), keep));
}

TEST_CASE("encode: statistics use only the fit rows") {
    const auto rows = build_event_stream(test::micro_bundle(8), {});
    std::vector<std::size_t> fit;
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (rows[i].machine_id.value != 2) fit.push_back(i);
    const auto enc = fit_encoding(rows, fit);

    // Perturbing held-out rows leaves the statistics untouched.
    auto perturbed = rows;
    for (auto& r : perturbed)
        if (r.machine_id.value == 2) {
            r.volt += 1e6;
            r.age += 100;
        }
    CHECK(fit_encoding(perturbed, fit) == enc);

    // Oracle for one column.
    double sum = 0, sq = 0;
    for (std::size_t i : fit) sum += rows[i].vibration;
    const double mean = sum / static_cast<double>(fit.size());
    for (std::size_t i : fit) sq += (rows[i].vibration - mean) * (rows[i].vibration - mean);
    const auto* s = enc.scaling_for(Feature::Vibration);
    REQUIRE(s != nullptr);
    CHECK(s->mean == doctest::Approx(mean).epsilon(1e-13));
    CHECK(s->std_dev == doctest::Approx(std::sqrt(sq / static_cast<double>(fit.size()))).epsilon(1e-13));
}

TEST_CASE("encode: column order is canonical whatever the selection order") {
    const auto rows = build_event_stream(test::micro_bundle(2), {});
    const std::vector<Feature> a = {Feature::Age, Feature::Error3, Feature::Volt, Feature::Model2};
    const std::vector<Feature> b = {Feature::Volt, Feature::Model2, Feature::Age, Feature::Error3, Feature::Volt};
    const auto fit = test::all_rows(rows.size());
    const auto da = encode(rows, 100.0, fit, a), db = encode(rows, 100.0, fit, b);
    CHECK(da.encoding == db.encoding);
    CHECK(da.x == db.x);
    CHECK(da.encoding.feature_names() == std::vector<std::string>{"error_3", "volt", "age", "model_2"});
    // and the full encoding always lists every feature in the same order
    CHECK(encode(rows, 1.0, fit).encoding.feature_names() ==
          encode(rows, 100.0, std::vector<std::size_t>{0, 1, 2, rows.size() - 3, rows.size() - 2, rows.size() - 1}).encoding.feature_names());
}

TEST_CASE("subset keeps keys, labels and weights aligned") {
    const auto rows = build_event_stream(test::micro_bundle(6), {});
    const auto d = encode(rows, 100.0, test::all_rows(rows.size()));
    const std::size_t pick[] = {5, 0, 17};
    const auto s = d.subset(pick);
    for (std::size_t i = 0; i < 3; ++i) {
        const auto src = static_cast<Eigen::Index>(pick[i]);
        CHECK(s.keys[i] == d.keys[pick[i]]);
        CHECK(s.x.row(static_cast<Eigen::Index>(i)) == d.x.row(src));
        CHECK(s.labels[static_cast<Eigen::Index>(i)] == d.labels[src]);
        CHECK(s.weights[static_cast<Eigen::Index>(i)] == d.weights[src]);
    }
}
