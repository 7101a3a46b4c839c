#include "pdm/schema.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <utility>

namespace pdm {

namespace {

constexpr std::array<Feature, kNumFeatures> kAllFeatures = {
    Feature::Error1,    Feature::Error2,    Feature::Error3,    Feature::Error4,
    Feature::Error5,    Feature::Comp1,     Feature::Comp2,     Feature::Comp3,
    Feature::Comp4,     Feature::Comp1Fail, Feature::Comp2Fail, Feature::Comp3Fail,
    Feature::Comp4Fail, Feature::Volt,      Feature::Rotate,    Feature::Pressure,
    Feature::Vibration, Feature::Age,       Feature::Model1,    Feature::Model2,
    Feature::Model3,    Feature::Model4,    Feature::DowMon,    Feature::DowTue,
    Feature::DowWed,    Feature::DowThu,    Feature::DowFri,    Feature::DowSat,
    Feature::DowSun,
};

constexpr std::array<std::string_view, kNumFeatures> kFeatureNames = {
    "error_1",     "error_2",     "error_3",     "error_4",     "error_5",   "comp_1",
    "comp_2",      "comp_3",      "comp_4",      "comp_1_fail", "comp_2_fail",
    "comp_3_fail", "comp_4_fail", "volt",        "rotate",      "pressure",  "vibration",
    "age",         "model_1",     "model_2",     "model_3",     "model_4",   "dow_mon",
    "dow_tue",     "dow_wed",     "dow_thu",     "dow_fri",     "dow_sat",   "dow_sun",
};

template <std::size_t N>
bool any_of(const std::array<bool, N>& flags) {
    return std::any_of(flags.begin(), flags.end(), [](bool b) { return b; });
}

void check_machine_id(ValidationReport& out, const char* dataset, std::size_t row, MachineId id) {
    if (id.value <= 0) out.push_back({dataset, row, "machine_id must be positive"});
}

}  // namespace

std::span<const Feature> all_features() { return kAllFeatures; }

std::string_view feature_name(Feature f) { return kFeatureNames[static_cast<std::size_t>(f)]; }

std::optional<Feature> parse_feature(std::string_view name) {
    for (std::size_t i = 0; i < kFeatureNames.size(); ++i)
        if (kFeatureNames[i] == name) return kAllFeatures[i];
    return std::nullopt;
}

bool is_continuous(Feature f) {
    switch (f) {
        case Feature::Volt:
        case Feature::Rotate:
        case Feature::Pressure:
        case Feature::Vibration:
        case Feature::Age:
            return true;
        default:
            return false;
    }
}

double raw_feature_value(const MachineStateRow& row, Feature f) {
    const auto idx = static_cast<std::size_t>(f);
    const auto b = [](bool v) { return v ? 1.0 : 0.0; };
    if (f <= Feature::Error5) return b(row.error[idx]);
    if (f <= Feature::Comp4) return b(row.comp[idx - static_cast<std::size_t>(Feature::Comp1)]);
    if (f <= Feature::Comp4Fail)
        return b(row.comp_fail[idx - static_cast<std::size_t>(Feature::Comp1Fail)]);
    switch (f) {
        case Feature::Volt: return row.volt;
        case Feature::Rotate: return row.rotate;
        case Feature::Pressure: return row.pressure;
        case Feature::Vibration: return row.vibration;
        case Feature::Age: return static_cast<double>(row.age);
        default: break;
    }
    if (f <= Feature::Model4) return b(row.model[idx - static_cast<std::size_t>(Feature::Model1)]);
    return b(static_cast<std::size_t>(row.day_of_week) ==
             idx - static_cast<std::size_t>(Feature::DowMon));
}

std::vector<std::string> FeatureEncoding::feature_names() const {
    std::vector<std::string> names;
    names.reserve(features.size());
    for (Feature f : features) names.emplace_back(feature_name(f));
    return names;
}

const Standardization* FeatureEncoding::scaling_for(Feature f) const {
    for (const auto& s : scaling)
        if (s.feature == f) return &s;
    return nullptr;
}

void FeatureEncoding::encode_row(const MachineStateRow& row, std::span<double> out) const {
    if (out.size() != features.size())
        throw std::invalid_argument("encode_row: output width does not match encoding");
    std::size_t next_scale = 0;
    for (std::size_t j = 0; j < features.size(); ++j) {
        const Feature f = features[j];
        double v = raw_feature_value(row, f);
        if (is_continuous(f)) {
            const Standardization& s = scaling.at(next_scale++);
            v = (v - s.mean) / s.std_dev;
        }
        out[j] = v;
    }
}

// ---------------------------------------------------------------------------

ValidationReport validate_dataset(std::span<const TelemetryRecord> records) {
    ValidationReport out;
    std::set<std::pair<std::int64_t, std::int64_t>> seen;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        check_machine_id(out, "telemetry", i, r.machine_id);
        if (!std::isfinite(r.volt) || !std::isfinite(r.rotate) || !std::isfinite(r.pressure) ||
            !std::isfinite(r.vibration))
            out.push_back({"telemetry", i, "non-finite measurement"});
        if (!seen.emplace(r.machine_id.value, r.datetime.hours()).second)
            out.push_back({"telemetry", i, "duplicate (machine_id, datetime)"});
    }
    return out;
}

ValidationReport validate_dataset(std::span<const ErrorRecord> records) {
    ValidationReport out;
    for (std::size_t i = 0; i < records.size(); ++i) {
        check_machine_id(out, "errors", i, records[i].machine_id);
        if (!any_of(records[i].error)) out.push_back({"errors", i, "no error flag set"});
    }
    return out;
}

ValidationReport validate_dataset(std::span<const MaintenanceRecord> records) {
    ValidationReport out;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        check_machine_id(out, "maintenance", i, r.machine_id);
        for (std::size_t k = 0; k < kNumComponents; ++k)
            if (r.comp_fail[k] && !r.comp[k])
                out.push_back({"maintenance", i,
                               "fail implies replaced (comp_" + std::to_string(k + 1) + ")"});
        if (!any_of(r.comp)) out.push_back({"maintenance", i, "no component replaced"});
    }
    return out;
}

ValidationReport validate_dataset(std::span<const FailureRecord> records) {
    ValidationReport out;
    for (std::size_t i = 0; i < records.size(); ++i) {
        check_machine_id(out, "failures", i, records[i].machine_id);
        if (!any_of(records[i].comp)) out.push_back({"failures", i, "no component failure flag set"});
    }
    return out;
}

ValidationReport validate_dataset(std::span<const MachineDescriptor> records) {
    ValidationReport out;
    std::set<std::int64_t> seen;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        check_machine_id(out, "machines", i, r.machine_id);
        if (r.age < 0) out.push_back({"machines", i, "age must be non-negative"});
        if (std::count(r.model.begin(), r.model.end(), true) != 1)
            out.push_back({"machines", i, "exactly one model"});
        if (!seen.insert(r.machine_id.value).second)
            out.push_back({"machines", i, "duplicate machine_id"});
    }
    return out;
}

bool has_blocking_violation(const ValidationReport& report) {
    return std::any_of(report.begin(), report.end(), [](const Violation& v) { return !v.tolerated; });
}

std::string format_violation(const Violation& v) {
    // +2: 1-based line numbers with a header row.
    return v.dataset + ": line " + std::to_string(v.row + 2) + ": " + v.reason +
           (v.tolerated ? " (tolerated)" : "");
}

}  // namespace pdm
