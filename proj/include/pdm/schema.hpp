#pragma once

// Domain types for the five input datasets, the joined machine-state row and
// the encoded feature vector.

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pdm/timestamp.hpp"

namespace pdm {

inline constexpr std::size_t kNumErrors = 5;
inline constexpr std::size_t kNumComponents = 4;
inline constexpr std::size_t kNumModels = 4;

struct MachineId {
    std::int64_t value = 0;
    friend constexpr auto operator<=>(const MachineId&, const MachineId&) = default;
};

struct TelemetryRecord {
    MachineId machine_id;
    Timestamp datetime;
    double volt = 0.0;
    double rotate = 0.0;
    double pressure = 0.0;
    double vibration = 0.0;
    friend bool operator==(const TelemetryRecord&, const TelemetryRecord&) = default;
};

struct ErrorRecord {
    MachineId machine_id;
    Timestamp datetime;
    std::array<bool, kNumErrors> error{};
    friend bool operator==(const ErrorRecord&, const ErrorRecord&) = default;
};

struct MaintenanceRecord {
    MachineId machine_id;
    Timestamp datetime;
    std::array<bool, kNumComponents> comp{};       // replaced
    std::array<bool, kNumComponents> comp_fail{};  // replaced due to failure
    friend bool operator==(const MaintenanceRecord&, const MaintenanceRecord&) = default;
};

struct FailureRecord {
    MachineId machine_id;
    Timestamp datetime;
    std::array<bool, kNumComponents> comp{};
    friend bool operator==(const FailureRecord&, const FailureRecord&) = default;
};

struct MachineDescriptor {
    MachineId machine_id;
    std::int64_t age = 0;  // years
    std::array<bool, kNumModels> model{};
    friend bool operator==(const MachineDescriptor&, const MachineDescriptor&) = default;
};

/// One machine-hour of joined state. `label` is the machine failure state at
/// datetime + horizon.
struct MachineStateRow {
    MachineId machine_id;
    Timestamp datetime;
    std::array<bool, kNumErrors> error{};
    std::array<bool, kNumComponents> comp{};
    std::array<bool, kNumComponents> comp_fail{};
    double volt = 0.0;
    double rotate = 0.0;
    double pressure = 0.0;
    double vibration = 0.0;
    std::int64_t age = 0;
    std::array<bool, kNumModels> model{};
    Weekday day_of_week = Weekday::Mon;
    bool label = false;
    friend bool operator==(const MachineStateRow&, const MachineStateRow&) = default;
};

// ---------------------------------------------------------------------------
// Features

enum class Feature : std::uint8_t {
    Error1, Error2, Error3, Error4, Error5,
    Comp1, Comp2, Comp3, Comp4,
    Comp1Fail, Comp2Fail, Comp3Fail, Comp4Fail,
    Volt, Rotate, Pressure, Vibration,
    Age,
    Model1, Model2, Model3, Model4,
    DowMon, DowTue, DowWed, DowThu, DowFri, DowSat, DowSun,
};

inline constexpr std::size_t kNumFeatures = 29;

/// All features in canonical column order.
std::span<const Feature> all_features();
std::string_view feature_name(Feature f);
std::optional<Feature> parse_feature(std::string_view name);
bool is_continuous(Feature f);

/// Unstandardized value of a feature: 0/1 for indicators, the raw measurement
/// for continuous features.
double raw_feature_value(const MachineStateRow& row, Feature f);

struct Standardization {
    Feature feature;
    double mean = 0.0;
    double std_dev = 1.0;
    friend bool operator==(const Standardization&, const Standardization&) = default;
};

/// Column layout plus the z-score statistics of the continuous columns.
/// `scaling` holds one entry per continuous feature in `features`, in column
/// order.
struct FeatureEncoding {
    std::vector<Feature> features;
    std::vector<Standardization> scaling;

    std::size_t size() const { return features.size(); }
    std::vector<std::string> feature_names() const;
    const Standardization* scaling_for(Feature f) const;

    /// Writes the encoded feature vector of `row` into `out` (length size()).
    void encode_row(const MachineStateRow& row, std::span<double> out) const;

    friend bool operator==(const FeatureEncoding&, const FeatureEncoding&) = default;
};

// ---------------------------------------------------------------------------
// Validation

struct Violation {
    std::string dataset;
    std::size_t row = 0;  // 0-based data row index; header not counted
    std::string reason;
    /// Reported but does not block assembly (e.g. telemetry grid gaps).
    bool tolerated = false;
    friend bool operator==(const Violation&, const Violation&) = default;
};

using ValidationReport = std::vector<Violation>;

ValidationReport validate_dataset(std::span<const TelemetryRecord> records);
ValidationReport validate_dataset(std::span<const ErrorRecord> records);
ValidationReport validate_dataset(std::span<const MaintenanceRecord> records);
ValidationReport validate_dataset(std::span<const FailureRecord> records);
ValidationReport validate_dataset(std::span<const MachineDescriptor> records);

bool has_blocking_violation(const ValidationReport& report);
std::string format_violation(const Violation& v);

}  // namespace pdm
