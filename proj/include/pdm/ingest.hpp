#pragma once

#include <filesystem>
#include <vector>

#include "pdm/schema.hpp"

namespace pdm {

struct DatasetBundle {
    std::vector<TelemetryRecord> telemetry;
    std::vector<ErrorRecord> errors;
    std::vector<MaintenanceRecord> maintenance;
    std::vector<FailureRecord> failures;
    std::vector<MachineDescriptor> machines;
    friend bool operator==(const DatasetBundle&, const DatasetBundle&) = default;
};

struct BundlePaths {
    std::filesystem::path telemetry;
    std::filesystem::path errors;
    std::filesystem::path maintenance;
    std::filesystem::path failures;
    std::filesystem::path machines;

    /// The canonical file names (`telemetry.csv`, `errors.csv`, ...) inside `dir`.
    static BundlePaths in_dir(const std::filesystem::path& dir);
};

struct LoadedBundle {
    DatasetBundle bundle;
    ValidationReport report;
};

/// Per-dataset validation plus the cross-dataset checks: every referenced
/// machine exists in `machines`, and telemetry forms a gap-free hourly grid
/// per machine (gaps are reported as tolerated violations).
ValidationReport validate_bundle(const DatasetBundle& bundle);

/// Parses all five files (concurrently), rounds timestamps to the hour and
/// validates. Throws StructuralError on malformed input.
LoadedBundle load_bundle(const BundlePaths& paths);

/// Writes the five CSV files using the canonical names.
void write_bundle(const std::filesystem::path& dir, const DatasetBundle& bundle);

}  // namespace pdm
