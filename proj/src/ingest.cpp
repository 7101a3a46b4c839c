#include "pdm/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <future>
#include <map>
#include <set>

#include "pdm/csv.hpp"

namespace pdm {

namespace fs = std::filesystem;

BundlePaths BundlePaths::in_dir(const fs::path& dir) {
    return {dir / "telemetry.csv", dir / "errors.csv", dir / "maintenance.csv",
            dir / "failures.csv", dir / "machines.csv"};
}

namespace {

template <typename Record>
std::vector<Record> read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw StructuralError(path.string(), 0, "", "cannot open file");
    return read_csv<Record>(in, path.string());
}

template <typename Record>
void write_file(const fs::path& path, const std::vector<Record>& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    write_csv<Record>(out, records);
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

template <typename Record>
void check_references(ValidationReport& out, const char* dataset,
                      const std::vector<Record>& records, const std::set<std::int64_t>& known) {
    for (std::size_t i = 0; i < records.size(); ++i)
        if (!known.contains(records[i].machine_id.value))
            out.push_back({dataset, i,
                           "machine_id " + std::to_string(records[i].machine_id.value) +
                               " not present in machines"});
}

void append(ValidationReport& dst, ValidationReport src) {
    dst.insert(dst.end(), std::make_move_iterator(src.begin()), std::make_move_iterator(src.end()));
}

}  // namespace

ValidationReport validate_bundle(const DatasetBundle& b) {
    ValidationReport out;
    append(out, validate_dataset(std::span<const TelemetryRecord>(b.telemetry)));
    append(out, validate_dataset(std::span<const ErrorRecord>(b.errors)));
    append(out, validate_dataset(std::span<const MaintenanceRecord>(b.maintenance)));
    append(out, validate_dataset(std::span<const FailureRecord>(b.failures)));
    append(out, validate_dataset(std::span<const MachineDescriptor>(b.machines)));

    std::set<std::int64_t> known;
    for (const auto& m : b.machines) known.insert(m.machine_id.value);
    check_references(out, "telemetry", b.telemetry, known);
    check_references(out, "errors", b.errors, known);
    check_references(out, "maintenance", b.maintenance, known);
    check_references(out, "failures", b.failures, known);

    // Hourly grid: per machine, sorted distinct hours must be consecutive.
    std::map<std::int64_t, std::vector<std::pair<std::int64_t, std::size_t>>> hours;
    for (std::size_t i = 0; i < b.telemetry.size(); ++i)
        hours[b.telemetry[i].machine_id.value].emplace_back(b.telemetry[i].datetime.hours(), i);
    for (auto& [machine, hs] : hours) {
        std::sort(hs.begin(), hs.end());
        for (std::size_t j = 1; j < hs.size(); ++j) {
            const auto step = hs[j].first - hs[j - 1].first;
            if (step > 1)
                out.push_back({"telemetry", hs[j].second,
                               "hourly grid gap of " + std::to_string(step - 1) +
                                   " hour(s) for machine " + std::to_string(machine) +
                                   " before " + Timestamp::from_hours(hs[j].first).to_string(),
                               true});
        }
    }
    return out;
}

LoadedBundle load_bundle(const BundlePaths& paths) {
    auto telemetry = std::async(std::launch::async, read_file<TelemetryRecord>, paths.telemetry);
    auto errors = std::async(std::launch::async, read_file<ErrorRecord>, paths.errors);
    auto maintenance =
        std::async(std::launch::async, read_file<MaintenanceRecord>, paths.maintenance);
    auto failures = std::async(std::launch::async, read_file<FailureRecord>, paths.failures);
    auto machines = std::async(std::launch::async, read_file<MachineDescriptor>, paths.machines);

    LoadedBundle loaded;
    // Joined in a fixed order, so the first structural error reported is
    // deterministic.
    loaded.bundle.telemetry = telemetry.get();
    loaded.bundle.errors = errors.get();
    loaded.bundle.maintenance = maintenance.get();
    loaded.bundle.failures = failures.get();
    loaded.bundle.machines = machines.get();
    loaded.report = validate_bundle(loaded.bundle);
    return loaded;
}

void write_bundle(const fs::path& dir, const DatasetBundle& bundle) {
    fs::create_directories(dir);
    const auto paths = BundlePaths::in_dir(dir);
    write_file(paths.telemetry, bundle.telemetry);
    write_file(paths.errors, bundle.errors);
    write_file(paths.maintenance, bundle.maintenance);
    write_file(paths.failures, bundle.failures);
    write_file(paths.machines, bundle.machines);
}

}  // namespace pdm
