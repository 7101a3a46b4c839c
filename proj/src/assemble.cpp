#include "pdm/assemble.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <unordered_map>

namespace pdm {

namespace {

struct MaintenanceFlags {
    std::array<bool, kNumComponents> comp{};
    std::array<bool, kNumComponents> comp_fail{};
};

struct MachineEvents {
    std::vector<const TelemetryRecord*> telemetry;
    std::unordered_map<std::int64_t, std::array<bool, kNumErrors>> errors;
    std::unordered_map<std::int64_t, MaintenanceFlags> maintenance;
    std::set<std::int64_t> failures;
};

template <std::size_t N>
void or_into(std::array<bool, N>& dst, const std::array<bool, N>& src) {
    for (std::size_t k = 0; k < N; ++k) dst[k] = dst[k] || src[k];
}

std::vector<MachineStateRow> assemble_machine(const MachineEvents& ev,
                                              const MachineDescriptor& desc,
                                              const HorizonConfig& horizon) {
    std::vector<MachineStateRow> rows;
    if (ev.telemetry.empty()) return rows;
    const std::int64_t last = ev.telemetry.back()->datetime.hours();
    const std::int64_t h = horizon.horizon_hours;
    rows.reserve(ev.telemetry.size());
    for (const TelemetryRecord* tel : ev.telemetry) {
        const std::int64_t t = tel->datetime.hours();
        if (t + h > last) break;  // sorted: all later rows are truncated too

        MachineStateRow r;
        r.machine_id = desc.machine_id;
        r.datetime = tel->datetime;
        if (auto it = ev.errors.find(t); it != ev.errors.end()) r.error = it->second;
        if (auto it = ev.maintenance.find(t); it != ev.maintenance.end()) {
            r.comp = it->second.comp;
            r.comp_fail = it->second.comp_fail;
        }
        r.volt = tel->volt;
        r.rotate = tel->rotate;
        r.pressure = tel->pressure;
        r.vibration = tel->vibration;
        r.age = desc.age;
        r.model = desc.model;
        r.day_of_week = tel->datetime.weekday();
        if (horizon.label_window) {
            const auto it = ev.failures.upper_bound(t);
            r.label = it != ev.failures.end() && *it <= t + h;
        } else {
            r.label = ev.failures.contains(t + h);
        }
        rows.push_back(r);
    }
    return rows;
}

}  // namespace

std::vector<MachineStateRow> build_event_stream(const DatasetBundle& bundle,
                                                const HorizonConfig& horizon) {
    if (horizon.horizon_hours < 1) throw std::invalid_argument("horizon_hours must be >= 1");

    std::map<std::int64_t, const MachineDescriptor*> descriptors;
    for (const auto& m : bundle.machines) descriptors.emplace(m.machine_id.value, &m);

    std::map<std::int64_t, MachineEvents> events;
    for (const auto& t : bundle.telemetry) {
        if (!descriptors.contains(t.machine_id.value))
            throw AssemblyError(t.machine_id, "machine " + std::to_string(t.machine_id.value) +
                                                  " appears in telemetry but not in machines");
        events[t.machine_id.value].telemetry.push_back(&t);
    }
    // Events for machines without telemetry have no rows to join onto.
    for (const auto& e : bundle.errors)
        if (auto it = events.find(e.machine_id.value); it != events.end())
            or_into(it->second.errors[e.datetime.hours()], e.error);
    for (const auto& m : bundle.maintenance)
        if (auto it = events.find(m.machine_id.value); it != events.end()) {
            auto& flags = it->second.maintenance[m.datetime.hours()];
            or_into(flags.comp, m.comp);
            or_into(flags.comp_fail, m.comp_fail);
        }
    for (const auto& f : bundle.failures)
        if (auto it = events.find(f.machine_id.value); it != events.end())
            it->second.failures.insert(f.datetime.hours());

    std::vector<const MachineEvents*> order;
    std::vector<const MachineDescriptor*> order_desc;
    for (auto& [id, ev] : events) {
        std::stable_sort(ev.telemetry.begin(), ev.telemetry.end(),
                         [](const TelemetryRecord* a, const TelemetryRecord* b) {
                             return a->datetime < b->datetime;
                         });
        order.push_back(&ev);
        order_desc.push_back(descriptors.at(id));
    }

    const auto n = static_cast<std::ptrdiff_t>(order.size());
    std::vector<std::vector<MachineStateRow>> per_machine(order.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i)
        per_machine[static_cast<std::size_t>(i)] =
            assemble_machine(*order[static_cast<std::size_t>(i)],
                             *order_desc[static_cast<std::size_t>(i)], horizon);

    std::vector<MachineStateRow> out;
    std::size_t total = 0;
    for (const auto& v : per_machine) total += v.size();
    out.reserve(total);
    for (auto& v : per_machine) out.insert(out.end(), v.begin(), v.end());
    return out;
}

// ---------------------------------------------------------------------------

DegenerateEncodingError::DegenerateEncodingError(Feature column)
    : std::runtime_error("degenerate encoding: column '" + std::string(feature_name(column)) +
                         "' has zero variance on the fit rows"),
      column_(column) {}

DesignMatrix DesignMatrix::subset(std::span<const std::size_t> idx) const {
    DesignMatrix out;
    out.encoding = encoding;
    out.x.resize(static_cast<Eigen::Index>(idx.size()), x.cols());
    out.labels.resize(static_cast<Eigen::Index>(idx.size()));
    out.weights.resize(static_cast<Eigen::Index>(idx.size()));
    out.keys.reserve(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        const auto src = static_cast<Eigen::Index>(idx[i]);
        const auto dst = static_cast<Eigen::Index>(i);
        out.x.row(dst) = x.row(src);
        out.labels[dst] = labels[src];
        out.weights[dst] = weights[src];
        out.keys.push_back(keys[idx[i]]);
    }
    return out;
}

FeatureEncoding fit_encoding(std::span<const MachineStateRow> rows,
                             std::span<const std::size_t> fit_rows,
                             std::span<const Feature> features) {
    if (fit_rows.empty()) throw std::invalid_argument("fit_encoding: no fit rows");
    if (features.empty()) throw std::invalid_argument("fit_encoding: no features selected");

    // Canonical column order regardless of the order features were given in.
    std::vector<Feature> ordered(features.begin(), features.end());
    std::sort(ordered.begin(), ordered.end());
    ordered.erase(std::unique(ordered.begin(), ordered.end()), ordered.end());

    FeatureEncoding enc;
    enc.features = ordered;
    const double n = static_cast<double>(fit_rows.size());
    for (Feature f : ordered) {
        if (!is_continuous(f)) continue;
        double sum = 0.0;
        for (std::size_t i : fit_rows) sum += raw_feature_value(rows[i], f);
        const double mean = sum / n;
        double ss = 0.0;
        for (std::size_t i : fit_rows) {
            const double d = raw_feature_value(rows[i], f) - mean;
            ss += d * d;
        }
        const double sd = std::sqrt(ss / n);
        if (!(sd > 1e-12 * std::max(1.0, std::abs(mean)))) throw DegenerateEncodingError(f);
        enc.scaling.push_back({f, mean, sd});
    }
    return enc;
}

DesignMatrix apply_encoding(std::span<const MachineStateRow> rows, const FeatureEncoding& encoding,
                            double weight_positive) {
    if (!(weight_positive > 0.0)) throw std::invalid_argument("weight_positive must be > 0");
    DesignMatrix dm;
    dm.encoding = encoding;
    const auto n = static_cast<Eigen::Index>(rows.size());
    const auto p = static_cast<Eigen::Index>(encoding.size());
    dm.x.resize(n, p);
    dm.labels.resize(n);
    dm.weights.resize(n);
    dm.keys.resize(rows.size());
#pragma omp parallel for schedule(static)
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& r = rows[static_cast<std::size_t>(i)];
        encoding.encode_row(r, std::span<double>(dm.x.row(i).data(), static_cast<std::size_t>(p)));
        dm.labels[i] = r.label ? 1.0 : 0.0;
        dm.weights[i] = r.label ? weight_positive : 1.0;
        dm.keys[static_cast<std::size_t>(i)] = {r.machine_id, r.datetime};
    }
    return dm;
}

DesignMatrix encode(std::span<const MachineStateRow> rows, double weight_positive,
                    std::span<const std::size_t> fit_rows, std::span<const Feature> features) {
    return apply_encoding(rows, fit_encoding(rows, fit_rows, features), weight_positive);
}

}  // namespace pdm
