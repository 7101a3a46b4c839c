#include "pdm/synth.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "pdm/random.hpp"

namespace pdm {

namespace {

// Per-model telemetry baselines (mean, sd), model_1..model_4.
struct Baseline {
    double mean;
    double sd;
};
constexpr std::array<Baseline, kNumModels> kVolt = {{{168, 15}, {170, 15}, {172, 15}, {174, 15}}};
constexpr std::array<Baseline, kNumModels> kRotate = {{{440, 50}, {445, 50}, {450, 50}, {455, 50}}};
constexpr std::array<Baseline, kNumModels> kPressure = {{{98, 10}, {100, 10}, {102, 10}, {104, 10}}};
constexpr std::array<Baseline, kNumModels> kVibration = {{{39, 5}, {40, 5}, {41, 5}, {42, 5}}};

constexpr int kMaxAge = 20;
constexpr int kDriftHours = 48;
constexpr double kDriftVibration = 8.0;

struct MachineData {
    MachineDescriptor descriptor;
    std::vector<TelemetryRecord> telemetry;
    std::vector<ErrorRecord> errors;
    std::vector<MaintenanceRecord> maintenance;
    std::vector<FailureRecord> failures;
};

MachineData generate_machine(const SynthConfig& cfg, const HazardRates& hz, std::int64_t id) {
    Xoshiro256 rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(id)));
    const MachineId mid{id};
    const Timestamp start = synth_start();
    const std::size_t hours = static_cast<std::size_t>(cfg.n_days) * 24;

    MachineData out;
    out.descriptor.machine_id = mid;
    const auto model = static_cast<std::size_t>(rng.below(kNumModels));
    out.descriptor.model[model] = true;
    out.descriptor.age = static_cast<std::int64_t>(rng.below(kMaxAge + 1));

    std::vector<int> error_type(hours, -1);
    for (std::size_t h = 0; h < hours; ++h)
        if (rng.uniform() < cfg.error_rate) error_type[h] = static_cast<int>(rng.below(kNumErrors));

    std::vector<int> failed_comp(hours, -1);
    for (std::size_t h = 0; h < hours; ++h) {
        const bool primed = h >= kSignalLagHours && error_type[h - kSignalLagHours] >= 0;
        const double hazard = primed ? hz.after_error : hz.baseline;
        if (rng.uniform() < hazard) failed_comp[h] = static_cast<int>(rng.below(kNumComponents));
    }

    std::vector<int> scheduled_comp(hours, -1);
    for (std::size_t h = 0; h < hours; ++h)
        if (rng.uniform() < cfg.maintenance_rate)
            scheduled_comp[h] = static_cast<int>(rng.below(kNumComponents));

    std::vector<double> drift(hours, 0.0);
    if (cfg.telemetry_drift) {
        for (std::size_t s = 0; s < hours; ++s) {
            if (failed_comp[s] < 0) continue;
            for (int back = 1; back <= kDriftHours && static_cast<std::size_t>(back) <= s; ++back)
                drift[s - back] += kDriftVibration * (1.0 - static_cast<double>(back) / kDriftHours);
        }
    }

    out.telemetry.reserve(hours);
    for (std::size_t h = 0; h < hours; ++h) {
        const Timestamp t = start.plus_hours(static_cast<std::int64_t>(h));
        TelemetryRecord rec{mid, t, 0, 0, 0, 0};
        rec.volt = kVolt[model].mean + kVolt[model].sd * rng.normal();
        rec.rotate = kRotate[model].mean + kRotate[model].sd * rng.normal();
        rec.pressure = kPressure[model].mean + kPressure[model].sd * rng.normal();
        rec.vibration = kVibration[model].mean + kVibration[model].sd * rng.normal() + drift[h];
        out.telemetry.push_back(rec);

        if (error_type[h] >= 0) {
            ErrorRecord e{mid, t, {}};
            e.error[static_cast<std::size_t>(error_type[h])] = true;
            out.errors.push_back(e);
        }
        if (failed_comp[h] >= 0 || scheduled_comp[h] >= 0) {
            MaintenanceRecord m{mid, t, {}, {}};
            if (failed_comp[h] >= 0) {
                const auto k = static_cast<std::size_t>(failed_comp[h]);
                m.comp[k] = true;
                m.comp_fail[k] = true;
                FailureRecord f{mid, t, {}};
                f.comp[k] = true;
                out.failures.push_back(f);
            }
            if (scheduled_comp[h] >= 0) m.comp[static_cast<std::size_t>(scheduled_comp[h])] = true;
            out.maintenance.push_back(m);
        }
    }
    return out;
}

}  // namespace

void SynthConfig::validate() const {
    if (n_machines < 1) throw std::invalid_argument("n_machines must be positive");
    if (n_days < 3) throw std::invalid_argument("n_days must be at least 3");
    if (!(target_failure_rate > 0.0 && target_failure_rate < 0.5))
        throw std::invalid_argument("target_failure_rate must lie in (0, 0.5)");
    if (!(signal_strength >= 0.0) || !std::isfinite(signal_strength))
        throw std::invalid_argument("signal_strength must be a finite non-negative number");
    if (!(error_rate > 0.0 && error_rate < 1.0))
        throw std::invalid_argument("error_rate must lie in (0, 1)");
    if (!(maintenance_rate >= 0.0 && maintenance_rate < 1.0))
        throw std::invalid_argument("maintenance_rate must lie in [0, 1)");
    const auto hz = solve_hazard(*this);
    if (hz.after_error > 1.0)
        throw std::invalid_argument("signal_strength too large for this failure/error rate: "
                                    "post-error hazard " + std::to_string(hz.after_error) + " > 1");
}

HazardRates solve_hazard(const SynthConfig& c) {
    const double ratio = std::exp(c.signal_strength);
    const double h0 = c.target_failure_rate / (1.0 + c.error_rate * (ratio - 1.0));
    return {h0, ratio * h0};
}

Timestamp synth_start() { return *Timestamp::from_civil(2015, 1, 1, 0); }

DatasetBundle generate(const SynthConfig& config) {
    config.validate();
    const HazardRates hz = solve_hazard(config);

    std::vector<MachineData> machines(static_cast<std::size_t>(config.n_machines));
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < config.n_machines; ++i)
        machines[static_cast<std::size_t>(i)] = generate_machine(config, hz, i + 1);

    DatasetBundle b;
    for (auto& m : machines) {
        b.machines.push_back(m.descriptor);
        b.telemetry.insert(b.telemetry.end(), m.telemetry.begin(), m.telemetry.end());
        b.errors.insert(b.errors.end(), m.errors.begin(), m.errors.end());
        b.maintenance.insert(b.maintenance.end(), m.maintenance.begin(), m.maintenance.end());
        b.failures.insert(b.failures.end(), m.failures.begin(), m.failures.end());
    }
    return b;
}

}  // namespace pdm
