#pragma once

// Synthetic dataset generator with a planted error -> failure signal.
//
// Per machine-hour s, an error event occurs with probability q
// (`error_rate`), its type uniform over the five codes. A failure occurs at
// hour s with hazard
//
//     h(s) = h1  if an error occurred at s - 24
//            h0  otherwise
//
// with h1 = r * h0 and r = exp(signal_strength). The positive-label rate at a
// 24 h horizon is then E[h] = q*h1 + (1-q)*h0 = h0 * (1 + q*(r-1)); solving
// for the target rate rho gives the closed form
//
//     h0 = rho / (1 + q*(r - 1)),   h1 = r * h0.
//
// Configurations where h1 > 1 are rejected. Every failure is followed (same
// hour) by a maintenance record replacing the failed component with
// comp_k_fail set; scheduled replacements occur independently with
// probability `maintenance_rate` per machine-hour.
//
// Telemetry is Gaussian around per-model baselines (see synth.cpp). With
// `telemetry_drift`, vibration rises linearly over the 48 h preceding each
// failure.

#include <cstdint>

#include "pdm/ingest.hpp"

namespace pdm {

inline constexpr int kSignalLagHours = 24;

struct SynthConfig {
    int n_machines = 100;
    int n_days = 365;
    std::uint64_t seed = 0;
    double target_failure_rate = 0.017;
    double signal_strength = 8.0;
    double error_rate = 0.02;
    double maintenance_rate = 1.0 / (24.0 * 45.0);
    bool telemetry_drift = false;

    /// Throws std::invalid_argument describing the first violated constraint.
    void validate() const;
};

struct HazardRates {
    double baseline;     // h0
    double after_error;  // h1
};

HazardRates solve_hazard(const SynthConfig& config);

/// First telemetry hour of every machine: 2015-01-01 00:00:00.
Timestamp synth_start();

DatasetBundle generate(const SynthConfig& config);

}  // namespace pdm
