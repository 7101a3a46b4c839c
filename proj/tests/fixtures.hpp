#pragma once

// Test fixtures and independent oracles. Nothing here calls the code paths
// it is used to check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "pdm/assemble.hpp"
#include "pdm/ingest.hpp"
#include "pdm/logreg.hpp"

namespace pdm::test {

inline Timestamp at(int y, unsigned mo, unsigned d, unsigned h) {
    return *Timestamp::from_civil(y, mo, d, h);
}

// ---------------------------------------------------------------------------
// Hand-built bundles

struct MicroShape {
    int machines = 3;
    int hours = 72;
    double error_p = 0.15;
    double maint_p = 0.08;
    double failure_p = 0.1;
    double gap_p = 0.0;  // probability a telemetry hour is missing
};

/// Random small bundle with colliding events (several records for the same
/// machine-hour) and events on hours without telemetry.
inline DatasetBundle micro_bundle(std::uint32_t seed, const MicroShape& shape = {}) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> n(0.0, 1.0);
    const Timestamp start = at(2015, 3, 1, 0);
    DatasetBundle b;
    for (int m = 1; m <= shape.machines; ++m) {
        MachineDescriptor d{MachineId{m}, static_cast<std::int64_t>(rng() % 21), {}};
        d.model[rng() % 4] = true;
        b.machines.push_back(d);
        for (int h = 0; h < shape.hours; ++h) {
            const Timestamp t = start.plus_hours(h);
            if (u(rng) >= shape.gap_p || h == shape.hours - 1)
                b.telemetry.push_back({MachineId{m}, t, 170 + 10 * n(rng), 450 + 50 * n(rng),
                                       100 + 10 * n(rng), 40 + 5 * n(rng)});
            for (int rep = 0; rep < 2; ++rep) {
                if (u(rng) < shape.error_p) {
                    ErrorRecord e{MachineId{m}, t, {}};
                    e.error[rng() % 5] = true;
                    b.errors.push_back(e);
                }
                if (u(rng) < shape.maint_p) {
                    MaintenanceRecord r{MachineId{m}, t, {}, {}};
                    const auto k = rng() % 4;
                    r.comp[k] = true;
                    r.comp_fail[k] = u(rng) < 0.5;
                    b.maintenance.push_back(r);
                }
            }
            if (u(rng) < shape.failure_p) {
                FailureRecord f{MachineId{m}, t, {}};
                f.comp[rng() % 4] = true;
                b.failures.push_back(f);
            }
        }
        // an event beyond the telemetry grid, which must not create a row
        ErrorRecord late{MachineId{m}, start.plus_hours(shape.hours + 5), {}};
        late.error[0] = true;
        b.errors.push_back(late);
    }
    std::shuffle(b.telemetry.begin(), b.telemetry.end(), rng);
    return b;
}

/// Nested-loop join and label oracle.
inline std::vector<MachineStateRow> brute_force_stream(const DatasetBundle& b, int horizon,
                                                       bool window) {
    std::vector<std::int64_t> ids;
    for (const auto& m : b.machines) ids.push_back(m.machine_id.value);
    std::sort(ids.begin(), ids.end());

    std::vector<MachineStateRow> out;
    for (std::int64_t id : ids) {
        std::int64_t last = INT64_MIN;
        std::vector<const TelemetryRecord*> tel;
        for (const auto& t : b.telemetry)
            if (t.machine_id.value == id) {
                last = std::max(last, t.datetime.hours());
                tel.push_back(&t);
            }
        std::sort(tel.begin(), tel.end(), [](auto* a, auto* c) { return a->datetime < c->datetime; });
        const MachineDescriptor* desc = nullptr;
        for (const auto& m : b.machines)
            if (m.machine_id.value == id) desc = &m;

        for (const TelemetryRecord* t : tel) {
            const std::int64_t h = t->datetime.hours();
            if (h + horizon > last) continue;
            MachineStateRow r;
            r.machine_id = MachineId{id};
            r.datetime = t->datetime;
            for (const auto& e : b.errors)
                if (e.machine_id.value == id && e.datetime.hours() == h)
                    for (int k = 0; k < 5; ++k) r.error[k] = r.error[k] || e.error[k];
            for (const auto& m : b.maintenance)
                if (m.machine_id.value == id && m.datetime.hours() == h)
                    for (int k = 0; k < 4; ++k) {
                        r.comp[k] = r.comp[k] || m.comp[k];
                        r.comp_fail[k] = r.comp_fail[k] || m.comp_fail[k];
                    }
            r.volt = t->volt;
            r.rotate = t->rotate;
            r.pressure = t->pressure;
            r.vibration = t->vibration;
            r.age = desc->age;
            r.model = desc->model;
            // 1970-01-01 was a Thursday (Mon = 0 -> Thursday = 3).
            const std::int64_t days = (h >= 0 ? h : h - 23) / 24;
            r.day_of_week = static_cast<Weekday>(((days + 3) % 7 + 7) % 7);
            for (const auto& f : b.failures) {
                if (f.machine_id.value != id) continue;
                const std::int64_t fh = f.datetime.hours();
                if (window ? (fh > h && fh <= h + horizon) : fh == h + horizon) r.label = true;
            }
            out.push_back(r);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Random logistic problems

/// Dense random design: standard normal features, labels drawn from a
/// logistic model with random coefficients, weights 1 or `positive_weight`.
inline DesignMatrix random_design(std::uint32_t seed, int rows, int features,
                                  double positive_weight = 1.0) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> n(0.0, 1.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    DesignMatrix d;
    d.x.resize(rows, features);
    d.labels.resize(rows);
    d.weights.resize(rows);
    Eigen::VectorXd truth(features);
    for (int j = 0; j < features; ++j) truth[j] = n(rng);
    for (int i = 0; i < rows; ++i) {
        double z = -0.5;
        for (int j = 0; j < features; ++j) {
            d.x(i, j) = n(rng);
            z += d.x(i, j) * truth[j];
        }
        d.labels[i] = u(rng) < 1.0 / (1.0 + std::exp(-z)) ? 1.0 : 0.0;
        d.weights[i] = d.labels[i] > 0.5 ? positive_weight : 1.0;
        d.keys.push_back({MachineId{1}, Timestamp::from_hours(i)});
    }
    // make sure both classes are present
    d.labels[0] = 1.0;
    d.weights[0] = positive_weight;
    d.labels[1] = 0.0;
    d.weights[1] = 1.0;
    for (int j = 0; j < features; ++j) d.encoding.features.push_back(all_features()[static_cast<std::size_t>(j) % kNumFeatures]);
    return d;
}

/// Direct summation of the penalised weighted negative log-likelihood.
inline double naive_objective(const Parameters& p, const DesignMatrix& d, double l2) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < d.rows(); ++i) {
        double z = p.alpha;
        for (Eigen::Index j = 0; j < d.features(); ++j) z += d.x(i, j) * p.beta[j];
        const double pi = 1.0 / (1.0 + std::exp(-z));
        total += d.weights[i] * (-d.labels[i] * std::log(pi) - (1.0 - d.labels[i]) * std::log(1.0 - pi));
    }
    double sq = 0.0;
    for (Eigen::Index j = 0; j < p.beta.size(); ++j) sq += p.beta[j] * p.beta[j];
    return total + 0.5 * l2 * sq;
}

/// Central finite differences of `objective` in (alpha, beta).
inline Eigen::VectorXd finite_difference_gradient(const Parameters& p, const DesignMatrix& d,
                                                  const FitConfig& cfg, double step = 1e-5) {
    Eigen::VectorXd g(p.beta.size() + 1);
    for (Eigen::Index k = 0; k <= p.beta.size(); ++k) {
        Parameters hi = p, lo = p;
        if (k == 0) {
            hi.alpha += step;
            lo.alpha -= step;
        } else {
            hi.beta[k - 1] += step;
            lo.beta[k - 1] -= step;
        }
        g[k] = (objective(hi, d, cfg) - objective(lo, d, cfg)) / (2.0 * step);
    }
    return g;
}

inline Parameters random_params(std::uint32_t seed, int features, double scale = 0.5) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> n(0.0, scale);
    Parameters p{n(rng), Eigen::VectorXd(features)};
    for (int j = 0; j < features; ++j) p.beta[j] = n(rng);
    return p;
}

inline std::vector<std::size_t> all_rows(std::size_t n) {
    std::vector<std::size_t> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = i;
    return v;
}

}  // namespace pdm::test
