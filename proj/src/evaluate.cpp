#include "pdm/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "pdm/assemble.hpp"
#include "pdm/random.hpp"

namespace pdm {

std::vector<FoldSplit> make_folds(std::span<const MachineStateRow> rows, int k,
                                  std::uint64_t seed) {
    if (k < 2) throw FoldError(-1, "need at least 2 folds, got " + std::to_string(k));

    std::set<MachineId> machine_set;
    std::set<Timestamp> hours;
    for (const auto& r : rows) {
        machine_set.insert(r.machine_id);
        hours.insert(r.datetime);
    }
    if (machine_set.size() < static_cast<std::size_t>(k))
        throw FoldError(-1, "need at least " + std::to_string(k) + " machines for " +
                                std::to_string(k) + " folds, found " +
                                std::to_string(machine_set.size()));
    if (hours.size() < 2) throw FoldError(-1, "timeline must span at least 2 distinct hours");

    const Timestamp cutoff = *std::next(hours.begin(), static_cast<std::ptrdiff_t>(hours.size() / 2));

    std::vector<MachineId> machines(machine_set.begin(), machine_set.end());
    Xoshiro256 rng(seed);
    shuffle(std::span<MachineId>(machines), rng);

    const std::size_t n = machines.size();
    const auto uk = static_cast<std::size_t>(k);
    std::map<MachineId, int> group_of;
    std::size_t next = 0;
    for (std::size_t g = 0; g < uk; ++g) {
        const std::size_t size = n / uk + (g < n % uk ? 1 : 0);
        for (std::size_t j = 0; j < size; ++j) group_of[machines[next++]] = static_cast<int>(g);
    }

    std::vector<FoldSplit> folds(uk);
    for (int f = 0; f < k; ++f) {
        FoldSplit& split = folds[static_cast<std::size_t>(f)];
        split.fold_index = f;
        split.time_cutoff = cutoff;
        for (const auto& [m, g] : group_of)
            (g == f ? split.test_machines : split.train_machines).push_back(m);

        bool train_pos = false, train_neg = false, test_pos = false, test_neg = false;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const bool in_test_group = group_of.at(rows[i].machine_id) == f;
            if (!in_test_group && rows[i].datetime < cutoff) {
                split.train_rows.push_back(i);
                (rows[i].label ? train_pos : train_neg) = true;
            } else if (in_test_group && rows[i].datetime >= cutoff) {
                split.test_rows.push_back(i);
                (rows[i].label ? test_pos : test_neg) = true;
            }
        }
        const auto fail = [f](const char* what) {
            throw FoldError(f, "fold " + std::to_string(f) + ": " + what);
        };
        if (!train_pos) fail("training rows contain no failure labels");
        if (!train_neg) fail("training rows contain no non-failure labels");
        if (!test_pos) fail("test rows contain no failure labels");
        if (!test_neg) fail("test rows contain no non-failure labels");
    }
    return folds;
}

// ---------------------------------------------------------------------------

std::int64_t ConfusionMatrix::total() const {
    return counts[0][0] + counts[0][1] + counts[1][0] + counts[1][1];
}

RateMatrix ConfusionMatrix::normalized() const {
    RateMatrix out{};
    for (std::size_t t = 0; t < 2; ++t) {
        const auto sum = counts[t][0] + counts[t][1];
        if (sum == 0) continue;
        for (std::size_t p = 0; p < 2; ++p)
            out[t][p] = static_cast<double>(counts[t][p]) / static_cast<double>(sum);
    }
    return out;
}

RateMatrix average_normalized(std::span<const ConfusionMatrix> matrices) {
    RateMatrix out{};
    if (matrices.empty()) return out;
    for (const auto& m : matrices) {
        const auto r = m.normalized();
        for (std::size_t t = 0; t < 2; ++t)
            for (std::size_t p = 0; p < 2; ++p) out[t][p] += r[t][p];
    }
    for (auto& row : out)
        for (auto& v : row) v /= static_cast<double>(matrices.size());
    return out;
}

// ---------------------------------------------------------------------------

const WeightEntry* WeightReport::find(std::string_view feature) const {
    for (const auto& e : entries)
        if (e.feature == feature) return &e;
    return nullptr;
}

WeightReport summarize_weights(std::span<const LogisticModel> models) {
    WeightReport report;
    if (models.empty()) return report;
    const auto& features = models.front().encoding.features;
    for (const auto& m : models)
        if (m.encoding.features != features)
            throw std::invalid_argument("summarize_weights: models use different feature sets");

    const auto stats = [&](auto&& coefficient) {
        const double k = static_cast<double>(models.size());
        double sum = 0.0;
        for (const auto& m : models) sum += coefficient(m);
        const double mean = sum / k;
        double ss = 0.0;
        for (const auto& m : models) ss += (coefficient(m) - mean) * (coefficient(m) - mean);
        return std::pair{mean, models.size() > 1 ? std::sqrt(ss / (k - 1.0)) : 0.0};
    };

    for (std::size_t j = 0; j < features.size(); ++j) {
        const auto [mean, sd] =
            stats([j](const LogisticModel& m) { return m.beta[static_cast<Eigen::Index>(j)]; });
        report.entries.push_back({std::string(feature_name(features[j])), mean, sd, 0});
    }
    const auto [mean, sd] = stats([](const LogisticModel& m) { return m.alpha; });
    report.entries.push_back({std::string(kConstantName), mean, sd, 0});

    std::stable_sort(report.entries.begin(), report.entries.end(),
                     [](const WeightEntry& a, const WeightEntry& b) {
                         return std::abs(a.mean) > std::abs(b.mean);
                     });
    for (std::size_t i = 0; i < report.entries.size(); ++i)
        report.entries[i].abs_rank = static_cast<int>(i + 1);
    return report;
}

// ---------------------------------------------------------------------------

CvResult evaluate_cv(std::span<const MachineStateRow> rows, std::span<const FoldSplit> folds,
                     const CvConfig& config) {
    if (!(config.threshold > 0.0 && config.threshold < 1.0))
        throw std::invalid_argument("threshold must lie in (0, 1)");
    config.fit.validate();

    CvResult result;
    std::vector<LogisticModel> models;
    for (const auto& split : folds) {
        try {
            const FeatureEncoding enc = fit_encoding(rows, split.train_rows, config.features);
            std::vector<MachineStateRow> train, test;
            train.reserve(split.train_rows.size());
            test.reserve(split.test_rows.size());
            for (std::size_t i : split.train_rows) train.push_back(rows[i]);
            for (std::size_t i : split.test_rows) test.push_back(rows[i]);

            const DesignMatrix train_dm = apply_encoding(train, enc, config.weight_positive);
            const DesignMatrix test_dm = apply_encoding(test, enc, config.weight_positive);

            FoldResult fr;
            fr.model = fit(train_dm, config.fit);
            fr.train_rows = train.size();
            fr.test_rows = test.size();
            const Eigen::VectorXd proba = predict_proba(fr.model, test_dm.x);
            for (Eigen::Index i = 0; i < proba.size(); ++i)
                fr.confusion.add(test_dm.labels[i] > 0.5, proba[i] >= config.threshold);
            models.push_back(fr.model);
            result.folds.push_back(std::move(fr));
        } catch (const FoldError&) {
            throw;
        } catch (const std::exception& e) {
            throw FoldError(split.fold_index,
                            "fold " + std::to_string(split.fold_index) + ": " + e.what());
        }
    }

    std::vector<ConfusionMatrix> matrices;
    for (const auto& f : result.folds) matrices.push_back(f.confusion);
    result.average = average_normalized(matrices);
    result.weights = summarize_weights(models);
    if (!models.empty()) result.features = models.front().encoding.features;
    return result;
}

// ---------------------------------------------------------------------------

std::vector<Feature> reduced_preset_features() {
    return {Feature::Error1, Feature::Error2, Feature::Error3, Feature::Error4, Feature::Error5,
            Feature::Age,    Feature::Model1, Feature::Model2, Feature::Model3, Feature::Model4};
}

std::vector<Feature> prune_features(const WeightReport& report, const PruningRule& rule) {
    std::vector<Feature> present;
    for (const auto& e : report.entries)
        if (e.feature != kConstantName) {
            const auto f = parse_feature(e.feature);
            if (!f) throw std::invalid_argument("weight report names unknown feature " + e.feature);
            present.push_back(*f);
        }

    std::vector<Feature> kept;
    if (rule.kind == PruningKind::ReducedPreset) {
        const auto preset = reduced_preset_features();
        for (Feature f : present)
            if (std::find(preset.begin(), preset.end(), f) != preset.end()) kept.push_back(f);
    } else {
        double largest = 0.0;
        for (const auto& e : report.entries)
            if (e.feature != kConstantName) largest = std::max(largest, std::abs(e.mean));
        for (const auto& e : report.entries)
            if (e.feature != kConstantName && largest > 0.0 &&
                std::abs(e.mean) >= rule.relative_threshold * largest)
                kept.push_back(*parse_feature(e.feature));
    }
    if (kept.empty()) throw std::invalid_argument("pruning removed every feature");
    std::sort(kept.begin(), kept.end());
    return kept;
}

}  // namespace pdm
