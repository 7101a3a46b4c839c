#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pdm/logreg.hpp"
#include "pdm/schema.hpp"

namespace pdm {

/// Machine-disjoint, temporally ordered split: every train row is strictly
/// before `time_cutoff`, every test row at or after it, and no machine
/// appears on both sides.
struct FoldSplit {
    int fold_index = 0;
    std::vector<std::size_t> train_rows;
    std::vector<std::size_t> test_rows;
    std::vector<MachineId> train_machines;
    std::vector<MachineId> test_machines;
    Timestamp time_cutoff;
};

class FoldError : public std::runtime_error {
public:
    /// fold < 0 when the error is not specific to one fold.
    FoldError(int fold, const std::string& what) : std::runtime_error(what), fold_(fold) {}
    int fold() const { return fold_; }

private:
    int fold_;
};

/// Shuffles the machines with `seed`, splits them into k near-equal groups
/// (the first n % k groups take one extra machine) and lets fold i test on
/// group i. One cutoff, the median distinct timestamp of the stream, applies
/// to every fold.
std::vector<FoldSplit> make_folds(std::span<const MachineStateRow> rows, int k,
                                  std::uint64_t seed);

// ---------------------------------------------------------------------------

using RateMatrix = std::array<std::array<double, 2>, 2>;

/// Counts indexed [true class][predicted class]; class 1 is failure.
struct ConfusionMatrix {
    std::array<std::array<std::int64_t, 2>, 2> counts{};

    void add(bool truth, bool predicted) { ++counts[truth ? 1 : 0][predicted ? 1 : 0]; }
    std::int64_t total() const;
    /// Each row divided by its sum; all-zero rows stay zero.
    RateMatrix normalized() const;
};

RateMatrix average_normalized(std::span<const ConfusionMatrix> matrices);

inline double failure_recall(const RateMatrix& m) { return m[1][1]; }
inline double false_negative_rate(const RateMatrix& m) { return m[1][0]; }
inline double false_positive_rate(const RateMatrix& m) { return m[0][1]; }

// ---------------------------------------------------------------------------

inline constexpr std::string_view kConstantName = "constant";

struct WeightEntry {
    std::string feature;  // feature name or "constant" for the intercept
    double mean = 0.0;
    double std_dev = 0.0;  // sample standard deviation across folds
    int abs_rank = 0;      // 1 = largest |mean|
};

/// Entries are ordered by descending |mean|; ties keep column order with
/// the intercept last.
struct WeightReport {
    std::vector<WeightEntry> entries;
    const WeightEntry* find(std::string_view feature) const;
};

WeightReport summarize_weights(std::span<const LogisticModel> models);

// ---------------------------------------------------------------------------

struct CvConfig {
    FitConfig fit;
    double weight_positive = 100.0;
    double threshold = 0.5;
    std::vector<Feature> features{all_features().begin(), all_features().end()};
};

struct FoldResult {
    ConfusionMatrix confusion;
    LogisticModel model;
    std::size_t train_rows = 0;
    std::size_t test_rows = 0;
};

struct CvResult {
    RateMatrix average{};
    WeightReport weights;
    std::vector<FoldResult> folds;
    std::vector<Feature> features;
};

/// Per fold: fits the encoding and the model on the train rows only and
/// scores the test rows. Errors are rethrown as FoldError naming the fold.
CvResult evaluate_cv(std::span<const MachineStateRow> rows, std::span<const FoldSplit> folds,
                     const CvConfig& config);

// ---------------------------------------------------------------------------

enum class PruningKind { Relative, ReducedPreset };

struct PruningRule {
    PruningKind kind = PruningKind::Relative;
    double relative_threshold = 0.1;
};

/// {error_1..5, age, model_1..4}: drops weekday, replacement, failure
/// replacement and telemetry columns.
std::vector<Feature> reduced_preset_features();

/// Returns the kept features in canonical column order.
/// Relative: keep features with |mean| >= threshold * max non-constant |mean|.
std::vector<Feature> prune_features(const WeightReport& report, const PruningRule& rule);

}  // namespace pdm
