#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "pdm/ingest.hpp"
#include "pdm/schema.hpp"

namespace pdm {

struct HorizonConfig {
    int horizon_hours = 24;
    /// false: label = failure at exactly t + horizon.
    /// true:  label = any failure in (t, t + horizon].
    bool label_window = false;
};

class AssemblyError : public std::runtime_error {
public:
    AssemblyError(MachineId machine, const std::string& what)
        : std::runtime_error(what), machine_(machine) {}
    MachineId machine() const { return machine_; }

private:
    MachineId machine_;
};

/// Left-joins errors and maintenance onto the telemetry grid, attaches the
/// machine descriptor and weekday, and labels each row by the failure state
/// `horizon_hours` later. Events colliding on the same (machine, hour) are
/// OR-merged. Rows whose horizon runs past the machine's last telemetry hour
/// are dropped. Output is ordered by (machine_id, datetime).
std::vector<MachineStateRow> build_event_stream(const DatasetBundle& bundle,
                                                const HorizonConfig& horizon);

struct RowKey {
    MachineId machine_id;
    Timestamp datetime;
    friend bool operator==(const RowKey&, const RowKey&) = default;
};

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct DesignMatrix {
    RowMatrix x;              // n_samples x n_features
    Eigen::VectorXd labels;   // 0/1
    Eigen::VectorXd weights;  // positive
    std::vector<RowKey> keys;
    FeatureEncoding encoding;

    Eigen::Index rows() const { return x.rows(); }
    Eigen::Index features() const { return x.cols(); }

    DesignMatrix subset(std::span<const std::size_t> row_indices) const;
};

class DegenerateEncodingError : public std::runtime_error {
public:
    explicit DegenerateEncodingError(Feature column);
    Feature column() const { return column_; }

private:
    Feature column_;
};

/// Fits z-score statistics for the continuous columns among `features`
/// using only the rows listed in `fit_rows`.
FeatureEncoding fit_encoding(std::span<const MachineStateRow> rows,
                             std::span<const std::size_t> fit_rows,
                             std::span<const Feature> features = all_features());

/// Encodes every row with an already fitted encoding.
DesignMatrix apply_encoding(std::span<const MachineStateRow> rows, const FeatureEncoding& encoding,
                            double weight_positive);

/// fit_encoding on `fit_rows`, then apply_encoding to all rows.
DesignMatrix encode(std::span<const MachineStateRow> rows, double weight_positive,
                    std::span<const std::size_t> fit_rows,
                    std::span<const Feature> features = all_features());

}  // namespace pdm
