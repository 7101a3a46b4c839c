#pragma once

// Model files are JSON objects:
//
//   {
//     "format": "pdm-logistic-model",
//     "version": 1,
//     "alpha": -4.1,
//     "coefficients": [{"feature": "error_1", "beta": 2.3}, ...],   // column order
//     "standardization": [{"feature": "volt", "mean": 170.2, "std_dev": 15.1}, ...],
//     "fit": {"iterations": 9, "objective": 1234.5, "gradient_max_norm": 1e-10,
//             "converged": true},
//     "fit_config": {"l2_strength": 1, "tolerance": 1e-08, "max_iterations": 100,
//                    "solver": "newton"}
//   }
//
// Numbers are written in shortest round-trip form, so save/load is exact.

#include <filesystem>
#include <iosfwd>

#include "json.hpp"

#include "pdm/logreg.hpp"

namespace pdm {

nlohmann::ordered_json model_to_json(const LogisticModel& model, const FitConfig& config);
LogisticModel model_from_json(const nlohmann::json& j);
FitConfig fit_config_from_json(const nlohmann::json& j);
nlohmann::ordered_json fit_config_to_json(const FitConfig& config);

void save_model(const std::filesystem::path& path, const LogisticModel& model,
                const FitConfig& config);
LogisticModel load_model(const std::filesystem::path& path);

}  // namespace pdm
