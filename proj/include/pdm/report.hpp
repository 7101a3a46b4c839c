#pragma once

// Report bundle layout (one directory):
//
//   summary.json           resolved config, dataset digest, software version
//                          and one entry per run ("full", optionally "reduced")
//   summary.txt            human-readable rendering of summary.json
//   weights_<run>.csv      feature,mean,std,abs_rank
//   weights_<run>.svg      bar chart of mean weights ordered by magnitude
//   confusion_<run>.svg    heatmap of the average row-normalized matrix
//
// Everything except summary.json is derived from it by render_report().

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>

#include "json.hpp"

#include "pdm/evaluate.hpp"

namespace pdm {

nlohmann::ordered_json cv_run_to_json(const CvResult& result, std::span<const FoldSplit> folds);

void write_weights_csv(std::ostream& os, const nlohmann::json& weights);
std::string confusion_svg(const nlohmann::json& run, const std::string& title);
std::string weights_svg(const nlohmann::json& run, const std::string& title);
std::string summary_text(const nlohmann::json& summary);

/// Writes summary.json and renders the derived files.
void write_report_bundle(const std::filesystem::path& dir, const nlohmann::ordered_json& summary);

/// Re-renders the derived files from an existing summary.json.
void render_report(const std::filesystem::path& dir);

}  // namespace pdm
