#include "pdm/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "pdm/csv.hpp"

namespace pdm {

using nlohmann::json;
using nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

ordered_json rate_json(const RateMatrix& m) {
    return ordered_json::array({ordered_json::array({m[0][0], m[0][1]}),
                                ordered_json::array({m[1][0], m[1][1]})});
}

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string escape_xml(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

// White -> dark blue.
std::string heat_color(double rate) {
    const double t = std::clamp(rate, 0.0, 1.0);
    const auto ch = [t](int lo, int hi) {
        return static_cast<int>(std::lround(hi + (lo - hi) * t));
    };
    char buf[16];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", ch(8, 247), ch(48, 251), ch(107, 255));
    return buf;
}

}  // namespace

ordered_json cv_run_to_json(const CvResult& result, std::span<const FoldSplit> folds) {
    ordered_json run;
    ordered_json features = ordered_json::array();
    for (Feature f : result.features) features.push_back(feature_name(f));
    run["features"] = std::move(features);

    ordered_json fold_list = ordered_json::array();
    for (std::size_t i = 0; i < result.folds.size(); ++i) {
        const auto& fr = result.folds[i];
        ordered_json fj;
        fj["fold"] = i;
        if (i < folds.size()) {
            ordered_json tm = ordered_json::array();
            for (auto m : folds[i].test_machines) tm.push_back(m.value);
            fj["test_machines"] = std::move(tm);
            fj["time_cutoff"] = folds[i].time_cutoff.to_string();
        }
        fj["train_rows"] = fr.train_rows;
        fj["test_rows"] = fr.test_rows;
        const auto& c = fr.confusion.counts;
        fj["counts"] = ordered_json::array({ordered_json::array({c[0][0], c[0][1]}),
                                            ordered_json::array({c[1][0], c[1][1]})});
        fj["normalized"] = rate_json(fr.confusion.normalized());
        fj["fit"] = {{"iterations", fr.model.fit_meta.iterations},
                     {"objective", fr.model.fit_meta.objective},
                     {"gradient_max_norm", fr.model.fit_meta.gradient_max_norm},
                     {"converged", fr.model.fit_meta.converged}};
        fold_list.push_back(std::move(fj));
    }
    run["folds"] = std::move(fold_list);
    run["average_normalized"] = rate_json(result.average);
    run["failure_recall"] = failure_recall(result.average);
    run["false_negative_rate"] = false_negative_rate(result.average);
    run["false_positive_rate"] = false_positive_rate(result.average);

    ordered_json weights = ordered_json::array();
    for (const auto& e : result.weights.entries)
        weights.push_back(
            {{"feature", e.feature}, {"mean", e.mean}, {"std", e.std_dev}, {"abs_rank", e.abs_rank}});
    run["weights"] = std::move(weights);
    return run;
}

void write_weights_csv(std::ostream& os, const json& weights) {
    os << "feature,mean,std,abs_rank\n";
    for (const auto& w : weights)
        os << w.at("feature").get<std::string>() << ',' << format_double(w.at("mean").get<double>())
           << ',' << format_double(w.at("std").get<double>()) << ','
           << w.at("abs_rank").get<int>() << '\n';
}

std::string confusion_svg(const json& run, const std::string& title) {
    const auto& avg = run.at("average_normalized");
    std::int64_t counts[2][2] = {{0, 0}, {0, 0}};
    for (const auto& f : run.at("folds"))
        for (int t = 0; t < 2; ++t)
            for (int p = 0; p < 2; ++p) counts[t][p] += f.at("counts")[t][p].get<std::int64_t>();

    constexpr int cell = 140, left = 150, top = 70;
    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << left + 2 * cell + 30
      << "\" height=\"" << top + 2 * cell + 60 << "\" font-family=\"sans-serif\">\n";
    s << "<text x=\"" << (left + cell) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
      << escape_xml(title) << "</text>\n";
    const char* names[2] = {"no failure", "failure"};
    for (int p = 0; p < 2; ++p)
        s << "<text x=\"" << left + p * cell + cell / 2 << "\" y=\"" << top - 10
          << "\" text-anchor=\"middle\" font-size=\"12\">predicted " << names[p] << "</text>\n";
    for (int t = 0; t < 2; ++t) {
        s << "<text x=\"" << left - 10 << "\" y=\"" << top + t * cell + cell / 2
          << "\" text-anchor=\"end\" font-size=\"12\">true " << names[t] << "</text>\n";
        for (int p = 0; p < 2; ++p) {
            const double rate = avg[t][p].get<double>();
            const int x = left + p * cell, y = top + t * cell;
            s << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell << "\" height=\""
              << cell << "\" fill=\"" << heat_color(rate) << "\" stroke=\"#333\"/>\n";
            s << "<text x=\"" << x + cell / 2 << "\" y=\"" << y + cell / 2
              << "\" text-anchor=\"middle\" font-size=\"18\" fill=\""
              << (rate > 0.5 ? "#fff" : "#000") << "\">" << fixed(rate, 3) << "</text>\n";
            s << "<text x=\"" << x + cell / 2 << "\" y=\"" << y + cell / 2 + 20
              << "\" text-anchor=\"middle\" font-size=\"11\" fill=\""
              << (rate > 0.5 ? "#fff" : "#000") << "\">n=" << counts[t][p] << "</text>\n";
        }
    }
    s << "<text x=\"" << left + cell << "\" y=\"" << top + 2 * cell + 30
      << "\" text-anchor=\"middle\" font-size=\"11\">rows normalized per fold, averaged over "
      << run.at("folds").size() << " folds; n = summed test counts</text>\n";
    s << "</svg>\n";
    return s.str();
}

std::string weights_svg(const json& run, const std::string& title) {
    const auto& weights = run.at("weights");
    double largest = 0.0;
    for (const auto& w : weights)
        largest = std::max(largest, std::abs(w.at("mean").get<double>()) + w.at("std").get<double>());
    if (largest == 0.0) largest = 1.0;

    constexpr int bar_h = 18, gap = 4, label_w = 110, half = 260, top = 50;
    const int height = top + static_cast<int>(weights.size()) * (bar_h + gap) + 40;
    const int zero_x = label_w + half;
    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << label_w + 2 * half + 20
      << "\" height=\"" << height << "\" font-family=\"sans-serif\">\n";
    s << "<text x=\"" << zero_x << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
      << escape_xml(title) << "</text>\n";
    int y = top;
    for (const auto& w : weights) {
        const double mean = w.at("mean").get<double>();
        const double sd = w.at("std").get<double>();
        const double len = std::abs(mean) / largest * half;
        const double x = mean >= 0 ? zero_x : zero_x - len;
        s << "<text x=\"" << label_w - 6 << "\" y=\"" << y + bar_h - 5
          << "\" text-anchor=\"end\" font-size=\"11\">"
          << escape_xml(w.at("feature").get<std::string>()) << "</text>\n";
        s << "<rect x=\"" << fixed(x, 2) << "\" y=\"" << y << "\" width=\"" << fixed(len, 2)
          << "\" height=\"" << bar_h << "\" fill=\"" << (mean >= 0 ? "#c0392b" : "#2e86c1")
          << "\"><title>" << fixed(mean, 4) << " &#177; " << fixed(sd, 4) << "</title></rect>\n";
        const double cx = zero_x + mean / largest * half;
        const double dx = sd / largest * half;
        s << "<line x1=\"" << fixed(cx - dx, 2) << "\" x2=\"" << fixed(cx + dx, 2) << "\" y1=\""
          << y + bar_h / 2 << "\" y2=\"" << y + bar_h / 2 << "\" stroke=\"#222\"/>\n";
        y += bar_h + gap;
    }
    s << "<line x1=\"" << zero_x << "\" x2=\"" << zero_x << "\" y1=\"" << top - 4 << "\" y2=\""
      << y << "\" stroke=\"#000\"/>\n";
    s << "<text x=\"" << zero_x << "\" y=\"" << y + 24
      << "\" text-anchor=\"middle\" font-size=\"11\">mean coefficient across folds "
         "(standardized units), bars ordered by magnitude</text>\n";
    s << "</svg>\n";
    return s.str();
}

std::string summary_text(const json& summary) {
    std::ostringstream s;
    const auto& sw = summary.at("software");
    s << sw.at("name").get<std::string>() << ' ' << sw.at("version").get<std::string>() << '\n';
    if (summary.contains("dataset_digest"))
        s << "dataset digest: " << summary.at("dataset_digest").get<std::string>() << '\n';
    if (summary.contains("config")) s << "config: " << summary.at("config").dump() << '\n';
    for (const auto& [name, run] : summary.at("runs").items()) {
        s << "\n== run: " << name << " (" << run.at("features").size() << " features) ==\n";
        for (const auto& f : run.at("folds")) {
            const auto& c = f.at("counts");
            const auto& n = f.at("normalized");
            s << "fold " << f.at("fold").get<int>() << ": train=" << f.at("train_rows").get<long>()
              << " test=" << f.at("test_rows").get<long>() << "  counts [[" << c[0][0] << ", "
              << c[0][1] << "], [" << c[1][0] << ", " << c[1][1] << "]]  normalized [["
              << fixed(n[0][0].get<double>(), 4) << ", " << fixed(n[0][1].get<double>(), 4)
              << "], [" << fixed(n[1][0].get<double>(), 4) << ", "
              << fixed(n[1][1].get<double>(), 4) << "]]\n";
        }
        const auto& a = run.at("average_normalized");
        s << "average normalized: [[" << fixed(a[0][0].get<double>(), 4) << ", "
          << fixed(a[0][1].get<double>(), 4) << "], [" << fixed(a[1][0].get<double>(), 4) << ", "
          << fixed(a[1][1].get<double>(), 4) << "]]\n";
        s << "failure recall " << fixed(run.at("failure_recall").get<double>(), 4)
          << ", false negative rate " << fixed(run.at("false_negative_rate").get<double>(), 4)
          << ", false positive rate " << fixed(run.at("false_positive_rate").get<double>(), 4)
          << '\n';
        s << "weights (by |mean|):\n";
        for (const auto& w : run.at("weights"))
            s << "  " << w.at("abs_rank").get<int>() << ". " << w.at("feature").get<std::string>()
              << ' ' << fixed(w.at("mean").get<double>(), 4) << " +/- "
              << fixed(w.at("std").get<double>(), 4) << '\n';
    }
    if (summary.contains("weight_sweep")) {
        s << "\n== class-weight sweep ==\n";
        for (const auto& e : summary.at("weight_sweep"))
            s << "weight " << format_double(e.at("weight_positive").get<double>()) << ": recall "
              << fixed(e.at("failure_recall").get<double>(), 4) << ", false positive rate "
              << fixed(e.at("false_positive_rate").get<double>(), 4) << '\n';
    }
    return s.str();
}

void write_report_bundle(const fs::path& dir, const ordered_json& summary) {
    fs::create_directories(dir);
    write_text(dir / "summary.json", summary.dump(2) + "\n");
    render_report(dir);
}

void render_report(const fs::path& dir) {
    std::ifstream in(dir / "summary.json", std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + (dir / "summary.json").string());
    const json summary = json::parse(in);

    write_text(dir / "summary.txt", summary_text(summary));
    for (const auto& [name, run] : summary.at("runs").items()) {
        std::ostringstream csv;
        write_weights_csv(csv, run.at("weights"));
        write_text(dir / ("weights_" + name + ".csv"), csv.str());
        write_text(dir / ("weights_" + name + ".svg"),
                   weights_svg(run, "Mean feature weights over CV folds (" + name + ")"));
        write_text(dir / ("confusion_" + name + ".svg"),
                   confusion_svg(run, "Normalized average confusion matrix (" + name + ")"));
    }
}

}  // namespace pdm
