#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

#include <openssl/evp.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "pdm/assemble.hpp"
#include "pdm/csv.hpp"
#include "pdm/evaluate.hpp"
#include "pdm/ingest.hpp"
#include "pdm/logreg.hpp"
#include "pdm/model_io.hpp"
#include "pdm/report.hpp"
#include "pdm/synth.hpp"
#include "pdm/version.hpp"

namespace pdm::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

class ValidationFailure : public std::runtime_error {
public:
    ValidationFailure() : std::runtime_error("input datasets failed validation") {}
};

// --- option groups ---------------------------------------------------------

struct InputOptions {
    std::string in_dir;
    std::string telemetry, errors, maintenance, failures, machines;

    void add(CLI::App& app) {
        app.add_option("--in-dir", in_dir, "Directory holding the five dataset CSVs");
        app.add_option("--telemetry", telemetry, "Telemetry CSV (overrides --in-dir)");
        app.add_option("--errors", errors, "Errors CSV (overrides --in-dir)");
        app.add_option("--maintenance", maintenance, "Maintenance CSV (overrides --in-dir)");
        app.add_option("--failures", failures, "Failures CSV (overrides --in-dir)");
        app.add_option("--machines", machines, "Machines CSV (overrides --in-dir)");
    }

    BundlePaths resolve() const {
        BundlePaths p = in_dir.empty() ? BundlePaths{} : BundlePaths::in_dir(in_dir);
        if (!telemetry.empty()) p.telemetry = telemetry;
        if (!errors.empty()) p.errors = errors;
        if (!maintenance.empty()) p.maintenance = maintenance;
        if (!failures.empty()) p.failures = failures;
        if (!machines.empty()) p.machines = machines;
        for (const auto* path : {&p.telemetry, &p.errors, &p.maintenance, &p.failures, &p.machines})
            if (path->empty())
                throw std::invalid_argument("all five datasets are required: pass --in-dir or "
                                            "each of --telemetry/--errors/--maintenance/"
                                            "--failures/--machines");
        return p;
    }

    ordered_json to_json() const {
        const BundlePaths p = resolve();
        return {{"telemetry", p.telemetry.string()},     {"errors", p.errors.string()},
                {"maintenance", p.maintenance.string()}, {"failures", p.failures.string()},
                {"machines", p.machines.string()}};
    }
};

struct ModelOptions {
    int horizon = 24;
    bool label_window = false;
    double weight = 100.0;
    double l2 = 1.0;
    double tolerance = 1e-8;
    int max_iterations = 100;
    std::string solver = "newton";
    std::vector<std::string> features;

    void add(CLI::App& app) {
        app.add_option("--horizon", horizon, "Prediction horizon in hours")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        app.add_flag("--label-window", label_window,
                     "Label = any failure within (t, t+horizon] instead of exactly at t+horizon");
        app.add_option("--weight", weight, "Sample weight of failure rows (non-failure rows: 1)")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        app.add_option("--l2", l2, "L2 penalty on coefficients (not the intercept)")
            ->check(CLI::NonNegativeNumber)
            ->capture_default_str();
        app.add_option("--tol", tolerance, "Convergence tolerance on the gradient max-norm")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        app.add_option("--max-iter", max_iterations, "Maximum solver iterations")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        app.add_option("--solver", solver, "newton | gradient_descent")
            ->check(CLI::IsMember({"newton", "gradient_descent"}))
            ->capture_default_str();
        app.add_option("--features", features,
                       "Comma-separated feature subset (default: all 29 encoded features)")
            ->delimiter(',');
    }

    HorizonConfig horizon_config() const { return {horizon, label_window}; }

    FitConfig fit_config() const {
        FitConfig c;
        c.l2_strength = l2;
        c.tolerance = tolerance;
        c.max_iterations = max_iterations;
        c.solver = parse_solver(solver);
        return c;
    }

    std::vector<Feature> feature_list() const {
        if (features.empty()) return {all_features().begin(), all_features().end()};
        std::vector<Feature> out;
        for (const auto& name : features) {
            const auto f = parse_feature(name);
            if (!f) throw std::invalid_argument("unknown feature '" + name + "'");
            out.push_back(*f);
        }
        return out;
    }

    ordered_json to_json() const {
        ordered_json names = ordered_json::array();
        for (Feature f : feature_list()) names.push_back(feature_name(f));
        return {{"horizon_hours", horizon},
                {"label_mode", label_window ? "window" : "point"},
                {"weight_positive", weight},
                {"fit", fit_config_to_json(fit_config())},
                {"features", std::move(names)}};
    }
};

struct EvalOptions {
    std::string out_dir;
    int folds = 3;
    std::uint64_t seed = 42;
    double threshold = 0.5;
    std::vector<double> weight_sweep;

    void add(CLI::App& app) {
        app.add_option("--out-dir", out_dir, "Report bundle directory")->required();
        app.add_option("--folds", folds, "Number of machine-disjoint folds")
            ->check(CLI::Range(2, 1000))
            ->capture_default_str();
        app.add_option("--seed", seed, "Seed for the machine shuffle")->capture_default_str();
        app.add_option("--threshold", threshold, "Decision threshold on the failure probability")
            ->check(CLI::Range(0.0, 1.0))
            ->capture_default_str();
        app.add_option("--weight-sweep", weight_sweep,
                       "Comma-separated failure weights to additionally evaluate")
            ->delimiter(',');
    }

    ordered_json to_json() const {
        return {{"folds", folds}, {"seed", seed}, {"threshold", threshold},
                {"weight_sweep", weight_sweep}};
    }
};

// --- shared steps ----------------------------------------------------------

std::string sha256_files(const BundlePaths& p) {
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 unavailable");
    const std::pair<const char*, const fs::path*> files[] = {
        {"telemetry", &p.telemetry}, {"errors", &p.errors}, {"maintenance", &p.maintenance},
        {"failures", &p.failures},   {"machines", &p.machines}};
    for (const auto& [name, path] : files) {
        std::ifstream in(*path, std::ios::binary);
        std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        const std::string prefix = std::string(name) + '\0' + std::to_string(content.size()) + '\0';
        EVP_DigestUpdate(ctx.get(), prefix.data(), prefix.size());
        EVP_DigestUpdate(ctx.get(), content.data(), content.size());
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), digest, &len);
    static constexpr char hex[] = "0123456789abcdef";
    std::string out = "sha256:";
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xF];
    }
    return out;
}

/// Loads and validates; prints violations. Throws ValidationFailure when a
/// blocking violation exists and `tolerate_all` is false.
DatasetBundle load_checked(const BundlePaths& paths, bool tolerate_all, bool* had_violations) {
    LoadedBundle loaded = load_bundle(paths);
    for (const auto& v : loaded.report) std::cerr << "validation: " << format_violation(v) << '\n';
    if (had_violations) *had_violations = !loaded.report.empty();
    if (!tolerate_all && has_blocking_violation(loaded.report)) throw ValidationFailure();
    return std::move(loaded.bundle);
}

ordered_json software_json() { return {{"name", "pdm"}, {"version", kVersion}}; }

void write_json(const fs::path& path, const ordered_json& j) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

void print_run(const std::string& name, const CvResult& r) {
    std::cout << name << ": " << r.features.size() << " features, failure recall "
              << failure_recall(r.average) << ", false negative rate "
              << false_negative_rate(r.average) << ", false positive rate "
              << false_positive_rate(r.average) << '\n';
}

struct EvaluationInputs {
    std::vector<MachineStateRow> rows;
    std::vector<FoldSplit> folds;
    std::string digest;
};

EvaluationInputs prepare_evaluation(const InputOptions& in, const ModelOptions& model,
                                    const EvalOptions& eval) {
    const BundlePaths paths = in.resolve();
    const DatasetBundle bundle = load_checked(paths, false, nullptr);
    EvaluationInputs out;
    out.digest = sha256_files(paths);
    out.rows = build_event_stream(bundle, model.horizon_config());
    out.folds = make_folds(out.rows, eval.folds, eval.seed);
    return out;
}

CvConfig cv_config(const ModelOptions& model, const EvalOptions& eval, double weight,
                   std::vector<Feature> features) {
    CvConfig c;
    c.fit = model.fit_config();
    c.weight_positive = weight;
    c.threshold = eval.threshold;
    c.features = std::move(features);
    return c;
}

ordered_json run_config_json(const std::string& command, const InputOptions& in,
                             const ModelOptions& model, const EvalOptions* eval,
                             const ordered_json& extra = nullptr) {
    ordered_json j;
    j["command"] = command;
    j["inputs"] = in.to_json();
    j["model"] = model.to_json();
    if (eval) j["evaluation"] = eval->to_json();
    if (!extra.is_null())
        for (const auto& [k, v] : extra.items()) j[k] = v;
    return j;
}

void add_weight_sweep(ordered_json& summary, const EvaluationInputs& data,
                      const ModelOptions& model, const EvalOptions& eval,
                      const std::vector<Feature>& features) {
    if (eval.weight_sweep.empty()) return;
    ordered_json sweep = ordered_json::array();
    for (double w : eval.weight_sweep) {
        if (!(w > 0.0)) throw std::invalid_argument("weight-sweep values must be positive");
        const CvResult r = evaluate_cv(data.rows, data.folds, cv_config(model, eval, w, features));
        sweep.push_back({{"weight_positive", w},
                         {"average_normalized",
                          ordered_json::array(
                              {ordered_json::array({r.average[0][0], r.average[0][1]}),
                               ordered_json::array({r.average[1][0], r.average[1][1]})})},
                         {"failure_recall", failure_recall(r.average)},
                         {"false_positive_rate", false_positive_rate(r.average)}});
    }
    summary["weight_sweep"] = std::move(sweep);
}

// --- subcommands -----------------------------------------------------------

int cmd_generate(const SynthConfig& config, const std::string& out_dir) {
    const DatasetBundle bundle = generate(config);
    write_bundle(out_dir, bundle);
    ordered_json cfg = {{"command", "generate"},
                        {"machines", config.n_machines},
                        {"days", config.n_days},
                        {"seed", config.seed},
                        {"failure_rate", config.target_failure_rate},
                        {"signal", config.signal_strength},
                        {"error_rate", config.error_rate},
                        {"maintenance_rate", config.maintenance_rate},
                        {"telemetry_drift", config.telemetry_drift},
                        {"software", software_json()}};
    write_json(fs::path(out_dir) / "generate_config.json", cfg);
    std::cout << "wrote " << bundle.telemetry.size() << " telemetry, " << bundle.errors.size()
              << " error, " << bundle.maintenance.size() << " maintenance, "
              << bundle.failures.size() << " failure and " << bundle.machines.size()
              << " machine records to " << out_dir << '\n';
    return kOk;
}

int cmd_assemble(const InputOptions& in, const ModelOptions& model, const std::string& out) {
    const BundlePaths paths = in.resolve();
    bool had_violations = false;
    const DatasetBundle bundle = load_checked(paths, true, &had_violations);
    const auto rows = build_event_stream(bundle, model.horizon_config());
    {
        if (fs::path(out).has_parent_path()) fs::create_directories(fs::path(out).parent_path());
        std::ofstream os(out, std::ios::binary);
        if (!os) throw std::runtime_error("cannot write " + out);
        write_csv<MachineStateRow>(os, rows);
    }
    ordered_json cfg = {{"command", "assemble"},
                        {"inputs", in.to_json()},
                        {"horizon_hours", model.horizon},
                        {"label_mode", model.label_window ? "window" : "point"},
                        {"dataset_digest", sha256_files(paths)},
                        {"software", software_json()}};
    write_json(out + ".config.json", cfg);
    std::cout << "wrote " << rows.size() << " rows to " << out << '\n';
    return had_violations ? kValidation : kOk;
}

int cmd_train(const InputOptions& in, const ModelOptions& model, const std::string& out) {
    const BundlePaths paths = in.resolve();
    const DatasetBundle bundle = load_checked(paths, false, nullptr);
    const auto rows = build_event_stream(bundle, model.horizon_config());
    std::vector<std::size_t> all(rows.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    const DesignMatrix dm = encode(rows, model.weight, all, model.feature_list());
    const FitConfig fc = model.fit_config();
    const LogisticModel fitted = fit(dm, fc);
    save_model(out, fitted, fc);

    ordered_json cfg = run_config_json("train", in, model, nullptr);
    cfg["dataset_digest"] = sha256_files(paths);
    cfg["software"] = software_json();
    write_json(out + ".config.json", cfg);
    std::cout << "fitted " << rows.size() << " rows, " << dm.features() << " features in "
              << fitted.fit_meta.iterations << " iterations (converged: "
              << (fitted.fit_meta.converged ? "yes" : "no") << "), model written to " << out
              << '\n';
    return kOk;
}

int cmd_evaluate(const InputOptions& in, const ModelOptions& model, const EvalOptions& eval) {
    const EvaluationInputs data = prepare_evaluation(in, model, eval);
    const auto features = model.feature_list();
    const CvResult full =
        evaluate_cv(data.rows, data.folds, cv_config(model, eval, model.weight, features));

    ordered_json summary;
    summary["software"] = software_json();
    summary["dataset_digest"] = data.digest;
    summary["config"] = run_config_json("evaluate", in, model, &eval);
    summary["runs"] = {{"full", cv_run_to_json(full, data.folds)}};
    add_weight_sweep(summary, data, model, eval, features);

    write_report_bundle(eval.out_dir, summary);
    write_json(fs::path(eval.out_dir) / "config.json", summary["config"]);
    print_run("full", full);
    std::cout << "report written to " << eval.out_dir << '\n';
    return kOk;
}

int cmd_prune(const InputOptions& in, const ModelOptions& model, const EvalOptions& eval,
              const std::string& preset, double relative_threshold) {
    PruningRule rule;
    if (preset == "paper-reduced") {
        rule.kind = PruningKind::ReducedPreset;
    } else if (!preset.empty()) {
        throw std::invalid_argument("unknown preset '" + preset + "'");
    }
    rule.relative_threshold = relative_threshold;

    const EvaluationInputs data = prepare_evaluation(in, model, eval);
    const CvResult full = evaluate_cv(data.rows, data.folds,
                                      cv_config(model, eval, model.weight, model.feature_list()));
    const std::vector<Feature> kept = prune_features(full.weights, rule);
    const CvResult reduced =
        evaluate_cv(data.rows, data.folds, cv_config(model, eval, model.weight, kept));

    ordered_json kept_names = ordered_json::array(), dropped_names = ordered_json::array();
    for (Feature f : full.features)
        (std::find(kept.begin(), kept.end(), f) != kept.end() ? kept_names : dropped_names)
            .push_back(feature_name(f));
    const ordered_json pruning = {
        {"rule", rule.kind == PruningKind::ReducedPreset ? "paper-reduced" : "relative"},
        {"relative_threshold", relative_threshold},
        {"kept", kept_names},
        {"dropped", dropped_names}};

    ordered_json summary;
    summary["software"] = software_json();
    summary["dataset_digest"] = data.digest;
    summary["config"] = run_config_json("prune", in, model, &eval, {{"pruning", pruning}});
    summary["runs"] = {{"full", cv_run_to_json(full, data.folds)},
                       {"reduced", cv_run_to_json(reduced, data.folds)}};
    summary["pruning"] = pruning;
    add_weight_sweep(summary, data, model, eval, kept);

    write_report_bundle(eval.out_dir, summary);
    write_json(fs::path(eval.out_dir) / "config.json", summary["config"]);
    print_run("full", full);
    print_run("reduced", reduced);
    std::cout << "kept features:";
    for (Feature f : kept) std::cout << ' ' << feature_name(f);
    std::cout << "\nreport written to " << eval.out_dir << '\n';
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"Predictive-maintenance pipeline: synthetic data, event-stream assembly, "
                 "weighted logistic regression and machine-disjoint temporal cross-validation"};
    app.set_version_flag("--version", std::string(kVersion));
    app.set_config("--config", "", "TOML/INI config file; explicit flags take precedence");
    app.require_subcommand(1);

    // generate
    SynthConfig synth;
    std::string gen_out;
    auto* gen = app.add_subcommand("generate", "Write a synthetic five-file dataset");
    gen->add_option("--out-dir", gen_out, "Output directory")->required();
    gen->add_option("--machines", synth.n_machines, "Number of machines")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    gen->add_option("--days", synth.n_days, "Days of hourly telemetry (>= 3)")
        ->check(CLI::Range(3, 100000))
        ->capture_default_str();
    gen->add_option("--seed", synth.seed, "Generator seed")->capture_default_str();
    gen->add_option("--failure-rate", synth.target_failure_rate,
                    "Target positive-label rate at a 24 h horizon, in (0, 0.5)")
        ->capture_default_str();
    gen->add_option("--signal", synth.signal_strength,
                    "Log hazard ratio of failure 24 h after an error")
        ->capture_default_str();
    gen->add_option("--error-rate", synth.error_rate, "Per machine-hour error probability")
        ->capture_default_str();
    gen->add_option("--maintenance-rate", synth.maintenance_rate,
                    "Per machine-hour scheduled replacement probability")
        ->capture_default_str();
    gen->add_flag("--telemetry-drift", synth.telemetry_drift,
                  "Ramp vibration up during the 48 h before each failure");

    // assemble
    InputOptions asm_in;
    ModelOptions asm_model;
    std::string asm_out;
    auto* assemble = app.add_subcommand("assemble", "Join the datasets into a labelled event stream");
    asm_in.add(*assemble);
    assemble->add_option("--out", asm_out, "Output stream CSV")->required();
    assemble->add_option("--horizon", asm_model.horizon, "Prediction horizon in hours")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    assemble->add_flag("--label-window", asm_model.label_window,
                       "Label = any failure within (t, t+horizon]");

    // train
    InputOptions train_in;
    ModelOptions train_model;
    std::string train_out;
    auto* train = app.add_subcommand("train", "Fit one model on all rows and save it");
    train_in.add(*train);
    train_model.add(*train);
    train->add_option("--out", train_out, "Model file (JSON)")->required();

    // evaluate
    InputOptions eval_in;
    ModelOptions eval_model;
    EvalOptions eval_opts;
    auto* evaluate = app.add_subcommand("evaluate", "Cross-validate and write a report bundle");
    eval_in.add(*evaluate);
    eval_model.add(*evaluate);
    eval_opts.add(*evaluate);

    // prune
    InputOptions prune_in;
    ModelOptions prune_model;
    EvalOptions prune_opts;
    std::string preset;
    double relative_threshold = 0.1;
    auto* prune = app.add_subcommand(
        "prune", "Cross-validate, prune low-weight features and re-evaluate on the reduced set");
    prune_in.add(*prune);
    prune_model.add(*prune);
    prune_opts.add(*prune);
    prune->add_option("--preset", preset,
                      "Named feature set instead of the magnitude rule: paper-reduced");
    prune->add_option("--relative-threshold", relative_threshold,
                      "Drop features whose |mean weight| is below this fraction of the largest")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();

    // report
    std::string bundle_dir;
    auto* report = app.add_subcommand("report", "Re-render SVG/text artifacts from a report bundle");
    report->add_option("--bundle", bundle_dir, "Report bundle directory")->required();

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kFailure;
    }

    try {
        if (gen->parsed()) return cmd_generate(synth, gen_out);
        if (assemble->parsed()) return cmd_assemble(asm_in, asm_model, asm_out);
        if (train->parsed()) return cmd_train(train_in, train_model, train_out);
        if (evaluate->parsed()) return cmd_evaluate(eval_in, eval_model, eval_opts);
        if (prune->parsed())
            return cmd_prune(prune_in, prune_model, prune_opts, preset, relative_threshold);
        if (report->parsed()) {
            render_report(bundle_dir);
            std::cout << "rendered " << bundle_dir << '\n';
            return kOk;
        }
    } catch (const ValidationFailure& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kValidation;
    } catch (const FoldError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFoldOrFit;
    } catch (const UnfittableError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFoldOrFit;
    } catch (const FitDivergedError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFoldOrFit;
    } catch (const DegenerateEncodingError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFoldOrFit;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kFailure;
}

}  // namespace pdm::cli
