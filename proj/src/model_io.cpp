#include "pdm/model_io.hpp"

#include <fstream>

namespace pdm {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

Feature feature_from(const json& j) {
    const auto name = j.get<std::string>();
    const auto f = parse_feature(name);
    if (!f) throw std::runtime_error("model file: unknown feature '" + name + "'");
    return *f;
}

}  // namespace

ordered_json fit_config_to_json(const FitConfig& c) {
    ordered_json j;
    j["l2_strength"] = c.l2_strength;
    j["tolerance"] = c.tolerance;
    j["max_iterations"] = c.max_iterations;
    j["solver"] = std::string(solver_name(c.solver));
    return j;
}

FitConfig fit_config_from_json(const json& j) {
    FitConfig c;
    c.l2_strength = j.at("l2_strength").get<double>();
    c.tolerance = j.at("tolerance").get<double>();
    c.max_iterations = j.at("max_iterations").get<int>();
    c.solver = parse_solver(j.at("solver").get<std::string>());
    return c;
}

ordered_json model_to_json(const LogisticModel& model, const FitConfig& config) {
    ordered_json j;
    j["format"] = "pdm-logistic-model";
    j["version"] = 1;
    j["alpha"] = model.alpha;
    ordered_json coefs = ordered_json::array();
    for (std::size_t i = 0; i < model.encoding.features.size(); ++i)
        coefs.push_back({{"feature", feature_name(model.encoding.features[i])},
                         {"beta", model.beta[static_cast<Eigen::Index>(i)]}});
    j["coefficients"] = std::move(coefs);
    ordered_json scaling = ordered_json::array();
    for (const auto& s : model.encoding.scaling)
        scaling.push_back(
            {{"feature", feature_name(s.feature)}, {"mean", s.mean}, {"std_dev", s.std_dev}});
    j["standardization"] = std::move(scaling);
    j["fit"] = {{"iterations", model.fit_meta.iterations},
                {"objective", model.fit_meta.objective},
                {"gradient_max_norm", model.fit_meta.gradient_max_norm},
                {"converged", model.fit_meta.converged}};
    j["fit_config"] = fit_config_to_json(config);
    return j;
}

LogisticModel model_from_json(const json& j) {
    if (j.value("format", "") != "pdm-logistic-model" || j.value("version", 0) != 1)
        throw std::runtime_error("model file: unsupported format or version");
    LogisticModel m;
    m.alpha = j.at("alpha").get<double>();
    const auto& coefs = j.at("coefficients");
    m.beta.resize(static_cast<Eigen::Index>(coefs.size()));
    for (std::size_t i = 0; i < coefs.size(); ++i) {
        m.encoding.features.push_back(feature_from(coefs[i].at("feature")));
        m.beta[static_cast<Eigen::Index>(i)] = coefs[i].at("beta").get<double>();
    }
    for (const auto& s : j.at("standardization")) {
        const Feature f = feature_from(s.at("feature"));
        if (!is_continuous(f))
            throw std::runtime_error("model file: standardization for non-continuous feature");
        m.encoding.scaling.push_back({f, s.at("mean").get<double>(), s.at("std_dev").get<double>()});
    }
    std::size_t next = 0;
    for (Feature f : m.encoding.features) {
        if (!is_continuous(f)) continue;
        if (next >= m.encoding.scaling.size() || m.encoding.scaling[next].feature != f)
            throw std::runtime_error("model file: standardization does not match coefficients");
        ++next;
    }
    if (next != m.encoding.scaling.size())
        throw std::runtime_error("model file: standardization does not match coefficients");
    const auto& fit = j.at("fit");
    m.fit_meta.iterations = fit.at("iterations").get<int>();
    m.fit_meta.objective = fit.at("objective").get<double>();
    m.fit_meta.gradient_max_norm = fit.at("gradient_max_norm").get<double>();
    m.fit_meta.converged = fit.at("converged").get<bool>();
    return m;
}

void save_model(const std::filesystem::path& path, const LogisticModel& model,
                const FitConfig& config) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << model_to_json(model, config).dump(2) << '\n';
}

LogisticModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return model_from_json(json::parse(in));
}

}  // namespace pdm
