#include "pdm/logreg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>

#include "pdm/kernels.hpp"

namespace pdm {

namespace {

constexpr double kProbLow = std::numeric_limits<double>::denorm_min();
const double kProbHigh = std::nextafter(1.0, 0.0);
constexpr int kMaxHalvings = 60;
// Relative resolution assumed for a summed objective value.
constexpr double kObjectiveNoise = 1e-12;

kernels::Samples samples(const DesignMatrix& d) { return {d.x, d.labels, d.weights}; }

void check_params(const Parameters& params, const DesignMatrix& data) {
    if (params.beta.size() != data.features())
        throw DimensionError("parameter length " + std::to_string(params.beta.size()) +
                             " does not match " + std::to_string(data.features()) + " features");
}

double penalty(const Eigen::VectorXd& beta, double l2) { return 0.5 * l2 * beta.squaredNorm(); }

struct Evaluation {
    double objective;
    Eigen::VectorXd gradient;
    Eigen::MatrixXd hessian;
};

// Newton and the public objective/gradient use the blocked OpenMP kernel;
// gradient descent uses the serial reference so the two solvers share no
// summation code.
enum class Kernel { Serial, Parallel };

Evaluation evaluate(const Parameters& params, const DesignMatrix& data, const FitConfig& cfg,
                    kernels::Order order, Kernel kernel = Kernel::Parallel) {
    auto terms = kernel == Kernel::Parallel
                     ? kernels::parallel::accumulate(samples(data), params.alpha, params.beta, order)
                     : kernels::serial::accumulate(samples(data), params.alpha, params.beta, order);
    Evaluation e{terms.value + penalty(params.beta, cfg.l2_strength), std::move(terms.gradient),
                 std::move(terms.hessian)};
    if (order != kernels::Order::Value) e.gradient.tail(params.beta.size()) += cfg.l2_strength * params.beta;
    if (order == kernels::Order::Hessian)
        e.hessian.diagonal().tail(params.beta.size()).array() += cfg.l2_strength;
    return e;
}

double max_norm(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

Parameters step_from(const Parameters& p, const Eigen::VectorXd& direction, double t) {
    return {p.alpha - t * direction[0], p.beta - t * direction.tail(p.beta.size())};
}

/// Solves H d = g, adding a growing ridge if H is numerically singular
/// (e.g. unpenalised collinear columns).
Eigen::VectorXd newton_direction(const Eigen::MatrixXd& h, const Eigen::VectorXd& g) {
    Eigen::LDLT<Eigen::MatrixXd> ldlt(h);
    Eigen::VectorXd d = ldlt.solve(g);
    const double scale = std::max(1.0, h.diagonal().cwiseAbs().maxCoeff());
    for (double ridge = 1e-10 * scale; ; ridge *= 10.0) {
        if (ldlt.info() == Eigen::Success && d.allFinite() && d.dot(g) > 0.0 &&
            (h * d - g).norm() <= 1e-6 * std::max(1.0, g.norm()))
            return d;
        if (ridge > 1e6 * scale) return g;  // give up on curvature; steepest descent
        Eigen::MatrixXd damped = h;
        damped.diagonal().array() += ridge;
        ldlt.compute(damped);
        d = ldlt.solve(g);
        if (ldlt.info() == Eigen::Success && d.allFinite() && d.dot(g) > 0.0) return d;
    }
}

void check_fittable(const DesignMatrix& data) {
    if (data.rows() == 0) throw UnfittableError("cannot fit an empty design matrix");
    const double positives = data.labels.sum();
    if (positives == 0.0 || positives == static_cast<double>(data.rows()))
        throw UnfittableError("training data contains a single class");
}

LogisticModel fit_newton(const DesignMatrix& data, const FitConfig& cfg) {
    Parameters params{0.0, Eigen::VectorXd::Zero(data.features())};
    FitMeta meta;
    Evaluation e = evaluate(params, data, cfg, kernels::Order::Hessian);
    meta.objective_history.push_back(e.objective);

    for (;;) {
        if (!std::isfinite(e.objective) || !e.gradient.allFinite())
            throw FitDivergedError(meta.iterations, "non-finite objective during Newton iteration");
        meta.gradient_max_norm = max_norm(e.gradient);
        if (meta.gradient_max_norm <= cfg.tolerance) {
            meta.converged = true;
            break;
        }
        if (meta.iterations >= cfg.max_iterations) break;

        const Eigen::VectorXd direction = newton_direction(e.hessian, e.gradient);
        bool accepted = false;

        // Near the optimum the predicted decrease drops below the rounding
        // noise of the objective and comparing values becomes a coin toss.
        // There the full step is judged by the gradient instead.
        const double noise = kObjectiveNoise * std::max(1.0, std::abs(e.objective));
        if (0.5 * direction.dot(e.gradient) <= noise) {
            const Parameters candidate = step_from(params, direction, 1.0);
            Evaluation next = evaluate(candidate, data, cfg, kernels::Order::Hessian);
            if (std::isfinite(next.objective) && next.objective <= e.objective + noise &&
                next.gradient.allFinite() && max_norm(next.gradient) < meta.gradient_max_norm) {
                params = candidate;
                ++meta.iterations;
                e = std::move(next);
                meta.objective_history.push_back(e.objective);
                continue;
            }
        }

        double t = 1.0;
        for (int halving = 0; halving <= kMaxHalvings; ++halving, t *= 0.5) {
            const Parameters candidate = step_from(params, direction, t);
            const double value = evaluate(candidate, data, cfg, kernels::Order::Value).objective;
            if (std::isfinite(value) && value <= e.objective) {
                params = candidate;
                accepted = true;
                break;
            }
        }
        if (!accepted) break;  // stalled at the floating-point floor
        ++meta.iterations;
        e = evaluate(params, data, cfg, kernels::Order::Hessian);
        meta.objective_history.push_back(e.objective);
    }
    meta.objective = e.objective;
    return {params.alpha, params.beta, data.encoding, std::move(meta)};
}

LogisticModel fit_gradient_descent(const DesignMatrix& data, const FitConfig& cfg) {
    // Lipschitz bound of the gradient: 1/4 sum_i w_i |(1, x_i)|^2 + l2.
    const double lipschitz =
        0.25 * (data.weights.array() * (1.0 + data.x.rowwise().squaredNorm().array())).sum() +
        cfg.l2_strength;
    const double safe_step = 1.0 / lipschitz;

    Parameters params{0.0, Eigen::VectorXd::Zero(data.features())};
    FitMeta meta;
    Evaluation e = evaluate(params, data, cfg, kernels::Order::Gradient, Kernel::Serial);
    meta.objective_history.push_back(e.objective);
    double t = safe_step;

    for (;;) {
        if (!std::isfinite(e.objective) || !e.gradient.allFinite())
            throw FitDivergedError(meta.iterations, "non-finite objective during gradient descent");
        meta.gradient_max_norm = max_norm(e.gradient);
        if (meta.gradient_max_norm <= cfg.tolerance) {
            meta.converged = true;
            break;
        }
        if (meta.iterations >= cfg.max_iterations) break;

        // Backtracking (Armijo) from twice the last step; the 1/L step always
        // satisfies sufficient decrease, so it is taken unconditionally.
        const double g2 = e.gradient.squaredNorm();
        t *= 2.0;
        Parameters candidate;
        while (true) {
            if (t <= safe_step) {
                t = safe_step;
                candidate = step_from(params, e.gradient, t);
                break;
            }
            candidate = step_from(params, e.gradient, t);
            const double value =
                evaluate(candidate, data, cfg, kernels::Order::Value, Kernel::Serial).objective;
            if (value <= e.objective - 0.5 * t * g2) break;
            t *= 0.5;
        }
        params = std::move(candidate);
        ++meta.iterations;
        e = evaluate(params, data, cfg, kernels::Order::Gradient, Kernel::Serial);
        meta.objective_history.push_back(e.objective);
    }
    meta.objective = e.objective;
    return {params.alpha, params.beta, data.encoding, std::move(meta)};
}

}  // namespace

std::string_view solver_name(Solver s) {
    return s == Solver::Newton ? "newton" : "gradient_descent";
}

Solver parse_solver(std::string_view name) {
    if (name == "newton") return Solver::Newton;
    if (name == "gradient_descent") return Solver::GradientDescent;
    throw std::invalid_argument("unknown solver '" + std::string(name) + "'");
}

void FitConfig::validate() const {
    if (!(l2_strength >= 0.0) || !std::isfinite(l2_strength))
        throw std::invalid_argument("l2_strength must be finite and >= 0");
    if (!(tolerance > 0.0)) throw std::invalid_argument("tolerance must be > 0");
    if (max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
}

FitDivergedError::FitDivergedError(int iteration, const std::string& what)
    : std::runtime_error(what + " (iteration " + std::to_string(iteration) + ")"),
      iteration_(iteration) {}

double linear_term(const LogisticModel& model, std::span<const double> x) {
    if (x.size() != static_cast<std::size_t>(model.beta.size()))
        throw DimensionError("feature vector has " + std::to_string(x.size()) +
                             " entries, model expects " + std::to_string(model.beta.size()));
    double z = model.alpha;
    for (std::size_t j = 0; j < x.size(); ++j) z += model.beta[static_cast<Eigen::Index>(j)] * x[j];
    return z;
}

double predict_proba(const LogisticModel& model, std::span<const double> x) {
    return std::clamp(kernels::logistic(linear_term(model, x)), kProbLow, kProbHigh);
}

Eigen::VectorXd predict_proba(const LogisticModel& model, const RowMatrix& x) {
    if (x.cols() != model.beta.size())
        throw DimensionError("design matrix width does not match model");
    Eigen::VectorXd z = (x * model.beta).array() + model.alpha;
    for (Eigen::Index i = 0; i < z.size(); ++i)
        z[i] = std::clamp(kernels::logistic(z[i]), kProbLow, kProbHigh);
    return z;
}

bool predict(const LogisticModel& model, std::span<const double> x, double threshold) {
    if (!(threshold > 0.0 && threshold < 1.0))
        throw std::invalid_argument("threshold must lie in (0, 1)");
    return predict_proba(model, x) >= threshold;
}

double objective(const Parameters& params, const DesignMatrix& data, const FitConfig& config) {
    check_params(params, data);
    return evaluate(params, data, config, kernels::Order::Value).objective;
}

Eigen::VectorXd gradient(const Parameters& params, const DesignMatrix& data,
                         const FitConfig& config) {
    check_params(params, data);
    return evaluate(params, data, config, kernels::Order::Gradient).gradient;
}

LogisticModel fit(const DesignMatrix& data, const FitConfig& config) {
    config.validate();
    check_fittable(data);
    return config.solver == Solver::Newton ? fit_newton(data, config)
                                           : fit_gradient_descent(data, config);
}

}  // namespace pdm
