#pragma once

// Sample-weighted, L2-penalised logistic regression.
//
//     pi(x) = exp(alpha + beta.x) / (1 + exp(alpha + beta.x))
//
//     objective(alpha, beta) = sum_i w_i [-y_i log pi_i - (1 - y_i) log(1 - pi_i)]
//                              + (l2 / 2) |beta|^2
//
// The intercept is not penalised. The default solver is damped Newton
// (IRLS) with step halving; plain gradient descent is kept as a slow,
// independent cross-check.

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "pdm/assemble.hpp"
#include "pdm/schema.hpp"

namespace pdm {

enum class Solver { Newton, GradientDescent };

std::string_view solver_name(Solver s);
Solver parse_solver(std::string_view name);

struct FitConfig {
    double l2_strength = 1.0;
    double tolerance = 1e-8;  // on the gradient max-norm
    int max_iterations = 100;
    Solver solver = Solver::Newton;

    void validate() const;
};

struct FitMeta {
    int iterations = 0;
    double objective = 0.0;
    double gradient_max_norm = 0.0;
    bool converged = false;
    /// Objective after each accepted step, starting with the initial point.
    std::vector<double> objective_history;
};

struct Parameters {
    double alpha = 0.0;
    Eigen::VectorXd beta;
};

struct LogisticModel {
    double alpha = 0.0;
    Eigen::VectorXd beta;
    FeatureEncoding encoding;
    FitMeta fit_meta;

    Parameters parameters() const { return {alpha, beta}; }
};

class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class UnfittableError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class FitDivergedError : public std::runtime_error {
public:
    FitDivergedError(int iteration, const std::string& what);
    int iteration() const { return iteration_; }

private:
    int iteration_;
};

double linear_term(const LogisticModel& model, std::span<const double> x);

/// pi(x), clamped into the open interval (0, 1) so saturated linear terms
/// never report exactly 0 or 1.
double predict_proba(const LogisticModel& model, std::span<const double> x);
Eigen::VectorXd predict_proba(const LogisticModel& model, const RowMatrix& x);

/// predict_proba(model, x) >= threshold.
bool predict(const LogisticModel& model, std::span<const double> x, double threshold = 0.5);

double objective(const Parameters& params, const DesignMatrix& data, const FitConfig& config);

/// Gradient of objective(); element 0 is d/d(alpha).
Eigen::VectorXd gradient(const Parameters& params, const DesignMatrix& data,
                         const FitConfig& config);

LogisticModel fit(const DesignMatrix& data, const FitConfig& config);

}  // namespace pdm
