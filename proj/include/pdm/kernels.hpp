#pragma once

// Row-summed terms of the weighted logistic negative log-likelihood
//
//     L(a, b) = sum_i w_i [ y_i softplus(-z_i) + (1 - y_i) softplus(z_i) ],
//     z_i = a + x_i . b
//
// with its gradient and Hessian in the augmented parameter vector (a, b).
// No penalty term is included here.
//
// Two implementations are kept:
//   serial::   straightforward row loop, the reference.
//   parallel:: OpenMP over fixed-size row blocks whose partial sums are
//              reduced in block order, so the result does not depend on the
//              thread count.

#include <Eigen/Core>

namespace pdm::kernels {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Samples {
    const RowMatrix& x;
    const Eigen::VectorXd& labels;
    const Eigen::VectorXd& weights;
};

enum class Order { Value, Gradient, Hessian };

struct LikelihoodTerms {
    double value = 0.0;
    Eigen::VectorXd gradient;  // [0] is the intercept; empty for Order::Value
    Eigen::MatrixXd hessian;   // empty unless Order::Hessian
};

inline constexpr Eigen::Index kBlockRows = 2048;

/// log(1 + exp(z)) without overflow.
double softplus(double z);
/// 1 / (1 + exp(-z)) without overflow; may return exactly 0 or 1 in the tails.
double logistic(double z);

namespace serial {
LikelihoodTerms accumulate(const Samples& s, double alpha, const Eigen::VectorXd& beta, Order order);
}

namespace parallel {
LikelihoodTerms accumulate(const Samples& s, double alpha, const Eigen::VectorXd& beta, Order order);
}

}  // namespace pdm::kernels
