#include <algorithm>
#include <stdexcept>
#include <vector>

#include "pdm/kernels.hpp"

namespace pdm::kernels::parallel {

namespace {

void accumulate_block(const Samples& s, double alpha, const Eigen::VectorXd& beta, Order order,
                      Eigen::Index begin, Eigen::Index count, LikelihoodTerms& out) {
    const auto xb = s.x.middleRows(begin, count);
    const Eigen::VectorXd z = (xb * beta).array() + alpha;
    const auto y = s.labels.segment(begin, count);
    const auto w = s.weights.segment(begin, count);

    Eigen::VectorXd residual(order == Order::Value ? 0 : count);
    Eigen::VectorXd curvature(order == Order::Hessian ? count : 0);
    double value = 0.0;
    for (Eigen::Index i = 0; i < count; ++i) {
        value += w[i] * (y[i] * softplus(-z[i]) + (1.0 - y[i]) * softplus(z[i]));
        if (order == Order::Value) continue;
        const double pi = logistic(z[i]);
        residual[i] = w[i] * (pi - y[i]);
        if (order == Order::Hessian) curvature[i] = w[i] * pi * (1.0 - pi);
    }
    out.value = value;
    if (order == Order::Value) return;

    const Eigen::Index p = s.x.cols();
    out.gradient.resize(p + 1);
    out.gradient[0] = residual.sum();
    out.gradient.tail(p).noalias() = xb.transpose() * residual;
    if (order != Order::Hessian) return;

    out.hessian.resize(p + 1, p + 1);
    out.hessian(0, 0) = curvature.sum();
    const Eigen::VectorXd cross = xb.transpose() * curvature;
    out.hessian.block(1, 0, p, 1) = cross;
    out.hessian.block(0, 1, 1, p) = cross.transpose();
    const RowMatrix scaled = curvature.array().sqrt().matrix().asDiagonal() * xb;
    Eigen::MatrixXd gram(p, p);
    gram.setZero();
    gram.selfadjointView<Eigen::Lower>().rankUpdate(scaled.transpose());
    out.hessian.block(1, 1, p, p) = gram.selfadjointView<Eigen::Lower>();
}

}  // namespace

LikelihoodTerms accumulate(const Samples& s, double alpha, const Eigen::VectorXd& beta,
                           Order order) {
    const Eigen::Index n = s.x.rows();
    const Eigen::Index p = s.x.cols();
    if (beta.size() != p) throw std::invalid_argument("accumulate: beta length mismatch");

    const Eigen::Index blocks = (n + kBlockRows - 1) / kBlockRows;
    std::vector<LikelihoodTerms> partial(static_cast<std::size_t>(blocks));

#pragma omp parallel for schedule(static)
    for (Eigen::Index b = 0; b < blocks; ++b) {
        const Eigen::Index begin = b * kBlockRows;
        const Eigen::Index count = std::min(kBlockRows, n - begin);
        accumulate_block(s, alpha, beta, order, begin, count, partial[static_cast<std::size_t>(b)]);
    }

    LikelihoodTerms out;
    if (order != Order::Value) out.gradient = Eigen::VectorXd::Zero(p + 1);
    if (order == Order::Hessian) out.hessian = Eigen::MatrixXd::Zero(p + 1, p + 1);
    for (const auto& part : partial) {
        out.value += part.value;
        if (order != Order::Value) out.gradient += part.gradient;
        if (order == Order::Hessian) out.hessian += part.hessian;
    }
    return out;
}

}  // namespace pdm::kernels::parallel
