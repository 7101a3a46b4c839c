#include <cmath>
#include <stdexcept>

#include "pdm/kernels.hpp"

namespace pdm::kernels {

double softplus(double z) {
    return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

double logistic(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

namespace serial {

LikelihoodTerms accumulate(const Samples& s, double alpha, const Eigen::VectorXd& beta,
                           Order order) {
    const Eigen::Index n = s.x.rows();
    const Eigen::Index p = s.x.cols();
    if (beta.size() != p) throw std::invalid_argument("accumulate: beta length mismatch");

    LikelihoodTerms out;
    if (order != Order::Value) out.gradient = Eigen::VectorXd::Zero(p + 1);
    if (order == Order::Hessian) out.hessian = Eigen::MatrixXd::Zero(p + 1, p + 1);

    for (Eigen::Index i = 0; i < n; ++i) {
        double z = alpha;
        for (Eigen::Index j = 0; j < p; ++j) z += s.x(i, j) * beta[j];
        const double y = s.labels[i];
        const double w = s.weights[i];
        out.value += w * (y * softplus(-z) + (1.0 - y) * softplus(z));
        if (order == Order::Value) continue;

        const double pi = logistic(z);
        const double r = w * (pi - y);
        out.gradient[0] += r;
        for (Eigen::Index j = 0; j < p; ++j) out.gradient[j + 1] += r * s.x(i, j);
        if (order != Order::Hessian) continue;

        const double d = w * pi * (1.0 - pi);
        for (Eigen::Index a = 0; a <= p; ++a) {
            const double xa = a == 0 ? 1.0 : s.x(i, a - 1);
            for (Eigen::Index b = 0; b <= a; ++b) {
                const double xb = b == 0 ? 1.0 : s.x(i, b - 1);
                out.hessian(a, b) += d * xa * xb;
            }
        }
    }
    if (order == Order::Hessian) {
        const Eigen::MatrixXd lower = out.hessian;
        out.hessian = lower.selfadjointView<Eigen::Lower>();
    }
    return out;
}

}  // namespace serial
}  // namespace pdm::kernels
