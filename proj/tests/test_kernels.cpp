#include "doctest.h"

#include <cmath>
#include <limits>
#include <omp.h>

#include "fixtures.hpp"
#include "pdm/kernels.hpp"

using namespace pdm;
using namespace pdm::kernels;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

double rel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    return (a - b).cwiseAbs().maxCoeff() / std::max(1.0, b.cwiseAbs().maxCoeff());
}

}  // namespace

TEST_CASE("softplus and logistic tails") {
    CHECK(softplus(0.0) == doctest::Approx(std::log(2.0)));
    CHECK(softplus(800.0) == 800.0);
    CHECK(softplus(-800.0) >= 0.0);
    CHECK(softplus(-800.0) < 1e-300);
    CHECK(softplus(-30.0) == doctest::Approx(std::exp(-30.0)).epsilon(1e-12));
    CHECK(logistic(0.0) == 0.5);
    CHECK(logistic(std::log(3.0)) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(std::isfinite(logistic(-1e4)));
    CHECK(logistic(1e4) == 1.0);
}

TEST_CASE("parallel kernel agrees with the serial reference") {
    // Row counts straddle the block size.
    for (int rows : {1, 7, 2047, 2048, 2049, 9000}) {
        const auto d = test::random_design(static_cast<std::uint32_t>(rows), rows, 12, 100.0);
        const auto p = test::random_params(static_cast<std::uint32_t>(rows) + 1, 12);
        const Samples s{d.x, d.labels, d.weights};
        const auto a = serial::accumulate(s, p.alpha, p.beta, Order::Hessian);
        const auto b = parallel::accumulate(s, p.alpha, p.beta, Order::Hessian);
        CHECK(rel(b.value, a.value) < 1e-12);
        CHECK(rel(Eigen::MatrixXd(b.gradient), Eigen::MatrixXd(a.gradient)) < 1e-12);
        CHECK(rel(b.hessian, a.hessian) < 1e-12);
        // the Hessian is symmetric
        CHECK(a.hessian == a.hessian.transpose());
        CHECK(rel(b.hessian, Eigen::MatrixXd(b.hessian.transpose())) == 0.0);

        // lower orders give the same value
        CHECK(parallel::accumulate(s, p.alpha, p.beta, Order::Value).value == b.value);
        CHECK(parallel::accumulate(s, p.alpha, p.beta, Order::Gradient).gradient == b.gradient);
        CHECK(parallel::accumulate(s, p.alpha, p.beta, Order::Value).gradient.size() == 0);
    }
}

TEST_CASE("parallel kernel result does not depend on the thread count") {
    const auto d = test::random_design(3, 20000, 8, 100.0);
    const auto p = test::random_params(4, 8);
    const Samples s{d.x, d.labels, d.weights};
    const int saved = omp_get_max_threads();
    omp_set_num_threads(1);
    const auto one = parallel::accumulate(s, p.alpha, p.beta, Order::Hessian);
    omp_set_num_threads(4);
    const auto four = parallel::accumulate(s, p.alpha, p.beta, Order::Hessian);
    omp_set_num_threads(saved);
    CHECK(one.value == four.value);
    CHECK(one.gradient == four.gradient);
    CHECK(one.hessian == four.hessian);
}

TEST_CASE("kernel value matches a direct sum") {
    const auto d = test::random_design(8, 500, 5, 3.0);
    const auto p = test::random_params(9, 5);
    const Samples s{d.x, d.labels, d.weights};
    // zero penalty, so the naive objective is the bare likelihood
    const double want = test::naive_objective(p, d, 0.0);
    CHECK(rel(serial::accumulate(s, p.alpha, p.beta, Order::Value).value, want) < 1e-12);
    CHECK(rel(parallel::accumulate(s, p.alpha, p.beta, Order::Value).value, want) < 1e-12);
}

TEST_CASE("beta length mismatch is rejected") {
    const auto d = test::random_design(1, 10, 3);
    const Samples s{d.x, d.labels, d.weights};
    CHECK_THROWS_AS(parallel::accumulate(s, 0.0, Eigen::VectorXd::Zero(2), Order::Value),
                    std::invalid_argument);
}
