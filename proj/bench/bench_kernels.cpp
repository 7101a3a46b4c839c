// Serial reference vs blocked OpenMP likelihood kernel, plus a full Newton
// fit and the event-stream join. Run with OMP_NUM_THREADS set to compare
// thread counts.

#include <benchmark/benchmark.h>

#include <random>

#include "pdm/assemble.hpp"
#include "pdm/kernels.hpp"
#include "pdm/logreg.hpp"
#include "pdm/synth.hpp"

namespace {

struct Problem {
    pdm::kernels::RowMatrix x;
    Eigen::VectorXd labels, weights, beta;
};

Problem make_problem(Eigen::Index rows, Eigen::Index cols) {
    std::mt19937 rng(1);
    std::normal_distribution<double> n(0.0, 1.0);
    Problem p;
    p.x.resize(rows, cols);
    p.labels.resize(rows);
    p.weights.resize(rows);
    p.beta.resize(cols);
    for (Eigen::Index j = 0; j < cols; ++j) p.beta[j] = 0.3 * n(rng);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) p.x(i, j) = n(rng);
        p.labels[i] = (rng() % 60) == 0 ? 1.0 : 0.0;
        p.weights[i] = p.labels[i] > 0.5 ? 100.0 : 1.0;
    }
    return p;
}

template <auto Accumulate>
void BM_Likelihood(benchmark::State& state) {
    const auto p = make_problem(state.range(0), 29);
    const pdm::kernels::Samples s{p.x, p.labels, p.weights};
    const auto order = static_cast<pdm::kernels::Order>(state.range(1));
    for (auto _ : state) benchmark::DoNotOptimize(Accumulate(s, -3.0, p.beta, order));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

constexpr auto kSerial = &pdm::kernels::serial::accumulate;
constexpr auto kParallel = &pdm::kernels::parallel::accumulate;

void likelihood_args(benchmark::internal::Benchmark* b) {
    for (int rows : {10'000, 86'400, 500'000})
        for (int order : {0, 1, 2}) b->Args({rows, order});
    b->ArgNames({"rows", "order"})->Unit(benchmark::kMillisecond);
}

BENCHMARK_TEMPLATE(BM_Likelihood, kSerial)->Apply(likelihood_args);
BENCHMARK_TEMPLATE(BM_Likelihood, kParallel)->Apply(likelihood_args);

void BM_AssembleAndFit(benchmark::State& state) {
    const auto bundle = pdm::generate({.n_machines = 20, .n_days = 180, .seed = 7});
    for (auto _ : state) {
        const auto rows = pdm::build_event_stream(bundle, {});
        std::vector<std::size_t> all(rows.size());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
        const auto d = pdm::encode(rows, 100.0, all);
        benchmark::DoNotOptimize(pdm::fit(d, {}));
    }
}
BENCHMARK(BM_AssembleAndFit)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
