// Microbenchmarks for the hot numeric paths: iterative-scaling projection
// on a three-axis family, the inner minimization in both the scalar and
// the general path, one exponent-curve evaluation, and a batch of Monte
// Carlo trials.
#include <benchmark/benchmark.h>

#include <cmath>
#include <utility>

#include "dht/bsds.hpp"
#include "dht/i_projection.hpp"
#include "dht/joint_distribution.hpp"
#include "dht/linear_family.hpp"
#include "dht/sha_bound.hpp"
#include "dht/simulator.hpp"

namespace {

dht::HypothesisPair pair_3x3() {
    auto p = dht::JointDistribution::from_matrix(
        "X", "Y", {{1.0 / 24, 2.0 / 24, 3.0 / 24},
                   {2.0 / 24, 3.0 / 24, 3.0 / 24},
                   {1.0 / 24, 3.0 / 24, 6.0 / 24}});
    auto q = dht::JointDistribution::from_matrix(
        "X", "Y", {{2.0 / 14, 1.0 / 14, 1.0 / 14},
                   {1.0 / 14, 1.0 / 14, 1.0 / 14},
                   {1.0 / 14, 2.0 / 14, 4.0 / 14}});
    return dht::HypothesisPair(std::move(p), std::move(q));
}

}  // namespace

static void bm_i_project_three_axis(benchmark::State& state) {
    auto hp = dht::bsds_pair(dht::BsdsParams(0.3, 0.1));
    dht::TestChannel w(2, 2, {0.85, 0.15, 0.25, 0.75});
    auto p_uxy = dht::compose(hp.p, w);
    auto q_uxy = dht::compose(hp.q, w);
    dht::LinearFamily family(p_uxy.axes(), {{{"U", "X"}, p_uxy.marginal({"U", "X"})},
                                            {{"Y"}, p_uxy.marginal({"Y"})}});
    for (auto _ : state) {
        auto r = dht::i_project(q_uxy, family);
        benchmark::DoNotOptimize(r.divergence);
    }
}
BENCHMARK(bm_i_project_three_axis);

static void bm_inner_minimum_scalar(benchmark::State& state) {
    auto hp = dht::bsds_pair(dht::BsdsParams(0.1, 0.4));
    for (auto _ : state) {
        auto inner = dht::binning_inner_minimum(hp);
        benchmark::DoNotOptimize(inner.divergence);
    }
}
BENCHMARK(bm_inner_minimum_scalar);

static void bm_inner_minimum_general(benchmark::State& state) {
    auto hp = pair_3x3();
    for (auto _ : state) {
        auto inner = dht::binning_inner_minimum(hp, dht::kInnerTolGeneral);
        benchmark::DoNotOptimize(inner.divergence);
    }
}
BENCHMARK(bm_inner_minimum_general);

static void bm_sha_exponent_curve_point(benchmark::State& state) {
    auto hp = dht::bsds_pair(dht::BsdsParams(0.1, 0.4));
    const double rate = 0.9 * std::log(2.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(dht::sha_binning_exponent(hp, rate));
    }
}
BENCHMARK(bm_sha_exponent_curve_point);

static void bm_simulate_batch(benchmark::State& state) {
    auto hp = dht::bsds_pair(dht::BsdsParams(0.1, 0.4));
    dht::SchemeConfig cfg;
    cfg.n = 10;
    cfg.rate = 0.9 * std::log(2.0);
    cfg.delta = 0.25;
    cfg.trials = 100;
    cfg.seed = 20240817;
    for (auto _ : state) {
        auto r = dht::simulate(hp, cfg, 1);
        benchmark::DoNotOptimize(r.alpha.value);
    }
}
BENCHMARK(bm_simulate_batch);
