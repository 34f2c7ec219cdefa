// I-projection by iterative proportional fitting: frozen values, the
// divergence-to-feasible-points contraction property, infeasibility
// detection, oracle agreement, and the quantization exponent and
// Pythagorean residual built on top of it.
#include <cmath>
#include <vector>

#include "doctest.h"
#include "dht/errors.hpp"
#include "dht/i_projection.hpp"
#include "dht/info.hpp"
#include "dht/joint_distribution.hpp"
#include "dht/linear_family.hpp"
#include "dht/llr.hpp"
#include "frozen.hpp"
#include "oracle.hpp"
#include "test_util.hpp"

using namespace dht;
namespace frozen = dht::testing::frozen;

namespace {

const std::vector<Axis> kXY{{"X", 2}, {"Y", 2}};

JointDistribution bern(const std::string& axis, double p1) {
    return JointDistribution({{axis, 2}}, {1.0 - p1, p1});
}

HypothesisPair merge_3x3() {
    auto p = JointDistribution::from_matrix(
        "X", "Y", {{1.0 / 24, 2.0 / 24, 3.0 / 24},
                   {2.0 / 24, 3.0 / 24, 3.0 / 24},
                   {1.0 / 24, 3.0 / 24, 6.0 / 24}});
    auto q = JointDistribution::from_matrix(
        "X", "Y", {{2.0 / 14, 1.0 / 14, 1.0 / 14},
                   {1.0 / 14, 1.0 / 14, 1.0 / 14},
                   {1.0 / 14, 2.0 / 14, 4.0 / 14}});
    return HypothesisPair(std::move(p), std::move(q));
}

}  // namespace

TEST_CASE("projecting the uniform onto product marginals matches the frozen value") {
    auto q = JointDistribution(kXY, std::vector<double>(4, 0.25));
    LinearFamily family(kXY, {{{"X"}, bern("X", 0.3)}, {{"Y"}, bern("Y", 0.4)}});
    auto res = i_project(q, family);
    REQUIRE(res.converged());
    CHECK(std::abs(res.divergence - frozen::kProj2x2) <= 1e-12);
    // With independent single-axis constraints the minimizer is the product.
    CHECK(std::abs(res.minimizer.at({0, 0}) - 0.7 * 0.6) <= 1e-10);
    CHECK(res.residual <= kIProjectDefaultTol);
}

TEST_CASE("a constraint equal to the full joint returns it unchanged") {
    auto rng = dht::testing::seeded_rng(101);
    auto q = dht::testing::random_distribution(rng, kXY);
    auto target = dht::testing::random_distribution(rng, kXY);
    LinearFamily family(kXY, {{{"X", "Y"}, target}});
    auto res = i_project(q, family);
    REQUIRE(res.converged());
    for (std::size_t f = 0; f < 4; ++f)
        CHECK(std::abs(res.minimizer[f] - target[f]) <= 1e-12);
    CHECK(std::abs(res.divergence - kl_divergence(target, q)) <= 1e-12);
}

TEST_CASE("divergence from any feasible point to the iterate never increases") {
    auto rng = dht::testing::seeded_rng(103);
    const std::vector<Axis> shape{{"X", 2}, {"Y", 3}};
    for (int rep = 0; rep < 10; ++rep) {
        auto q = dht::testing::random_distribution(rng, shape);
        auto feas = dht::testing::random_distribution(rng, shape);
        LinearFamily family(shape, {{{"X"}, feas.marginal({"X"})},
                                    {{"Y"}, feas.marginal({"Y"})}});
        std::vector<std::vector<double>> iterates;
        auto res = i_project(q, family, 1e-12, 100000,
                             [&](std::size_t, std::span<const double> probs) {
                                 iterates.emplace_back(probs.begin(), probs.end());
                             });
        REQUIRE(res.converged());
        REQUIRE(iterates.size() >= 2);
        double prev = kl_divergence_raw(feas.probs(), iterates.front());
        for (std::size_t k = 1; k < iterates.size(); ++k) {
            double cur = kl_divergence_raw(feas.probs(), iterates[k]);
            CHECK(cur <= prev + 1e-12);
            prev = cur;
        }
    }
}

TEST_CASE("inconsistent shared sub-marginals are rejected at family construction") {
    auto joint = JointDistribution(kXY, {0.4, 0.2, 0.2, 0.2});  // X marginal (0.6, 0.4)
    CHECK_THROWS_AS(LinearFamily(kXY, {{{"X", "Y"}, joint}, {{"X"}, bern("X", 0.1)}}),
                    ValidationError);
    // Consistent version passes.
    CHECK_NOTHROW(LinearFamily(kXY, {{{"X", "Y"}, joint}, {{"X"}, bern("X", 0.4)}}));
    // Shape mismatches are rejected.
    CHECK_THROWS_AS(LinearFamily(kXY, {{{"X"}, bern("Z", 0.4)}}), ValidationError);
    CHECK_THROWS_AS(LinearFamily(kXY, {{{"X"}, JointDistribution({{"X", 3}}, {0.2, 0.3, 0.5})}}),
                    ValidationError);
}

TEST_CASE("support-mask conflicts are reported as errors or degeneracy") {
    auto q = JointDistribution(kXY, std::vector<double>(4, 0.25));

    // Mask keeps only row x=0, yet the X target puts mass on x=1.
    std::vector<std::uint8_t> row0{1, 1, 0, 0};
    LinearFamily starved(kXY, {{{"X"}, bern("X", 0.4)}}, row0);
    CHECK_THROWS_AS(i_project(q, starved), ValidationError);

    // Diagonal mask forces equal X and Y marginals; asking for unequal ones
    // is undetectable cell-wise and must surface as a degenerate run.
    std::vector<std::uint8_t> diag{1, 0, 0, 1};
    LinearFamily twisted(kXY, {{{"X"}, bern("X", 0.5)}, {{"Y"}, bern("Y", 0.1)}}, diag);
    auto res = i_project(q, twisted);
    CHECK(res.status == ProjectionStatus::infeasible_or_degenerate);

    // A compatible masked problem still converges: diagonal mask with
    // matching marginals pins the distribution entirely.
    LinearFamily ok(kXY, {{{"X"}, bern("X", 0.3)}, {{"Y"}, bern("Y", 0.3)}}, diag);
    auto good = i_project(q, ok);
    REQUIRE(good.converged());
    CHECK(std::abs(good.minimizer.at({0, 0}) - 0.7) <= 1e-9);
    CHECK(std::abs(good.minimizer.at({0, 1})) <= 1e-15);
}

TEST_CASE("projection agrees with the exhaustive grid oracle") {
    auto rng = dht::testing::seeded_rng(107);
    const std::vector<Axis> shape3{{"U", 2}, {"X", 2}, {"Y", 2}};
    for (int rep = 0; rep < 6; ++rep) {
        auto q = dht::testing::random_distribution(rng, shape3, 0.1);
        auto feas = dht::testing::random_distribution(rng, shape3, 0.1);
        LinearFamily family(shape3, {{{"U", "X"}, feas.marginal({"U", "X"})},
                                     {{"U", "Y"}, feas.marginal({"U", "Y"})}});
        auto res = i_project(q, family);
        REQUIRE(res.converged());
        auto fam = dht::testing::affine_family(family, feas);
        double oracle = dht::testing::oracle_min_divergence(q, fam, 1.2, 0.04, 6);
        CHECK(std::abs(res.divergence - oracle) <= 1e-6);
    }
}

TEST_CASE("quantization exponent: identity channel recovers the full divergence") {
    auto rng = dht::testing::seeded_rng(109);
    for (int rep = 0; rep < 5; ++rep) {
        auto hp = dht::testing::random_pair(rng, {{"X", 3}, {"Y", 2}}, 0.08);
        double d = kl_divergence(hp.p, hp.q);
        CHECK(std::abs(quantization_exponent(hp, TestChannel::identity(3)) - d) <= 1e-8);
    }
}

TEST_CASE("quantization exponent: constant channel projects onto both marginals") {
    // P has X marginal (0.7, 0.3) and Y marginal (0.6, 0.4); Q is uniform.
    // With a trivial auxiliary the exponent reduces to the projection of the
    // uniform onto those two marginals, whose value is frozen.
    auto p = JointDistribution(kXY, {0.5, 0.2, 0.1, 0.2});
    auto q = JointDistribution(kXY, std::vector<double>(4, 0.25));
    HypothesisPair hp(p, q);
    double e = quantization_exponent(hp, TestChannel::constant(2));
    CHECK(std::abs(e - frozen::kProj2x2) <= 1e-9);
}

TEST_CASE("merged channel of the 3x3 pair loses nothing; other merges lose") {
    auto hp = merge_3x3();
    double stein = kl_divergence(hp.p, hp.q);
    CHECK(std::abs(stein - frozen::kStein3x3) <= 1e-14);

    auto mm = merge_map(hp);
    double merged = quantization_exponent(hp, mm.to_channel());
    CHECK(std::abs(merged - stein) <= 1e-8);

    // Merging a different pair of symbols is strictly lossy here.
    std::vector<std::size_t> wrong{0, 1, 0};
    double lossy = quantization_exponent(hp, TestChannel::deterministic(wrong, 2));
    CHECK(lossy < stein - 1e-4);
}

TEST_CASE("pythagorean residual: exact for merge channels, guarded otherwise") {
    auto hp = merge_3x3();
    auto mm = merge_map(hp);
    auto w = mm.to_channel();
    auto p_uxy = compose(hp.p, w);

    auto rng = dht::testing::seeded_rng(113);
    for (int rep = 0; rep < 20; ++rep) {
        auto tilde = dht::testing::random_feasible_tilde(rng, p_uxy, mm.classes);
        CHECK(pythagorean_residual(hp, w, tilde) < 1e-9);
    }

    // The composed joint itself is feasible and gives a residual of zero.
    CHECK(pythagorean_residual(hp, w, p_uxy) < 1e-12);

    // Stochastic channels are outside the identity's hypothesis.
    TestChannel noisy(3, 2, {0.9, 0.1, 0.2, 0.8, 0.5, 0.5});
    CHECK_THROWS_AS(pythagorean_residual(hp, noisy, p_uxy), ValidationError);

    // A distribution violating the pinned marginals is rejected.
    auto off = dht::testing::random_distribution(rng, p_uxy.axes(), 0.02);
    CHECK_THROWS_AS(pythagorean_residual(hp, w, off), ValidationError);
}
