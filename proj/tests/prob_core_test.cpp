// Distribution container, channels, composition and the information
// measures: validation behavior, index bookkeeping, and values frozen from
// independent high-precision evaluation.
#include <cmath>
#include <vector>

#include "doctest.h"
#include "dht/errors.hpp"
#include "dht/info.hpp"
#include "dht/joint_distribution.hpp"
#include "frozen.hpp"
#include "test_util.hpp"

using namespace dht;
namespace frozen = dht::testing::frozen;

namespace {
const std::vector<Axis> kXY{{"X", 2}, {"Y", 2}};
}

TEST_CASE("distribution construction validates and renormalizes") {
    CHECK_THROWS_AS(JointDistribution(kXY, {0.5, 0.5, 0.1, 0.1}), ValidationError);
    CHECK_THROWS_AS(JointDistribution(kXY, {0.7, 0.5, -0.1, -0.1}), ValidationError);
    CHECK_THROWS_AS(JointDistribution(kXY, {0.25, 0.25, 0.25}), ValidationError);
    CHECK_THROWS_AS(JointDistribution({{"X", 2}, {"X", 2}}, std::vector<double>(4, 0.25)),
                    ValidationError);
    CHECK_THROWS_AS(JointDistribution({{"X", 0}}, {}), ValidationError);

    // A sum deviation inside the tolerance is renormalized away.
    JointDistribution d(kXY, {0.25, 0.25, 0.25, 0.25 + 4e-13});
    double s = 0.0;
    for (double v : d.probs()) s += v;
    CHECK(std::abs(s - 1.0) <= 1e-14);
}

TEST_CASE("index bookkeeping round-trips") {
    auto d = JointDistribution::from_matrix("X", "Y", {{0.1, 0.2}, {0.3, 0.4}});
    CHECK(d.rank() == 2);
    CHECK(d.size() == 4);
    CHECK(d.at({1, 0}) == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(d.axis_index("Y") == 1);
    CHECK_THROWS_AS(d.axis_index("Z"), ValidationError);

    std::vector<std::size_t> idx(2);
    for (std::size_t f = 0; f < d.size(); ++f) {
        d.unflatten(f, idx);
        CHECK(d.flat_index(idx) == f);
    }
}

TEST_CASE("marginals honor the requested axis order") {
    auto d = JointDistribution::from_matrix("X", "Y", {{0.1, 0.2}, {0.3, 0.4}});
    auto mx = d.marginal({"X"});
    CHECK(mx[0] == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(mx[1] == doctest::Approx(0.7).epsilon(1e-14));
    auto yx = d.marginal({"Y", "X"});
    CHECK(yx.axes()[0].name == "Y");
    CHECK(yx.at({0, 1}) == doctest::Approx(0.3).epsilon(1e-14));

    auto rng = dht::testing::seeded_rng(11);
    auto t = dht::testing::random_distribution(rng, {{"A", 2}, {"B", 3}, {"C", 2}});
    auto ab = t.marginal({"A", "B"});
    // Marginalizing in two steps agrees with one step.
    auto a1 = ab.marginal({"A"});
    auto a2 = t.marginal({"A"});
    for (std::size_t i = 0; i < 2; ++i) CHECK(std::abs(a1[i] - a2[i]) <= 1e-15);
}

TEST_CASE("entropy and conditional entropy match frozen references") {
    auto uniform = JointDistribution(kXY, std::vector<double>(4, 0.25));
    CHECK(std::abs(entropy(uniform) - 2 * frozen::kLn2) <= 1e-15);
    CHECK(std::abs(entropy(uniform, {"X"}) - frozen::kLn2) <= 1e-15);
    CHECK(std::abs(conditional_entropy(uniform, {"X"}, {"Y"}) - frozen::kLn2) <= 1e-15);

    CHECK(std::abs(binary_entropy(0.3) - frozen::kH03) <= 1e-15);
    CHECK(std::abs(binary_entropy(0.1) - frozen::kH01) <= 1e-15);
    CHECK(binary_entropy(0.0) == 0.0);
    CHECK(binary_entropy(1.0) == 0.0);
    CHECK_THROWS_AS(binary_entropy(-0.1), ValidationError);
    CHECK_THROWS_AS(binary_entropy(1.1), ValidationError);

    // H(X|Y) of a BSDS with crossover c equals h(c).
    auto bsds = JointDistribution(kXY, {0.35, 0.15, 0.15, 0.35});
    CHECK(std::abs(conditional_entropy(bsds, {"X"}, {"Y"}) - frozen::kH03) <= 1e-12);
}

TEST_CASE("chain rule and conditional mutual information") {
    auto rng = dht::testing::seeded_rng(21);
    for (int rep = 0; rep < 20; ++rep) {
        auto d = dht::testing::random_distribution(rng, {{"A", 2}, {"B", 3}, {"C", 2}});
        double h_abc = entropy(d);
        double chain = entropy(d, {"C"}) + conditional_entropy(d, {"B"}, {"C"}) +
                       conditional_entropy(d, {"A"}, {"B", "C"});
        CHECK(std::abs(h_abc - chain) <= 1e-12);

        double cmi = conditional_mutual_information(d, "A", "B", "C");
        double via_entropies =
            conditional_entropy(d, {"A"}, {"C"}) - conditional_entropy(d, {"A"}, {"B", "C"});
        CHECK(std::abs(cmi - via_entropies) <= 1e-12);
        CHECK(cmi >= -1e-12);
    }
}

TEST_CASE("divergence values, support violations and total variation") {
    auto p = JointDistribution(kXY, {0.05, 0.45, 0.15, 0.35});
    CHECK(kl_divergence(p, p) == 0.0);

    // d(0.1||0.3) realized as a joint divergence: X ~ Bern with matching
    // conditionals collapses to the binary formula.
    CHECK(std::abs(binary_kl(0.1, 0.3) - frozen::kD01_03) <= 1e-15);
    CHECK(std::abs(binary_kl(0.3, 0.1) - frozen::kD03_01) <= 1e-15);
    CHECK(binary_kl(0.0, 0.5) == doctest::Approx(frozen::kLn2).epsilon(1e-14));
    CHECK(binary_kl(0.5, 0.0) == kInfinity);
    CHECK(binary_kl(0.5, 1.0) == kInfinity);

    auto q_gap = JointDistribution(kXY, {0.0, 0.5, 0.25, 0.25});
    CHECK(kl_divergence(p, q_gap) == kInfinity);
    CHECK(kl_divergence(q_gap, p) < kInfinity);  // supp(q_gap) inside supp(p)

    auto u = JointDistribution(kXY, std::vector<double>(4, 0.25));
    CHECK(std::abs(total_variation(p, u) - 0.3) <= 1e-14);
    CHECK(total_variation(p, p) == 0.0);

    auto rng = dht::testing::seeded_rng(31);
    for (int rep = 0; rep < 20; ++rep) {
        auto a = dht::testing::random_distribution(rng, kXY);
        auto b = dht::testing::random_distribution(rng, kXY);
        CHECK(kl_divergence(a, b) >= 0.0);
        double tv = total_variation(a, b);
        CHECK(tv >= 0.0);
        CHECK(tv <= 1.0 + 1e-15);
        // Pinsker: D >= 2 * tv^2.
        CHECK(kl_divergence(a, b) + 1e-12 >= 2.0 * tv * tv);
    }
}

TEST_CASE("test channels validate rows and classify structure") {
    CHECK_THROWS_AS(TestChannel(2, 2, {0.6, 0.3, 0.5, 0.5}), ValidationError);
    CHECK_THROWS_AS(TestChannel(2, 2, {0.6, 0.4, -0.1, 1.1}), ValidationError);

    auto id = TestChannel::identity(3);
    CHECK(id.is_deterministic());
    CHECK(id.is_permutation());
    CHECK(id(2, 2) == 1.0);
    CHECK(id(0, 2) == 0.0);

    auto cst = TestChannel::constant(3);
    CHECK(cst.is_deterministic());
    CHECK_FALSE(cst.is_permutation());
    CHECK(cst.output_card() == 1);

    std::vector<std::size_t> swap_map{1, 0};
    auto swp = TestChannel::deterministic(swap_map, 2);
    CHECK(swp.is_permutation());

    std::vector<std::size_t> merge{0, 1, 1};
    auto mg = TestChannel::deterministic(merge, 2);
    CHECK(mg.is_deterministic());
    CHECK_FALSE(mg.is_permutation());

    TestChannel noisy(2, 2, {0.9, 0.1, 0.2, 0.8});
    CHECK_FALSE(noisy.is_deterministic());
    CHECK_FALSE(noisy.is_permutation());
}

TEST_CASE("composition prepends the auxiliary axis and keeps the base joint") {
    auto rng = dht::testing::seeded_rng(41);
    auto p = dht::testing::random_distribution(rng, {{"X", 3}, {"Y", 2}});
    TestChannel w(3, 2, {0.9, 0.1, 0.25, 0.75, 0.5, 0.5});
    auto joint = compose(p, w);
    REQUIRE(joint.rank() == 3);
    CHECK(joint.axes()[0].name == "U");
    CHECK(joint.card(0) == 2);

    // Summing U back out recovers the base joint.
    auto back = joint.marginal({"X", "Y"});
    for (std::size_t f = 0; f < p.size(); ++f) CHECK(std::abs(back[f] - p[f]) <= 1e-15);

    // Entry check: joint(u,x,y) = w(u|x) p(x,y).
    CHECK(std::abs(joint.at({1, 2, 0}) - 0.5 * p.at({2, 0})) <= 1e-15);

    CHECK_THROWS_AS(compose(p, TestChannel::identity(2)), ValidationError);  // card mismatch
    CHECK_THROWS_AS(compose(p, w, 0, "X"), ValidationError);                 // name collision
}

TEST_CASE("hypothesis pairs require a common shape and report support") {
    auto p = JointDistribution(kXY, {0.4, 0.1, 0.1, 0.4});
    auto q3 = JointDistribution({{"X", 2}, {"Y", 3}}, std::vector<double>(6, 1.0 / 6));
    CHECK_THROWS_AS(HypothesisPair(p, q3), ValidationError);

    auto gap = JointDistribution(kXY, {0.0, 0.5, 0.25, 0.25});
    HypothesisPair hp(p, gap);
    CHECK_FALSE(hp.full_support());
    CHECK_THROWS_AS(hp.require_full_support(), ValidationError);
}
