// Finite-blocklength Monte Carlo realization of the binning test: sample
// sources, hash each x-sequence into a seeded random bin, decode by
// minimum empirical entropy over the announced type class intersected with
// the bin, and accept when the decoded joint type lands in a total-
// variation ball around the null joint. Trials use counter-based
// per-trial random streams, so results are bit-identical for any thread
// count.
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "dht/joint_distribution.hpp"

namespace dht {

enum class Scheme { sha_binning, sequential };

struct SchemeConfig {
    std::size_t n = 8;             // blocklength
    double rate = 0.0;             // nats per symbol; bins = ceil(exp(n * rate))
    double delta = 0.0;            // TV acceptance radius; <= 0 selects the default
    std::size_t trials = 1000;
    std::uint64_t seed = 0;
    Scheme scheme = Scheme::sha_binning;
};

/// Default acceptance radius 2.5 * sqrt(|X||Y| / n): shrinks with
/// blocklength while keeping the type I error vanishing.
double default_delta(std::size_t n, std::size_t x_card, std::size_t y_card);

/// Joint type of a pair of sequences: exact integer counts divided by n.
JointDistribution empirical_type(std::span<const std::size_t> xs,
                                 std::span<const std::size_t> ys,
                                 std::size_t x_card, std::size_t y_card);

/// Minimum-empirical-conditional-entropy decoder: among the candidates,
/// return the one minimizing H(x~|y) of the joint type with y. Exact ties
/// (equal count multisets, or scores within 1e-9) resolve to the
/// lexicographically smallest sequence. Throws ValidationError on an empty
/// candidate set.
std::vector<std::size_t> min_entropy_decode(const std::vector<std::vector<std::size_t>>& candidates,
                                            std::span<const std::size_t> y_seq,
                                            std::size_t x_card, std::size_t y_card);

struct ConfidenceInterval {
    double lo = 0.0;
    double hi = 0.0;
};

struct ErrorEstimate {
    double value = 0.0;
    ConfidenceInterval wilson_ci_95;
};

/// 95% Wilson score interval for k successes out of n.
ErrorEstimate wilson_estimate(std::size_t successes, std::size_t trials);

struct SimulationResult {
    ErrorEstimate alpha;             // type I: reject under the null
    ErrorEstimate beta;              // type II: accept under the alternative
    std::size_t trials = 0;
    double decode_error_rate = 0.0;  // decoded sequence != source, under the null
};

/// Run the binning scheme. Each trial runs one encode/decode round under
/// each hypothesis with independent per-trial streams derived from
/// (seed, trial index). The exhaustive type-class enumeration is guarded
/// by |X|^n <= 2^24. threads = 0 picks the hardware concurrency.
SimulationResult simulate(const HypothesisPair& hp, const SchemeConfig& cfg,
                          unsigned threads = 0);

struct SequentialSimulationResult {
    SimulationResult combined;  // accept iff both components accept
    std::array<SimulationResult, 2> components;
    /// (h(type of x1), h(type of x2)) for every alternative-hypothesis
    /// trial that was wrongly accepted, for inspecting the error region.
    std::vector<std::pair<double, double>> type2_type_entropies;
};

/// Run the two-component sequential scheme on a product source: each
/// component is an independent binning test at its own rate; the combined
/// verdict accepts only when both components accept.
SequentialSimulationResult simulate_sequential(const HypothesisPair& component1,
                                               const HypothesisPair& component2,
                                               const SchemeConfig& cfg, double rate1,
                                               double rate2, unsigned threads = 0);

}  // namespace dht
