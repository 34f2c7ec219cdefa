// JSON and CSV serialization for the library's value types. Distributions
// use {"axes": [...], "cards": [...], "probs": nested-by-axis} with
// round-trip-exact numbers; curves additionally emit two-column CSV for
// external plotting. The JSON dependency stays inside the implementation.
#pragma once

#include <string>

#include "dht/joint_distribution.hpp"
#include "dht/sha_bound.hpp"
#include "dht/simulator.hpp"

namespace dht {

std::string to_json(const JointDistribution& d);
/// Parse {"axes": ["X","Y"], "cards": [2,2], "probs": [[...],[...]]}.
/// Malformed input raises ValidationError naming the offending field.
JointDistribution distribution_from_json(const std::string& text);

std::string to_json(const HypothesisPair& hp);  // {"p": {...}, "q": {...}}
HypothesisPair pair_from_json(const std::string& text);

std::string to_json(const TestChannel& w);  // probs nested as rows by input symbol
TestChannel channel_from_json(const std::string& text);

std::string to_json(const SimulationResult& r);
std::string to_json(const SequentialSimulationResult& r);
std::string to_json(const ExponentCurve& curve);

/// RFC-4180 two-column emission: metadata rows, then an "R,E" header and
/// one row per sample, numbers at 12 significant digits.
std::string to_csv(const ExponentCurve& curve);

}  // namespace dht
