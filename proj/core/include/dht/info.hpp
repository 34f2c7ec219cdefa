// Shannon information measures on JointDistribution, all in nats.
// Conventions fixed here for the whole library: 0*log(0) = 0 and
// p*log(p/0) = +infinity for p > 0.
#pragma once

#include <limits>
#include <span>
#include <string>

#include "dht/joint_distribution.hpp"

namespace dht {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();
inline constexpr double kNatsPerBit = 0.6931471805599453;

/// Entropy of the marginal on the chosen axes, in nats.
double entropy(const JointDistribution& d, std::span<const std::string> axes);
double entropy(const JointDistribution& d, std::initializer_list<std::string> axes);
/// Entropy of the full joint.
double entropy(const JointDistribution& d);

/// H(target | given) = H(target u given) - H(given). Axis sets must be disjoint.
double conditional_entropy(const JointDistribution& d,
                           std::span<const std::string> target,
                           std::span<const std::string> given);
double conditional_entropy(const JointDistribution& d,
                           std::initializer_list<std::string> target,
                           std::initializer_list<std::string> given);

/// I(a; b | given), in nats.
double conditional_mutual_information(const JointDistribution& d,
                                      const std::string& a, const std::string& b,
                                      const std::string& given);

/// D(p || q) in nats; +infinity when supp(p) is not contained in supp(q).
double kl_divergence(const JointDistribution& p, const JointDistribution& q);

/// Divergence between raw mass vectors of equal length (no shape checks).
double kl_divergence_raw(std::span<const double> p, std::span<const double> q);

/// Total-variation distance (1/2 L1) between same-shape distributions.
double total_variation(const JointDistribution& p, const JointDistribution& q);

/// h(p) = -p ln p - (1-p) ln(1-p); arguments outside [0,1] are rejected.
double binary_entropy(double p);

/// d(p||q) = p ln(p/q) + (1-p) ln((1-p)/(1-q)); +infinity when q sits on a
/// boundary that p does not share.
double binary_kl(double p, double q);

}  // namespace dht
