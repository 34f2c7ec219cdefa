// Log-likelihood-ratio matrices for a hypothesis pair: the raw matrix
// Lambda(x,y) = log(P(x,y)/Q(x,y)) and its column-shifted form
// LambdaHat(x,y) = Lambda(x,y) - Lambda(x,ref). Row structure of the
// shifted matrix decides whether quantization can help (distinct rows force
// U=X at the Stein exponent) and which symbols can be merged losslessly.
#pragma once

#include <cstddef>
#include <vector>

#include "dht/info.hpp"
#include "dht/joint_distribution.hpp"

namespace dht {

/// Two shifted rows are considered equal when they differ by at most this
/// much in max-abs norm; true ties are exact, so the margin only absorbs
/// log-evaluation roundoff.
inline constexpr double kRowDistinctTol = 1e-9;

struct LogLikelihoodMatrix {
    std::size_t x_card = 0;
    std::size_t y_card = 0;
    std::size_t reference_column = 0;
    std::vector<double> lambda;      // row-major [x][y]
    std::vector<double> lambda_hat;  // row-major [x][y]; column ref is exactly 0

    double log_ratio(std::size_t x, std::size_t y) const { return lambda[x * y_card + y]; }
    double shifted(std::size_t x, std::size_t y) const { return lambda_hat[x * y_card + y]; }

    /// max_y |shifted(x1,y) - shifted(x2,y)|
    double row_distance(std::size_t x1, std::size_t x2) const;
};

/// Fill both matrices for a two-axis pair with full support. Throws
/// ValidationError on a zero entry in either distribution.
LogLikelihoodMatrix lambda_hat(const HypothesisPair& hp, std::size_t reference_column = 0);

struct NoQuantizationCheck {
    /// All shifted rows pairwise distinct: any scheme attaining the Stein
    /// exponent through the quantize-and-binning bound must use U = X.
    bool holds = false;
    /// A pair of equal rows when the condition fails; unspecified otherwise.
    std::size_t witness_x1 = 0;
    std::size_t witness_x2 = 0;
    /// Smallest pairwise row distance observed.
    double min_row_distance = kInfinity;
};

NoQuantizationCheck check_no_quantization_condition(const HypothesisPair& hp,
                                                    double tol = kRowDistinctTol,
                                                    std::size_t reference_column = 0);

/// Partition of the x-alphabet by shifted-row equality. kappa maps each x
/// to its class index; classes lists members in ascending order and classes
/// are numbered by first occurrence.
struct MergeMap {
    std::vector<std::size_t> kappa;
    std::vector<std::vector<std::size_t>> classes;

    bool is_identity() const { return classes.size() == kappa.size(); }
    /// The induced deterministic test channel u = kappa(x).
    TestChannel to_channel() const;
};

MergeMap merge_map(const HypothesisPair& hp, double tol = kRowDistinctTol,
                   std::size_t reference_column = 0);

}  // namespace dht
