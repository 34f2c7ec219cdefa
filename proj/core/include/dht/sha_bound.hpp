// Achievable error-exponent bounds for the quantize-and-binning testing
// scheme on general finite alphabets: the binning exponent E_b(R), its
// quantized generalization, and the induced critical-rate bound. The inner
// minimization runs over distributions with both marginals pinned and a
// conditional-entropy floor; a scalar bracketed search handles binary
// alphabets exactly and a multi-start penalty method handles the rest.
#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "dht/i_projection.hpp"
#include "dht/joint_distribution.hpp"
#include "dht/linear_family.hpp"

namespace dht {

/// Tolerance achieved by the scalar (2x2) inner path.
inline constexpr double kInnerTolScalar = 1e-10;
/// Tolerance declared for the general-alphabet inner path.
inline constexpr double kInnerTolGeneral = 1e-4;
/// Rate resolution of the critical-rate binary search.
inline constexpr double kCriticalRateResolution = 1e-8;

struct InnerMinimum {
    JointDistribution minimizer;
    double divergence = 0.0;
    /// Whether the conditional-entropy floor is (numerically) tight at the
    /// minimizer.
    bool entropy_constraint_active = false;
};

/// min D(p~ || q) over the family's marginal constraints intersected with
/// H(entropy_target | entropy_given) >= entropy_floor. Dispatches to the
/// scalar path for 2x2 problems and the multi-start penalty path otherwise.
InnerMinimum constrained_divergence_minimum(const JointDistribution& q,
                                            const LinearFamily& family,
                                            const std::vector<std::string>& entropy_target,
                                            const std::vector<std::string>& entropy_given,
                                            double entropy_floor, double tol);

/// Inner minimization of the binning bound: p~ ranges over distributions
/// with p~_X = P_X, p~_Y = P_Y and H(X~|Y~) >= H_P(X|Y); the objective is
/// D(p~ || Q_XY).
InnerMinimum binning_inner_minimum(const HypothesisPair& hp, double tol = kInnerTolScalar);

/// E_b(R) = min[ inner + |R - H_P(X|Y)|+ , D(P_XY || Q_XY) ] where inner is
/// the binning_inner_minimum divergence. Throws ValidationError when R is
/// below H_P(X|Y).
double sha_binning_exponent(const HypothesisPair& hp, double rate, double tol = kInnerTolScalar);

/// Quantize-and-binning exponent through test channel w:
/// min[ inner(P_U|X) + |R - I_P(U;X|Y)|+ , E(P_UXY || Q_UXY) ], where the
/// inner minimization fixes p~_UX = P_UX, p~_Y = P_Y with floor H_P(U|Y),
/// and the cap is the quantization exponent. Permutation channels reduce
/// exactly to sha_binning_exponent. Throws ValidationError when R is below
/// I_P(U;X|Y).
double sha_quantize_binning_exponent(const HypothesisPair& hp, const TestChannel& w,
                                     double rate, double tol = kInnerTolScalar);

struct CriticalRateBound {
    double value = 0.0;           // nats; +infinity when not attained
    std::string scheme;           // "sha-binning"
    double certificate = 0.0;     // exponent evaluated at value
    double stein_exponent = 0.0;  // D(P_XY || Q_XY)
    double tolerance = 0.0;       // exponent-matching tolerance used
    bool attained = false;
};

/// Smallest rate at which the binning exponent reaches the Stein exponent
/// within tol, found by binary search over
/// [H_P(X|Y), H_P(X) + D(P_XY||Q_XY) + 1] at resolution 1e-8. Requires the
/// no-quantization condition (pairwise-distinct shifted log-likelihood
/// rows); otherwise a ValidationError naming the coinciding rows is thrown,
/// since a search over test channels would be needed. When P = Q within tol
/// the minimum valid rate H_P(X|Y) is returned immediately.
CriticalRateBound critical_rate_bound_sha(const HypothesisPair& hp, double tol = 1e-6);

/// A sampled achievability curve R -> E(R).
struct ExponentCurve {
    std::string scheme;
    std::vector<double> rates;      // ascending, nats
    std::vector<double> exponents;  // nats
    double tolerance = 0.0;
    std::vector<std::pair<std::string, double>> parameters;

    /// Enforce ordering, monotonicity and the range [0, stein + 1e-9].
    void validate(double stein_exponent) const;
};

/// Evaluate E_b over a rate grid (all rates must be >= H_P(X|Y)).
ExponentCurve sha_binning_curve(const HypothesisPair& hp, std::vector<double> rates,
                                double tol = kInnerTolScalar);

}  // namespace dht
