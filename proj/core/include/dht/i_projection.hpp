// I-projection by iterative proportional fitting: minimize D(p~ || q) over a
// linear family of fixed-marginal constraints. Also hosts the quantization
// exponent E(P_UXY || Q_UXY) and the Pythagorean residual used to certify
// merge channels.
#pragma once

#include <cstddef>
#include <functional>
#include <span>

#include "dht/joint_distribution.hpp"
#include "dht/linear_family.hpp"

namespace dht {

enum class ProjectionStatus {
    converged,
    max_iterations,
    infeasible_or_degenerate,
};

struct ProjectionResult {
    JointDistribution minimizer;
    double divergence = 0.0;     // D(minimizer || q), nats
    std::size_t iterations = 0;  // full constraint cycles
    double residual = 0.0;       // max marginal deviation at exit
    ProjectionStatus status = ProjectionStatus::converged;

    bool converged() const { return status == ProjectionStatus::converged; }
};

/// Observer invoked once per completed cycle with the current iterate's raw
/// mass vector; used by diagnostics and property tests.
using CycleObserver = std::function<void(std::size_t cycle, std::span<const double> probs)>;

inline constexpr double kIProjectDefaultTol = 1e-10;
inline constexpr std::size_t kIProjectDefaultMaxIter = 100000;

/// Cycle over the family's constraints, rescaling conditional slices of the
/// iterate to match each target marginal, starting from q restricted to the
/// support mask. Convergence is declared when the max marginal deviation
/// drops below tol. A residual that stalls for 1000 consecutive cycles is
/// reported as infeasible_or_degenerate rather than looping to max_iter.
ProjectionResult i_project(const JointDistribution& q, const LinearFamily& family,
                           double tol = kIProjectDefaultTol,
                           std::size_t max_iter = kIProjectDefaultMaxIter,
                           const CycleObserver& observer = {});

/// E(P_UXY || Q_UXY): the minimum of D(p~ || Q_UXY) over p~ with the UX and
/// UY marginals of P_UXY, where P_UXY/Q_UXY arise from the pair through the
/// test channel w. Throws ConvergenceError if the projection does not
/// converge.
double quantization_exponent(const HypothesisPair& hp, const TestChannel& w,
                             double tol = kIProjectDefaultTol);

/// |D(p~||Q_UXY) - D(p~||P_UXY) - D(P_UXY||Q_UXY)| for a feasible p~ and a
/// deterministic channel w. The precondition that p~ matches the UX and UY
/// marginals of P_UXY within marginal_tol is enforced.
double pythagorean_residual(const HypothesisPair& hp, const TestChannel& w,
                            const JointDistribution& p_tilde,
                            double marginal_tol = 1e-9);

}  // namespace dht
