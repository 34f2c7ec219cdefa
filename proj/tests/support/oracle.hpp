// Independent reference minimizer used only by the tests: an affine
// parameterization of a fixed-marginal family around a known feasible
// point, searched by an exhaustive coefficient grid with shrink-and-
// recenter refinement. Deliberately shares no machinery with i_project or
// the penalty optimizer beyond elementary divergence evaluation.
#pragma once

#include <functional>
#include <vector>

#include "dht/joint_distribution.hpp"
#include "dht/linear_family.hpp"

namespace dht::testing {

/// The family {z >= 0 : A z = b} written as feasible + span(basis), with an
/// orthonormal basis of the constraint matrix's null space (restricted to
/// the support mask when one is present).
struct AffineFamily {
    std::vector<double> feasible;            // mass vector of a known member
    std::vector<std::vector<double>> basis;  // orthonormal null directions
    std::size_t cells = 0;
};

/// Build the parameterization from the family's constraints. `feasible`
/// must be a member (typically the distribution whose marginals defined
/// the constraints).
AffineFamily affine_family(const LinearFamily& family, const JointDistribution& feasible);

/// Optional side constraint evaluated on candidate mass vectors.
using MassPredicate = std::function<bool(const std::vector<double>&)>;

/// min D(z || q) over the nonnegative part of the affine family (and the
/// predicate, when given) by grid search over the basis coefficients in
/// [-radius, radius]^k at spacing `step`, followed by `refine_rounds`
/// shrink-and-recenter passes (each shrinking the spacing by 4x).
double oracle_min_divergence(const JointDistribution& q, const AffineFamily& fam,
                             double radius, double step, int refine_rounds,
                             const MassPredicate& extra = {});

}  // namespace dht::testing
