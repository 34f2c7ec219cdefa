// Closed-form exponents and critical rates for binary symmetric double
// sources (BSDS), their reverse-aligned two-component products, and the
// sequential per-component scheme, plus the numeric verification that the
// product's inner minimization is attained at the alternative joint.
#pragma once

#include "dht/joint_distribution.hpp"
#include "dht/sha_bound.hpp"

namespace dht {

/// Crossover parameters of a null/alternative BSDS pair. Restricted to the
/// open interval (0,1) so all divergences stay finite; p != q is the
/// standing assumption.
struct BsdsParams {
    double p;
    double q;

    BsdsParams(double p, double q);
};

/// The BSDS joint: X uniform on {0,1}, Y = X xor Z with Z ~ Bernoulli(c).
JointDistribution bsds_joint(double crossover);
HypothesisPair bsds_pair(const BsdsParams& params);

/// Binning exponent of the scheme on a BSDS:
///   min[ |R - h(p)|+, d(p||q) ]  when h(p) <= h(q),
///   d(p||q)                      when h(p) >  h(q).
/// Throws ValidationError when R < h(p).
double bsds_exponent(const BsdsParams& params, double rate);

/// Critical rate of the scheme on a BSDS:
///   h(p) + d(p||q) when h(p) <= h(q), else h(p).
double bsds_critical_rate(const BsdsParams& params);

/// Two BSDS components; the reverse_aligned flag records that p1 = q2 and
/// p2 = q1 hold exactly (null and alternative swap roles across
/// components), the regime where naive product binning provably wastes
/// rate.
struct ProductBsdsParams {
    BsdsParams first;
    BsdsParams second;
    bool reverse_aligned = false;

    ProductBsdsParams(BsdsParams first, BsdsParams second);

    /// {(p1,q1), (q1,p1)} with the flag set.
    static ProductBsdsParams reversed(double p1, double q1);

    void require_reverse_aligned() const;
};

/// The 4x4 product pair with x = 2*x1 + x2, y = 2*y1 + y2.
HypothesisPair product_bsds_pair(const ProductBsdsParams& params);

/// Product binning exponent min[ |R - h(p1) - h(p2)|+, D1 + D2 ] for
/// reverse-aligned parameters; requires R >= h(p1) + h(p2).
double product_bsds_exponent(const ProductBsdsParams& params, double rate);

/// h(p1) + h(p2) + D(p1||q1) + D(p2||q2), the product scheme's critical
/// rate under reverse alignment.
double product_bsds_critical_rate(const ProductBsdsParams& params);

/// Numeric certificate that the product's inner minimization over the
/// pinned-marginal, entropy-floored set is attained at the alternative
/// joint Q_XY (so its divergence is 0 and the exponent saturates at
/// D1 + D2).
struct ProductInnerCheck {
    double inner_divergence = 0.0;        // numeric inner minimum
    double minimizer_tv_to_q = 0.0;       // TV(minimizer, Q_XY)
    double exponent_at_saturation = 0.0;  // E_b at R = h+h+D1+D2
    double stein_exponent = 0.0;          // D1 + D2
};

ProductInnerCheck verify_product_inner_minimizer(const ProductBsdsParams& params,
                                                 double tol = kInnerTolGeneral);

/// A split R = r1 + r2 of the sequential scheme's rate budget.
struct RateSplit {
    double r1;
    double r2;

    RateSplit(double r1, double r2);
    double total() const { return r1 + r2; }
};

/// Sequential exponent D(p1||q1) + min[ |r2 - h(p2)|+, D(p2||q2) ], stated
/// for h(q1) < h(p1) with r1 >= h(p1) and r2 >= h(p2). Equals the sum of
/// the per-component closed forms (asserted internally).
double sequential_exponent(const ProductBsdsParams& params, const RateSplit& split);

/// h(p1) + h(p2) + D(p2||q2): beats the product critical rate by exactly
/// D(p1||q1) (asserted internally).
double sequential_critical_rate(const ProductBsdsParams& params);

/// True when the required ordering h(q1) < h(p1) fails as given but holds
/// after swapping the two components; used for actionable error messages.
bool sequential_swap_recommended(const ProductBsdsParams& params);

}  // namespace dht
