#include "dht/bsds.hpp"

#include <cmath>
#include <string>

#include "dht/info.hpp"

namespace dht {

namespace {

void check_open_unit(double v, const char* name) {
    if (!(v > 0.0 && v < 1.0))
        throw ValidationError(std::string("BsdsParams: ") + name +
                              " must lie in the open interval (0,1); boundary crossovers make divergences degenerate");
}

}  // namespace

BsdsParams::BsdsParams(double p_, double q_) : p(p_), q(q_) {
    check_open_unit(p, "p");
    check_open_unit(q, "q");
    if (p == q) throw ValidationError("BsdsParams: p != q required");
}

JointDistribution bsds_joint(double crossover) {
    check_open_unit(crossover, "crossover");
    double s = 0.5 * (1.0 - crossover);
    double d = 0.5 * crossover;
    return JointDistribution({{"X", 2}, {"Y", 2}}, {s, d, d, s});
}

HypothesisPair bsds_pair(const BsdsParams& params) {
    return HypothesisPair(bsds_joint(params.p), bsds_joint(params.q));
}

double bsds_exponent(const BsdsParams& params, double rate) {
    double hp = binary_entropy(params.p);
    if (rate < hp - 1e-12)
        throw ValidationError("bsds_exponent: rate below h(p), outside the bound's validity range");
    double d = binary_kl(params.p, params.q);
    if (binary_entropy(params.p) <= binary_entropy(params.q))
        return std::min(std::max(rate - hp, 0.0), d);
    return d;
}

double bsds_critical_rate(const BsdsParams& params) {
    double hp = binary_entropy(params.p);
    if (hp <= binary_entropy(params.q)) return hp + binary_kl(params.p, params.q);
    return hp;
}

ProductBsdsParams::ProductBsdsParams(BsdsParams first_, BsdsParams second_)
    : first(first_), second(second_) {
    reverse_aligned = first.p == second.q && second.p == first.q && first.p != first.q;
    if (reverse_aligned) {
        double hp = binary_entropy(first.p) + binary_entropy(second.p);
        double hq = binary_entropy(first.q) + binary_entropy(second.q);
        if (std::abs(hp - hq) > 1e-12)
            throw Error("ProductBsdsParams: conditional entropies of the aligned pair diverge");
    }
}

ProductBsdsParams ProductBsdsParams::reversed(double p1, double q1) {
    return ProductBsdsParams(BsdsParams(p1, q1), BsdsParams(q1, p1));
}

void ProductBsdsParams::require_reverse_aligned() const {
    if (!reverse_aligned)
        throw ValidationError(
            "ProductBsdsParams: reverse alignment (p1 = q2, p2 = q1, p1 != q1) required");
}

HypothesisPair product_bsds_pair(const ProductBsdsParams& params) {
    JointDistribution p1 = bsds_joint(params.first.p);
    JointDistribution p2 = bsds_joint(params.second.p);
    JointDistribution q1 = bsds_joint(params.first.q);
    JointDistribution q2 = bsds_joint(params.second.q);
    auto product = [](const JointDistribution& a, const JointDistribution& b) {
        std::vector<double> cells(16);
        for (std::size_t x1 = 0; x1 < 2; ++x1)
            for (std::size_t x2 = 0; x2 < 2; ++x2)
                for (std::size_t y1 = 0; y1 < 2; ++y1)
                    for (std::size_t y2 = 0; y2 < 2; ++y2)
                        cells[(2 * x1 + x2) * 4 + (2 * y1 + y2)] =
                            a.at({x1, y1}) * b.at({x2, y2});
        return JointDistribution({{"X", 4}, {"Y", 4}}, std::move(cells));
    };
    return HypothesisPair(product(p1, p2), product(q1, q2));
}

double product_bsds_exponent(const ProductBsdsParams& params, double rate) {
    params.require_reverse_aligned();
    double h = binary_entropy(params.first.p) + binary_entropy(params.second.p);
    if (rate < h - 1e-12)
        throw ValidationError("product_bsds_exponent: rate below h(p1) + h(p2)");
    double cap = binary_kl(params.first.p, params.first.q) +
                 binary_kl(params.second.p, params.second.q);
    return std::min(std::max(rate - h, 0.0), cap);
}

double product_bsds_critical_rate(const ProductBsdsParams& params) {
    params.require_reverse_aligned();
    return binary_entropy(params.first.p) + binary_entropy(params.second.p) +
           binary_kl(params.first.p, params.first.q) +
           binary_kl(params.second.p, params.second.q);
}

ProductInnerCheck verify_product_inner_minimizer(const ProductBsdsParams& params, double tol) {
    params.require_reverse_aligned();
    HypothesisPair pair = product_bsds_pair(params);
    InnerMinimum inner = binning_inner_minimum(pair, tol);
    ProductInnerCheck check;
    check.inner_divergence = inner.divergence;
    check.minimizer_tv_to_q = total_variation(inner.minimizer, pair.q);
    check.stein_exponent = kl_divergence(pair.p, pair.q);
    double saturation = binary_entropy(params.first.p) + binary_entropy(params.second.p) +
                        check.stein_exponent;
    check.exponent_at_saturation = sha_binning_exponent(pair, saturation, tol);
    return check;
}

RateSplit::RateSplit(double r1_, double r2_) : r1(r1_), r2(r2_) {
    if (r1 < 0.0 || r2 < 0.0) throw ValidationError("RateSplit: rates must be non-negative");
}

namespace {

void check_sequential_order(const ProductBsdsParams& params) {
    if (binary_entropy(params.first.q) < binary_entropy(params.first.p)) return;
    std::string msg =
        "sequential bound requires h(q1) < h(p1); the stated form does not cover this ordering";
    if (sequential_swap_recommended(params))
        msg += " (swapping the component order satisfies it)";
    throw ValidationError(msg);
}

}  // namespace

double sequential_exponent(const ProductBsdsParams& params, const RateSplit& split) {
    params.require_reverse_aligned();
    check_sequential_order(params);
    double h1 = binary_entropy(params.first.p);
    double h2 = binary_entropy(params.second.p);
    if (split.r1 < h1 - 1e-12 || split.r2 < h2 - 1e-12)
        throw ValidationError("sequential_exponent: split must satisfy r1 >= h(p1) and r2 >= h(p2)");
    double d1 = binary_kl(params.first.p, params.first.q);
    double d2 = binary_kl(params.second.p, params.second.q);
    double value = d1 + std::min(std::max(split.r2 - h2, 0.0), d2);
    double by_components =
        bsds_exponent(params.first, split.r1) + bsds_exponent(params.second, split.r2);
    if (std::abs(value - by_components) > 1e-12)
        throw Error("sequential_exponent: component-sum consistency check failed");
    return value;
}

double sequential_critical_rate(const ProductBsdsParams& params) {
    params.require_reverse_aligned();
    check_sequential_order(params);
    double value = binary_entropy(params.first.p) + binary_entropy(params.second.p) +
                   binary_kl(params.second.p, params.second.q);
    double gap = product_bsds_critical_rate(params) - value;
    if (std::abs(gap - binary_kl(params.first.p, params.first.q)) > 1e-12)
        throw Error("sequential_critical_rate: improvement-gap identity check failed");
    return value;
}

bool sequential_swap_recommended(const ProductBsdsParams& params) {
    return !(binary_entropy(params.first.q) < binary_entropy(params.first.p)) &&
           binary_entropy(params.second.q) < binary_entropy(params.second.p);
}

}  // namespace dht
