#include "dht/sha_bound.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "dht/info.hpp"
#include "dht/llr.hpp"

namespace dht {

namespace {

double plogp(double v) { return v > 0.0 ? v * std::log(v) : 0.0; }

template <class F>
double golden_min(F f, double a, double b, double xtol) {
    constexpr double gr = 0.6180339887498949;
    double x1 = b - gr * (b - a);
    double x2 = a + gr * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > xtol) {
        if (f1 <= f2) {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - gr * (b - a); f1 = f(x1);
        } else {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + gr * (b - a); f2 = f(x2);
        }
    }
    return 0.5 * (a + b);
}

// ---------------------------------------------------------------------------
// Scalar path: 2x2 base, constraints {X},{Y}, floor on H(X~|Y~). The joint
// has one free parameter t = p~(0,0); H(X~|Y~)(t) is concave, so its
// superlevel set is an interval, and D(p~||q)(t) is convex on it.
// ---------------------------------------------------------------------------

InnerMinimum scalar_inner_2x2(const JointDistribution& q, double px, double py,
                              double floor_, double tol, double t_feasible) {
    const auto qp = q.probs();
    double lo = std::max(0.0, px + py - 1.0);
    double hi = std::min(px, py);
    auto cells = [&](double t, double c[4]) {
        c[0] = t;
        c[1] = px - t;
        c[2] = py - t;
        c[3] = 1.0 - px - py + t;
        for (int i = 0; i < 4; ++i) c[i] = std::max(c[i], 0.0);
    };
    auto hcond = [&](double t) {
        double c[4];
        cells(t, c);
        double hj = -(plogp(c[0]) + plogp(c[1]) + plogp(c[2]) + plogp(c[3]));
        double hy = -(plogp(py) + plogp(1.0 - py));
        return hj - hy;
    };
    auto div = [&](double t) {
        double c[4];
        cells(t, c);
        double d = 0.0;
        for (int i = 0; i < 4; ++i)
            if (c[i] > 0.0) d += c[i] * std::log(c[i] / qp[i]);
        return std::max(d, 0.0);
    };

    const double slack = 1e-12;  // keeps the reference point itself feasible
    double t_lo = lo, t_hi = hi;
    double tmax = golden_min([&](double t) { return -hcond(t); }, lo, hi, 1e-13);
    if (hcond(tmax) < floor_ - slack) {
        // Only roundoff can get here: collapse to the known feasible point.
        t_lo = t_hi = std::clamp(t_feasible, lo, hi);
    } else {
        if (hcond(lo) < floor_ - slack) {
            double a = lo, b = tmax;
            for (int i = 0; i < 100; ++i) {
                double mid = 0.5 * (a + b);
                (hcond(mid) >= floor_ - slack ? b : a) = mid;
            }
            t_lo = b;
        }
        if (hcond(hi) < floor_ - slack) {
            double a = tmax, b = hi;
            for (int i = 0; i < 100; ++i) {
                double mid = 0.5 * (a + b);
                (hcond(mid) >= floor_ - slack ? a : b) = mid;
            }
            t_hi = a;
        }
    }

    double best_t = golden_min(div, t_lo, t_hi, std::min(tol, 1e-12) + 1e-15);
    double best = div(best_t);
    for (double t : {t_lo, t_hi}) {
        if (div(t) < best) { best = div(t); best_t = t; }
    }
    double c[4];
    cells(best_t, c);
    InnerMinimum out{JointDistribution(q.axes(), {c[0], c[1], c[2], c[3]}), best,
                     hcond(best_t) <= floor_ + 1e-6};
    return out;
}

// ---------------------------------------------------------------------------
// General path: multi-start exponentiated-gradient descent with quadratic
// penalty continuation on the entropy constraint, re-projected onto the
// marginal polytope by proportional fitting after every step, each start
// finished by a bisection blend toward the max-entropy anchor to restore
// strict feasibility.
// ---------------------------------------------------------------------------

struct SlotMap {
    std::vector<std::size_t> slot;  // cell -> marginal slot
    std::size_t slots = 0;
};

SlotMap make_slot_map(const JointDistribution& shape, const std::vector<std::string>& names) {
    SlotMap m;
    std::vector<std::size_t> ids;
    for (const auto& n : names) ids.push_back(shape.axis_index(n));
    std::vector<std::size_t> strides(ids.size(), 1);
    for (std::size_t i = ids.size(); i-- > 1;)
        strides[i - 1] = strides[i] * shape.card(ids[i]);
    m.slots = ids.empty() ? 1 : strides[0] * shape.card(ids[0]);
    m.slot.resize(shape.size());
    std::vector<std::size_t> idx(shape.rank());
    for (std::size_t flat = 0; flat < shape.size(); ++flat) {
        shape.unflatten(flat, idx);
        std::size_t s = 0;
        for (std::size_t i = 0; i < ids.size(); ++i) s += idx[ids[i]] * strides[i];
        m.slot[flat] = s;
    }
    return m;
}

struct LocalConstraint {
    SlotMap map;
    std::vector<double> target;
};

double cond_entropy_masses(const std::vector<double>& p, const SlotMap& ab, const SlotMap& b,
                           std::vector<double>& mab, std::vector<double>& mb) {
    mab.assign(ab.slots, 0.0);
    mb.assign(b.slots, 0.0);
    for (std::size_t i = 0; i < p.size(); ++i) {
        mab[ab.slot[i]] += p[i];
        mb[b.slot[i]] += p[i];
    }
    double h = 0.0;
    for (double v : mab) h -= plogp(v);
    for (double v : mb) h += plogp(v);
    return h;
}

void fit_marginals(std::vector<double>& p, const std::vector<LocalConstraint>& cons,
                   std::size_t cycles) {
    std::vector<double> marg;
    for (std::size_t c = 0; c < cycles; ++c) {
        double worst = 0.0;
        for (const auto& con : cons) {
            marg.assign(con.map.slots, 0.0);
            for (std::size_t i = 0; i < p.size(); ++i) marg[con.map.slot[i]] += p[i];
            for (std::size_t s = 0; s < con.map.slots; ++s)
                worst = std::max(worst, std::abs(marg[s] - con.target[s]));
            for (std::size_t i = 0; i < p.size(); ++i) {
                double m = marg[con.map.slot[i]];
                p[i] = m > 0.0 ? p[i] * (con.target[con.map.slot[i]] / m) : 0.0;
            }
        }
        if (worst < 1e-13) break;
    }
}

InnerMinimum general_inner(const JointDistribution& q, const LinearFamily& family,
                           const std::vector<std::string>& ent_target,
                           const std::vector<std::string>& ent_given, double floor_,
                           double tol) {
    // Fast path: if the plain I-projection onto the marginal constraints
    // already satisfies the entropy floor, it is the global minimum (the
    // floor is inactive and the remaining problem is the convex projection).
    ProjectionResult proj = i_project(q, family);
    if (!proj.converged())
        throw ConvergenceError("constrained_divergence_minimum: marginal projection did not converge");

    std::vector<std::string> ab(ent_target);
    ab.insert(ab.end(), ent_given.begin(), ent_given.end());
    SlotMap map_ab = make_slot_map(q, ab);
    SlotMap map_b = make_slot_map(q, ent_given);
    std::vector<double> mab, mb;

    std::vector<double> zp(proj.minimizer.probs().begin(), proj.minimizer.probs().end());
    double h_proj = cond_entropy_masses(zp, map_ab, map_b, mab, mb);
    if (h_proj >= floor_ - 1e-9)
        return {proj.minimizer, proj.divergence, h_proj <= floor_ + 1e-6};

    std::vector<LocalConstraint> cons;
    for (const auto& c : family.constraints()) {
        LocalConstraint lc;
        lc.map = make_slot_map(q, c.axes);
        lc.target.assign(c.target.probs().begin(), c.target.probs().end());
        cons.push_back(std::move(lc));
    }
    const std::vector<std::uint8_t>* mask =
        family.support_mask() ? &*family.support_mask() : nullptr;
    const auto qp = q.probs();
    const std::size_t cells = q.size();

    // Max-conditional-entropy anchor: the outer product of the constraint
    // targets, defined when the constraints partition the axes (always the
    // case for the binning and quantize-and-binning families).
    std::vector<double> anchor;
    {
        std::vector<int> covered(q.rank(), 0);
        bool partition = true;
        for (const auto& c : family.constraints())
            for (const auto& n : c.axes) covered[q.axis_index(n)] += 1;
        for (int v : covered) partition = partition && v == 1;
        if (partition) {
            anchor.assign(cells, 1.0);
            for (const auto& lc : cons)
                for (std::size_t i = 0; i < cells; ++i) anchor[i] *= lc.target[lc.map.slot[i]];
            bool ok = true;
            if (mask) {
                for (std::size_t i = 0; i < cells; ++i)
                    if (anchor[i] > 0.0 && !(*mask)[i]) { ok = false; break; }
            }
            if (!ok) anchor.clear();
        }
    }

    auto entropy_of = [&](const std::vector<double>& z) {
        return cond_entropy_masses(z, map_ab, map_b, mab, mb);
    };
    // Blend z toward the anchor until the floor holds; concavity of
    // H(A|B) along the segment (the B-marginal is shared) makes the
    // feasible blend weights an interval ending at 1.
    auto blend_feasible = [&](std::vector<double> z) -> std::vector<double> {
        if (entropy_of(z) >= floor_ - 1e-12) return z;
        if (anchor.empty() || entropy_of(anchor) < floor_ - 1e-12) return {};
        double lo = 0.0, hi = 1.0;
        std::vector<double> mix(cells);
        for (int it = 0; it < 80; ++it) {
            double lam = 0.5 * (lo + hi);
            for (std::size_t i = 0; i < cells; ++i)
                mix[i] = (1.0 - lam) * z[i] + lam * anchor[i];
            (entropy_of(mix) >= floor_ - 1e-12 ? hi : lo) = lam;
        }
        for (std::size_t i = 0; i < cells; ++i) z[i] = (1.0 - hi) * z[i] + hi * anchor[i];
        return z;
    };

    std::vector<double> best;
    double best_d = kInfinity;
    auto consider = [&](const std::vector<double>& z) {
        if (z.empty()) return;
        double d = kl_divergence_raw(z, qp);
        if (d < best_d) { best_d = d; best = z; }
    };
    consider(blend_feasible(zp));
    if (!anchor.empty()) consider(anchor);

    std::mt19937_64 rng(0x51eadbea7c0ffee5ULL);
    std::uniform_real_distribution<double> jitter(-2.0, 2.0);
    const double penalties[] = {10.0, 1e2, 1e3, 1e4, 1e5, 1e6};
    std::vector<double> z(cells), g(cells);

    for (int start = 0; start < 64; ++start) {
        if (start == 0) {
            z = zp;  // the unconstrained projection
        } else if (start == 1 && !anchor.empty()) {
            z = anchor;
        } else {
            for (std::size_t i = 0; i < cells; ++i)
                z[i] = (mask && !(*mask)[i]) ? 0.0 : qp[i] * std::exp(jitter(rng));
            double s = 0.0;
            for (double v : z) s += v;
            for (double& v : z) v /= s;
            fit_marginals(z, cons, 300);
        }
        for (double mu : penalties) {
            for (int iter = 0; iter < 150; ++iter) {
                double h = cond_entropy_masses(z, map_ab, map_b, mab, mb);
                double pen = std::max(floor_ - h, 0.0);
                double gmax = 0.0;
                for (std::size_t i = 0; i < cells; ++i) {
                    if (z[i] <= 0.0) { g[i] = 0.0; continue; }
                    double gr = std::log(z[i] / qp[i]);
                    if (pen > 0.0) {
                        double num = mab[map_ab.slot[i]];
                        double den = mb[map_b.slot[i]];
                        if (num > 0.0 && den > 0.0) gr += 2.0 * mu * pen * std::log(num / den);
                    }
                    g[i] = gr;
                    gmax = std::max(gmax, std::abs(gr));
                }
                double eta = 0.3 / std::max(1.0, gmax);
                double s = 0.0;
                for (std::size_t i = 0; i < cells; ++i) {
                    z[i] *= std::exp(-eta * g[i]);
                    s += z[i];
                }
                for (double& v : z) v /= s;
                fit_marginals(z, cons, 30);
            }
        }
        consider(blend_feasible(z));
    }

    if (best.empty())
        throw ConvergenceError("constrained_divergence_minimum: no feasible point found");
    double h_best = entropy_of(best);
    return {JointDistribution(q.axes(), std::move(best)), std::max(best_d, 0.0),
            h_best <= floor_ + 1e-6};
}

}  // namespace

InnerMinimum constrained_divergence_minimum(const JointDistribution& q,
                                            const LinearFamily& family,
                                            const std::vector<std::string>& entropy_target,
                                            const std::vector<std::string>& entropy_given,
                                            double entropy_floor, double tol) {
    // Scalar route: a 2x2 base with single-axis constraints on both axes
    // and the floor on H(axis0 | axis1).
    if (q.rank() == 2 && q.size() == 4 && family.constraints().size() == 2 &&
        entropy_target.size() == 1 && entropy_given.size() == 1 &&
        entropy_target[0] == q.axes()[0].name && entropy_given[0] == q.axes()[1].name &&
        !family.support_mask()) {
        const JointDistribution* tx = nullptr;
        const JointDistribution* ty = nullptr;
        for (const auto& c : family.constraints()) {
            if (c.axes.size() == 1 && c.axes[0] == q.axes()[0].name) tx = &c.target;
            if (c.axes.size() == 1 && c.axes[0] == q.axes()[1].name) ty = &c.target;
        }
        if (tx && ty) {
            // Midpoint of the feasible t-interval serves as the fallback
            // feasible point; the caller-known one is not plumbed through.
            double px = (*tx)[0], py = (*ty)[0];
            double t_mid = 0.5 * (std::max(0.0, px + py - 1.0) + std::min(px, py));
            return scalar_inner_2x2(q, px, py, entropy_floor, tol, t_mid);
        }
    }
    return general_inner(q, family, entropy_target, entropy_given, entropy_floor, tol);
}

InnerMinimum binning_inner_minimum(const HypothesisPair& hp, double tol) {
    if (hp.p.rank() != 2)
        throw ValidationError("binning_inner_minimum: expected a two-axis pair");
    hp.require_full_support();
    const std::string xn = hp.p.axes()[0].name;
    const std::string yn = hp.p.axes()[1].name;
    std::vector<std::string> tx{xn}, ty{yn};
    double floor_ = conditional_entropy(hp.p, std::span<const std::string>(tx),
                                        std::span<const std::string>(ty));
    if (hp.p.size() == 4) {
        double px = hp.p.at({0, 0}) + hp.p.at({0, 1});
        double py = hp.p.at({0, 0}) + hp.p.at({1, 0});
        return scalar_inner_2x2(hp.q, px, py, floor_, tol, hp.p.at({0, 0}));
    }
    LinearFamily family(hp.p.axes(),
                        {MarginalConstraint{tx, hp.p.marginal(std::span<const std::string>(tx))},
                         MarginalConstraint{ty, hp.p.marginal(std::span<const std::string>(ty))}});
    return general_inner(hp.q, family, tx, ty, floor_, tol);
}

double sha_binning_exponent(const HypothesisPair& hp, double rate, double tol) {
    if (hp.p.rank() != 2)
        throw ValidationError("sha_binning_exponent: expected a two-axis pair");
    hp.require_full_support();
    std::vector<std::string> tx{hp.p.axes()[0].name}, ty{hp.p.axes()[1].name};
    double c = conditional_entropy(hp.p, std::span<const std::string>(tx),
                                   std::span<const std::string>(ty));
    if (rate < c - 1e-12)
        throw ValidationError("sha_binning_exponent: rate below the conditional entropy H_P(X|Y)");
    double inner = binning_inner_minimum(hp, tol).divergence;
    double stein = kl_divergence(hp.p, hp.q);
    return std::max(std::min(inner + std::max(rate - c, 0.0), stein), 0.0);
}

namespace {

std::string fresh_axis_name(const JointDistribution& d, std::string base) {
    auto taken = [&](const std::string& n) {
        for (const auto& ax : d.axes())
            if (ax.name == n) return true;
        return false;
    };
    while (taken(base)) base += "_";
    return base;
}

}  // namespace

double sha_quantize_binning_exponent(const HypothesisPair& hp, const TestChannel& w,
                                     double rate, double tol) {
    if (hp.p.rank() != 2)
        throw ValidationError("sha_quantize_binning_exponent: expected a two-axis pair");
    hp.require_full_support();
    if (w.input_card() != hp.p.card(0))
        throw ValidationError("sha_quantize_binning_exponent: channel input does not match the x-alphabet");
    if (w.is_permutation())
        return sha_binning_exponent(hp, rate, tol);

    const std::string un = fresh_axis_name(hp.p, "U");
    const std::string xn = hp.p.axes()[0].name;
    const std::string yn = hp.p.axes()[1].name;
    JointDistribution p_uxy = compose(hp.p, w, 0, un);
    JointDistribution q_uxy = compose(hp.q, w, 0, un);

    double c = conditional_mutual_information(p_uxy, un, xn, yn);
    if (rate < c - 1e-12)
        throw ValidationError(
            "sha_quantize_binning_exponent: rate below the conditional mutual information I_P(U;X|Y)");

    std::vector<std::string> ux{un, xn}, tu{un}, ty{yn};
    double floor_ = conditional_entropy(p_uxy, std::span<const std::string>(tu),
                                        std::span<const std::string>(ty));
    std::vector<std::uint8_t> mask(q_uxy.size());
    for (std::size_t i = 0; i < q_uxy.size(); ++i) mask[i] = q_uxy[i] > 0.0 ? 1 : 0;
    LinearFamily family(q_uxy.axes(),
                        {MarginalConstraint{ux, p_uxy.marginal(std::span<const std::string>(ux))},
                         MarginalConstraint{ty, p_uxy.marginal(std::span<const std::string>(ty))}},
                        std::move(mask));
    double inner = general_inner(q_uxy, family, tu, ty, floor_, tol).divergence;
    double cap = quantization_exponent(hp, w);
    return std::max(std::min(inner + std::max(rate - c, 0.0), cap), 0.0);
}

CriticalRateBound critical_rate_bound_sha(const HypothesisPair& hp, double tol) {
    if (hp.p.rank() != 2)
        throw ValidationError("critical_rate_bound_sha: expected a two-axis pair");
    hp.require_full_support();
    std::vector<std::string> tx{hp.p.axes()[0].name}, ty{hp.p.axes()[1].name};
    double c = conditional_entropy(hp.p, std::span<const std::string>(tx),
                                   std::span<const std::string>(ty));
    double stein = kl_divergence(hp.p, hp.q);

    CriticalRateBound out;
    out.scheme = "sha-binning";
    out.stein_exponent = stein;
    out.tolerance = tol;
    if (stein <= tol) {
        out.value = c;
        out.certificate = 0.0;
        out.attained = true;
        return out;
    }
    NoQuantizationCheck check = check_no_quantization_condition(hp);
    if (!check.holds)
        throw ValidationError(
            "critical_rate_bound_sha: shifted log-likelihood rows " +
            std::to_string(check.witness_x1) + " and " + std::to_string(check.witness_x2) +
            " coincide; a search over merge channels is required and out of scope here");

    double inner = binning_inner_minimum(hp).divergence;
    auto eval = [&](double r) {
        return std::min(inner + std::max(r - c, 0.0), stein);
    };
    double hx = entropy(hp.p, std::span<const std::string>(tx));
    double hi = hx + stein + 1.0;
    if (eval(hi) < stein - tol) {
        out.value = kInfinity;
        out.certificate = eval(hi);
        out.attained = false;
        return out;
    }
    double lo = c;
    if (eval(lo) >= stein - tol) {
        hi = lo;
    } else {
        while (hi - lo > kCriticalRateResolution) {
            double mid = 0.5 * (lo + hi);
            (eval(mid) >= stein - tol ? hi : lo) = mid;
        }
    }
    out.value = hi;
    out.certificate = eval(hi);
    out.attained = true;
    return out;
}

void ExponentCurve::validate(double stein_exponent) const {
    if (rates.empty() || rates.size() != exponents.size())
        throw ValidationError("ExponentCurve: empty or mismatched rate/exponent grids");
    for (std::size_t i = 1; i < rates.size(); ++i) {
        if (rates[i] < rates[i - 1] - 1e-12)
            throw ValidationError("ExponentCurve: rates must be ascending");
        if (exponents[i] < exponents[i - 1] - 1e-9)
            throw ValidationError("ExponentCurve: exponent must be non-decreasing in rate");
    }
    for (double e : exponents) {
        if (e < -1e-9 || e > stein_exponent + 1e-9)
            throw ValidationError("ExponentCurve: exponent outside [0, Stein exponent]");
    }
}

ExponentCurve sha_binning_curve(const HypothesisPair& hp, std::vector<double> rates,
                                double tol) {
    if (hp.p.rank() != 2)
        throw ValidationError("sha_binning_curve: expected a two-axis pair");
    hp.require_full_support();
    std::vector<std::string> tx{hp.p.axes()[0].name}, ty{hp.p.axes()[1].name};
    double c = conditional_entropy(hp.p, std::span<const std::string>(tx),
                                   std::span<const std::string>(ty));
    std::sort(rates.begin(), rates.end());
    if (rates.empty())
        throw ValidationError("sha_binning_curve: empty rate grid");
    if (rates.front() < c - 1e-12)
        throw ValidationError("sha_binning_curve: rates below the conditional entropy H_P(X|Y)");
    double inner = binning_inner_minimum(hp, tol).divergence;
    double stein = kl_divergence(hp.p, hp.q);

    ExponentCurve curve;
    curve.scheme = "sha-binning";
    curve.rates = std::move(rates);
    for (double r : curve.rates)
        curve.exponents.push_back(std::max(std::min(inner + std::max(r - c, 0.0), stein), 0.0));
    curve.tolerance = hp.p.size() == 4 ? std::max(tol, kInnerTolScalar)
                                       : std::max(tol, kInnerTolGeneral);
    curve.parameters = {{"stein_exponent", stein},
                        {"conditional_entropy", c},
                        {"inner_divergence", inner}};
    curve.validate(stein);
    return curve;
}

}  // namespace dht
