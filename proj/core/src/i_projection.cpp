#include "dht/i_projection.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "dht/info.hpp"

namespace dht {

namespace {

// Per-constraint view: for every cell of the base tensor, the flat index of
// its projection onto the constraint's axes.
struct ConstraintIndex {
    std::vector<std::size_t> cell_to_slot;
    std::vector<double> target;  // flat target marginal
    std::size_t slots = 0;
};

std::vector<ConstraintIndex> build_indices(const std::vector<Axis>& shape,
                                           const LinearFamily& family) {
    std::vector<std::size_t> strides(shape.size(), 1);
    for (std::size_t i = shape.size(); i-- > 1;) strides[i - 1] = strides[i] * shape[i].card;
    std::size_t cells = strides[0] * shape[0].card;

    std::vector<ConstraintIndex> out;
    out.reserve(family.constraints().size());
    for (const auto& c : family.constraints()) {
        ConstraintIndex ci;
        std::vector<std::size_t> axis_ids;
        for (const auto& name : c.axes) {
            std::size_t id = shape.size();
            for (std::size_t i = 0; i < shape.size(); ++i) {
                if (shape[i].name == name) { id = i; break; }
            }
            if (id == shape.size())
                throw ValidationError("i_project: constraint names unknown axis '" + name + "'");
            axis_ids.push_back(id);
        }
        std::vector<std::size_t> slot_strides(axis_ids.size(), 1);
        for (std::size_t i = axis_ids.size(); i-- > 1;)
            slot_strides[i - 1] = slot_strides[i] * shape[axis_ids[i]].card;
        ci.slots = slot_strides[0] * shape[axis_ids[0]].card;

        ci.cell_to_slot.resize(cells);
        for (std::size_t flat = 0; flat < cells; ++flat) {
            std::size_t slot = 0;
            for (std::size_t i = 0; i < axis_ids.size(); ++i) {
                std::size_t coord = (flat / strides[axis_ids[i]]) % shape[axis_ids[i]].card;
                slot += coord * slot_strides[i];
            }
            ci.cell_to_slot[flat] = slot;
        }
        ci.target.assign(c.target.probs().begin(), c.target.probs().end());
        if (ci.target.size() != ci.slots)
            throw ValidationError("i_project: constraint target shape mismatch");
        out.push_back(std::move(ci));
    }
    return out;
}

double max_marginal_deviation(const std::vector<double>& p,
                              const std::vector<ConstraintIndex>& constraints) {
    double worst = 0.0;
    std::vector<double> marg;
    for (const auto& c : constraints) {
        marg.assign(c.slots, 0.0);
        for (std::size_t i = 0; i < p.size(); ++i) marg[c.cell_to_slot[i]] += p[i];
        for (std::size_t s = 0; s < c.slots; ++s)
            worst = std::max(worst, std::abs(marg[s] - c.target[s]));
    }
    return worst;
}

}  // namespace

LinearFamily::LinearFamily(std::vector<Axis> base_shape,
                           std::vector<MarginalConstraint> constraints,
                           std::optional<std::vector<std::uint8_t>> support_mask)
    : shape_(std::move(base_shape)), constraints_(std::move(constraints)), mask_(std::move(support_mask)) {
    if (shape_.empty()) throw ValidationError("LinearFamily: empty base shape");
    cells_ = 1;
    for (const auto& ax : shape_) {
        if (ax.card == 0) throw ValidationError("LinearFamily: axis '" + ax.name + "' has cardinality 0");
        cells_ *= ax.card;
    }
    if (constraints_.empty()) throw ValidationError("LinearFamily: no constraints");
    if (mask_ && mask_->size() != cells_)
        throw ValidationError("LinearFamily: support mask size does not match base shape");

    for (const auto& c : constraints_) {
        if (c.axes.empty()) throw ValidationError("LinearFamily: constraint with empty axis set");
        if (c.axes.size() != c.target.rank())
            throw ValidationError("LinearFamily: constraint target rank mismatch");
        for (std::size_t i = 0; i < c.axes.size(); ++i) {
            // Shared-axis consistency checks below rely on targets naming
            // their axes the same way the constraint does.
            if (c.target.axes()[i].name != c.axes[i])
                throw ValidationError("LinearFamily: constraint target axis '" +
                                      c.target.axes()[i].name + "' does not match '" +
                                      c.axes[i] + "'");
            bool found = false;
            for (const auto& ax : shape_) {
                if (ax.name == c.axes[i]) {
                    found = true;
                    if (ax.card != c.target.axes()[i].card)
                        throw ValidationError("LinearFamily: cardinality mismatch on axis '" + ax.name + "'");
                }
            }
            if (!found) throw ValidationError("LinearFamily: unknown axis '" + c.axes[i] + "'");
        }
    }
    // Pairwise consistency of targets on shared axes.
    for (std::size_t a = 0; a < constraints_.size(); ++a) {
        for (std::size_t b = a + 1; b < constraints_.size(); ++b) {
            std::vector<std::string> shared;
            for (const auto& n : constraints_[a].axes) {
                if (std::find(constraints_[b].axes.begin(), constraints_[b].axes.end(), n) !=
                    constraints_[b].axes.end())
                    shared.push_back(n);
            }
            if (shared.empty()) continue;
            // Targets carry the constraint axes under their local names, so the
            // shared-axis marginal can be taken on each target directly.
            auto ma = constraints_[a].target.marginal(std::span<const std::string>(shared));
            auto mb = constraints_[b].target.marginal(std::span<const std::string>(shared));
            for (std::size_t i = 0; i < ma.size(); ++i) {
                if (std::abs(ma[i] - mb[i]) > 1e-9)
                    throw ValidationError("LinearFamily: targets disagree on shared axes ('" + shared.front() + "')");
            }
        }
    }
}

ProjectionResult i_project(const JointDistribution& q, const LinearFamily& family,
                           double tol, std::size_t max_iter, const CycleObserver& observer) {
    if (q.rank() != family.base_shape().size())
        throw ValidationError("i_project: q rank does not match family shape");
    for (std::size_t i = 0; i < q.rank(); ++i) {
        if (q.axes()[i].name != family.base_shape()[i].name ||
            q.axes()[i].card != family.base_shape()[i].card)
            throw ValidationError("i_project: q axes do not match family shape");
    }
    auto constraints = build_indices(q.axes(), family);

    // Start from q restricted to the support mask, renormalized; masked-out
    // and q-zero cells stay zero for the whole run.
    std::vector<double> p(q.probs().begin(), q.probs().end());
    if (family.support_mask()) {
        const auto& mask = *family.support_mask();
        double mass = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (!mask[i]) p[i] = 0.0;
            mass += p[i];
        }
        if (mass <= 0.0)
            throw ValidationError("i_project: support mask excludes all of q's mass");
        for (double& v : p) v /= mass;
    }

    std::vector<double> marg;
    double residual = max_marginal_deviation(p, constraints);
    std::size_t cycle = 0;
    auto status = ProjectionStatus::max_iterations;

    // Stall window for infeasibility detection.
    constexpr std::size_t kWindow = 1000;
    double window_best = residual;
    double prev_window_best = kInfinity;
    std::size_t window_count = 0;

    while (cycle < max_iter) {
        if (residual < tol) { status = ProjectionStatus::converged; break; }

        for (const auto& c : constraints) {
            marg.assign(c.slots, 0.0);
            for (std::size_t i = 0; i < p.size(); ++i) marg[c.cell_to_slot[i]] += p[i];
            for (std::size_t s = 0; s < c.slots; ++s) {
                if (c.target[s] > 0.0 && marg[s] <= 0.0)
                    throw ValidationError(
                        "i_project: support incompatibility (target mass on a slice with no support)");
            }
            for (std::size_t i = 0; i < p.size(); ++i) {
                std::size_t s = c.cell_to_slot[i];
                p[i] = marg[s] > 0.0 ? p[i] * (c.target[s] / marg[s]) : 0.0;
            }
        }
        ++cycle;
        residual = max_marginal_deviation(p, constraints);
        if (observer) observer(cycle, p);

        window_best = std::min(window_best, residual);
        if (++window_count == kWindow) {
            if (window_best >= prev_window_best * (1.0 - 1e-12)) {
                status = ProjectionStatus::infeasible_or_degenerate;
                break;
            }
            prev_window_best = window_best;
            window_best = residual;
            window_count = 0;
        }
    }
    if (cycle >= max_iter && residual < tol) status = ProjectionStatus::converged;

    // Mass drifts only within roundoff of the constraint targets; normalize
    // so the result satisfies the JointDistribution invariant.
    double mass = 0.0;
    for (double v : p) mass += v;
    if (mass > 0.0 && std::abs(mass - 1.0) < kProbSumTol) {
        for (double& v : p) v /= mass;
    }

    ProjectionResult result{
        JointDistribution(q.axes(), std::move(p)),
        0.0, cycle, residual, status};
    result.divergence = kl_divergence_raw(result.minimizer.probs(), q.probs());
    return result;
}

double quantization_exponent(const HypothesisPair& hp, const TestChannel& w, double tol) {
    hp.require_full_support();
    std::string un = "U";
    for (bool taken = true; taken;) {
        taken = false;
        for (const auto& ax : hp.p.axes())
            if (ax.name == un) { un += "_"; taken = true; }
    }
    JointDistribution p_uxy = compose(hp.p, w, 0, un);
    JointDistribution q_uxy = compose(hp.q, w, 0, un);

    std::vector<std::string> ux{p_uxy.axes()[0].name, p_uxy.axes()[1].name};
    std::vector<std::string> uy{p_uxy.axes()[0].name, p_uxy.axes()[2].name};
    std::vector<std::uint8_t> mask(q_uxy.size());
    for (std::size_t i = 0; i < q_uxy.size(); ++i) mask[i] = q_uxy[i] > 0.0 ? 1 : 0;

    LinearFamily family(q_uxy.axes(),
                        {MarginalConstraint{ux, p_uxy.marginal(std::span<const std::string>(ux))},
                         MarginalConstraint{uy, p_uxy.marginal(std::span<const std::string>(uy))}},
                        std::move(mask));
    ProjectionResult res = i_project(q_uxy, family, tol);
    if (!res.converged())
        throw ConvergenceError(res.status == ProjectionStatus::max_iterations
                                   ? "quantization_exponent: projection hit the iteration cap"
                                   : "quantization_exponent: projection stalled (infeasible or degenerate family)");
    return res.divergence;
}

double pythagorean_residual(const HypothesisPair& hp, const TestChannel& w,
                            const JointDistribution& p_tilde, double marginal_tol) {
    hp.require_full_support();
    if (!w.is_deterministic())
        throw ValidationError("pythagorean_residual: channel must be deterministic");
    JointDistribution p_uxy = compose(hp.p, w);
    JointDistribution q_uxy = compose(hp.q, w);
    if (!p_tilde.same_shape(p_uxy))
        throw ValidationError("pythagorean_residual: p_tilde shape mismatch");

    std::vector<std::string> ux{p_uxy.axes()[0].name, p_uxy.axes()[1].name};
    std::vector<std::string> uy{p_uxy.axes()[0].name, p_uxy.axes()[2].name};
    for (const auto& axes : {ux, uy}) {
        auto want = p_uxy.marginal(std::span<const std::string>(axes));
        auto have = p_tilde.marginal(std::span<const std::string>(axes));
        for (std::size_t i = 0; i < want.size(); ++i) {
            if (std::abs(want[i] - have[i]) > marginal_tol)
                throw ValidationError("pythagorean_residual: p_tilde violates the fixed-marginal precondition");
        }
    }
    double lhs = kl_divergence(p_tilde, q_uxy);
    double mid = kl_divergence(p_tilde, p_uxy);
    double base = kl_divergence(p_uxy, q_uxy);
    return std::abs(lhs - mid - base);
}

}  // namespace dht
