#include "oracle.hpp"

#include <cmath>
#include <cstddef>
#include <utility>

#include "dht/errors.hpp"
#include "dht/info.hpp"

namespace dht::testing {
namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

void subtract_projection(std::vector<double>& v, const std::vector<std::vector<double>>& onto) {
    for (const auto& b : onto) {
        double c = dot(v, b);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * b[i];
    }
}

/// Modified Gram-Schmidt with one re-orthogonalization pass; drops
/// near-dependent vectors.
std::vector<std::vector<double>> orthonormalize(std::vector<std::vector<double>> rows,
                                                double keep_threshold) {
    std::vector<std::vector<double>> out;
    for (auto& r : rows) {
        subtract_projection(r, out);
        subtract_projection(r, out);
        double nrm = std::sqrt(dot(r, r));
        if (nrm > keep_threshold) {
            for (auto& v : r) v /= nrm;
            out.push_back(std::move(r));
        }
    }
    return out;
}

}  // namespace

AffineFamily affine_family(const LinearFamily& family, const JointDistribution& feasible) {
    const auto& shape = family.base_shape();
    const std::size_t cells = family.cell_count();
    if (feasible.size() != cells)
        throw ValidationError("affine_family: feasible point shape mismatch");

    std::vector<std::size_t> strides(shape.size(), 1);
    for (std::size_t i = shape.size(); i-- > 1;)
        strides[i - 1] = strides[i] * shape[i].card;

    std::vector<std::vector<double>> rows;
    for (const auto& c : family.constraints()) {
        std::vector<std::size_t> ids;
        for (const auto& name : c.axes)
            for (std::size_t i = 0; i < shape.size(); ++i)
                if (shape[i].name == name) ids.push_back(i);
        std::vector<std::vector<double>> local(c.target.size(),
                                               std::vector<double>(cells, 0.0));
        for (std::size_t f = 0; f < cells; ++f) {
            std::size_t slot = 0;
            for (std::size_t j = 0; j < ids.size(); ++j) {
                std::size_t digit = (f / strides[ids[j]]) % shape[ids[j]].card;
                slot = slot * shape[ids[j]].card + digit;
            }
            local[slot][f] = 1.0;
        }
        for (auto& r : local) rows.push_back(std::move(r));
    }
    if (family.support_mask()) {
        const auto& mask = *family.support_mask();
        for (std::size_t f = 0; f < cells; ++f) {
            if (mask[f]) continue;
            std::vector<double> unit(cells, 0.0);
            unit[f] = 1.0;
            rows.push_back(std::move(unit));
        }
    }

    auto row_basis = orthonormalize(std::move(rows), 1e-10);
    AffineFamily out;
    out.feasible.assign(feasible.probs().begin(), feasible.probs().end());
    out.cells = cells;
    for (std::size_t i = 0; i < cells; ++i) {
        std::vector<double> v(cells, 0.0);
        v[i] = 1.0;
        subtract_projection(v, row_basis);
        subtract_projection(v, out.basis);
        subtract_projection(v, row_basis);
        subtract_projection(v, out.basis);
        double nrm = std::sqrt(dot(v, v));
        if (nrm > 1e-8) {
            for (auto& w : v) w /= nrm;
            out.basis.push_back(std::move(v));
        }
    }
    return out;
}

double oracle_min_divergence(const JointDistribution& q, const AffineFamily& fam,
                             double radius, double step, int refine_rounds,
                             const MassPredicate& extra) {
    const std::size_t k = fam.basis.size();
    std::vector<double> z(fam.cells);
    auto eval = [&](const std::vector<double>& coef) -> double {
        for (std::size_t i = 0; i < fam.cells; ++i) {
            double v = fam.feasible[i];
            for (std::size_t j = 0; j < k; ++j) v += coef[j] * fam.basis[j][i];
            if (v < -1e-12) return kInfinity;
            z[i] = v < 0.0 ? 0.0 : v;
        }
        if (extra && !extra(z)) return kInfinity;
        return kl_divergence_raw(z, q.probs());
    };

    std::vector<double> center(k, 0.0);
    double best = eval(center);  // the known member is always admissible
    if (k == 0) return best;

    std::vector<double> best_c = center;
    std::vector<double> c(k);
    double r = radius;
    double st = step;
    for (int round = 0; round <= refine_rounds; ++round) {
        const std::size_t per_axis =
            static_cast<std::size_t>(std::floor(2.0 * r / st + 0.5)) + 1;
        std::vector<std::size_t> g(k, 0);
        for (;;) {
            for (std::size_t j = 0; j < k; ++j) c[j] = center[j] - r + double(g[j]) * st;
            double d = eval(c);
            if (d < best) {
                best = d;
                best_c = c;
            }
            std::size_t j = 0;
            while (j < k && ++g[j] == per_axis) {
                g[j] = 0;
                ++j;
            }
            if (j == k) break;
        }
        center = best_c;
        r = 3.0 * st;  // covers the localization error of the previous grid
        st *= 0.25;
    }
    return best;
}

}  // namespace dht::testing
