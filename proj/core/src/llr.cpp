#include "dht/llr.hpp"

#include <algorithm>
#include <cmath>

namespace dht {

double LogLikelihoodMatrix::row_distance(std::size_t x1, std::size_t x2) const {
    double worst = 0.0;
    for (std::size_t y = 0; y < y_card; ++y)
        worst = std::max(worst, std::abs(shifted(x1, y) - shifted(x2, y)));
    return worst;
}

LogLikelihoodMatrix lambda_hat(const HypothesisPair& hp, std::size_t reference_column) {
    if (hp.p.rank() != 2)
        throw ValidationError("lambda_hat: expected a two-axis pair");
    hp.require_full_support();
    LogLikelihoodMatrix m;
    m.x_card = hp.p.card(0);
    m.y_card = hp.p.card(1);
    if (reference_column >= m.y_card)
        throw ValidationError("lambda_hat: reference column out of range");
    m.reference_column = reference_column;
    m.lambda.resize(m.x_card * m.y_card);
    m.lambda_hat.resize(m.x_card * m.y_card);
    for (std::size_t x = 0; x < m.x_card; ++x) {
        for (std::size_t y = 0; y < m.y_card; ++y)
            m.lambda[x * m.y_card + y] = std::log(hp.p.at({x, y}) / hp.q.at({x, y}));
        double ref = m.lambda[x * m.y_card + reference_column];
        for (std::size_t y = 0; y < m.y_card; ++y)
            m.lambda_hat[x * m.y_card + y] = m.lambda[x * m.y_card + y] - ref;
    }
    return m;
}

NoQuantizationCheck check_no_quantization_condition(const HypothesisPair& hp, double tol,
                                                    std::size_t reference_column) {
    LogLikelihoodMatrix m = lambda_hat(hp, reference_column);
    NoQuantizationCheck check;
    check.holds = true;
    for (std::size_t x1 = 0; x1 < m.x_card; ++x1) {
        for (std::size_t x2 = x1 + 1; x2 < m.x_card; ++x2) {
            double dist = m.row_distance(x1, x2);
            if (dist < check.min_row_distance) {
                check.min_row_distance = dist;
                check.witness_x1 = x1;
                check.witness_x2 = x2;
            }
        }
    }
    if (m.x_card > 1 && check.min_row_distance <= tol) check.holds = false;
    return check;
}

TestChannel MergeMap::to_channel() const {
    return TestChannel::deterministic(kappa, classes.size());
}

MergeMap merge_map(const HypothesisPair& hp, double tol, std::size_t reference_column) {
    LogLikelihoodMatrix m = lambda_hat(hp, reference_column);
    MergeMap map;
    map.kappa.resize(m.x_card);
    for (std::size_t x = 0; x < m.x_card; ++x) {
        std::size_t cls = map.classes.size();
        for (std::size_t c = 0; c < map.classes.size(); ++c) {
            if (m.row_distance(x, map.classes[c].front()) <= tol) { cls = c; break; }
        }
        if (cls == map.classes.size()) map.classes.emplace_back();
        map.classes[cls].push_back(x);
        map.kappa[x] = cls;
    }
    return map;
}

}  // namespace dht
