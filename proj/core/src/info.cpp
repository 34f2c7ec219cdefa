#include "dht/info.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace dht {

namespace {

double entropy_of_masses(std::span<const double> masses) {
    double h = 0.0;
    for (double v : masses) {
        if (v > 0.0) h -= v * std::log(v);
    }
    return std::max(h, 0.0);
}

std::vector<std::string> concat(std::span<const std::string> a, std::span<const std::string> b) {
    std::vector<std::string> out(a.begin(), a.end());
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

}  // namespace

double entropy(const JointDistribution& d, std::span<const std::string> axes) {
    if (axes.empty()) throw ValidationError("entropy: empty axis subset");
    std::vector<bool> seen(d.rank(), false);
    for (const auto& n : axes) {
        std::size_t id = d.axis_index(n);
        if (seen[id]) throw ValidationError("entropy: repeated axis '" + n + "'");
        seen[id] = true;
    }
    // Entropy is permutation-invariant, so the full-axis case needs no marginal.
    if (axes.size() == d.rank()) return entropy_of_masses(d.probs());
    return entropy_of_masses(d.marginal(axes).probs());
}

double entropy(const JointDistribution& d, std::initializer_list<std::string> axes) {
    std::vector<std::string> v(axes);
    return entropy(d, std::span<const std::string>(v));
}

double entropy(const JointDistribution& d) {
    return entropy_of_masses(d.probs());
}

double conditional_entropy(const JointDistribution& d,
                           std::span<const std::string> target,
                           std::span<const std::string> given) {
    if (target.empty() || given.empty())
        throw ValidationError("conditional_entropy: empty axis subset");
    for (const auto& t : target) {
        for (const auto& g : given) {
            if (t == g) throw ValidationError("conditional_entropy: axis '" + t + "' in both target and given");
        }
    }
    auto both = concat(target, given);
    return entropy(d, both) - entropy(d, given);
}

double conditional_entropy(const JointDistribution& d,
                           std::initializer_list<std::string> target,
                           std::initializer_list<std::string> given) {
    std::vector<std::string> t(target), g(given);
    return conditional_entropy(d, std::span<const std::string>(t), std::span<const std::string>(g));
}

double conditional_mutual_information(const JointDistribution& d,
                                      const std::string& a, const std::string& b,
                                      const std::string& given) {
    std::vector<std::string> ta{a}, gb{b, given}, gg{given};
    return conditional_entropy(d, std::span<const std::string>(ta), std::span<const std::string>(gg)) -
           conditional_entropy(d, std::span<const std::string>(ta), std::span<const std::string>(gb));
}

double kl_divergence_raw(std::span<const double> p, std::span<const double> q) {
    double d = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] > 0.0) {
            if (q[i] <= 0.0) return kInfinity;
            d += p[i] * std::log(p[i] / q[i]);
        }
    }
    return std::max(d, 0.0);
}

double kl_divergence(const JointDistribution& p, const JointDistribution& q) {
    if (!p.same_shape(q)) throw ValidationError("kl_divergence: shape mismatch");
    return kl_divergence_raw(p.probs(), q.probs());
}

double total_variation(const JointDistribution& p, const JointDistribution& q) {
    if (!p.same_shape(q)) throw ValidationError("total_variation: shape mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
    return 0.5 * s;
}

double binary_entropy(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("binary_entropy: argument outside [0,1]");
    double h = 0.0;
    if (p > 0.0) h -= p * std::log(p);
    if (p < 1.0) h -= (1.0 - p) * std::log(1.0 - p);
    return std::max(h, 0.0);
}

double binary_kl(double p, double q) {
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("binary_kl: first argument outside [0,1]");
    if (!(q >= 0.0 && q <= 1.0)) throw ValidationError("binary_kl: second argument outside [0,1]");
    double d = 0.0;
    if (p > 0.0) {
        if (q <= 0.0) return kInfinity;
        d += p * std::log(p / q);
    }
    if (p < 1.0) {
        if (q >= 1.0) return kInfinity;
        d += (1.0 - p) * std::log((1.0 - p) / (1.0 - q));
    }
    return std::max(d, 0.0);
}

}  // namespace dht
