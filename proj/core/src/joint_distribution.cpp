#include "dht/joint_distribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace dht {

namespace {

std::vector<std::size_t> make_strides(const std::vector<Axis>& axes) {
    std::vector<std::size_t> strides(axes.size(), 1);
    for (std::size_t i = axes.size(); i-- > 1;) {
        strides[i - 1] = strides[i] * axes[i].card;
    }
    return strides;
}

}  // namespace

JointDistribution::JointDistribution(std::vector<Axis> axes, std::vector<double> probs)
    : axes_(std::move(axes)), probs_(std::move(probs)), strides_(make_strides(axes_)) {
    if (axes_.empty()) throw ValidationError("JointDistribution: no axes given");
    std::size_t expected = 1;
    for (const auto& ax : axes_) {
        if (ax.card == 0) throw ValidationError("JointDistribution: axis '" + ax.name + "' has cardinality 0");
        expected *= ax.card;
    }
    for (std::size_t i = 0; i < axes_.size(); ++i) {
        for (std::size_t j = i + 1; j < axes_.size(); ++j) {
            if (axes_[i].name == axes_[j].name)
                throw ValidationError("JointDistribution: duplicate axis name '" + axes_[i].name + "'");
        }
    }
    if (probs_.size() != expected) {
        std::ostringstream os;
        os << "JointDistribution: tensor has " << probs_.size() << " entries, shape requires " << expected;
        throw ValidationError(os.str());
    }
    double sum = 0.0;
    for (double v : probs_) {
        if (!(v >= 0.0)) throw ValidationError("JointDistribution: negative or NaN probability entry");
        if (v > 1.0 + kProbSumTol) throw ValidationError("JointDistribution: probability entry exceeds 1");
        sum += v;
    }
    if (std::abs(sum - 1.0) > kProbSumTol) {
        std::ostringstream os;
        os << "JointDistribution: entries sum to " << sum << ", not 1 within " << kProbSumTol;
        throw ValidationError(os.str());
    }
    // Deviation below tolerance: renormalize so downstream identities hold.
    // Sums already within 1e-13 of 1 are left untouched; dividing by the sum
    // always lands inside that window for the tensor sizes this library
    // handles, so construction is idempotent and serialization round-trips
    // are entrywise exact.
    if (std::abs(sum - 1.0) > 1e-13 && sum > 0.0) {
        for (double& v : probs_) v /= sum;
    }
}

JointDistribution JointDistribution::from_matrix(std::string_view row_axis,
                                                 std::string_view col_axis,
                                                 const std::vector<std::vector<double>>& rows) {
    if (rows.empty() || rows.front().empty())
        throw ValidationError("JointDistribution::from_matrix: empty matrix");
    const std::size_t cols = rows.front().size();
    std::vector<double> flat;
    flat.reserve(rows.size() * cols);
    for (const auto& r : rows) {
        if (r.size() != cols) throw ValidationError("JointDistribution::from_matrix: ragged rows");
        flat.insert(flat.end(), r.begin(), r.end());
    }
    return JointDistribution({Axis{std::string(row_axis), rows.size()}, Axis{std::string(col_axis), cols}},
                             std::move(flat));
}

std::size_t JointDistribution::axis_index(std::string_view name) const {
    for (std::size_t i = 0; i < axes_.size(); ++i) {
        if (axes_[i].name == name) return i;
    }
    throw ValidationError("unknown axis name '" + std::string(name) + "'");
}

double JointDistribution::at(std::initializer_list<std::size_t> idx) const {
    std::vector<std::size_t> v(idx);
    return probs_[flat_index(v)];
}

std::size_t JointDistribution::flat_index(std::span<const std::size_t> idx) const {
    if (idx.size() != axes_.size()) throw ValidationError("flat_index: wrong index arity");
    std::size_t flat = 0;
    for (std::size_t i = 0; i < idx.size(); ++i) {
        if (idx[i] >= axes_[i].card) throw ValidationError("flat_index: index out of range on axis '" + axes_[i].name + "'");
        flat += idx[i] * strides_[i];
    }
    return flat;
}

void JointDistribution::unflatten(std::size_t flat, std::span<std::size_t> idx) const {
    for (std::size_t i = 0; i < axes_.size(); ++i) {
        idx[i] = (flat / strides_[i]) % axes_[i].card;
    }
}

JointDistribution JointDistribution::marginal_by_index(std::span<const std::size_t> axis_ids) const {
    if (axis_ids.empty()) throw ValidationError("marginal: empty axis subset");
    std::vector<Axis> out_axes;
    std::vector<std::size_t> out_strides;
    std::vector<bool> seen(axes_.size(), false);
    out_axes.reserve(axis_ids.size());
    std::size_t out_size = 1;
    for (std::size_t id : axis_ids) {
        if (id >= axes_.size()) throw ValidationError("marginal: axis id out of range");
        if (seen[id]) throw ValidationError("marginal: repeated axis '" + axes_[id].name + "'");
        seen[id] = true;
        out_axes.push_back(axes_[id]);
        out_size *= axes_[id].card;
    }
    std::vector<std::size_t> out_stride_per_axis(axis_ids.size(), 1);
    for (std::size_t i = axis_ids.size(); i-- > 1;) {
        out_stride_per_axis[i - 1] = out_stride_per_axis[i] * axes_[axis_ids[i]].card;
    }

    std::vector<double> out(out_size, 0.0);
    std::vector<std::size_t> idx(axes_.size());
    for (std::size_t flat = 0; flat < probs_.size(); ++flat) {
        unflatten(flat, idx);
        std::size_t o = 0;
        for (std::size_t i = 0; i < axis_ids.size(); ++i) {
            o += idx[axis_ids[i]] * out_stride_per_axis[i];
        }
        out[o] += probs_[flat];
    }
    return JointDistribution(std::move(out_axes), std::move(out));
}

JointDistribution JointDistribution::marginal(std::span<const std::string> axis_names) const {
    std::vector<std::size_t> ids;
    ids.reserve(axis_names.size());
    for (const auto& n : axis_names) ids.push_back(axis_index(n));
    return marginal_by_index(ids);
}

JointDistribution JointDistribution::marginal(std::initializer_list<std::string> axis_names) const {
    std::vector<std::string> v(axis_names);
    return marginal(std::span<const std::string>(v));
}

bool JointDistribution::same_shape(const JointDistribution& other) const {
    if (axes_.size() != other.axes_.size()) return false;
    for (std::size_t i = 0; i < axes_.size(); ++i) {
        if (axes_[i].name != other.axes_[i].name || axes_[i].card != other.axes_[i].card) return false;
    }
    return true;
}

bool JointDistribution::full_support(double eps) const {
    return std::all_of(probs_.begin(), probs_.end(), [eps](double v) { return v > eps; });
}

TestChannel::TestChannel(std::size_t input_card, std::size_t output_card, std::vector<double> probs)
    : input_card_(input_card), output_card_(output_card), probs_(std::move(probs)) {
    if (input_card_ == 0 || output_card_ == 0)
        throw ValidationError("TestChannel: zero cardinality");
    if (probs_.size() != input_card_ * output_card_)
        throw ValidationError("TestChannel: matrix size does not match cardinalities");
    for (std::size_t x = 0; x < input_card_; ++x) {
        double sum = 0.0;
        for (std::size_t u = 0; u < output_card_; ++u) {
            double v = probs_[x * output_card_ + u];
            if (!(v >= 0.0)) throw ValidationError("TestChannel: negative or NaN entry");
            sum += v;
        }
        if (std::abs(sum - 1.0) > kProbSumTol)
            throw ValidationError("TestChannel: row " + std::to_string(x) + " does not sum to 1");
        if (sum != 1.0) {
            for (std::size_t u = 0; u < output_card_; ++u) probs_[x * output_card_ + u] /= sum;
        }
    }
}

TestChannel TestChannel::identity(std::size_t card) {
    std::vector<double> m(card * card, 0.0);
    for (std::size_t x = 0; x < card; ++x) m[x * card + x] = 1.0;
    return TestChannel(card, card, std::move(m));
}

TestChannel TestChannel::constant(std::size_t input_card) {
    return TestChannel(input_card, 1, std::vector<double>(input_card, 1.0));
}

TestChannel TestChannel::deterministic(std::span<const std::size_t> map, std::size_t output_card) {
    std::vector<double> m(map.size() * output_card, 0.0);
    for (std::size_t x = 0; x < map.size(); ++x) {
        if (map[x] >= output_card) throw ValidationError("TestChannel::deterministic: image out of range");
        m[x * output_card + map[x]] = 1.0;
    }
    return TestChannel(map.size(), output_card, std::move(m));
}

bool TestChannel::is_deterministic(double eps) const {
    for (std::size_t x = 0; x < input_card_; ++x) {
        std::size_t ones = 0;
        for (std::size_t u = 0; u < output_card_; ++u) {
            double v = (*this)(u, x);
            if (v > 1.0 - eps - kProbSumTol) ++ones;
            else if (v > eps) return false;
        }
        if (ones != 1) return false;
    }
    return true;
}

bool TestChannel::is_permutation() const {
    if (input_card_ != output_card_ || !is_deterministic()) return false;
    std::vector<bool> hit(output_card_, false);
    for (std::size_t x = 0; x < input_card_; ++x) {
        for (std::size_t u = 0; u < output_card_; ++u) {
            if ((*this)(u, x) > 0.5) {
                if (hit[u]) return false;
                hit[u] = true;
            }
        }
    }
    return true;
}

JointDistribution compose(const JointDistribution& p, const TestChannel& w,
                          std::size_t input_axis, std::string_view new_axis) {
    if (input_axis >= p.rank()) throw ValidationError("compose: input axis out of range");
    if (p.card(input_axis) != w.input_card())
        throw ValidationError("compose: channel input cardinality does not match axis '" +
                              p.axes()[input_axis].name + "'");
    std::vector<Axis> axes;
    axes.reserve(p.rank() + 1);
    axes.push_back(Axis{std::string(new_axis), w.output_card()});
    for (const auto& ax : p.axes()) axes.push_back(ax);

    std::vector<double> out(w.output_card() * p.size());
    std::vector<std::size_t> idx(p.rank());
    for (std::size_t u = 0; u < w.output_card(); ++u) {
        for (std::size_t flat = 0; flat < p.size(); ++flat) {
            p.unflatten(flat, idx);
            out[u * p.size() + flat] = w(u, idx[input_axis]) * p[flat];
        }
    }
    return JointDistribution(std::move(axes), std::move(out));
}

HypothesisPair::HypothesisPair(JointDistribution null_hyp, JointDistribution alt_hyp)
    : p(std::move(null_hyp)), q(std::move(alt_hyp)) {
    if (!p.same_shape(q))
        throw ValidationError("HypothesisPair: null and alternative have different alphabet shape");
}

void HypothesisPair::require_full_support() const {
    if (!full_support())
        throw ValidationError("HypothesisPair: full support required for this operation");
}

}  // namespace dht
