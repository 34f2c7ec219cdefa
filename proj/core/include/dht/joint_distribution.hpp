// Dense probability tensors over small named finite alphabets, plus the
// test-channel and hypothesis-pair types built on top of them. All values
// are immutable after construction and all operations are pure functions,
// so instances can be shared freely across threads.
#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dht/errors.hpp"

namespace dht {

struct Axis {
    std::string name;
    std::size_t card = 0;
};

// Probability mass sums must match 1 within this absolute tolerance;
// smaller deviations are renormalized, larger ones rejected.
inline constexpr double kProbSumTol = 1e-12;

/// A joint distribution over the product of named finite axes, stored as a
/// dense row-major tensor in axis order.
class JointDistribution {
public:
    JointDistribution(std::vector<Axis> axes, std::vector<double> probs);

    /// Build a two-axis distribution from nested rows.
    static JointDistribution from_matrix(std::string_view row_axis,
                                         std::string_view col_axis,
                                         const std::vector<std::vector<double>>& rows);

    const std::vector<Axis>& axes() const { return axes_; }
    std::size_t rank() const { return axes_.size(); }
    std::size_t size() const { return probs_.size(); }
    std::span<const double> probs() const { return probs_; }

    std::size_t card(std::size_t axis) const { return axes_[axis].card; }
    /// Index of a named axis; throws ValidationError for unknown names.
    std::size_t axis_index(std::string_view name) const;

    double operator[](std::size_t flat) const { return probs_[flat]; }
    double at(std::initializer_list<std::size_t> idx) const;

    std::size_t flat_index(std::span<const std::size_t> idx) const;
    void unflatten(std::size_t flat, std::span<std::size_t> idx) const;

    /// Marginal over the named axes, in the order requested.
    JointDistribution marginal(std::span<const std::string> axis_names) const;
    JointDistribution marginal(std::initializer_list<std::string> axis_names) const;
    JointDistribution marginal_by_index(std::span<const std::size_t> axis_ids) const;

    bool same_shape(const JointDistribution& other) const;
    bool full_support(double eps = 0.0) const;

private:
    std::vector<Axis> axes_;
    std::vector<double> probs_;
    std::vector<std::size_t> strides_;
};

/// Conditional distribution of an auxiliary symbol given an input symbol:
/// row x holds P(u|x) for u = 0..output_card-1. Rows are probability
/// vectors within kProbSumTol.
class TestChannel {
public:
    TestChannel(std::size_t input_card, std::size_t output_card, std::vector<double> probs);

    static TestChannel identity(std::size_t card);
    static TestChannel constant(std::size_t input_card);
    /// Deterministic channel u = map[x].
    static TestChannel deterministic(std::span<const std::size_t> map, std::size_t output_card);

    std::size_t input_card() const { return input_card_; }
    std::size_t output_card() const { return output_card_; }
    /// P(u|x)
    double operator()(std::size_t u, std::size_t x) const {
        return probs_[x * output_card_ + u];
    }
    std::span<const double> probs() const { return probs_; }

    bool is_deterministic(double eps = 0.0) const;
    /// Deterministic and bijective (a relabeling of the input alphabet).
    bool is_permutation() const;

private:
    std::size_t input_card_;
    std::size_t output_card_;
    std::vector<double> probs_;  // row-major [x][u]
};

/// Prepend an auxiliary axis distributed according to the channel applied to
/// `input_axis`: result(u, i...) = w(u | i[input_axis]) * p(i...).
JointDistribution compose(const JointDistribution& p, const TestChannel& w,
                          std::size_t input_axis = 0, std::string_view new_axis = "U");

/// A null/alternative pair over a common alphabet.
struct HypothesisPair {
    JointDistribution p;
    JointDistribution q;

    HypothesisPair(JointDistribution null_hyp, JointDistribution alt_hyp);

    bool full_support() const { return p.full_support() && q.full_support(); }
    void require_full_support() const;
};

}  // namespace dht
