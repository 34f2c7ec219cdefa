// Linear families of distributions cut out by fixed-marginal constraints,
// optionally restricted to a support mask. These are the feasible sets of
// the divergence minimizations solved by i_project.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dht/joint_distribution.hpp"

namespace dht {

struct MarginalConstraint {
    std::vector<std::string> axes;
    JointDistribution target;
};

class LinearFamily {
public:
    /// Throws ValidationError when a target shape disagrees with the base
    /// shape or two targets disagree on a shared sub-marginal.
    LinearFamily(std::vector<Axis> base_shape,
                 std::vector<MarginalConstraint> constraints,
                 std::optional<std::vector<std::uint8_t>> support_mask = std::nullopt);

    const std::vector<Axis>& base_shape() const { return shape_; }
    const std::vector<MarginalConstraint>& constraints() const { return constraints_; }
    const std::optional<std::vector<std::uint8_t>>& support_mask() const { return mask_; }
    std::size_t cell_count() const { return cells_; }

private:
    std::vector<Axis> shape_;
    std::vector<MarginalConstraint> constraints_;
    std::optional<std::vector<std::uint8_t>> mask_;
    std::size_t cells_;
};

}  // namespace dht
