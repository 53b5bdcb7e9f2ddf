#pragma once

#include "topo/geometry.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace topo {

// One conditioning axis: a latent dimension (generated data) or a factor of
// variation (real data). values[k] holds samples with the axis fixed at its
// k-th value. `id` is the axis's stable index; it keys random streams, so
// reordering axes while keeping ids reorders results without changing them.
struct ConditionedAxis {
    std::size_t id = 0;
    std::string name;
    std::vector<PointCloud> values;
};

struct ConditionedDataset {
    std::vector<ConditionedAxis> axes;
    std::string provenance = "generated";  // "generated" or "real"
    std::string embedding_kind = "raw";

    // Throws ParameterError/ShapeError unless there is at least one axis,
    // every axis has >= 2 values, all clouds share a dimension and axis ids
    // are a permutation of 0..axes.size()-1.
    void validate() const;
    std::size_t dim() const;
};

}  // namespace topo
