#include "topo/dataset.hpp"

#include "topo/errors.hpp"

#include <string>

namespace topo {

void ConditionedDataset::validate() const {
    if (axes.empty()) throw ParameterError("dataset has no axes");
    if (provenance != "generated" && provenance != "real") {
        throw ParameterError("provenance must be 'generated' or 'real', got '" + provenance + "'");
    }
    std::vector<bool> seen(axes.size(), false);
    const std::size_t d = axes.front().values.empty() ? 0 : axes.front().values.front().dim();
    for (const auto& axis : axes) {
        if (axis.id >= axes.size() || seen[axis.id]) {
            throw ParameterError("axis ids must be a permutation of 0.." + std::to_string(axes.size() - 1));
        }
        seen[axis.id] = true;
        if (axis.values.size() < 2) {
            throw ParameterError("axis '" + axis.name + "' needs at least 2 conditioning values");
        }
        for (const auto& cloud : axis.values) {
            if (cloud.dim() != d) {
                throw ShapeError("axis '" + axis.name + "' has a " + std::to_string(cloud.dim()) +
                                 "-d cloud, expected " + std::to_string(d));
            }
        }
    }
}

std::size_t ConditionedDataset::dim() const {
    return axes.empty() || axes.front().values.empty() ? 0 : axes.front().values.front().dim();
}

}  // namespace topo
