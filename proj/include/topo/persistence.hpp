#pragma once

#include "topo/geometry.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace topo {

// A vertex, edge or triangle on landmark indices (sorted ascending; unused
// slots are ignored) together with the filtration value where it appears.
struct Simplex {
    std::array<std::uint32_t, 3> vertices{};
    std::uint8_t dim = 0;
    double alpha = 0.0;

    std::size_t size() const noexcept { return static_cast<std::size_t>(dim) + 1; }
};

// Orders by (alpha, dim, lexicographic vertices).
bool filtration_less(const Simplex& a, const Simplex& b) noexcept;

struct Filtration {
    std::vector<Simplex> simplices;
    std::size_t n_vertices = 0;
    double alpha_max = 0.0;

    // Throws InvalidFiltrationError when alphas are unsorted, outside
    // [0, alpha_max], or a simplex precedes one of its faces.
    void validate() const;
};

struct Interval {
    double birth = 0.0;
    double death = 0.0;  // essential classes are capped at alpha_max
    int dim = 0;

    double length() const noexcept { return death - birth; }
    friend bool operator==(const Interval&, const Interval&) = default;
};

struct Barcode {
    std::vector<Interval> intervals;
    double alpha_max = 0.0;
};

// Relaxed weak-witness filtration truncated at triangles. For a witness w
// and simplex s, w certifies s at
//     max_{l in s} d(w, l) - d(w, nearest landmark outside s)
// (the nearest landmark overall when s spans every landmark). A simplex
// enters at the smallest such value over witnesses, raised to the entry
// value of its faces; anything entering above alpha_max is dropped.
// d_wl is witnesses x landmarks.
Filtration build_witness_filtration(const DistanceMatrix& d_wl, double alpha_max);

// Persistence over Z/2 in dimensions 0 and 1 by column reduction with
// clearing. Zero-length pairs are reported; callers filter on length().
Barcode compute_barcode(const Filtration& filtration);

struct BettiStep {
    double from = 0.0;
    double to = 0.0;
    std::size_t count = 0;
};

// Piecewise-constant number of `dim` intervals containing alpha, as
// half-open steps covering [0, alpha_max). Adjacent equal counts are merged.
std::vector<BettiStep> betti_curve(const Barcode& barcode, int dim, double alpha_max);

}  // namespace topo
