#pragma once

#include "topo/dataset.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace topo {

enum class Family { cylinder, cone, ellipsoid, mini_dsprites };
enum class Entanglement { none, spiral, threshold, mixing };

// Ground-truth generators. Latents:
//   cylinder, cone   z0 angle in [0, 2pi), z1 height in [-1, 1] (cone: [0.25, 1])
//   ellipsoid        z0 azimuth, z1 polar angle, z2 radial scale
//   mini_dsprites    z0, z1, z2 in [0, 1) driving disk x (wrapping), y, scale
// Entanglements: spiral turns the angle by omega * height and lifts the
// height by `lift` per full turn, so neither conditioned family keeps its
// disentangled topology; threshold does the same only above the median
// height; mixing (mini_dsprites) drives every factor by two latents.
struct SynthSpec {
    Family family = Family::cylinder;
    Entanglement entanglement = Entanglement::none;
    std::size_t n_samples = 512;
    std::size_t n_values = 8;
    double noise_sigma = 0.01;
    std::uint64_t seed = 0;
    double omega = 4.0;
    double lift = 0.5;
    bool resample = false;  // fresh base latents for every conditioning value
    // "real" conditions on the true factors, as for a labelled dataset, instead of
    // on the generator's latents; the entanglement is then irrelevant.
    std::string provenance = "generated";

    void validate() const;
};

Family parse_family(const std::string& s);
Entanglement parse_entanglement(const std::string& s);
std::string to_string(Family f);
std::string to_string(Entanglement e);

ConditionedDataset generate(const SynthSpec& spec);

// Per axis, the true factor(s) it controls, e.g. "angle" or
// "mixed(angle,height)".
std::vector<std::string> ground_truth_axes(const SynthSpec& spec);

// 16x16 grayscale disk with horizontal wrap-around, flattened row-major.
// x, y, scale in [0, 1].
std::vector<double> render_disk(double x, double y, double scale);

}  // namespace topo
