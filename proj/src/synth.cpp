#include "topo/synth.hpp"

#include "topo/errors.hpp"
#include "topo/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace topo {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kCanvas = 16;

struct Range {
    double lo, hi;
};

std::vector<Range> latent_ranges(const SynthSpec& spec) {
    switch (spec.family) {
        case Family::cylinder: return {{0.0, kTwoPi}, {-1.0, 1.0}};
        case Family::cone: return {{0.0, kTwoPi}, {0.25, 1.0}};
        case Family::ellipsoid: return {{0.0, kTwoPi}, {0.15 * std::numbers::pi, 0.85 * std::numbers::pi}, {0.8, 1.2}};
        case Family::mini_dsprites: return {{0.0, 1.0}, {0.0, 1.0}, {0.0, 1.0}};
    }
    throw ParameterError("unknown family");
}

bool entangled_at(const SynthSpec& spec, double height, const Range& r) {
    if (spec.provenance == "real") return false;
    if (spec.entanglement == Entanglement::spiral) return true;
    if (spec.entanglement == Entanglement::threshold) return height > 0.5 * (r.lo + r.hi);
    return false;
}

// Maps one latent vector to the ambient space (before noise).
void embed(const SynthSpec& spec, const std::vector<Range>& ranges, const double* z, double* out) {
    switch (spec.family) {
        case Family::cylinder:
        case Family::cone: {
            double angle = z[0], height = z[1];
            if (entangled_at(spec, z[1], ranges[1])) {
                const double mid = spec.entanglement == Entanglement::threshold ? 0.5 * (ranges[1].lo + ranges[1].hi) : 0.0;
                angle += spec.omega * (z[1] - mid);
                height += spec.lift * z[0] / kTwoPi;
            }
            const double radius = spec.family == Family::cone ? z[1] : 1.0;
            out[0] = radius * std::cos(angle);
            out[1] = radius * std::sin(angle);
            out[2] = height;
            return;
        }
        case Family::ellipsoid: {
            double azimuth = z[0], polar = z[1];
            if (entangled_at(spec, z[1], ranges[1])) {
                const double mid = 0.5 * (ranges[1].lo + ranges[1].hi);
                azimuth += spec.omega * (z[1] - (spec.entanglement == Entanglement::threshold ? mid : 0.0));
                polar += spec.lift * (ranges[1].hi - ranges[1].lo) * z[0] / kTwoPi;
            }
            out[0] = 2.0 * z[2] * std::sin(polar) * std::cos(azimuth);
            out[1] = 1.5 * z[2] * std::sin(polar) * std::sin(azimuth);
            out[2] = z[2] * std::cos(polar);
            return;
        }
        case Family::mini_dsprites: {
            double x = z[0], y = z[1], scale = z[2];
            if (spec.provenance != "real" && spec.entanglement == Entanglement::mixing) {
                x = z[0] + z[1];
                x -= std::floor(x);
                y = 0.5 * (z[1] + z[2]);
                scale = 0.5 * (z[2] + z[0]);
            }
            const auto img = render_disk(x, y, scale);
            std::copy(img.begin(), img.end(), out);
            return;
        }
    }
}

std::size_t ambient_dim(Family f) { return f == Family::mini_dsprites ? kCanvas * kCanvas : 3; }

}  // namespace

void SynthSpec::validate() const {
    if (n_samples < 2) throw ParameterError("n_samples must be at least 2");
    if (n_values < 2) throw ParameterError("n_values must be at least 2");
    if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) throw ParameterError("noise_sigma must be finite and >= 0");
    if (!std::isfinite(omega) || !std::isfinite(lift)) throw ParameterError("omega and lift must be finite");
    if (provenance != "generated" && provenance != "real") throw ParameterError("provenance must be generated or real");
    const bool planar = family != Family::mini_dsprites;
    if (entanglement == Entanglement::mixing && planar) {
        throw ParameterError("mixing entanglement applies to mini_dsprites only");
    }
    if ((entanglement == Entanglement::spiral || entanglement == Entanglement::threshold) && !planar) {
        throw ParameterError("spiral and threshold entanglement apply to cylinder, cone and ellipsoid");
    }
}

Family parse_family(const std::string& s) {
    if (s == "cylinder") return Family::cylinder;
    if (s == "cone") return Family::cone;
    if (s == "ellipsoid") return Family::ellipsoid;
    if (s == "mini_dsprites") return Family::mini_dsprites;
    throw ParameterError("unknown family '" + s + "'");
}

Entanglement parse_entanglement(const std::string& s) {
    if (s == "none") return Entanglement::none;
    if (s == "spiral") return Entanglement::spiral;
    if (s == "threshold") return Entanglement::threshold;
    if (s == "mixing") return Entanglement::mixing;
    throw ParameterError("unknown entanglement '" + s + "'");
}

std::string to_string(Family f) {
    switch (f) {
        case Family::cylinder: return "cylinder";
        case Family::cone: return "cone";
        case Family::ellipsoid: return "ellipsoid";
        case Family::mini_dsprites: return "mini_dsprites";
    }
    return "?";
}

std::string to_string(Entanglement e) {
    switch (e) {
        case Entanglement::none: return "none";
        case Entanglement::spiral: return "spiral";
        case Entanglement::threshold: return "threshold";
        case Entanglement::mixing: return "mixing";
    }
    return "?";
}

std::vector<double> render_disk(double x, double y, double scale) {
    const double cx = x * kCanvas;
    const double cy = 5.0 + 6.0 * y;
    const double radius = 2.0 + 1.5 * scale;
    std::vector<double> img(kCanvas * kCanvas);
    for (int i = 0; i < kCanvas; ++i) {
        for (int j = 0; j < kCanvas; ++j) {
            double dx = std::abs(j + 0.5 - cx);
            dx = std::fmod(dx, static_cast<double>(kCanvas));
            dx = std::min(dx, kCanvas - dx);
            const double dy = i + 0.5 - cy;
            const double d = std::sqrt(dx * dx + dy * dy);
            img[static_cast<std::size_t>(i * kCanvas + j)] = std::clamp(radius - d + 0.5, 0.0, 1.0);
        }
    }
    return img;
}

ConditionedDataset generate(const SynthSpec& spec) {
    spec.validate();
    const auto ranges = latent_ranges(spec);
    const std::size_t dz = ranges.size();
    const std::size_t dim = ambient_dim(spec.family);

    auto draw_latents = [&](std::uint64_t key) {
        CounterRng rng(key);
        std::vector<double> z(spec.n_samples * dz);
        for (std::size_t i = 0; i < spec.n_samples; ++i) {
            for (std::size_t d = 0; d < dz; ++d) z[i * dz + d] = rng.uniform(ranges[d].lo, ranges[d].hi);
        }
        return z;
    };
    const std::vector<double> base = draw_latents(derive_seed(spec.seed, {0}));
    const auto names = ground_truth_axes(spec);

    ConditionedDataset ds;
    ds.provenance = spec.provenance;
    ds.embedding_kind = spec.family == Family::mini_dsprites ? "flatten-pixels" : "raw";
    for (std::size_t d = 0; d < dz; ++d) {
        ConditionedAxis axis;
        axis.id = d;
        axis.name = spec.provenance == "real" ? names[d] : "z" + std::to_string(d);
        CounterRng value_rng(derive_seed(spec.seed, {1, d}));
        for (std::size_t k = 0; k < spec.n_values; ++k) {
            const double value = value_rng.uniform(ranges[d].lo, ranges[d].hi);
            std::vector<double> z = spec.resample ? draw_latents(derive_seed(spec.seed, {2, d, k})) : base;
            for (std::size_t i = 0; i < spec.n_samples; ++i) z[i * dz + d] = value;

            RowMatrix points(static_cast<Eigen::Index>(spec.n_samples), static_cast<Eigen::Index>(dim));
            CounterRng noise(derive_seed(spec.seed, {3, d, k}));
            for (std::size_t i = 0; i < spec.n_samples; ++i) {
                double* row = points.data() + i * dim;
                embed(spec, ranges, z.data() + i * dz, row);
                if (spec.noise_sigma > 0.0) {
                    for (std::size_t c = 0; c < dim; ++c) row[c] += spec.noise_sigma * noise.normal();
                }
            }
            axis.values.emplace_back(std::move(points));
        }
        ds.axes.push_back(std::move(axis));
    }
    return ds;
}

std::vector<std::string> ground_truth_axes(const SynthSpec& spec) {
    const bool real = spec.provenance == "real";
    switch (spec.family) {
        case Family::cylinder:
        case Family::cone:
            if (!real && spec.entanglement != Entanglement::none) return {"mixed(angle,height)", "mixed(angle,height)"};
            return {"angle", "height"};
        case Family::ellipsoid:
            if (!real && spec.entanglement != Entanglement::none) return {"mixed(azimuth,polar)", "mixed(azimuth,polar)", "radius"};
            return {"azimuth", "polar", "radius"};
        case Family::mini_dsprites:
            if (!real && spec.entanglement == Entanglement::mixing) return {"mixed(x,scale)", "mixed(x,y)", "mixed(y,scale)"};
            return {"x", "y", "scale"};
    }
    return {};
}

}  // namespace topo
