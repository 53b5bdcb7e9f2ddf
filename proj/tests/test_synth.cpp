#include "doctest.h"

#include "topo/errors.hpp"
#include "topo/synth.hpp"

#include <cmath>
#include <numbers>

using namespace topo;

namespace {

SynthSpec spec(Family f, Entanglement e = Entanglement::none) {
    SynthSpec s;
    s.family = f;
    s.entanglement = e;
    s.n_samples = 128;
    s.n_values = 4;
    s.seed = 5;
    return s;
}

}  // namespace

TEST_SUITE("synth") {
    TEST_CASE("shape of generated datasets") {
        for (auto f : {Family::cylinder, Family::cone, Family::ellipsoid, Family::mini_dsprites}) {
            CAPTURE(to_string(f));
            const auto d = generate(spec(f));
            CHECK_NOTHROW(d.validate());
            const std::size_t axes = f == Family::cylinder || f == Family::cone ? 2 : 3;
            REQUIRE(d.axes.size() == axes);
            for (const auto& a : d.axes) {
                CHECK(a.values.size() == 4);
                for (const auto& c : a.values) CHECK(c.n_points() == 128);
            }
            CHECK(d.dim() == (f == Family::mini_dsprites ? 256u : 3u));
            CHECK(ground_truth_axes(spec(f)).size() == axes);
        }
    }

    TEST_CASE("cylinder clouds lie on the unit cylinder") {
        const auto d = generate(spec(Family::cylinder));
        for (const auto& a : d.axes) {
            for (const auto& c : a.values) {
                const auto& p = c.points();
                for (Eigen::Index i = 0; i < p.rows(); ++i) {
                    const double r = std::hypot(p(i, 0), p(i, 1));
                    CHECK(std::abs(r - 1.0) < 4.0 * std::sqrt(2.0) * 0.01);
                }
            }
        }
    }

    TEST_CASE("fixing the height leaves a full circle, fixing the angle a segment") {
        const auto d = generate(spec(Family::cylinder));
        // Angle axis first: every point of one cloud shares an angle.
        const auto& seg = d.axes[0].values[1].points();
        const auto& ring = d.axes[1].values[1].points();
        double seg_spread = 0.0, z_spread = 0.0;
        int quadrants[4] = {0, 0, 0, 0};
        const double a0 = std::atan2(seg(0, 1), seg(0, 0));
        for (Eigen::Index i = 0; i < seg.rows(); ++i) {
            seg_spread = std::max(seg_spread, std::abs(std::remainder(std::atan2(seg(i, 1), seg(i, 0)) - a0,
                                                                       2 * std::numbers::pi)));
            z_spread = std::max(z_spread, std::abs(ring(i, 2) - ring(0, 2)));
            const double t = std::atan2(ring(i, 1), ring(i, 0)) + std::numbers::pi;
            ++quadrants[std::min(3, static_cast<int>(t / (std::numbers::pi / 2)))];
        }
        CHECK(seg_spread < 0.1);
        CHECK(z_spread < 0.1);
        for (int q : quadrants) CHECK(q > 10);
    }

    TEST_CASE("deterministic in the seed") {
        auto s = spec(Family::cone, Entanglement::spiral);
        const auto a = generate(s);
        const auto b = generate(s);
        CHECK(a.axes[1].values[2].points() == b.axes[1].values[2].points());
        s.seed = 6;
        const auto c = generate(s);
        CHECK(a.axes[1].values[2].points() != c.axes[1].values[2].points());
    }

    TEST_CASE("ground truth names") {
        CHECK(ground_truth_axes(spec(Family::cylinder)) == std::vector<std::string>{"angle", "height"});
        const auto mixed = ground_truth_axes(spec(Family::cylinder, Entanglement::spiral));
        CHECK(mixed[0].rfind("mixed(", 0) == 0);
        auto real = spec(Family::mini_dsprites, Entanglement::mixing);
        real.provenance = "real";
        CHECK(ground_truth_axes(real) == std::vector<std::string>{"x", "y", "scale"});
    }

    TEST_CASE("disk renderer") {
        const auto img = render_disk(0.5, 0.5, 0.5);
        REQUIRE(img.size() == 256);
        double mass = 0.0;
        for (double v : img) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
            mass += v;
        }
        CHECK(mass == doctest::Approx(std::numbers::pi * 2.75 * 2.75).epsilon(0.15));
        // Wrap-around: a disk at the right edge spills onto column 0.
        const auto edge = render_disk(0.999, 0.5, 1.0);
        double left = 0.0;
        for (int r = 0; r < 16; ++r) left += edge[static_cast<std::size_t>(r * 16)];
        CHECK(left > 0.5);
    }

    TEST_CASE("parsing and validation") {
        CHECK(parse_family("mini_dsprites") == Family::mini_dsprites);
        CHECK(parse_entanglement("spiral") == Entanglement::spiral);
        CHECK_THROWS_AS(parse_family("torus"), ParameterError);
        auto s = spec(Family::cylinder, Entanglement::mixing);
        CHECK_THROWS_AS(s.validate(), ParameterError);
        s = spec(Family::cylinder);
        s.n_values = 1;
        CHECK_THROWS_AS(s.validate(), ParameterError);
        s = spec(Family::cylinder);
        s.noise_sigma = -1.0;
        CHECK_THROWS_AS(s.validate(), ParameterError);
    }
}
