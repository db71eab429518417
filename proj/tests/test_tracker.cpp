#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "rotsiam/synth.hpp"
#include "rotsiam/tracker.hpp"
#include "test_support.hpp"

using namespace rotsiam;
using rotsiam::testing::random_map;

namespace {

// Two-frame sequence of a textured elongated target on a flat background.
SequenceRecord one_step(MotionStep step, std::uint64_t seed = 5) {
    MotionScript ms;
    ms.canvas_width = ms.canvas_height = 360;
    ms.target = OrientedBox(180, 180, 40, 80, 0.0);
    ms.texture_cols = 4;
    ms.texture_rows = 8;
    ms.seed = seed;
    ms.steps = {step};
    return synth_sequence(ms);
}

FeaturePair random_pair(std::mt19937_64& rng, int c = 3) { return {random_map(c, 8, 8, rng), random_map(c, 6, 6, rng)}; }

}  // namespace

TEST(CandidateSet, DefaultFivePairs) {
    const auto c = candidate_set(TrackerConfig{});
    ASSERT_EQ(c.size(), 5u);
    EXPECT_DOUBLE_EQ(c[0].s, 1.0375);
    EXPECT_NEAR(c[1].s, 0.964, 5e-4);
    EXPECT_DOUBLE_EQ(c[1].s * 1.0375, 1.0);
    EXPECT_TRUE(c[2].is_identity());
    EXPECT_DOUBLE_EQ(c[3].a, kPi / 8);
    EXPECT_DOUBLE_EQ(c[4].a, -kPi / 8);
    for (int k : {0, 1}) {
        EXPECT_EQ(c[static_cast<std::size_t>(k)].a, 0.0);
        EXPECT_EQ(c[static_cast<std::size_t>(k)].penalty, 0.973);
    }
    for (int k : {3, 4}) {
        EXPECT_EQ(c[static_cast<std::size_t>(k)].s, 1.0);
        EXPECT_EQ(c[static_cast<std::size_t>(k)].penalty, 0.975);
    }
    EXPECT_EQ(c[2].penalty, 1.0);
}

TEST(CandidateSet, CountIsMPlusNMinusOne) {
    for (int M = 1; M <= 9; M += 2) {
        for (int N = 1; N <= 9; N += 2) {
            TrackerConfig cfg;
            cfg.M = M;
            cfg.N = N;
            const auto c = candidate_set(cfg);
            ASSERT_EQ(c.size(), static_cast<std::size_t>(M + N - 1));
            int identity = 0;
            for (const auto& k : c) {
                ASSERT_TRUE(k.s == 1.0 || k.a == 0.0);
                identity += k.is_identity();
            }
            ASSERT_EQ(identity, 1);
            cfg.angle_enabled = false;
            ASSERT_EQ(candidate_set(cfg).size(), static_cast<std::size_t>(M));
        }
    }
}

TEST(CandidateSet, EvenCountsRejected) {
    TrackerConfig cfg;
    cfg.M = 4;
    EXPECT_THROW(candidate_set(cfg), std::invalid_argument);
    cfg.M = 3;
    cfg.N = 0;
    EXPECT_THROW(candidate_set(cfg), std::invalid_argument);
}

TEST(Mask, TallPatterns) {
    const auto lo = make_mask(8, MaskOrientation::Tall, 2);
    for (int r = 0; r < 8; ++r) {
        for (int c = 0; c < 8; ++c) {
            const bool zero = c == 0 || c == 1 || c == 6 || c == 7;
            ASSERT_EQ(lo.at(r, c), zero ? 0.0 : 1.0);
        }
    }
    const auto hi = make_mask(6, MaskOrientation::Tall, 1);
    for (int r = 0; r < 6; ++r) {
        for (int c = 0; c < 6; ++c) ASSERT_EQ(hi.at(r, c), (c == 0 || c == 5) ? 0.0 : 1.0);
    }
}

TEST(Mask, WideIsTransposeOfTall) {
    for (auto [size, band] : {std::pair{8, 2}, std::pair{6, 1}}) {
        const auto t = make_mask(size, MaskOrientation::Tall, band), w = make_mask(size, MaskOrientation::Wide, band);
        for (int r = 0; r < size; ++r) {
            for (int c = 0; c < size; ++c) ASSERT_EQ(w.at(r, c), t.at(c, r));
        }
    }
    const auto none = make_mask(6, MaskOrientation::None, 1);
    for (double v : none.values) EXPECT_EQ(v, 1.0);
    EXPECT_THROW(make_mask(6, MaskOrientation::Tall, 3), std::invalid_argument);
}

TEST(Mask, AspectRatioGate) {
    EXPECT_EQ(mask_orientation(100, 200, 1.5), MaskOrientation::Tall);
    EXPECT_EQ(mask_orientation(160, 100, 1.5), MaskOrientation::Wide);
    EXPECT_EQ(mask_orientation(100, 100, 1.5), MaskOrientation::None);
    EXPECT_EQ(mask_orientation(100, 150, 1.5), MaskOrientation::None);  // strict
    EXPECT_EQ(mask_orientation(100, 151, 1.5), MaskOrientation::Tall);
}

TEST(Mask, ApplyHonoursLevelFlags) {
    std::mt19937_64 rng(1);
    const FeaturePair t = random_pair(rng);
    const MaskSet m{MaskOrientation::Tall, make_mask(8, MaskOrientation::Tall, 2), make_mask(6, MaskOrientation::Tall, 1)};
    TrackerConfig cfg;
    const FeaturePair out = apply_mask(t, m, cfg);
    EXPECT_EQ(out.lo, t.lo);  // lo passes through by default
    EXPECT_EQ(out.hi.at(1, 3, 0), 0.0);
    EXPECT_EQ(out.hi.at(1, 3, 2), t.hi.at(1, 3, 2));
    cfg.mask_lo = true;
    EXPECT_EQ(apply_mask(t, m, cfg).lo.at(0, 4, 7), 0.0);
}

TEST(TrackerInit, RejectsDegenerateBoxes) {
    const Tracker tr(TrackerConfig{});
    const Image frame(100, 100, 1, 0.5f);
    EXPECT_THROW(tr.init(frame, OrientedBox(50, 50, 1.0, 20)), std::invalid_argument);
    EXPECT_THROW(tr.init(frame, OrientedBox(50, 50, 20, 0.5)), std::invalid_argument);
    EXPECT_THROW(tr.init(frame, OrientedBox(50, 50, NAN, 20)), std::invalid_argument);
}

TEST(TrackerInit, MaskFollowsAspectAndSwitch) {
    const Image frame(200, 200, 1, 0.5f);
    TrackerConfig cfg;
    EXPECT_EQ(Tracker(cfg).init(frame, OrientedBox(100, 100, 20, 60)).mask->orientation, MaskOrientation::Tall);
    EXPECT_FALSE(Tracker(cfg).init(frame, OrientedBox(100, 100, 40, 50)).mask.has_value());
    cfg.mask_enabled = false;
    EXPECT_FALSE(Tracker(cfg).init(frame, OrientedBox(100, 100, 20, 60)).mask.has_value());
}

TEST(TemplateUpdate, FixedPointWhenTrackedEqualsFirst) {
    std::mt19937_64 rng(2);
    TrackerState st;
    st.first_template = st.moving_template = random_pair(rng);
    const TrackerConfig cfg;
    for (int i = 0; i < 10; ++i) {
        const FeaturePair t = update_template(st, st.first_template, cfg);
        for (std::size_t k = 0; k < t.lo.size(); ++k) ASSERT_EQ(t.lo.data()[k], st.first_template.lo.data()[k]);
    }
}

TEST(TemplateUpdate, ZeroRateFreezesTheMovingTemplate) {
    std::mt19937_64 rng(3);
    TrackerState st;
    st.first_template = st.moving_template = random_pair(rng);
    TrackerConfig cfg;
    cfg.lambda_U = 0.0;
    const FeaturePair before = st.moving_template;
    update_template(st, random_pair(rng), cfg);
    EXPECT_EQ(st.moving_template, before);
}

TEST(TemplateUpdate, FirstStepFromZero) {
    // First template zero, moving zero, tracked g: 0.5 * 0.006 * g.
    TrackerState st;
    st.first_template = st.moving_template = {FeatureMap(2, 8, 8), FeatureMap(2, 6, 6)};
    std::mt19937_64 rng(4);
    const FeaturePair g = random_pair(rng, 2);
    const FeaturePair t = update_template(st, g, TrackerConfig{});
    for (std::size_t k = 0; k < g.hi.size(); ++k) ASSERT_EQ(t.hi.data()[k], 0.003 * g.hi.data()[k]);
}

TEST(TemplateUpdate, ConstantInputFollowsGeometricClosedForm) {
    std::mt19937_64 rng(5);
    TrackerState st;
    st.first_template = st.moving_template = random_pair(rng);
    const FeaturePair f = st.first_template, g = random_pair(rng);
    const TrackerConfig cfg;
    FeaturePair t;
    for (int i = 0; i < 1000; ++i) t = update_template(st, g, cfg);
    const double decay = std::pow(1.0 - cfg.lambda_U, 1000);
    for (std::size_t k = 0; k < f.lo.size(); ++k) {
        const double m = g.lo.data()[k] + decay * (f.lo.data()[k] - g.lo.data()[k]);
        ASSERT_NEAR(t.lo.data()[k], cfg.lambda_S * f.lo.data()[k] + (1 - cfg.lambda_S) * m, 1e-10);
    }
}

TEST(TemplateUpdate, StaysInsideTheInputEnvelope) {
    std::mt19937_64 rng(6);
    TrackerState st;
    st.first_template = st.moving_template = random_pair(rng);  // entries in [-1, 1]
    const TrackerConfig cfg;
    for (int i = 0; i < 1000; ++i) {
        const FeaturePair t = update_template(st, random_pair(rng), cfg);
        for (double v : t.lo.data()) ASSERT_LE(std::abs(v), 1.0 + 1e-12);
        for (double v : t.hi.data()) ASSERT_LE(std::abs(v), 1.0 + 1e-12);
    }
}

TEST(TemplateUpdate, RejectsShapeMismatch) {
    std::mt19937_64 rng(7);
    TrackerState st;
    st.first_template = st.moving_template = random_pair(rng, 3);
    EXPECT_THROW(update_template(st, random_pair(rng, 2), TrackerConfig{}), std::invalid_argument);
}

TEST(TrackerBehaviour, StaticSceneSelectsIdentity) {
    const auto seq = one_step({});
    const Tracker tr(TrackerConfig{});
    auto st = tr.init(seq.images[0], seq.groundtruth[0]);
    const auto r = tr.track(st, seq.images[1]);
    EXPECT_TRUE(r.selected.is_identity());
    EXPECT_NEAR(r.pose.x, 180, 1.0);
    EXPECT_NEAR(r.pose.y, 180, 1.0);
    EXPECT_DOUBLE_EQ(r.pose.theta, 0.0);
}

TEST(TrackerBehaviour, RotationByOneStepSelectsThatAngle) {
    for (double sign : {1.0, -1.0}) {
        const auto seq = one_step({0, 0, 1.0, sign * kPi / 8});
        const Tracker tr(TrackerConfig{});
        auto st = tr.init(seq.images[0], seq.groundtruth[0]);
        const auto r = tr.track(st, seq.images[1]);
        EXPECT_DOUBLE_EQ(r.selected.a, sign * kPi / 8);
        EXPECT_EQ(r.selected.s, 1.0);
        EXPECT_NEAR(r.pose.theta, sign * kPi / 8, 1e-12);
    }
}

TEST(TrackerBehaviour, GrowthByOneStepSelectsThatScale) {
    const auto seq = one_step({0, 0, 1.0375, 0});
    const Tracker tr(TrackerConfig{});
    auto st = tr.init(seq.images[0], seq.groundtruth[0]);
    const auto r = tr.track(st, seq.images[1]);
    EXPECT_DOUBLE_EQ(r.selected.s, 1.0375);
    EXPECT_NEAR(r.pose.w, 40 * 1.0375, 1e-9);
    EXPECT_NEAR(r.pose.h, 80 * 1.0375, 1e-9);
}

TEST(TrackerBehaviour, TranslationIsRecovered) {
    const auto seq = one_step({6, -4, 1.0, 0});
    const Tracker tr(TrackerConfig{});
    auto st = tr.init(seq.images[0], seq.groundtruth[0]);
    const auto r = tr.track(st, seq.images[1]);
    EXPECT_NEAR(r.pose.x, 186, 1.5);
    EXPECT_NEAR(r.pose.y, 176, 1.5);
}

TEST(TrackerBehaviour, StubSelectorAccumulatesPose) {
    const auto seq = one_step({});
    Tracker tr(TrackerConfig{});
    // Always pick the +angle hypothesis (index 3) at the map center.
    tr.set_selector([](std::span<const std::pair<CandidateSpec, ResponseMap>> c) {
        return PeakSelection{3, c[3].second.height / 2, c[3].second.width / 2, 1.0};
    });
    auto st = tr.init(seq.images[0], seq.groundtruth[0]);
    for (int k = 1; k <= 12; ++k) {
        const auto r = tr.track(st, seq.images[1]);
        ASSERT_NEAR(r.pose.theta, normalize_angle(k * kPi / 8), 1e-9);
        ASSERT_DOUBLE_EQ(r.pose.w, 40.0);
        ASSERT_EQ(st.frame_index, k);
    }

    Tracker grow(TrackerConfig{});
    grow.set_selector([](std::span<const std::pair<CandidateSpec, ResponseMap>> c) {
        return PeakSelection{0, c[0].second.height / 2, c[0].second.width / 2, 1.0};
    });
    st = grow.init(seq.images[0], seq.groundtruth[0]);
    for (int k = 1; k <= 60; ++k) {
        const auto r = grow.track(st, seq.images[1]);
        const double expect = std::min(std::pow(1.0375, k), 5.0);
        ASSERT_NEAR(r.pose.w, 40.0 * expect, 1e-9);
        ASSERT_NEAR(r.pose.h, 80.0 * expect, 1e-9);
    }
}

TEST(TrackerBehaviour, MaskedCellsDoNotInfluenceTracking) {
    const auto seq = one_step({3, 2, 1.0, kPi / 8});
    TrackerConfig cfg;
    cfg.update_enabled = false;
    const Tracker tr(cfg);
    auto a = tr.init(seq.images[0], seq.groundtruth[0]);
    ASSERT_TRUE(a.mask.has_value());
    auto b = a;
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-5, 5);
    auto& hi = b.first_template.hi;
    for (int c = 0; c < hi.channels(); ++c) {
        for (int r = 0; r < hi.height(); ++r) {
            for (int k = 0; k < hi.width(); ++k) {
                if (b.mask->hi.at(r, k) == 0.0) hi.at(c, r, k) = u(rng);
            }
        }
    }
    ASSERT_NE(a.first_template, b.first_template);
    const auto ra = tr.track(a, seq.images[1]);
    const auto rb = tr.track(b, seq.images[1]);
    EXPECT_EQ(ra.pose, rb.pose);
    EXPECT_EQ(ra.peak.index, rb.peak.index);
    EXPECT_EQ(ra.peak.score, rb.peak.score);
}

TEST(TrackerBehaviour, Deterministic) {
    MotionScript ms;
    ms.target = OrientedBox(160, 160, 36, 70, 0.1);
    ms.texture_rows = 8;
    ms.background = Background::Textured;
    ms.noise_sigma = 0.02;
    ms.steps.assign(8, MotionStep{1.5, -1.0, 1.0, kPi / 96});
    const auto seq = synth_sequence(ms);
    auto run = [&] {
        const Tracker tr(TrackerConfig{});
        auto st = tr.init(seq.images[0], seq.groundtruth[0]);
        std::vector<OrientedBox> poses;
        for (std::size_t f = 1; f < seq.size(); ++f) poses.push_back(tr.track(st, seq.images[f]).pose);
        return poses;
    };
    EXPECT_EQ(run(), run());
}
