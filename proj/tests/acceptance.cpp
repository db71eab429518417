// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
// failure. Oracles come from tests/test_support.hpp and closed forms below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "rotsiam/ablation.hpp"
#include "rotsiam/eval.hpp"
#include "rotsiam/synth.hpp"
#include "rotsiam/tracker.hpp"
#include "test_support.hpp"

using namespace rotsiam;
using rotsiam::testing::axis_iou;
using rotsiam::testing::brute_force_correlation;
using rotsiam::testing::random_map;
using rotsiam::testing::stratified_iou;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Verdict {
    bool pass = true;
    std::string detail;
};

int failures = 0;

void report(int id, const char* name, const std::function<Verdict()>& body) {
    Verdict v;
    try {
        v = body();
    } catch (const std::exception& e) {
        v = {false, std::string("exception: ") + e.what()};
    }
    if (!v.pass) ++failures;
    std::printf("criterion %d [%s] %s: %s\n", id, v.pass ? "PASS" : "FAIL", name, v.detail.c_str());
    std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double mean_after_first(const std::vector<double>& ov) {
    double s = 0.0;
    for (std::size_t f = 1; f < ov.size(); ++f) s += ov[f];
    return s / static_cast<double>(ov.size() - 1);
}

// ---------------------------------------------------------------------------

Verdict correlation_oracle() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(20240601);
    std::uniform_int_distribution<int> dc(1, 16), dt(1, 32);
    double worst = 0.0;
    for (int pair = 0; pair < 200; ++pair) {
        const int c = dc(rng), th = dt(rng), tw = dt(rng);
        const int sh = std::uniform_int_distribution<int>(th, 32)(rng), sw = std::uniform_int_distribution<int>(tw, 32)(rng);
        const FeatureMap t = random_map(c, th, tw, rng), s = random_map(c, sh, sw, rng);
        const ResponseMap got = cross_correlate(t, s), want = brute_force_correlation(t, s);
        if (got.height != want.height || got.width != want.width) return {false, fmt("pair %d: shape mismatch", pair)};
        double scale = 0.0, err = 0.0;
        for (std::size_t k = 0; k < want.data.size(); ++k) {
            scale = std::max(scale, std::abs(want.data[k]));
            err = std::max(err, std::abs(got.data[k] - want.data[k]));
        }
        worst = std::max(worst, err / std::max(scale, 1e-300));
    }
    const double secs = seconds_since(t0);
    return {worst <= 1e-6 && secs < 10.0, fmt("200 pairs, max relative error %.2e (<= 1e-6), %.2f s (< 10 s)", worst, secs)};
}

Verdict rotated_iou_oracle() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> side(2.0, 30.0), off(-20.0, 20.0), ang(-kPi, kPi);
    double worst = 0.0;
    int overlapping = 0;
    for (int pair = 0; pair < 100; ++pair) {
        const OrientedBox a(0.0, 0.0, side(rng), side(rng), ang(rng));
        const OrientedBox b(off(rng), off(rng), side(rng), side(rng), ang(rng));
        const double got = rotated_iou(a, b);
        // 1000 x 1000 strata, one sample each: 10^6 samples.
        const double want = stratified_iou(a, b, 1000, 1000 + static_cast<std::uint64_t>(pair));
        worst = std::max(worst, std::abs(got - want));
        overlapping += want > 0.0;
    }
    double axis_worst = 0.0;
    for (int pair = 0; pair < 1000; ++pair) {
        const OrientedBox a(off(rng), off(rng), side(rng), side(rng), 0.0);
        const OrientedBox b(off(rng), off(rng), side(rng), side(rng), 0.0);
        axis_worst = std::max(axis_worst, std::abs(rotated_iou(a, b) - axis_iou(a, b)));
    }
    const double secs = seconds_since(t0);
    return {worst <= 2e-3 && axis_worst <= 1e-12 && secs < 60.0,
            fmt("oriented max |d| %.2e (<= 2e-3, %d/100 overlapping), axis-aligned max |d| %.1e over 1000 pairs, %.1f s (< 60 s)",
                worst, overlapping, axis_worst, secs)};
}

Verdict candidate_law() {
    for (int M = 1; M <= 9; M += 2) {
        for (int N = 1; N <= 9; N += 2) {
            TrackerConfig cfg;
            cfg.M = M;
            cfg.N = N;
            const auto c = candidate_set(cfg);
            if (c.size() != static_cast<std::size_t>(M + N - 1)) return {false, fmt("M=%d N=%d: %zu candidates", M, N, c.size())};
            std::multiset<double> scales, angles;
            int identity = 0;
            for (const auto& k : c) {
                const bool ds = k.s != 1.0, da = k.a != 0.0;
                if (ds && da) return {false, fmt("M=%d N=%d: candidate changes both scale and angle", M, N)};
                if (!ds && !da) {
                    ++identity;
                    if (k.penalty != 1.0) return {false, "identity is penalized"};
                } else if (ds) {
                    scales.insert(k.s);
                    if (k.penalty != cfg.scale_penalty) return {false, "scale penalty"};
                } else {
                    angles.insert(k.a);
                    if (k.penalty != cfg.angle_penalty) return {false, "angle penalty"};
                }
            }
            std::multiset<double> want_s, want_a;
            for (int j = 1; j <= (M - 1) / 2; ++j) {
                want_s.insert(std::pow(cfg.scale_step, j));
                want_s.insert(std::pow(cfg.scale_step, -j));
            }
            for (int j = 1; j <= (N - 1) / 2; ++j) {
                want_a.insert(j * cfg.angle_step);
                want_a.insert(-j * cfg.angle_step);
            }
            if (identity != 1) return {false, fmt("M=%d N=%d: %d identity candidates", M, N, identity)};
            if (scales.size() != want_s.size() || angles.size() != want_a.size()) return {false, fmt("M=%d N=%d: wrong split", M, N)};
            auto close = [](const std::multiset<double>& x, const std::multiset<double>& y) {
                return std::equal(x.begin(), x.end(), y.begin(), [](double p, double q) { return std::abs(p - q) <= 1e-12; });
            };
            if (!close(scales, want_s) || !close(angles, want_a)) return {false, fmt("M=%d N=%d: wrong values", M, N)};
        }
    }
    // The five default pairs.
    const auto c = candidate_set(TrackerConfig{});
    const std::vector<std::pair<double, double>> want{{1.0375, 0.0}, {0.964, 0.0}, {1.0, 0.0}, {1.0, kPi / 8}, {1.0, -kPi / 8}};
    if (c.size() != want.size()) return {false, "default set size"};
    for (const auto& [s, a] : want) {
        const bool found = std::any_of(c.begin(), c.end(), [&](const CandidateSpec& k) {
            return std::abs(k.s - s) <= 5e-4 && std::abs(k.a - a) <= 1e-12;
        });
        if (!found) return {false, fmt("default set lacks (%.4f, %.4f)", s, a)};
    }
    return {true, "25 (M,N) settings: M+N-1 candidates, one identity, each other candidate changes exactly one of scale/angle; "
                  "defaults are (1.0375,0) (0.964,0) (1,0) (1,pi/8) (1,-pi/8)"};
}

FeaturePair random_pair(std::mt19937_64& rng) { return {random_map(4, 8, 8, rng), random_map(4, 6, 6, rng)}; }

bool bit_equal(const FeaturePair& x, const FeaturePair& y) { return x.lo.data() == y.lo.data() && x.hi.data() == y.hi.data(); }

Verdict update_algebra() {
    std::mt19937_64 rng(4242);
    const TrackerConfig cfg;

    // Tracked feature equal to the first template: nothing moves.
    TrackerState st;
    st.first_template = st.moving_template = random_pair(rng);
    for (int i = 0; i < 50; ++i) {
        const FeaturePair t = update_template(st, st.first_template, cfg);
        if (!bit_equal(t, st.first_template) || !bit_equal(st.moving_template, st.first_template)) return {false, "fixed point drifted"};
    }

    // lambda_U = 0: the moving template never changes.
    TrackerConfig frozen = cfg;
    frozen.lambda_U = 0.0;
    st.moving_template = random_pair(rng);
    const FeaturePair before = st.moving_template;
    for (int i = 0; i < 50; ++i) update_template(st, random_pair(rng), frozen);
    if (!bit_equal(st.moving_template, before)) return {false, "lambda_U = 0 changed the moving template"};

    // Two-step substitution from a zero first template: 0.5 * 0.006 * g.
    st.first_template = st.moving_template = {FeatureMap(4, 8, 8), FeatureMap(4, 6, 6)};
    const FeaturePair g = random_pair(rng);
    const FeaturePair t2 = update_template(st, g, cfg);
    for (std::size_t k = 0; k < g.lo.size(); ++k) {
        if (t2.lo.data()[k] != 0.003 * g.lo.data()[k]) return {false, "zero-start substitution is not 0.003 g"};
    }
    for (std::size_t k = 0; k < g.hi.size(); ++k) {
        if (t2.hi.data()[k] != 0.003 * g.hi.data()[k]) return {false, "zero-start substitution is not 0.003 g"};
    }

    // Envelope: every cell of the template stays within the range spanned by
    // the first template and all tracked features seen so far.
    st.first_template = st.moving_template = random_pair(rng);
    FeaturePair lo_env = st.first_template, hi_env = st.first_template;
    auto widen = [](FeatureMap& mn, FeatureMap& mx, const FeatureMap& v) {
        for (std::size_t k = 0; k < v.size(); ++k) {
            mn.data()[k] = std::min(mn.data()[k], v.data()[k]);
            mx.data()[k] = std::max(mx.data()[k], v.data()[k]);
        }
    };
    auto within = [](const FeatureMap& mn, const FeatureMap& mx, const FeatureMap& v) {
        for (std::size_t k = 0; k < v.size(); ++k) {
            if (v.data()[k] < mn.data()[k] || v.data()[k] > mx.data()[k]) return false;
        }
        return true;
    };
    std::uniform_real_distribution<double> scale(0.1, 3.0);
    for (int i = 0; i < 1000; ++i) {
        FeaturePair tracked = random_pair(rng);
        const double k = scale(rng);
        for (double& v : tracked.lo.data()) v *= k;
        for (double& v : tracked.hi.data()) v *= k;
        widen(lo_env.lo, hi_env.lo, tracked.lo);
        widen(lo_env.hi, hi_env.hi, tracked.hi);
        const FeaturePair t = update_template(st, tracked, cfg);
        if (!within(lo_env.lo, hi_env.lo, t.lo) || !within(lo_env.hi, hi_env.hi, t.hi) ||
            !within(lo_env.lo, hi_env.lo, st.moving_template.lo) || !within(lo_env.hi, hi_env.hi, st.moving_template.hi)) {
            return {false, fmt("step %d leaves the input envelope", i)};
        }
    }
    return {true, "fixed point and lambda_U = 0 bit-exact over 50 steps, zero-start step equals 0.003 g exactly, "
                  "envelope holds over 1000 random steps"};
}

// Upright textured target on a flat background that spins by a constant
// per-frame angle.
SequenceRecord rotation_sequence(int index, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    MotionScript ms;
    ms.seed = 100 + static_cast<std::uint64_t>(index);
    ms.background = Background::Flat;
    ms.noise_sigma = 0.02;
    ms.texture_cols = 4;
    ms.texture_rows = 8;
    const double w = 40.0 + 20.0 * u(rng);
    ms.target = OrientedBox(160.0, 160.0, w, 2.0 * w, 0.0);
    if (u(rng) < 0.5) std::swap(ms.target.w, ms.target.h);
    const double mag = kPi / 192 + (kPi / 96 - kPi / 192) * u(rng);
    const double sign = u(rng) < 0.5 ? -1.0 : 1.0;
    ms.steps.assign(59, MotionStep{0.0, 0.0, 1.0, sign * mag});
    return synth_sequence(ms, "rotation" + std::to_string(index));
}

Verdict angle_suite() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(7);
    TrackerConfig with_angle;
    with_angle.mask_enabled = false;
    TrackerConfig without = with_angle;
    without.N = 1;
    double iou_on = 0.0, iou_off = 0.0, angle_err = 0.0;
    const int n = 20;
    for (int i = 0; i < n; ++i) {
        const SequenceRecord seq = rotation_sequence(i, rng);
        RotationTracker a(with_angle), b(without);
        const RunTrace ta = otb_run(a, seq), tb = otb_run(b, seq);
        iou_on += mean_after_first(ta.overlaps);
        iou_off += mean_after_first(tb.overlaps);
        // A rectangle turned by pi is the same rectangle.
        const double d = std::abs(normalize_angle(ta.predicted.back().theta - seq.groundtruth.back().theta));
        angle_err += std::min(d, kPi - d);
    }
    iou_on /= n;
    iou_off /= n;
    angle_err /= n;
    const double gain = iou_on - iou_off, secs = seconds_since(t0);
    return {gain >= 0.10 && angle_err <= kPi / 16 && secs < 300.0,
            fmt("20 sequences: mean IoU %.3f (angle) vs %.3f (N=1), gain %.3f (>= 0.10); final angle error %.4f rad (<= %.4f); %.0f s (< 300 s)",
                iou_on, iou_off, gain, angle_err, kPi / 16, secs)};
}

// Low-contrast target next to a same-sized, high-contrast checker distractor
// placed beside its long side; the target drifts away from it at 1 px/frame.
SequenceRecord distractor_sequence(int index, std::mt19937_64& rng, bool elongated) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    MotionScript ms;
    ms.seed = 500 + static_cast<std::uint64_t>(index);
    ms.background = Background::Distractor;
    ms.noise_sigma = 0.02;
    ms.target_contrast = 0.15;
    const double w = 28.0 + 8.0 * u(rng);
    const bool tall = u(rng) < 0.5;
    const double long_side = elongated ? 2.0 * w : w;
    ms.target = tall ? OrientedBox(160.0, 160.0, w, long_side, 0.0) : OrientedBox(160.0, 160.0, long_side, w, 0.0);
    ms.texture_cols = tall ? 4 : 8;
    ms.texture_rows = tall ? 8 : 4;
    ms.distractor_cols = tall ? 8 : 16;
    ms.distractor_rows = tall ? 16 : 8;
    ms.distractor_w = ms.target.w;
    ms.distractor_h = ms.target.h;
    const double side = u(rng) < 0.5 ? 1.0 : -1.0;
    const double dir = tall ? (side > 0 ? 0.0 : kPi) : (side > 0 ? kPi / 2 : -kPi / 2);
    ms.distractor_direction = dir;
    // Distance is in target widths: 1.25 of the short side either way.
    ms.distractor_distance = 1.25 * w / ms.target.w;
    ms.steps.assign(49, MotionStep{-std::cos(dir), -std::sin(dir), 1.0, 0.0});
    return synth_sequence(ms, "distractor" + std::to_string(index));
}

Verdict mask_suite() {
    const auto t0 = Clock::now();
    TrackerConfig on;
    on.angle_enabled = false;
    TrackerConfig off = on;
    off.mask_enabled = false;

    std::mt19937_64 rng(11);
    double iou_on = 0.0, iou_off = 0.0;
    const int n = 10;
    for (int i = 0; i < n; ++i) {
        const SequenceRecord seq = distractor_sequence(i, rng, true);
        RotationTracker a(on), b(off);
        iou_on += mean_after_first(otb_run(a, seq).overlaps);
        iou_off += mean_after_first(otb_run(b, seq).overlaps);
    }
    iou_on /= n;
    iou_off /= n;

    // Mediocre targets: the gate must stay shut at init and the tracking
    // must not depend on the mask switch at all.
    std::mt19937_64 rng_m(13);
    int activations = 0, divergent = 0;
    const int n_mediocre = 4;
    for (int i = 0; i < n_mediocre; ++i) {
        SequenceRecord seq = distractor_sequence(i, rng_m, false);
        seq.images.resize(20);
        seq.groundtruth.resize(20);
        const Tracker probe(on);
        if (probe.init(seq.images[0], seq.groundtruth[0]).mask.has_value()) ++activations;
        RotationTracker a(on), b(off);
        const RunTrace ta = otb_run(a, seq), tb = otb_run(b, seq);
        if (a.state().mask.has_value()) ++activations;
        for (std::size_t f = 0; f < ta.size(); ++f) {
            const OrientedBox &p = ta.predicted[f], &q = tb.predicted[f];
            if (p.x != q.x || p.y != q.y || p.w != q.w || p.h != q.h || p.theta != q.theta) {
                ++divergent;
                break;
            }
        }
    }
    int gate_errors = 0;
    for (double r = 1.0; r <= 1.5; r += 0.01) {
        if (mask_orientation(40.0, 40.0 * r, on.th_r) != MaskOrientation::None) ++gate_errors;
        if (mask_orientation(40.0 * r, 40.0, on.th_r) != MaskOrientation::None) ++gate_errors;
    }
    if (mask_orientation(40.0, 40.0 * 1.5, 1.5) != MaskOrientation::None) ++gate_errors;

    const double gain = iou_on - iou_off, secs = seconds_since(t0);
    return {gain >= 0.05 && activations == 0 && divergent == 0 && gate_errors == 0,
            fmt("10 elongated sequences: mean IoU %.3f (mask) vs %.3f (no mask), gain %.3f (>= 0.05); "
                "%d mediocre sequences: %d gate activations, %d runs differing from mask-off; r in [1, 1.5] never gated; %.0f s",
                iou_on, iou_off, gain, n_mediocre, activations, divergent, secs)};
}

SequenceRecord boxes_only(std::vector<OrientedBox> gt) {
    SequenceRecord s;
    s.name = "scripted";
    s.images.assign(gt.size(), Image(1, 1, 1));
    s.groundtruth = std::move(gt);
    return s;
}

Verdict vot_walkthrough() {
    const SequenceRecord still = boxes_only(std::vector<OrientedBox>(30, OrientedBox(100, 100, 20, 20)));
    ScriptedTracker scripted([](int f) {
        if (f == 10) return OrientedBox(500, 500, 20, 20);
        if (f >= 26) return OrientedBox(100 + (f - 25), 100, 20, 20);
        return OrientedBox(100, 100, 20, 20);
    });
    const RunTrace t = vot_run(scripted, still);
    if (t.failures != std::vector<int>{10}) return {false, "expected a single failure at frame 10"};
    if (t.init_frames != std::vector<int>{0, 16}) return {false, "expected re-initialization at frame 16"};
    for (int f = 11; f <= 15; ++f) {
        if (t.status[static_cast<std::size_t>(f)] != FrameStatus::Skipped) return {false, "frames 11..15 must be skipped"};
    }
    // Frames 26..29 are past the 10-frame burn-in; an x shift of d between
    // two 20x20 boxes has IoU (20 - d) / (20 + d).
    double want = 0.0;
    for (int d = 1; d <= 4; ++d) want += (20.0 - d) / (20.0 + d);
    want /= 4.0;
    const double acc = accuracy(t);
    if (std::abs(acc - want) > 1e-12) return {false, fmt("accuracy %.12f, want %.12f", acc, want)};

    MotionScript ms;
    ms.steps.assign(79, MotionStep{1.0, -0.5, 1.002, kPi / 120});
    const SequenceRecord moving = boxes_only(script_poses(ms));
    GroundTruthEcho echo(moving.groundtruth);
    const RunTrace e = vot_run(echo, moving);
    const double a = accuracy(e), r = robustness({e}).failures_per_sequence, q = eao({e}, 10, 60);
    const bool ok = a == 1.0 && r == 0.0 && q == 1.0;
    return {ok, fmt("one failure at 10, frames 11-15 skipped, re-init at 16, accuracy %.6f (hand %.6f); echo A=%.3f R=%.3f EAO=%.3f",
                    acc, want, a, r, q)};
}

Verdict otb_sanity() {
    MotionScript ms;
    ms.steps.assign(99, MotionStep{0.7, 0.3, 1.0, kPi / 200});
    const auto gt = script_poses(ms);

    std::vector<OrientedBox> shifted;
    for (const auto& b : gt) shifted.push_back(OrientedBox(b.x + 18.0, b.y - 24.0, b.w, b.h, b.theta));  // 30 px away
    const double perfect_auc = auc(success_curve(overlaps(gt, gt)));
    const double perfect_p = precision_at(center_errors(gt, gt), 20.0);
    const double offset_p = precision_at(center_errors(shifted, gt), 20.0);
    // IoU exactly 0.5: upright 20x20 box against a 20x10 half of it.
    const std::vector<double> half(100, rotated_iou(OrientedBox(0, 0, 20, 20), OrientedBox(0, -5, 20, 10)));
    const double half_auc = auc(success_curve(half));
    const bool ok = perfect_auc == 1.0 && perfect_p == 1.0 && offset_p == 0.0 && std::abs(half_auc - 50.0 / 101.0) <= 1e-12 &&
                    half[0] == 0.5;
    return {ok, fmt("perfect AUC %.4f P@20 %.4f; 30 px offset P@20 %.4f; IoU-0.5 AUC %.6f (50/101 = %.6f)", perfect_auc, perfect_p,
                    offset_p, half_auc, 50.0 / 101.0)};
}

std::string ablation_csv(unsigned threads) {
    std::vector<SequenceRecord> seqs;
    for (int i = 0; i < 2; ++i) {
        MotionScript ms;
        ms.seed = 900 + static_cast<std::uint64_t>(i);
        ms.background = i == 0 ? Background::Textured : Background::Distractor;
        ms.noise_sigma = 0.03;
        ms.canvas_width = ms.canvas_height = 240;
        ms.target = OrientedBox(120, 120, 24, 48, 0.0);
        ms.texture_rows = 8;
        ms.steps.assign(11, MotionStep{-1.0, -0.5, 1.01, kPi / 64});
        seqs.push_back(synth_sequence(ms, "abl" + std::to_string(i)));
    }
    AblationGrid grid;
    AblationOptions opts;
    opts.eao_lo = 2;
    opts.eao_hi = 10;
    opts.threads = threads;
    return format_ablation_csv(run_ablation(grid.expand(), seqs, opts));
}

Verdict ablation_determinism() {
    const auto t0 = Clock::now();
    const std::string a = ablation_csv(0), b = ablation_csv(1);
    const auto lines = std::count(a.begin(), a.end(), '\n');
    return {a == b && lines == 9,
            fmt("8-config grid on 2 sequences, %zu bytes, %s across two runs (default threads vs 1); %.0f s", a.size(),
                a == b ? "byte-identical" : "DIFFERENT", seconds_since(t0))};
}

}  // namespace

int main() {
    report(1, "correlation oracle", correlation_oracle);
    report(2, "rotated IoU oracle", rotated_iou_oracle);
    report(3, "candidate scheduler law", candidate_law);
    report(4, "template update algebra", update_algebra);
    report(5, "angle estimation suite", angle_suite);
    report(6, "spatial mask suite", mask_suite);
    report(7, "reset protocol walkthrough", vot_walkthrough);
    report(8, "one-pass metric sanity", otb_sanity);
    report(9, "ablation determinism", ablation_determinism);
    std::printf("%s: %d of 9 criteria failed\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
    return failures == 0 ? 0 : 1;
}
