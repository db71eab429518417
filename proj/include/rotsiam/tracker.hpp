#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "rotsiam/config.hpp"
#include "rotsiam/features.hpp"
#include "rotsiam/geometry.hpp"
#include "rotsiam/matching.hpp"

namespace rotsiam {

enum class MaskOrientation { None, Tall, Wide };

/// Binary square mask, row-major.
struct LevelMask {
    int size = 0;
    std::vector<double> values;
    double at(int r, int c) const { return values[static_cast<std::size_t>(r) * size + c]; }
};

/// Tall zeroes `band` outer columns on each side, wide the same for rows.
LevelMask make_mask(int size, MaskOrientation orientation, int band);

struct MaskSet {
    MaskOrientation orientation = MaskOrientation::None;
    LevelMask lo;
    LevelMask hi;
};

/// Aspect-ratio gate: Tall when h/w > th_r, Wide when w/h > th_r.
MaskOrientation mask_orientation(double w, double h, double th_r);

struct TrackerState {
    OrientedBox pose;
    FeaturePair first_template;
    FeaturePair moving_template;
    std::optional<MaskSet> mask;
    int frame_index = 0;
    double initial_w = 0.0;
    double initial_h = 0.0;
};

/// M + N - 1 hypotheses in the order: scales (s^1, s^-1, s^2, ...),
/// identity, angles (+step, -step, +2 step, ...). N is treated as 1 when
/// angle estimation is disabled.
std::vector<CandidateSpec> candidate_set(const TrackerConfig& cfg);

/// lambda_S * first + (1 - lambda_S) * moving, per level.
FeaturePair blended_template(const TrackerState& state, const TrackerConfig& cfg);

/// Folds the tracked-object feature into the moving average and returns the
/// template for the next frame.
FeaturePair update_template(TrackerState& state, const FeaturePair& tracked, const TrackerConfig& cfg);

/// Multiplies the masked levels elementwise; unmasked levels pass through.
FeaturePair apply_mask(const FeaturePair& templ, const MaskSet& mask, const TrackerConfig& cfg);

struct TrackResult {
    OrientedBox pose;
    CandidateSpec selected;
    PeakSelection peak;
};

class Tracker {
public:
    using Selector = std::function<PeakSelection(std::span<const std::pair<CandidateSpec, ResponseMap>>)>;

    explicit Tracker(TrackerConfig cfg);
    Tracker(TrackerConfig cfg, std::shared_ptr<const Extractor> extractor);

    const TrackerConfig& config() const noexcept { return cfg_; }

    /// Rejects boxes with w or h <= 1 px; the center is clamped into the frame.
    TrackerState init(const Image& frame, const OrientedBox& box, int frame_index = 0) const;
    TrackerState init(const Image& frame, const AxisBox& box, int frame_index = 0) const {
        return init(frame, OrientedBox(box), frame_index);
    }

    TrackResult track(TrackerState& state, const Image& frame) const;

    /// Replaces the peak selection step (defaults to select_peak).
    void set_selector(Selector selector) { selector_ = std::move(selector); }

private:
    TrackerConfig cfg_;
    std::shared_ptr<const Extractor> extractor_;
    std::vector<CandidateSpec> candidates_;
    Selector selector_;
};

}  // namespace rotsiam
