#include "rotsiam/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rotsiam {

LevelMask make_mask(int size, MaskOrientation orientation, int band) {
    if (size <= 0 || band < 0 || 2 * band >= size) throw std::invalid_argument("make_mask: invalid size or band");
    LevelMask m{size, std::vector<double>(static_cast<std::size_t>(size) * size, 1.0)};
    if (orientation == MaskOrientation::None) return m;
    for (int r = 0; r < size; ++r) {
        for (int c = 0; c < size; ++c) {
            const int k = orientation == MaskOrientation::Tall ? c : r;
            if (k < band || k >= size - band) m.values[static_cast<std::size_t>(r) * size + c] = 0.0;
        }
    }
    return m;
}

MaskOrientation mask_orientation(double w, double h, double th_r) {
    if (h / w > th_r) return MaskOrientation::Tall;
    if (w / h > th_r) return MaskOrientation::Wide;
    return MaskOrientation::None;
}

std::vector<CandidateSpec> candidate_set(const TrackerConfig& cfg) {
    cfg.validate();
    const int half_m = (cfg.M - 1) / 2;
    const int half_n = cfg.angle_enabled ? (cfg.N - 1) / 2 : 0;
    std::vector<CandidateSpec> out;
    out.reserve(static_cast<std::size_t>(2 * half_m + 2 * half_n + 1));
    for (int i = 1; i <= half_m; ++i) {
        out.push_back({std::pow(cfg.scale_step, i), 0.0, cfg.scale_penalty});
        out.push_back({std::pow(cfg.scale_step, -i), 0.0, cfg.scale_penalty});
    }
    out.push_back({1.0, 0.0, 1.0});
    for (int j = 1; j <= half_n; ++j) {
        out.push_back({1.0, j * cfg.angle_step, cfg.angle_penalty});
        out.push_back({1.0, -j * cfg.angle_step, cfg.angle_penalty});
    }
    return out;
}

namespace {

// (1 - t) a + t b written as a + t (b - a): a fixed point stays bit-exact and
// t = 0 returns a unchanged.
FeatureMap blend(const FeatureMap& a, const FeatureMap& b, double t) {
    if (!a.same_shape(b)) throw std::invalid_argument("template blend: geometry mismatch");
    FeatureMap out = a;
    auto& d = out.data();
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = a.data()[i] + t * (b.data()[i] - a.data()[i]);
    return out;
}

FeatureMap mask_level(const FeatureMap& f, const LevelMask& m) {
    if (f.height() != m.size || f.width() != m.size) throw std::invalid_argument("mask: geometry mismatch");
    FeatureMap out = f;
    for (int c = 0; c < f.channels(); ++c) {
        for (int r = 0; r < f.height(); ++r) {
            for (int k = 0; k < f.width(); ++k) out.at(c, r, k) *= m.at(r, k);
        }
    }
    return out;
}

// Removes each channel's mean over the cells a mask keeps (all cells without
// a mask) so correlation responds to structure rather than overall level.
FeatureMap center_channels(const FeatureMap& f, const LevelMask* m) {
    FeatureMap out = f;
    for (int c = 0; c < f.channels(); ++c) {
        double sum = 0.0, count = 0.0;
        for (int r = 0; r < f.height(); ++r) {
            for (int k = 0; k < f.width(); ++k) {
                const double w = m ? m->at(r, k) : 1.0;
                sum += w * f.at(c, r, k);
                count += w;
            }
        }
        const double mean = count > 0.0 ? sum / count : 0.0;
        for (int r = 0; r < f.height(); ++r) {
            for (int k = 0; k < f.width(); ++k) {
                const double w = m ? m->at(r, k) : 1.0;
                out.at(c, r, k) = w * (f.at(c, r, k) - mean);
            }
        }
    }
    return out;
}

// Keeps featureless search windows from scoring high after normalization.
constexpr double kEnergyFloor = 1e-2;

double energy(const FeatureMap& f) {
    double e = 0.0;
    for (double v : f.data()) e += v * v;
    return e;
}

}  // namespace

FeaturePair blended_template(const TrackerState& state, const TrackerConfig& cfg) {
    return {blend(state.moving_template.lo, state.first_template.lo, cfg.lambda_S),
            blend(state.moving_template.hi, state.first_template.hi, cfg.lambda_S)};
}

FeaturePair update_template(TrackerState& state, const FeaturePair& tracked, const TrackerConfig& cfg) {
    if (!tracked.lo.same_shape(state.moving_template.lo) || !tracked.hi.same_shape(state.moving_template.hi)) {
        throw std::invalid_argument("update_template: tracked feature geometry differs from the template");
    }
    state.moving_template.lo = blend(state.moving_template.lo, tracked.lo, cfg.lambda_U);
    state.moving_template.hi = blend(state.moving_template.hi, tracked.hi, cfg.lambda_U);
    return blended_template(state, cfg);
}

FeaturePair apply_mask(const FeaturePair& templ, const MaskSet& mask, const TrackerConfig& cfg) {
    FeaturePair out = templ;
    if (mask.orientation == MaskOrientation::None) return out;
    if (cfg.mask_lo) out.lo = mask_level(templ.lo, mask.lo);
    if (cfg.mask_hi) out.hi = mask_level(templ.hi, mask.hi);
    return out;
}

Tracker::Tracker(TrackerConfig cfg) : Tracker(cfg, make_extractor(cfg.extractor)) {}

Tracker::Tracker(TrackerConfig cfg, std::shared_ptr<const Extractor> extractor)
    : cfg_(std::move(cfg)), extractor_(std::move(extractor)) {
    cfg_.validate();
    if (!extractor_) throw std::invalid_argument("tracker: null extractor");
    candidates_ = candidate_set(cfg_);
    selector_ = [](std::span<const std::pair<CandidateSpec, ResponseMap>> c) { return select_peak(c); };
}

TrackerState Tracker::init(const Image& frame, const OrientedBox& box, int frame_index) const {
    validate(box);
    if (box.w <= 1.0 || box.h <= 1.0) throw std::invalid_argument("tracker init: box must be wider and taller than 1 px");
    TrackerState st;
    st.pose = box;
    st.pose.x = std::clamp(box.x, 0.0, frame.width() - 1.0);
    st.pose.y = std::clamp(box.y, 0.0, frame.height() - 1.0);
    st.pose.theta = normalize_angle(box.theta);
    st.initial_w = box.w;
    st.initial_h = box.h;
    st.frame_index = frame_index;

    const Image patch = extract_patch(frame, st.pose.center(), context_side(box.w, box.h), st.pose.theta, kTemplateSize);
    st.first_template = extractor_->embed(patch, PatchKey{frame_index, PatchRole::Template, 1.0, 0.0});
    st.moving_template = st.first_template;

    const MaskOrientation orient = mask_orientation(box.w, box.h, cfg_.th_r);
    if (cfg_.mask_enabled && orient != MaskOrientation::None) {
        st.mask = MaskSet{orient, make_mask(st.first_template.lo.height(), orient, cfg_.mask_band_lo),
                          make_mask(st.first_template.hi.height(), orient, cfg_.mask_band_hi)};
    }
    return st;
}

TrackResult Tracker::track(TrackerState& state, const Image& frame) const {
    ++state.frame_index;
    FeaturePair templ = cfg_.update_enabled ? blended_template(state, cfg_) : state.first_template;
    if (state.mask) templ = apply_mask(templ, *state.mask, cfg_);
    if (cfg_.center_template) {
        const bool m = state.mask && state.mask->orientation != MaskOrientation::None;
        templ.lo = center_channels(templ.lo, m && cfg_.mask_lo ? &state.mask->lo : nullptr);
        templ.hi = center_channels(templ.hi, m && cfg_.mask_hi ? &state.mask->hi : nullptr);
    }
    const double e_lo = energy(templ.lo), e_hi = energy(templ.hi);
    const bool masked = state.mask && state.mask->orientation != MaskOrientation::None;
    const LevelMask* mask_lo = masked && cfg_.mask_lo ? &state.mask->lo : nullptr;
    const LevelMask* mask_hi = masked && cfg_.mask_hi ? &state.mask->hi : nullptr;
    auto level_response = [&](const FeatureMap& t, const FeatureMap& x, double e_t, const LevelMask* m) {
        ResponseMap r = cross_correlate(t, x);
        if (!(e_t > 0.0)) return r;
        if (cfg_.normalized_correlation) {
            const ResponseMap e_x =
                local_energy(x, t.height(), t.width(), m ? std::span<const double>(m->values) : std::span<const double>());
            for (std::size_t i = 0; i < r.data.size(); ++i) {
                r.data[i] /= std::sqrt(e_t) * std::sqrt(e_x.data[i] + kEnergyFloor * e_t);
            }
        } else {
            // Self-match of each level scores ~1 so the fusion weights mean what they say.
            for (auto& v : r.data) v /= e_t;
        }
        return r;
    };

    const double side_x = context_side(state.pose.w, state.pose.h) * kSearchSize / kTemplateSize;
    const auto fill = frame.mean();

    std::vector<FeaturePair> search_feats;
    std::vector<ResponseMap> fused;
    search_feats.reserve(candidates_.size());
    fused.reserve(candidates_.size());
    for (const CandidateSpec& cand : candidates_) {
        const Image patch =
            extract_patch(frame, state.pose.center(), side_x * cand.s, state.pose.theta + cand.a, kSearchSize, fill);
        search_feats.push_back(
            extractor_->embed(patch, PatchKey{state.frame_index, PatchRole::Search, cand.s, cand.a}));
        ResponseMap r_lo = level_response(templ.lo, search_feats.back().lo, e_lo, mask_lo);
        ResponseMap r_hi = level_response(templ.hi, search_feats.back().hi, e_hi, mask_hi);
        ResponseMap f = fuse({r_lo, r_hi}, {cfg_.fusion_weight_lo, cfg_.fusion_weight_hi});
        if (cfg_.score_sharpness > 0.0) {
            for (auto& v : f.data) v = std::exp(cfg_.score_sharpness * (v - 1.0));
        }
        fused.push_back(std::move(f));
    }

    const std::vector<ResponseMap> normalized = normalize_jointly(fused);
    std::vector<std::pair<CandidateSpec, ResponseMap>> scored;
    scored.reserve(candidates_.size());
    for (std::size_t k = 0; k < candidates_.size(); ++k) {
        if (cfg_.penalty_before_window) {
            ResponseMap m = normalized[k];
            for (auto& v : m.data) v *= candidates_[k].penalty;
            CandidateSpec spec = candidates_[k];
            spec.penalty = 1.0;
            scored.emplace_back(spec, apply_window(m, cfg_.window_weight));
        } else {
            scored.emplace_back(candidates_[k], apply_window(normalized[k], cfg_.window_weight));
        }
    }
    const PeakSelection peak = selector_(scored);
    const CandidateSpec& chosen = candidates_.at(peak.index);

    const double sample_angle = state.pose.theta + chosen.a;
    const double crop_ratio = side_x * chosen.s / kSearchSize;
    const Displacement d =
        peak_to_displacement(peak.row, peak.col, scored[peak.index].second, cfg_.upsample, crop_ratio, sample_angle);

    OrientedBox& pose = state.pose;
    pose.x = std::clamp(pose.x + d.dx, 0.0, frame.width() - 1.0);
    pose.y = std::clamp(pose.y + d.dy, 0.0, frame.height() - 1.0);
    const double scale = std::clamp(pose.w * chosen.s / state.initial_w, cfg_.min_scale, cfg_.max_scale);
    pose.w = state.initial_w * scale;
    pose.h = state.initial_h * scale;
    pose.theta = normalize_angle(sample_angle);

    if (cfg_.update_enabled) {
        const FeaturePair tracked = crop_feature(search_feats[peak.index], peak.row, peak.col, state.first_template);
        update_template(state, tracked, cfg_);
    }
    return {pose, chosen, peak};
}

}  // namespace rotsiam
