#include "rotsiam/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace rotsiam {

Image SequenceRecord::frame(std::size_t i) const {
    if (!images.empty()) return images.at(i);
    return load_image(frame_paths.at(i));
}

void SequenceRecord::validate() const {
    const std::size_t n_frames = images.empty() ? frame_paths.size() : images.size();
    if (n_frames != groundtruth.size()) {
        throw std::invalid_argument("sequence " + name + ": " + std::to_string(n_frames) + " frames but " +
                                    std::to_string(groundtruth.size()) + " ground-truth boxes");
    }
    if (!groundtruth.empty()) rotsiam::validate(groundtruth.front());
}

std::string to_string(FrameStatus s) {
    switch (s) {
        case FrameStatus::Init: return "init";
        case FrameStatus::Tracked: return "tracked";
        case FrameStatus::Failure: return "failure";
        case FrameStatus::Skipped: return "skipped";
    }
    return "unknown";
}

FrameStatus parse_frame_status(const std::string& s) {
    if (s == "init") return FrameStatus::Init;
    if (s == "tracked") return FrameStatus::Tracked;
    if (s == "failure") return FrameStatus::Failure;
    if (s == "skipped") return FrameStatus::Skipped;
    throw std::invalid_argument("unknown frame status '" + s + "'");
}

RotationTracker::RotationTracker(TrackerConfig cfg) : tracker_(std::move(cfg)) {}
RotationTracker::RotationTracker(TrackerConfig cfg, std::shared_ptr<const Extractor> extractor)
    : tracker_(std::move(cfg), std::move(extractor)) {}

void RotationTracker::initialize(const Image& frame, const OrientedBox& box, int frame_index) {
    state_ = tracker_.init(frame, box, frame_index);
}

OrientedBox RotationTracker::update(const Image& frame, int frame_index) {
    // The tracker numbers frames itself; keep it in step with the protocol.
    state_.frame_index = frame_index - 1;
    return tracker_.track(state_, frame).pose;
}

namespace {

Image frame_for(const SequenceTracker& tracker, const SequenceRecord& seq, std::size_t i) {
    if (tracker.needs_frames()) return seq.frame(i);
    return {};
}

void push(RunTrace& t, const OrientedBox& pred, double ov, FrameStatus st) {
    t.predicted.push_back(pred);
    t.overlaps.push_back(ov);
    t.status.push_back(st);
}

}  // namespace

RunTrace otb_run(SequenceTracker& tracker, const SequenceRecord& seq) {
    seq.validate();
    RunTrace t;
    if (seq.size() == 0) return t;
    tracker.initialize(frame_for(tracker, seq, 0), seq.groundtruth[0], 0);
    t.init_frames.push_back(0);
    push(t, seq.groundtruth[0], rotated_iou(seq.groundtruth[0], seq.groundtruth[0]), FrameStatus::Init);
    for (std::size_t f = 1; f < seq.size(); ++f) {
        const OrientedBox pred = tracker.update(frame_for(tracker, seq, f), static_cast<int>(f));
        push(t, pred, rotated_iou(pred, seq.groundtruth[f]), FrameStatus::Tracked);
    }
    return t;
}

RunTrace vot_run(SequenceTracker& tracker, const SequenceRecord& seq, int skip) {
    seq.validate();
    if (skip < 0) throw std::invalid_argument("vot_run: negative skip");
    RunTrace t;
    const std::size_t n = seq.size();
    std::size_t f = 0;
    bool need_init = true;
    while (f < n) {
        if (need_init) {
            tracker.initialize(frame_for(tracker, seq, f), seq.groundtruth[f], static_cast<int>(f));
            if (!t.init_frames.empty()) ++t.reinit_count;
            t.init_frames.push_back(static_cast<int>(f));
            push(t, seq.groundtruth[f], rotated_iou(seq.groundtruth[f], seq.groundtruth[f]), FrameStatus::Init);
            need_init = false;
            ++f;
            continue;
        }
        const OrientedBox pred = tracker.update(frame_for(tracker, seq, f), static_cast<int>(f));
        const double ov = rotated_iou(pred, seq.groundtruth[f]);
        if (ov > 0.0) {
            push(t, pred, ov, FrameStatus::Tracked);
            ++f;
            continue;
        }
        push(t, pred, 0.0, FrameStatus::Failure);
        t.failures.push_back(static_cast<int>(f));
        for (int s = 0; s < skip && f + 1 + static_cast<std::size_t>(s) < n; ++s) push(t, pred, 0.0, FrameStatus::Skipped);
        f += static_cast<std::size_t>(skip) + 1;
        need_init = true;
    }
    return t;
}

std::vector<double> overlaps(const std::vector<OrientedBox>& pred, const std::vector<OrientedBox>& gt) {
    if (pred.size() != gt.size()) throw std::invalid_argument("overlaps: length mismatch");
    std::vector<double> out(pred.size());
    for (std::size_t i = 0; i < pred.size(); ++i) out[i] = rotated_iou(pred[i], gt[i]);
    return out;
}

std::vector<double> center_errors(const std::vector<OrientedBox>& pred, const std::vector<OrientedBox>& gt) {
    if (pred.size() != gt.size()) throw std::invalid_argument("center_errors: length mismatch");
    std::vector<double> out(pred.size());
    for (std::size_t i = 0; i < pred.size(); ++i) out[i] = center_distance(pred[i], gt[i]);
    return out;
}

std::vector<double> success_thresholds() {
    std::vector<double> t(101);
    for (int i = 0; i <= 100; ++i) t[static_cast<std::size_t>(i)] = i / 100.0;
    return t;
}

std::vector<double> success_curve(const std::vector<double>& frame_overlaps, const std::vector<double>& thresholds) {
    std::vector<double> curve(thresholds.size(), 0.0);
    if (frame_overlaps.empty()) return curve;
    for (std::size_t k = 0; k < thresholds.size(); ++k) {
        std::size_t hits = 0;
        for (double ov : frame_overlaps) {
            if (ov > thresholds[k] || ov >= 1.0) ++hits;
        }
        curve[k] = static_cast<double>(hits) / static_cast<double>(frame_overlaps.size());
    }
    return curve;
}

double auc(const std::vector<double>& curve) {
    if (curve.empty()) return 0.0;
    return std::accumulate(curve.begin(), curve.end(), 0.0) / static_cast<double>(curve.size());
}

double precision_at(const std::vector<double>& center_err, double radius) {
    if (center_err.empty()) return 0.0;
    const auto hits = std::count_if(center_err.begin(), center_err.end(), [&](double e) { return e <= radius; });
    return static_cast<double>(hits) / static_cast<double>(center_err.size());
}

std::vector<double> precision_curve(const std::vector<double>& center_err, int max_radius) {
    std::vector<double> out(static_cast<std::size_t>(max_radius) + 1);
    for (int r = 0; r <= max_radius; ++r) out[static_cast<std::size_t>(r)] = precision_at(center_err, r);
    return out;
}

double accuracy(const RunTrace& trace, int burnin) {
    double sum = 0.0;
    std::size_t count = 0;
    int last_init = 0;
    for (std::size_t f = 0; f < trace.size(); ++f) {
        const FrameStatus st = trace.status[f];
        if (st == FrameStatus::Init) last_init = static_cast<int>(f);
        if (st != FrameStatus::Tracked) continue;
        if (static_cast<int>(f) - last_init < burnin) continue;
        sum += trace.overlaps[f];
        ++count;
    }
    return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

Robustness robustness(const std::vector<RunTrace>& traces) {
    Robustness r;
    if (traces.empty()) return r;
    std::size_t failures = 0, frames = 0;
    for (const auto& t : traces) {
        failures += t.failures.size();
        frames += t.size();
    }
    r.failures_per_sequence = static_cast<double>(failures) / static_cast<double>(traces.size());
    r.failures_per_100_frames = frames == 0 ? 0.0 : 100.0 * static_cast<double>(failures) / static_cast<double>(frames);
    return r;
}

std::vector<double> expected_overlap_curve(const std::vector<RunTrace>& traces, int max_len) {
    struct Segment {
        std::vector<double> ov;
        bool failed = false;
    };
    std::vector<Segment> segments;
    for (const auto& t : traces) {
        Segment* cur = nullptr;
        for (std::size_t f = 0; f < t.size(); ++f) {
            switch (t.status[f]) {
                case FrameStatus::Init:
                    segments.emplace_back();
                    cur = &segments.back();
                    cur->ov.push_back(t.overlaps[f]);
                    break;
                case FrameStatus::Tracked:
                    if (cur) cur->ov.push_back(t.overlaps[f]);
                    break;
                case FrameStatus::Failure:
                    if (cur) {
                        cur->ov.push_back(0.0);
                        cur->failed = true;
                    }
                    cur = nullptr;
                    break;
                case FrameStatus::Skipped:
                    break;
            }
        }
    }
    std::vector<double> curve(static_cast<std::size_t>(std::max(max_len, 0)), std::numeric_limits<double>::quiet_NaN());
    for (int len = 1; len <= max_len; ++len) {
        double sum = 0.0;
        std::size_t count = 0;
        for (const auto& s : segments) {
            const auto covered = static_cast<int>(s.ov.size());
            if (!s.failed && covered < len) continue;
            double acc = 0.0;
            for (int i = 0; i < std::min(len, covered); ++i) acc += s.ov[static_cast<std::size_t>(i)];
            sum += acc / len;
            ++count;
        }
        if (count > 0) curve[static_cast<std::size_t>(len - 1)] = sum / static_cast<double>(count);
    }
    return curve;
}

double eao(const std::vector<RunTrace>& traces, int lo, int hi) {
    if (lo < 1 || hi < lo) throw std::invalid_argument("eao: interval must satisfy 1 <= lo <= hi");
    const auto curve = expected_overlap_curve(traces, hi);
    double sum = 0.0;
    int count = 0;
    for (int len = lo; len <= hi; ++len) {
        const double v = curve[static_cast<std::size_t>(len - 1)];
        if (std::isnan(v)) continue;
        sum += v;
        ++count;
    }
    return count == 0 ? std::numeric_limits<double>::quiet_NaN() : sum / count;
}

bool is_elongated(const OrientedBox& first, double th_r) {
    const double r = std::max(first.w / first.h, first.h / first.w);
    return r > th_r;
}

AspectSplit aspect_split(const std::vector<SequenceRecord>& seqs, double th_r) {
    AspectSplit out;
    for (std::size_t i = 0; i < seqs.size(); ++i) {
        if (seqs[i].groundtruth.empty()) throw std::invalid_argument("aspect_split: sequence without ground truth");
        (is_elongated(seqs[i].groundtruth.front(), th_r) ? out.elongated : out.mediocre).push_back(i);
    }
    return out;
}

}  // namespace rotsiam
