#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rotsiam/geometry.hpp"
#include "rotsiam/image.hpp"
#include "rotsiam/tracker.hpp"

namespace rotsiam {

/// A tracking sequence: frames either on disk or in memory, with one
/// ground-truth box per frame (theta = 0 for upright annotations).
struct SequenceRecord {
    std::string name;
    std::vector<std::filesystem::path> frame_paths;
    std::vector<Image> images;
    std::vector<OrientedBox> groundtruth;

    std::size_t size() const noexcept { return groundtruth.size(); }
    Image frame(std::size_t i) const;
    /// Throws unless frames and ground truth agree in length and box 0 is valid.
    void validate() const;
};

enum class FrameStatus { Init, Tracked, Failure, Skipped };

std::string to_string(FrameStatus s);
FrameStatus parse_frame_status(const std::string& s);

struct RunTrace {
    std::vector<OrientedBox> predicted;
    std::vector<double> overlaps;
    std::vector<FrameStatus> status;
    std::vector<int> failures;
    std::vector<int> init_frames;
    int reinit_count = 0;

    std::size_t size() const noexcept { return predicted.size(); }
};

/// What the evaluation protocols drive.
class SequenceTracker {
public:
    virtual ~SequenceTracker() = default;
    virtual void initialize(const Image& frame, const OrientedBox& box, int frame_index) = 0;
    virtual OrientedBox update(const Image& frame, int frame_index) = 0;
    /// Protocols skip decoding frames for trackers that never look at them.
    virtual bool needs_frames() const { return true; }
};

/// Adapter around Tracker.
class RotationTracker final : public SequenceTracker {
public:
    explicit RotationTracker(TrackerConfig cfg);
    RotationTracker(TrackerConfig cfg, std::shared_ptr<const Extractor> extractor);
    void initialize(const Image& frame, const OrientedBox& box, int frame_index) override;
    OrientedBox update(const Image& frame, int frame_index) override;
    const TrackerState& state() const { return state_; }

private:
    Tracker tracker_;
    TrackerState state_;
};

/// Replays the ground truth.
class GroundTruthEcho final : public SequenceTracker {
public:
    explicit GroundTruthEcho(std::vector<OrientedBox> gt) : gt_(std::move(gt)) {}
    void initialize(const Image&, const OrientedBox&, int) override {}
    OrientedBox update(const Image&, int frame_index) override { return gt_.at(static_cast<std::size_t>(frame_index)); }
    bool needs_frames() const override { return false; }

private:
    std::vector<OrientedBox> gt_;
};

/// Emits whatever the script returns for a frame index.
class ScriptedTracker final : public SequenceTracker {
public:
    explicit ScriptedTracker(std::function<OrientedBox(int)> script) : script_(std::move(script)) {}
    void initialize(const Image&, const OrientedBox&, int) override {}
    OrientedBox update(const Image&, int frame_index) override { return script_(frame_index); }
    bool needs_frames() const override { return false; }

private:
    std::function<OrientedBox(int)> script_;
};

inline constexpr int kVotSkipFrames = 5;
inline constexpr int kVotBurnIn = 10;

/// One pass from the first frame, no resets.
RunTrace otb_run(SequenceTracker& tracker, const SequenceRecord& seq);

/// Reset protocol: zero overlap is a failure; the next `skip` frames are
/// skipped and the tracker is re-initialized from ground truth on the frame
/// after them.
RunTrace vot_run(SequenceTracker& tracker, const SequenceRecord& seq, int skip = kVotSkipFrames);

std::vector<double> overlaps(const std::vector<OrientedBox>& pred, const std::vector<OrientedBox>& gt);
std::vector<double> center_errors(const std::vector<OrientedBox>& pred, const std::vector<OrientedBox>& gt);

/// 0.00, 0.01, ..., 1.00.
std::vector<double> success_thresholds();

/// Fraction of frames with overlap > tau for each tau; a full overlap counts
/// at every threshold, including tau = 1.
std::vector<double> success_curve(const std::vector<double>& frame_overlaps,
                                  const std::vector<double>& thresholds = success_thresholds());
double auc(const std::vector<double>& curve);

/// Fraction of frames whose center error is <= radius.
double precision_at(const std::vector<double>& center_err, double radius = 20.0);
std::vector<double> precision_curve(const std::vector<double>& center_err, int max_radius = 50);

/// Mean overlap over tracked frames at least `burnin` frames after the last
/// (re)initialization; 0 when no frame qualifies.
double accuracy(const RunTrace& trace, int burnin = kVotBurnIn);

struct Robustness {
    double failures_per_sequence = 0.0;
    double failures_per_100_frames = 0.0;
};
Robustness robustness(const std::vector<RunTrace>& traces);

/// Expected overlap for segment lengths 1..max_len (index 0 is length 1).
/// A segment runs from a (re)initialization to its failure (padded with zeros
/// past the failure) or to the sequence end; segments that end without
/// failure only contribute to lengths they cover. NaN where no segment counts.
std::vector<double> expected_overlap_curve(const std::vector<RunTrace>& traces, int max_len);

/// Mean of the expected overlap curve over lengths [lo, hi], ignoring
/// undefined lengths; NaN if none is defined.
double eao(const std::vector<RunTrace>& traces, int lo = 108, int hi = 371);

/// r = max(w/h, h/w) of the first box; r > th_r is elongated.
struct AspectSplit {
    std::vector<std::size_t> elongated;
    std::vector<std::size_t> mediocre;
};
AspectSplit aspect_split(const std::vector<SequenceRecord>& seqs, double th_r = 1.5);
bool is_elongated(const OrientedBox& first, double th_r = 1.5);

}  // namespace rotsiam
