#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rotsiam/eval.hpp"

namespace rotsiam {

/// Change applied between consecutive frames.
struct MotionStep {
    double dx = 0.0;
    double dy = 0.0;
    double ds = 1.0;
    double dtheta = 0.0;
};

enum class Background { Flat, Textured, Distractor };

std::string to_string(Background b);
Background parse_background(const std::string& s);

inline constexpr double kMaxStepScaleChange = 0.05;
inline constexpr double kMaxStepRotation = kPi / 8.0;

struct MotionScript {
    int canvas_width = 320;
    int canvas_height = 320;
    int channels = 1;
    OrientedBox target{160.0, 160.0, 48.0, 48.0, 0.0};
    /// steps[t - 1] moves the target from frame t - 1 to frame t.
    std::vector<MotionStep> steps;
    Background background = Background::Flat;
    std::uint64_t seed = 1;
    double noise_sigma = 0.0;
    /// Target block texture: cells across width and height.
    int texture_cols = 4;
    int texture_rows = 4;
    /// Target block levels are drawn from 0.5 +- contrast / 2.
    double target_contrast = 0.9;
    /// Static distractor, used with Background::Distractor. Center-to-center
    /// distance in target widths along `distractor_direction` (radians).
    double distractor_distance = 2.0;
    double distractor_direction = 0.0;
    double distractor_w = 0.0;  ///< 0: same as the target
    double distractor_h = 0.0;
    /// Distractor checker pattern (binary 0.05 / 0.95 blocks).
    int distractor_cols = 3;
    int distractor_rows = 6;

    std::size_t frame_count() const noexcept { return steps.size() + 1; }
    /// Throws std::invalid_argument on out-of-envelope steps or bad geometry.
    void validate() const;
};

/// Exact ground-truth pose for every frame.
std::vector<OrientedBox> script_poses(const MotionScript& script);

/// Where the distractor sits (fixed for the whole sequence).
OrientedBox distractor_box(const MotionScript& script);

/// Renders the sequence in memory. Throws if the target (or distractor)
/// leaves the canvas in any frame.
SequenceRecord synth_sequence(const MotionScript& script, std::string name = "synthetic");

/// Flat `key = value` settings, optionally followed by a `dx,dy,ds,dtheta`
/// header line and one CSV row per frame transition. Without the block,
/// `n_frames` and constant `dx`, `dy`, `ds`, `dtheta` keys describe the motion.
MotionScript parse_motion_script(const std::string& text);
MotionScript load_motion_script(const std::filesystem::path& path);

/// Writes frames as %08d.ppm/.pgm (1-based), groundtruth.txt polygons, and
/// groundtruth_oriented.csv with the exact x,y,w,h,theta.
void write_sequence(const SequenceRecord& seq, const std::filesystem::path& dir);

}  // namespace rotsiam
