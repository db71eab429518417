#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "rotsiam/features.hpp"
#include "rotsiam/geometry.hpp"

namespace rotsiam {

/// Tracker parameters. Defaults are the reference settings: three scales and
/// three angles, 0.975 / 0.973 angle / scale penalties, aspect-ratio gate 1.5
/// and template blend weights 0.5 / 0.006.
struct TrackerConfig {
    int M = 3;  ///< scale hypotheses (odd)
    int N = 3;  ///< angle hypotheses (odd)
    double scale_step = 1.0375;
    double angle_step = kPi / 8.0;
    double angle_penalty = 0.975;
    double scale_penalty = 0.973;
    double th_r = 1.5;
    double lambda_S = 0.5;
    double lambda_U = 0.006;

    double window_weight = 0.176;
    double fusion_weight_lo = 0.5;
    double fusion_weight_hi = 0.5;
    int upsample = 16;
    /// Penalize before windowing instead of after.
    bool penalty_before_window = false;
    /// Subtract each template channel's mean before correlating.
    bool center_template = true;
    /// Divide each level response by the template and local search-window
    /// norms (normalized cross-correlation) instead of the template energy.
    bool normalized_correlation = true;
    /// Fused scores become exp(k * (r - 1)), a Gaussian kernel on the
    /// normalized feature distance; 0 keeps them linear. Near-identical
    /// hypotheses are otherwise too close for the selection penalties to mean
    /// anything.
    double score_sharpness = 20.0;

    ExtractorSpec extractor;

    bool mask_enabled = true;
    bool angle_enabled = true;
    bool update_enabled = true;
    /// Cells zeroed on each side of the 8x8 and 6x6 template levels.
    int mask_band_lo = 2;
    int mask_band_hi = 1;
    /// Which levels count as semantic (the only ones that get masked); hi
    /// stands in for the semantic branch.
    bool mask_lo = false;
    bool mask_hi = true;

    /// Bounds on the accumulated scale relative to the initial box.
    double min_scale = 0.2;
    double max_scale = 5.0;

    /// Throws std::invalid_argument describing the first violated constraint.
    void validate() const;

    bool operator==(const TrackerConfig&) const = default;
};

/// Parses numbers and multiples of pi: "0.5", "pi/8", "-pi/8", "2*pi/3".
double parse_real(const std::string& text);

/// Applies one `key = value` setting; unknown keys throw.
void apply_setting(TrackerConfig& cfg, const std::string& key, const std::string& value);

/// Flat key-value text: one `key = value` per line, '#' starts a comment.
TrackerConfig parse_config(const std::string& text);
TrackerConfig load_config(const std::filesystem::path& path);
/// Every key, in a stable order, round-trippable through parse_config.
std::string format_config(const TrackerConfig& cfg);

/// Splits flat key-value text into a map; a line without '=' ends the
/// key-value section and its position is returned through `rest` if given.
std::map<std::string, std::string> parse_key_values(const std::string& text, std::string* rest = nullptr);

}  // namespace rotsiam
