#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "rotsiam/config.hpp"
#include "rotsiam/eval.hpp"

namespace rotsiam {

struct LabeledConfig {
    std::string label;
    TrackerConfig cfg;
};

/// Base configuration plus the toggles to sweep ("angle", "mask", "update").
struct AblationGrid {
    TrackerConfig base;
    std::vector<std::string> axes{"angle", "mask", "update"};
    int eao_lo = 108;
    int eao_hi = 371;

    /// 2^axes configs; the first axis varies slowest, off before on.
    std::vector<LabeledConfig> expand() const;
};

/// Tracker settings plus optional `axes = angle,mask,update`, `eao_lo`, `eao_hi`.
AblationGrid parse_ablation_grid(const std::string& text);
AblationGrid load_ablation_grid(const std::filesystem::path& path);

struct AblationOptions {
    int eao_lo = 108;
    int eao_hi = 371;
    /// Worker threads over sequences; 0 picks the hardware concurrency.
    unsigned threads = 0;
};

struct AblationRow {
    std::string label;
    bool angle_enabled = false;
    bool mask_enabled = false;
    bool update_enabled = false;
    std::size_t sequences = 0;
    std::size_t frames = 0;
    double auc = 0.0;           ///< OTB pass, all frames pooled
    double precision20 = 0.0;
    double mean_iou = 0.0;      ///< OTB pass, mean over frames after the first
    double accuracy = 0.0;      ///< reset protocol, mean over sequences
    double failures_per_sequence = 0.0;
    double failures_per_100_frames = 0.0;
    double eao = 0.0;           ///< NaN when no segment length in range is defined
};

/// Runs every config on every sequence (OTB pass and reset-protocol pass).
/// Sequences are spread over worker threads; results are combined in input
/// order so the report does not depend on scheduling.
std::vector<AblationRow> run_ablation(const std::vector<LabeledConfig>& configs, const std::vector<SequenceRecord>& seqs,
                                      const AblationOptions& opts = {});

std::string format_ablation_csv(const std::vector<AblationRow>& rows);

}  // namespace rotsiam
