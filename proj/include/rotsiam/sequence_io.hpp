#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "rotsiam/eval.hpp"

namespace rotsiam {

/// One box per line. Four numbers are an upright "x,y,w,h" box with (x, y)
/// the top-left corner; eight numbers are a polygon, converted to its
/// minimum-area rectangle. Separators may be commas, tabs or spaces.
std::vector<OrientedBox> parse_groundtruth(const std::string& text);
std::vector<OrientedBox> load_groundtruth(const std::filesystem::path& path);

/// Writes polygon lines (x1,y1,...,x4,y4).
void save_groundtruth_polygons(const std::filesystem::path& path, const std::vector<OrientedBox>& boxes);

/// Image files of a frame directory (or its `img/` subdirectory), sorted by name.
std::vector<std::filesystem::path> list_frames(const std::filesystem::path& dir);

SequenceRecord load_sequence(const std::filesystem::path& frames_dir, const std::filesystem::path& gt_path,
                             std::string name = {});
/// A directory holding the frames and groundtruth.txt or groundtruth_rect.txt.
SequenceRecord load_sequence(const std::filesystem::path& dir);
/// Every subdirectory of `root` that looks like a sequence, sorted by name.
std::vector<SequenceRecord> load_sequences(const std::filesystem::path& root);

/// Per-frame trace CSV: frame, status, predicted pose, ground-truth pose,
/// IoU, center error, failure flag.
std::string format_trace_csv(const RunTrace& trace, const std::vector<OrientedBox>& gt);
void save_trace_csv(const std::filesystem::path& path, const RunTrace& trace, const std::vector<OrientedBox>& gt);

struct LoadedTrace {
    std::string name;
    RunTrace trace;
    std::vector<OrientedBox> groundtruth;
};
LoadedTrace parse_trace_csv(const std::string& text, std::string name = {});
LoadedTrace load_trace_csv(const std::filesystem::path& path);

}  // namespace rotsiam
