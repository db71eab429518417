#include "rotsiam/sequence_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace rotsiam {

namespace {

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error(path.string() + ": cannot open");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',' || c == ' ' || c == '\t' || c == '\r' || c == ';') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

double to_double(const std::string& s, int lineno) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos == 0 || pos != s.size()) {
        throw std::invalid_argument("line " + std::to_string(lineno) + ": bad number '" + s + "'");
    }
    return v;
}

bool is_image(const std::filesystem::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext == ".ppm" || ext == ".pgm" || ext == ".pnm" || ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

}  // namespace

std::vector<OrientedBox> parse_groundtruth(const std::string& text) {
    std::vector<OrientedBox> out;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto f = split_fields(line);
        if (f.empty()) continue;
        std::vector<double> v;
        for (const auto& s : f) v.push_back(to_double(s, lineno));
        if (v.size() == 4) {
            out.emplace_back(v[0] + 0.5 * v[2], v[1] + 0.5 * v[3], v[2], v[3], 0.0);
        } else if (v.size() == 8) {
            out.push_back(min_area_rect({{v[0], v[1]}, {v[2], v[3]}, {v[4], v[5]}, {v[6], v[7]}}));
        } else {
            throw std::invalid_argument("line " + std::to_string(lineno) + ": expected 4 or 8 numbers, got " +
                                        std::to_string(v.size()));
        }
    }
    return out;
}

std::vector<OrientedBox> load_groundtruth(const std::filesystem::path& path) {
    try {
        return parse_groundtruth(slurp(path));
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(path.string() + ": " + e.what());
    }
}

void save_groundtruth_polygons(const std::filesystem::path& path, const std::vector<OrientedBox>& boxes) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path.string() + ": cannot write");
    out << std::fixed << std::setprecision(4);
    for (const auto& b : boxes) {
        const auto c = b.corners();
        for (std::size_t i = 0; i < 4; ++i) out << (i ? "," : "") << c[i].x << ',' << c[i].y;
        out << '\n';
    }
}

std::vector<std::filesystem::path> list_frames(const std::filesystem::path& dir) {
    std::filesystem::path root = dir;
    if (std::filesystem::is_directory(dir / "img")) root = dir / "img";
    if (!std::filesystem::is_directory(root)) throw std::runtime_error(dir.string() + ": not a directory");
    std::vector<std::filesystem::path> out;
    for (const auto& e : std::filesystem::directory_iterator(root)) {
        if (e.is_regular_file() && is_image(e.path())) out.push_back(e.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

SequenceRecord load_sequence(const std::filesystem::path& frames_dir, const std::filesystem::path& gt_path,
                             std::string name) {
    SequenceRecord seq;
    seq.name = name.empty() ? frames_dir.filename().string() : std::move(name);
    seq.frame_paths = list_frames(frames_dir);
    seq.groundtruth = load_groundtruth(gt_path);
    seq.validate();
    return seq;
}

SequenceRecord load_sequence(const std::filesystem::path& dir) {
    for (const char* name : {"groundtruth.txt", "groundtruth_rect.txt"}) {
        if (std::filesystem::exists(dir / name)) return load_sequence(dir, dir / name);
    }
    throw std::runtime_error(dir.string() + ": no groundtruth.txt or groundtruth_rect.txt");
}

std::vector<SequenceRecord> load_sequences(const std::filesystem::path& root) {
    if (!std::filesystem::is_directory(root)) throw std::runtime_error(root.string() + ": not a directory");
    std::vector<std::filesystem::path> dirs;
    for (const auto& e : std::filesystem::directory_iterator(root)) {
        if (e.is_directory() &&
            (std::filesystem::exists(e.path() / "groundtruth.txt") || std::filesystem::exists(e.path() / "groundtruth_rect.txt"))) {
            dirs.push_back(e.path());
        }
    }
    std::sort(dirs.begin(), dirs.end());
    std::vector<SequenceRecord> out;
    for (const auto& d : dirs) out.push_back(load_sequence(d));
    return out;
}

std::string format_trace_csv(const RunTrace& trace, const std::vector<OrientedBox>& gt) {
    if (gt.size() != trace.size()) throw std::invalid_argument("trace csv: ground truth length mismatch");
    std::ostringstream o;
    o << "frame,status,x,y,w,h,theta,gt_x,gt_y,gt_w,gt_h,gt_theta,iou,center_error,failure\n";
    o << std::setprecision(10);
    for (std::size_t f = 0; f < trace.size(); ++f) {
        const auto& p = trace.predicted[f];
        const auto& g = gt[f];
        const bool fail = trace.status[f] == FrameStatus::Failure;
        o << f << ',' << to_string(trace.status[f]) << ',' << p.x << ',' << p.y << ',' << p.w << ',' << p.h << ','
          << p.theta << ',' << g.x << ',' << g.y << ',' << g.w << ',' << g.h << ',' << g.theta << ',' << trace.overlaps[f]
          << ',' << center_distance(p, g) << ',' << (fail ? 1 : 0) << '\n';
    }
    return o.str();
}

void save_trace_csv(const std::filesystem::path& path, const RunTrace& trace, const std::vector<OrientedBox>& gt) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path.string() + ": cannot write");
    out << format_trace_csv(trace, gt);
}

LoadedTrace parse_trace_csv(const std::string& text, std::string name) {
    LoadedTrace lt;
    lt.name = std::move(name);
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    if (!std::getline(in, line) || line.rfind("frame,status", 0) != 0) {
        throw std::invalid_argument("trace csv: missing header");
    }
    ++lineno;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) f.push_back(cell);
        if (f.size() != 15) throw std::invalid_argument("trace csv line " + std::to_string(lineno) + ": expected 15 fields");
        const FrameStatus st = parse_frame_status(f[1]);
        OrientedBox p(to_double(f[2], lineno), to_double(f[3], lineno), to_double(f[4], lineno), to_double(f[5], lineno),
                      to_double(f[6], lineno));
        OrientedBox g(to_double(f[7], lineno), to_double(f[8], lineno), to_double(f[9], lineno), to_double(f[10], lineno),
                      to_double(f[11], lineno));
        const int frame = static_cast<int>(lt.trace.size());
        double ov = 0.0;
        if (st == FrameStatus::Init || st == FrameStatus::Tracked) ov = rotated_iou(p, g);
        if (st == FrameStatus::Init) {
            if (!lt.trace.init_frames.empty()) ++lt.trace.reinit_count;
            lt.trace.init_frames.push_back(frame);
        }
        if (st == FrameStatus::Failure) lt.trace.failures.push_back(frame);
        lt.trace.predicted.push_back(p);
        lt.trace.overlaps.push_back(ov);
        lt.trace.status.push_back(st);
        lt.groundtruth.push_back(g);
    }
    return lt;
}

LoadedTrace load_trace_csv(const std::filesystem::path& path) {
    return parse_trace_csv(slurp(path), path.stem().string());
}

}  // namespace rotsiam
