#include "rotsiam/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>
#include <stdexcept>

#include "rotsiam/config.hpp"
#include "rotsiam/sequence_io.hpp"

namespace rotsiam {

std::string to_string(Background b) {
    switch (b) {
        case Background::Flat: return "flat";
        case Background::Textured: return "textured";
        case Background::Distractor: return "distractor";
    }
    return "unknown";
}

Background parse_background(const std::string& s) {
    if (s == "flat") return Background::Flat;
    if (s == "textured") return Background::Textured;
    if (s == "distractor") return Background::Distractor;
    throw std::invalid_argument("unknown background '" + s + "'");
}

std::vector<OrientedBox> script_poses(const MotionScript& script) {
    std::vector<OrientedBox> poses;
    poses.reserve(script.frame_count());
    OrientedBox b = script.target;
    b.theta = normalize_angle(b.theta);
    poses.push_back(b);
    for (const auto& s : script.steps) {
        b.x += s.dx;
        b.y += s.dy;
        b.w *= s.ds;
        b.h *= s.ds;
        b.theta = normalize_angle(b.theta + s.dtheta);
        poses.push_back(b);
    }
    return poses;
}

OrientedBox distractor_box(const MotionScript& s) {
    const double d = s.distractor_distance * s.target.w;
    const double w = s.distractor_w > 0.0 ? s.distractor_w : s.target.w;
    const double h = s.distractor_h > 0.0 ? s.distractor_h : s.target.h;
    return {s.target.x + d * std::cos(s.distractor_direction), s.target.y + d * std::sin(s.distractor_direction), w, h, 0.0};
}

namespace {

bool inside_canvas(const OrientedBox& b, int width, int height) {
    for (const auto& c : b.corners()) {
        if (c.x < 0.0 || c.y < 0.0 || c.x > width - 1.0 || c.y > height - 1.0) return false;
    }
    return true;
}

/// Piecewise-constant block texture in box-normalized coordinates.
struct BlockTexture {
    int cols = 1;
    int rows = 1;
    int channels = 1;
    std::vector<float> values;  // rows x cols x channels

    float at(double u, double v, int ch) const {
        const int c = std::clamp(static_cast<int>(u * cols), 0, cols - 1);
        const int r = std::clamp(static_cast<int>(v * rows), 0, rows - 1);
        return values[(static_cast<std::size_t>(r) * cols + c) * channels + ch];
    }
};

BlockTexture make_blocks(int cols, int rows, int channels, std::mt19937_64& rng, bool binary, double contrast = 0.9) {
    BlockTexture t{cols, rows, channels, {}};
    std::uniform_real_distribution<double> level(0.5 - 0.5 * contrast, 0.5 + 0.5 * contrast);
    std::bernoulli_distribution coin(0.5);
    t.values.resize(static_cast<std::size_t>(cols) * rows * channels);
    for (std::size_t i = 0; i < t.values.size(); i += static_cast<std::size_t>(channels)) {
        for (int c = 0; c < channels; ++c) {
            t.values[i + c] = binary ? (coin(rng) ? 0.95f : 0.05f) : static_cast<float>(level(rng));
        }
    }
    // Keep neighbouring blocks distinguishable in the binary pattern.
    if (binary) {
        for (int r = 0; r < rows; ++r) {
            for (int c = 0; c < cols; ++c) {
                if ((r + c) % 2 == 0) continue;
                for (int ch = 0; ch < channels; ++ch) {
                    auto& v = t.values[(static_cast<std::size_t>(r) * cols + c) * channels + ch];
                    const auto& left = t.values[(static_cast<std::size_t>(r) * cols + (c > 0 ? c - 1 : c + 1)) * channels + ch];
                    if (v == left) v = 1.0f - v;
                }
            }
        }
    }
    return t;
}

Image render_background(const MotionScript& s, std::mt19937_64& rng) {
    Image bg(s.canvas_width, s.canvas_height, s.channels, 0.5f);
    if (s.background != Background::Textured) return bg;
    // Two octaves of bilinear value noise.
    for (const auto& [cell, amp] : {std::pair{32, 0.18}, std::pair{11, 0.07}}) {
        const int gw = s.canvas_width / cell + 2, gh = s.canvas_height / cell + 2;
        std::uniform_real_distribution<double> dist(-amp, amp);
        std::vector<double> grid(static_cast<std::size_t>(gw) * gh * s.channels);
        for (auto& g : grid) g = dist(rng);
        for (int y = 0; y < s.canvas_height; ++y) {
            const double gy = static_cast<double>(y) / cell;
            const int y0 = static_cast<int>(gy);
            const double fy = gy - y0;
            for (int x = 0; x < s.canvas_width; ++x) {
                const double gx = static_cast<double>(x) / cell;
                const int x0 = static_cast<int>(gx);
                const double fx = gx - x0;
                for (int c = 0; c < s.channels; ++c) {
                    auto G = [&](int yy, int xx) { return grid[(static_cast<std::size_t>(yy) * gw + xx) * s.channels + c]; };
                    const double v = (1 - fy) * ((1 - fx) * G(y0, x0) + fx * G(y0, x0 + 1)) +
                                     fy * ((1 - fx) * G(y0 + 1, x0) + fx * G(y0 + 1, x0 + 1));
                    bg.at(y, x, c) += static_cast<float>(v);
                }
            }
        }
    }
    return bg;
}

// Paints a textured box with 3x3 supersampling over whatever is underneath.
void paint_box(Image& img, const OrientedBox& b, const BlockTexture& tex) {
    const AxisBox bb = bounding_axis_box(b);
    const int x0 = std::max(0, static_cast<int>(std::floor(bb.x - 0.5 * bb.w)) - 1);
    const int x1 = std::min(img.width() - 1, static_cast<int>(std::ceil(bb.x + 0.5 * bb.w)) + 1);
    const int y0 = std::max(0, static_cast<int>(std::floor(bb.y - 0.5 * bb.h)) - 1);
    const int y1 = std::min(img.height() - 1, static_cast<int>(std::ceil(bb.y + 0.5 * bb.h)) + 1);
    const double c = std::cos(b.theta), s = std::sin(b.theta);
    constexpr int kSub = 3;
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            for (int ch = 0; ch < img.channels(); ++ch) {
                const float under = img.at(y, x, ch);
                double acc = 0.0;
                for (int sy = 0; sy < kSub; ++sy) {
                    for (int sx = 0; sx < kSub; ++sx) {
                        const double px = x + (sx - 1) / 3.0 - b.x;
                        const double py = y + (sy - 1) / 3.0 - b.y;
                        const double u = c * px + s * py;
                        const double v = -s * px + c * py;
                        if (std::abs(u) <= 0.5 * b.w && std::abs(v) <= 0.5 * b.h) {
                            acc += tex.at(u / b.w + 0.5, v / b.h + 0.5, ch);
                        } else {
                            acc += under;
                        }
                    }
                }
                img.at(y, x, ch) = static_cast<float>(acc / (kSub * kSub));
            }
        }
    }
}

}  // namespace

void MotionScript::validate() const {
    auto fail = [](const std::string& m) { throw std::invalid_argument("motion script: " + m); };
    if (canvas_width < 16 || canvas_height < 16) fail("canvas too small");
    if (channels != 1 && channels != 3) fail("channels must be 1 or 3");
    rotsiam::validate(target);
    if (noise_sigma < 0.0) fail("noise_sigma must be non-negative");
    if (texture_cols < 1 || texture_rows < 1) fail("texture grid must be at least 1x1");
    if (distractor_cols < 1 || distractor_rows < 1) fail("distractor grid must be at least 1x1");
    if (!(target_contrast >= 0.0 && target_contrast <= 1.0)) fail("target_contrast must be in [0, 1]");
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const auto& s = steps[i];
        if (!(std::isfinite(s.dx) && std::isfinite(s.dy) && std::isfinite(s.ds) && std::isfinite(s.dtheta))) {
            fail("step " + std::to_string(i + 1) + " is not finite");
        }
        if (std::abs(s.ds - 1.0) > kMaxStepScaleChange + 1e-12) fail("step " + std::to_string(i + 1) + ": |ds - 1| > 0.05");
        if (std::abs(s.dtheta) > kMaxStepRotation + 1e-12) fail("step " + std::to_string(i + 1) + ": |dtheta| > pi/8");
    }
    const auto poses = script_poses(*this);
    for (std::size_t t = 0; t < poses.size(); ++t) {
        if (!inside_canvas(poses[t], canvas_width, canvas_height)) fail("target leaves the canvas at frame " + std::to_string(t));
    }
    if (background == Background::Distractor) {
        const OrientedBox d = distractor_box(*this);
        if (!inside_canvas(d, canvas_width, canvas_height)) fail("distractor does not fit on the canvas");
        for (std::size_t t = 0; t < poses.size(); ++t) {
            if (rotated_iou(d, poses[t]) > 0.0) fail("distractor overlaps the target at frame " + std::to_string(t));
        }
    }
}

SequenceRecord synth_sequence(const MotionScript& script, std::string name) {
    script.validate();
    std::mt19937_64 rng(script.seed);
    const BlockTexture target_tex = make_blocks(script.texture_cols, script.texture_rows, script.channels, rng, false, script.target_contrast);
    const BlockTexture distractor_tex = make_blocks(script.distractor_cols, script.distractor_rows, script.channels, rng, true);
    Image base = render_background(script, rng);
    if (script.background == Background::Distractor) paint_box(base, distractor_box(script), distractor_tex);

    SequenceRecord seq;
    seq.name = std::move(name);
    seq.groundtruth = script_poses(script);
    seq.images.reserve(seq.groundtruth.size());
    for (std::size_t t = 0; t < seq.groundtruth.size(); ++t) {
        Image frame = base;
        paint_box(frame, seq.groundtruth[t], target_tex);
        std::mt19937_64 noise_rng(script.seed * 0x9E3779B97F4A7C15ULL + t + 1);
        std::normal_distribution<double> noise(0.0, script.noise_sigma > 0.0 ? script.noise_sigma : 1.0);
        for (float& v : frame.pixels()) {
            double x = v;
            if (script.noise_sigma > 0.0) x += noise(noise_rng);
            // Quantize so the in-memory frames equal what the 8-bit files hold.
            v = static_cast<float>(std::lround(std::clamp(x, 0.0, 1.0) * 255.0)) / 255.0f;
        }
        seq.images.push_back(std::move(frame));
    }
    return seq;
}

namespace {

std::vector<double> parse_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(parse_real(item));
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("motion script: " + key + ": " + e.what());
        }
    }
    return out;
}

}  // namespace

MotionScript parse_motion_script(const std::string& text) {
    std::string rest;
    const auto kv = parse_key_values(text, &rest);
    MotionScript s;
    MotionStep constant;
    int n_frames = 1;
    auto real = [&](const std::string& key, const std::string& v) {
        const auto l = parse_list(key, v);
        if (l.size() != 1) throw std::invalid_argument("motion script: " + key + " expects one number");
        return l[0];
    };
    auto integer = [&](const std::string& key, const std::string& v) {
        const double d = real(key, v);
        if (d != std::floor(d)) throw std::invalid_argument("motion script: " + key + " expects an integer");
        return static_cast<int>(d);
    };
    for (const auto& [key, v] : kv) {
        if (key == "canvas_width") s.canvas_width = integer(key, v);
        else if (key == "canvas_height") s.canvas_height = integer(key, v);
        else if (key == "channels") s.channels = integer(key, v);
        else if (key == "target") {
            const auto l = parse_list(key, v);
            if (l.size() != 4 && l.size() != 5) throw std::invalid_argument("motion script: target expects x,y,w,h[,theta]");
            s.target = OrientedBox(l[0], l[1], l[2], l[3], l.size() == 5 ? l[4] : 0.0);
        } else if (key == "background") s.background = parse_background(v);
        else if (key == "seed" || key == "texture_seed") s.seed = static_cast<std::uint64_t>(std::stoull(v));
        else if (key == "noise_sigma") s.noise_sigma = real(key, v);
        else if (key == "texture_cols") s.texture_cols = integer(key, v);
        else if (key == "texture_rows") s.texture_rows = integer(key, v);
        else if (key == "target_contrast") s.target_contrast = real(key, v);
        else if (key == "distractor_cols") s.distractor_cols = integer(key, v);
        else if (key == "distractor_rows") s.distractor_rows = integer(key, v);
        else if (key == "distractor_distance") s.distractor_distance = real(key, v);
        else if (key == "distractor_direction") s.distractor_direction = real(key, v);
        else if (key == "distractor_size") {
            const auto l = parse_list(key, v);
            if (l.size() != 2) throw std::invalid_argument("motion script: distractor_size expects w,h");
            s.distractor_w = l[0];
            s.distractor_h = l[1];
        } else if (key == "n_frames") n_frames = integer(key, v);
        else if (key == "dx") constant.dx = real(key, v);
        else if (key == "dy") constant.dy = real(key, v);
        else if (key == "ds") constant.ds = real(key, v);
        else if (key == "dtheta") constant.dtheta = real(key, v);
        else throw std::invalid_argument("motion script: unknown key '" + key + "'");
    }
    if (!rest.empty()) {
        std::istringstream in(rest);
        std::string line;
        bool header = false;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            std::string compact;
            for (char c : line) {
                if (!std::isspace(static_cast<unsigned char>(c))) compact.push_back(c);
            }
            if (!header) {
                if (compact != "dx,dy,ds,dtheta") {
                    throw std::invalid_argument("motion script: expected 'dx,dy,ds,dtheta' header, got '" + compact + "'");
                }
                header = true;
                continue;
            }
            const auto l = parse_list("motion row " + std::to_string(lineno), compact);
            if (l.size() != 4) throw std::invalid_argument("motion script: motion rows need 4 values");
            s.steps.push_back({l[0], l[1], l[2], l[3]});
        }
    } else {
        if (n_frames < 1) throw std::invalid_argument("motion script: n_frames must be >= 1");
        s.steps.assign(static_cast<std::size_t>(n_frames - 1), constant);
    }
    s.validate();
    return s;
}

MotionScript load_motion_script(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("motion script " + path.string() + ": cannot open");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_motion_script(ss.str());
}

void write_sequence(const SequenceRecord& seq, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    for (std::size_t t = 0; t < seq.size(); ++t) {
        const Image img = seq.frame(t);
        char name[32];
        std::snprintf(name, sizeof name, "%08zu.%s", t + 1, img.channels() == 1 ? "pgm" : "ppm");
        save_pnm(img, dir / name);
    }
    save_groundtruth_polygons(dir / "groundtruth.txt", seq.groundtruth);
    std::ofstream o(dir / "groundtruth_oriented.csv");
    if (!o) throw std::runtime_error((dir / "groundtruth_oriented.csv").string() + ": cannot write");
    o << "x,y,w,h,theta\n" << std::setprecision(17);
    for (const auto& b : seq.groundtruth) o << b.x << ',' << b.y << ',' << b.w << ',' << b.h << ',' << b.theta << '\n';
}

}  // namespace rotsiam
