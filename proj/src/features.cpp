#include "rotsiam/features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "rotsiam/geometry.hpp"

namespace rotsiam {

FeatureMap::FeatureMap(int channels, int height, int width, double stride)
    : channels_(channels), height_(height), width_(width), stride_(stride) {
    if (channels <= 0 || height <= 0 || width <= 0 || !(stride > 0.0)) {
        throw std::invalid_argument("feature map: invalid geometry");
    }
    data_.assign(static_cast<std::size_t>(channels) * height * width, 0.0);
}

FeatureMap::FeatureMap(int channels, int height, int width, double stride, std::vector<double> data)
    : FeatureMap(channels, height, width, stride) {
    if (data.size() != data_.size()) throw std::invalid_argument("feature map: data length mismatch");
    data_ = std::move(data);
}

std::string to_string(ExtractorKind k) {
    switch (k) {
        case ExtractorKind::GradientChannels: return "gradient-channels";
        case ExtractorKind::RandomConv: return "random-conv";
        case ExtractorKind::FileBased: return "file-based";
    }
    return "unknown";
}

ExtractorKind parse_extractor_kind(const std::string& s) {
    if (s == "gradient-channels") return ExtractorKind::GradientChannels;
    if (s == "random-conv") return ExtractorKind::RandomConv;
    if (s == "file-based") return ExtractorKind::FileBased;
    throw std::invalid_argument("unknown extractor kind '" + s + "'");
}

namespace {

void check_patch(const Image& patch) {
    if (patch.width() != patch.height() || (patch.width() != kTemplateSize && patch.width() != kSearchSize)) {
        throw std::invalid_argument("embed: patch must be 127x127 or 255x255, got " + std::to_string(patch.width()) +
                                    "x" + std::to_string(patch.height()));
    }
}

// Summed-area table with one row/column of zero padding.
std::vector<double> integral(const std::vector<double>& plane, int n) {
    std::vector<double> s(static_cast<std::size_t>(n + 1) * (n + 1), 0.0);
    for (int y = 0; y < n; ++y) {
        double row = 0.0;
        for (int x = 0; x < n; ++x) {
            row += plane[static_cast<std::size_t>(y) * n + x];
            s[static_cast<std::size_t>(y + 1) * (n + 1) + x + 1] = s[static_cast<std::size_t>(y) * (n + 1) + x + 1] + row;
        }
    }
    return s;
}

// Cells sit on the stride-8 lattice centered on the patch; each averages a
// (window + 1)^2 box around its center. `base` is the template cell count.
FeatureMap box_pool(const std::vector<std::vector<double>>& tables, int n, int window, int base) {
    const int cells = base + (n - kTemplateSize) / kFeatureStride;
    const int first = (n - 1) / 2 - kFeatureStride * (cells - 1) / 2;
    const int half = window / 2;
    FeatureMap out(static_cast<int>(tables.size()), cells, cells, kFeatureStride);
    const double norm = 1.0 / ((2.0 * half + 1.0) * (2.0 * half + 1.0));
    const int stride = n + 1;
    for (std::size_t c = 0; c < tables.size(); ++c) {
        const auto& s = tables[c];
        for (int i = 0; i < cells; ++i) {
            const int y0 = first + kFeatureStride * i - half, y1 = y0 + 2 * half + 1;
            for (int j = 0; j < cells; ++j) {
                const int x0 = first + kFeatureStride * j - half, x1 = x0 + 2 * half + 1;
                const double sum = s[static_cast<std::size_t>(y1) * stride + x1] - s[static_cast<std::size_t>(y0) * stride + x1] -
                                   s[static_cast<std::size_t>(y1) * stride + x0] + s[static_cast<std::size_t>(y0) * stride + x0];
                out.at(static_cast<int>(c), i, j) = sum * norm;
            }
        }
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// gradient channels

GradientChannelExtractor::GradientChannelExtractor(int lo_window, int hi_window)
    : lo_window_(lo_window), hi_window_(hi_window) {
    // Outermost template cell centers are 35 px (lo) and 43 px (hi) from the border.
    if (lo_window < 2 || hi_window < 2 || lo_window / 2 > 35 || hi_window / 2 > 43) {
        throw std::invalid_argument("gradient-channels: pooling windows must be in [2, 71] (lo) and [2, 87] (hi) px");
    }
}

std::vector<std::vector<double>> GradientChannelExtractor::channel_planes(const Image& patch) {
    const int n = patch.width();
    const std::vector<float> lum = patch.luminance();
    auto L = [&](int y, int x) {
        x = std::clamp(x, 0, n - 1);
        y = std::clamp(y, 0, n - 1);
        return static_cast<double>(lum[static_cast<std::size_t>(y) * n + x]);
    };
    std::vector<std::vector<double>> planes(kChannels, std::vector<double>(static_cast<std::size_t>(n) * n, 0.0));
    const double bin_width = kPi / kBins;
    for (int y = 0; y < n; ++y) {
        for (int x = 0; x < n; ++x) {
            const std::size_t idx = static_cast<std::size_t>(y) * n + x;
            const double gx = 0.5 * (L(y, x + 1) - L(y, x - 1));
            const double gy = 0.5 * (L(y + 1, x) - L(y - 1, x));
            const double mag = std::hypot(gx, gy);
            planes[kBins][idx] = L(y, x) - 0.5;
            if (mag <= 0.0) continue;
            double o = std::atan2(gy, gx);
            if (o < 0.0) o += kPi;
            if (o >= kPi) o -= kPi;
            const double b = o / bin_width;
            const int b0 = static_cast<int>(std::floor(b)) % kBins;
            const double frac = b - std::floor(b);
            planes[b0][idx] += (1.0 - frac) * mag;
            planes[(b0 + 1) % kBins][idx] += frac * mag;
        }
    }
    return planes;
}

FeaturePair GradientChannelExtractor::embed(const Image& patch, const PatchKey&) const {
    check_patch(patch);
    const int n = patch.width();
    const auto planes = channel_planes(patch);
    std::vector<std::vector<double>> tables;
    tables.reserve(planes.size());
    for (const auto& p : planes) tables.push_back(integral(p, n));
    return {box_pool(tables, n, lo_window_, 8), box_pool(tables, n, hi_window_, 6)};
}

// ---------------------------------------------------------------------------
// random conv

RandomConvExtractor::RandomConvExtractor(std::uint64_t seed, int c1, int c2, int c3) {
    if (c1 <= 0 || c2 <= 0 || c3 <= 0) throw std::invalid_argument("random-conv: channel counts must be positive");
    std::mt19937_64 rng(seed);
    int in = 1;
    for (int out : {c1, c2, c3}) {
        ConvLayer layer;
        layer.in = in;
        layer.out = out;
        std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / (9.0 * in)));
        layer.weights.resize(static_cast<std::size_t>(out) * in * 9);
        for (auto& w : layer.weights) w = dist(rng);
        layer.bias.assign(static_cast<std::size_t>(out), 0.0);
        layers_.push_back(std::move(layer));
        in = out;
    }
}

namespace {

// Valid 3x3 convolution with stride 2 followed by ReLU.
FeatureMap conv3x3_s2(const FeatureMap& x, const std::vector<double>& w, const std::vector<double>& b, int out_c) {
    const int oh = (x.height() - 3) / 2 + 1, ow = (x.width() - 3) / 2 + 1;
    FeatureMap y(out_c, oh, ow, x.stride() * 2.0);
    const int in_c = x.channels();
    for (int o = 0; o < out_c; ++o) {
        for (int i = 0; i < oh; ++i) {
            for (int j = 0; j < ow; ++j) {
                double acc = b[static_cast<std::size_t>(o)];
                for (int c = 0; c < in_c; ++c) {
                    const double* k = &w[(static_cast<std::size_t>(o) * in_c + c) * 9];
                    for (int dy = 0; dy < 3; ++dy) {
                        for (int dx = 0; dx < 3; ++dx) acc += k[dy * 3 + dx] * x.at(c, 2 * i + dy, 2 * j + dx);
                    }
                }
                y.at(o, i, j) = std::max(acc, 0.0);
            }
        }
    }
    return y;
}

FeatureMap avg_pool(const FeatureMap& x, int window) {
    const int oh = x.height() - window + 1, ow = x.width() - window + 1;
    FeatureMap y(x.channels(), oh, ow, x.stride());
    const double norm = 1.0 / (static_cast<double>(window) * window);
    for (int c = 0; c < x.channels(); ++c) {
        for (int i = 0; i < oh; ++i) {
            for (int j = 0; j < ow; ++j) {
                double acc = 0.0;
                for (int dy = 0; dy < window; ++dy) {
                    for (int dx = 0; dx < window; ++dx) acc += x.at(c, i + dy, j + dx);
                }
                y.at(c, i, j) = acc * norm;
            }
        }
    }
    return y;
}

}  // namespace

FeaturePair RandomConvExtractor::embed(const Image& patch, const PatchKey&) const {
    check_patch(patch);
    const int n = patch.width();
    const std::vector<float> lum = patch.luminance();
    FeatureMap x(1, n, n, 1.0);
    for (std::size_t i = 0; i < lum.size(); ++i) x.data()[i] = static_cast<double>(lum[i]) - 0.5;
    for (const auto& layer : layers_) x = conv3x3_s2(x, layer.weights, layer.bias, layer.out);
    return {avg_pool(x, 8), avg_pool(x, 10)};
}

// ---------------------------------------------------------------------------
// file based

FileFeatureExtractor::FileFeatureExtractor(const std::filesystem::path& manifest) {
    std::ifstream in(manifest);
    if (!in) throw std::runtime_error("feature manifest " + manifest.string() + ": cannot open");
    const auto base = manifest.parent_path();
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        Entry e;
        std::string role, path;
        if (!(ss >> e.key.frame)) continue;
        if (!(ss >> role >> e.key.scale >> e.key.angle >> path)) {
            throw std::runtime_error("feature manifest line " + std::to_string(lineno) + ": expected 5 fields");
        }
        if (role == "template") {
            e.key.role = PatchRole::Template;
        } else if (role == "search") {
            e.key.role = PatchRole::Search;
        } else {
            throw std::runtime_error("feature manifest line " + std::to_string(lineno) + ": bad role '" + role + "'");
        }
        e.path = std::filesystem::path(path).is_absolute() ? std::filesystem::path(path) : base / path;
        entries_.push_back(std::move(e));
    }
}

FeaturePair FileFeatureExtractor::embed(const Image& patch, const PatchKey& key) const {
    check_patch(patch);
    const bool want_template = patch.width() == kTemplateSize;
    if (want_template != (key.role == PatchRole::Template)) {
        throw std::invalid_argument("file-based extractor: patch size does not match key role");
    }
    for (const auto& e : entries_) {
        if (e.key.frame == key.frame && e.key.role == key.role && std::abs(e.key.scale - key.scale) < 1e-6 &&
            std::abs(e.key.angle - key.angle) < 1e-6) {
            FeaturePair pair = read_feature_file(e.path);
            const int lo = want_template ? 8 : 24, hi = want_template ? 6 : 22;
            if (pair.lo.height() != lo || pair.lo.width() != lo || pair.hi.height() != hi || pair.hi.width() != hi) {
                throw std::runtime_error("feature file " + e.path.string() + ": unexpected map geometry");
            }
            return pair;
        }
    }
    std::ostringstream msg;
    msg << "file-based extractor: no features for frame " << key.frame << " ("
        << (key.role == PatchRole::Template ? "template" : "search") << ", s=" << key.scale << ", a=" << key.angle << ")";
    throw std::runtime_error(msg.str());
}

// ---------------------------------------------------------------------------

std::shared_ptr<const Extractor> make_extractor(const ExtractorSpec& spec) {
    switch (spec.kind) {
        case ExtractorKind::GradientChannels:
            return std::make_shared<GradientChannelExtractor>(spec.lo_window, spec.hi_window);
        case ExtractorKind::RandomConv:
            return std::make_shared<RandomConvExtractor>(spec.seed, spec.conv1_channels, spec.conv2_channels,
                                                         spec.conv3_channels);
        case ExtractorKind::FileBased:
            return std::make_shared<FileFeatureExtractor>(spec.manifest);
    }
    throw std::invalid_argument("unknown extractor kind");
}

FeaturePair embed(const ExtractorSpec& spec, const Image& patch, const PatchKey& key) {
    return make_extractor(spec)->embed(patch, key);
}

FeatureMap crop_feature(const FeatureMap& search, int peak_row, int peak_col, int out_h, int out_w) {
    if (out_h <= 0 || out_w <= 0 || out_h > search.height() || out_w > search.width()) {
        throw std::invalid_argument("crop_feature: window larger than the feature map");
    }
    const int top = std::clamp(peak_row - out_h / 2, 0, search.height() - out_h);
    const int left = std::clamp(peak_col - out_w / 2, 0, search.width() - out_w);
    FeatureMap out(search.channels(), out_h, out_w, search.stride());
    for (int c = 0; c < search.channels(); ++c) {
        for (int i = 0; i < out_h; ++i) {
            for (int j = 0; j < out_w; ++j) out.at(c, i, j) = search.at(c, top + i, left + j);
        }
    }
    return out;
}

FeaturePair crop_feature(const FeaturePair& search, int resp_row, int resp_col, const FeaturePair& like) {
    const auto level = [&](const FeatureMap& s, const FeatureMap& t) {
        return crop_feature(s, resp_row + t.height() / 2, resp_col + t.width() / 2, t.height(), t.width());
    };
    return {level(search.lo, like.lo), level(search.hi, like.hi)};
}

}  // namespace rotsiam
