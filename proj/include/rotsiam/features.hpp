#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "rotsiam/image.hpp"

namespace rotsiam {

/// Dense channels x height x width feature tensor with its stride in input
/// pixels per cell.
class FeatureMap {
public:
    FeatureMap() = default;
    FeatureMap(int channels, int height, int width, double stride = 8.0);
    FeatureMap(int channels, int height, int width, double stride, std::vector<double> data);

    int channels() const noexcept { return channels_; }
    int height() const noexcept { return height_; }
    int width() const noexcept { return width_; }
    double stride() const noexcept { return stride_; }
    std::size_t size() const noexcept { return data_.size(); }

    double& at(int c, int y, int x) { return data_[(static_cast<std::size_t>(c) * height_ + y) * width_ + x]; }
    double at(int c, int y, int x) const { return data_[(static_cast<std::size_t>(c) * height_ + y) * width_ + x]; }

    std::vector<double>& data() noexcept { return data_; }
    const std::vector<double>& data() const noexcept { return data_; }

    bool same_shape(const FeatureMap& o) const noexcept {
        return channels_ == o.channels_ && height_ == o.height_ && width_ == o.width_;
    }
    bool operator==(const FeatureMap&) const = default;

private:
    int channels_ = 0;
    int height_ = 0;
    int width_ = 0;
    double stride_ = 8.0;
    std::vector<double> data_;
};

/// Two-level embedding: `lo` is the finer, shallower level (8x8 for a
/// template patch, 24x24 for a search patch), `hi` the deeper one (6x6 / 22x22).
struct FeaturePair {
    FeatureMap lo;
    FeatureMap hi;
    bool operator==(const FeaturePair&) const = default;
};

inline constexpr int kTemplateSize = 127;
inline constexpr int kSearchSize = 255;
inline constexpr double kFeatureStride = 8.0;

enum class ExtractorKind { GradientChannels, RandomConv, FileBased };

std::string to_string(ExtractorKind k);
ExtractorKind parse_extractor_kind(const std::string& s);

struct ExtractorSpec {
    ExtractorKind kind = ExtractorKind::GradientChannels;
    std::uint64_t seed = 1;
    /// Output channels of the three stacked convolutions (random-conv).
    int conv1_channels = 8;
    int conv2_channels = 16;
    int conv3_channels = 32;
    /// Box-pooling support in pixels around each cell center (gradient-channels).
    int lo_window = 8;
    int hi_window = 64;
    /// Manifest for the file-based extractor.
    std::filesystem::path manifest;

    bool operator==(const ExtractorSpec&) const = default;
};

enum class PatchRole { Template, Search };

/// Identifies which frame/candidate a patch was cut for. Built-in extractors
/// ignore it; the file-based extractor uses it to find precomputed features.
struct PatchKey {
    int frame = 0;
    PatchRole role = PatchRole::Template;
    double scale = 1.0;
    double angle = 0.0;
};

class Extractor {
public:
    virtual ~Extractor() = default;
    /// Patch must be kTemplateSize or kSearchSize square.
    virtual FeaturePair embed(const Image& patch, const PatchKey& key = {}) const = 0;
    virtual ExtractorKind kind() const = 0;
};

std::shared_ptr<const Extractor> make_extractor(const ExtractorSpec& spec);

/// Convenience: builds the extractor and embeds one patch.
FeaturePair embed(const ExtractorSpec& spec, const Image& patch, const PatchKey& key = {});

/// 8 orientation-binned gradient magnitudes (unsigned, pi/8 per bin, linear
/// soft assignment) plus centered intensity, box-pooled at stride 8.
class GradientChannelExtractor final : public Extractor {
public:
    static constexpr int kBins = 8;
    static constexpr int kChannels = kBins + 1;

    explicit GradientChannelExtractor(int lo_window = 8, int hi_window = 64);
    FeaturePair embed(const Image& patch, const PatchKey& key = {}) const override;
    ExtractorKind kind() const override { return ExtractorKind::GradientChannels; }

    /// Per-pixel channel planes (kChannels x n x n) before pooling.
    static std::vector<std::vector<double>> channel_planes(const Image& patch);

private:
    int lo_window_;
    int hi_window_;
};

/// Three 3x3 stride-2 convolutions with fixed-seed Gaussian weights and ReLU,
/// then 8x8 (lo) and 10x10 (hi) stride-1 average pooling.
class RandomConvExtractor final : public Extractor {
public:
    RandomConvExtractor(std::uint64_t seed, int c1, int c2, int c3);
    FeaturePair embed(const Image& patch, const PatchKey& key = {}) const override;
    ExtractorKind kind() const override { return ExtractorKind::RandomConv; }

private:
    struct ConvLayer {
        int in = 0;
        int out = 0;
        std::vector<double> weights;  // out x in x 3 x 3
        std::vector<double> bias;
    };
    std::vector<ConvLayer> layers_;
};

/// Reads precomputed features listed in a manifest. Each manifest line is
/// `<frame> <template|search> <scale> <angle> <path>`; paths are relative to
/// the manifest directory. Each file holds the lo then the hi record.
class FileFeatureExtractor final : public Extractor {
public:
    explicit FileFeatureExtractor(const std::filesystem::path& manifest);
    FeaturePair embed(const Image& patch, const PatchKey& key = {}) const override;
    ExtractorKind kind() const override { return ExtractorKind::FileBased; }

    struct Entry {
        PatchKey key;
        std::filesystem::path path;
    };
    const std::vector<Entry>& entries() const noexcept { return entries_; }

private:
    std::vector<Entry> entries_;
};

/// Sub-window of `search` of size out_h x out_w whose center cell is
/// `peak` (row, col); the window is shifted to stay inside the map.
FeatureMap crop_feature(const FeatureMap& search, int peak_row, int peak_col, int out_h, int out_w);
FeaturePair crop_feature(const FeaturePair& search, int resp_row, int resp_col, const FeaturePair& like);

// Binary feature files: "FMAP", u32 c, u32 h, u32 w, f32 stride, c*h*w f32,
// all little-endian. A feature-pair file is two such records (lo, hi).
void write_feature_map(std::ostream& out, const FeatureMap& map);
FeatureMap read_feature_map(std::istream& in);
void write_feature_file(const std::filesystem::path& path, const FeaturePair& pair);
FeaturePair read_feature_file(const std::filesystem::path& path);

}  // namespace rotsiam
