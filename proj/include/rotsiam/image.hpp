#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace rotsiam {

/// Interleaved, row-major image with 1 or 3 channels and values in [0, 1].
/// Pixel (row, col) has its center at continuous coordinate (x=col, y=row).
class Image {
public:
    Image() = default;
    Image(int width, int height, int channels, float fill = 0.0f);
    Image(int width, int height, int channels, std::vector<float> pixels);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    int channels() const noexcept { return channels_; }
    bool empty() const noexcept { return pixels_.empty(); }

    float& at(int row, int col, int ch = 0) {
        return pixels_[(static_cast<std::size_t>(row) * width_ + col) * channels_ + ch];
    }
    float at(int row, int col, int ch = 0) const {
        return pixels_[(static_cast<std::size_t>(row) * width_ + col) * channels_ + ch];
    }

    std::span<float> pixels() noexcept { return pixels_; }
    std::span<const float> pixels() const noexcept { return pixels_; }

    /// Per-channel mean; unused trailing entries are zero.
    std::array<float, 3> mean() const;

    /// Luminance plane (Rec. 601 weights for color images).
    std::vector<float> luminance() const;

    bool operator==(const Image& other) const = default;

private:
    int width_ = 0;
    int height_ = 0;
    int channels_ = 0;
    std::vector<float> pixels_;
};

/// Loads PGM/PPM (P2/P3/P5/P6, maxval up to 65535) without external
/// dependencies; PNG and JPEG when the library was built with the decoders.
Image load_image(const std::filesystem::path& path);

/// Writes binary PGM (1 channel) or PPM (3 channels) at 8 bits.
void save_pnm(const Image& img, const std::filesystem::path& path);

}  // namespace rotsiam
