#include "rotsiam/image.hpp"

#include <stdexcept>
#include <string>

namespace rotsiam {

Image::Image(int width, int height, int channels, float fill)
    : width_(width), height_(height), channels_(channels) {
    if (width <= 0 || height <= 0 || (channels != 1 && channels != 3)) {
        throw std::invalid_argument("image: invalid geometry " + std::to_string(width) + "x" +
                                    std::to_string(height) + "x" + std::to_string(channels));
    }
    pixels_.assign(static_cast<std::size_t>(width) * height * channels, fill);
}

Image::Image(int width, int height, int channels, std::vector<float> pixels)
    : Image(width, height, channels) {
    if (pixels.size() != pixels_.size()) {
        throw std::invalid_argument("image: pixel count does not match geometry");
    }
    pixels_ = std::move(pixels);
}

std::array<float, 3> Image::mean() const {
    std::array<double, 3> acc{0.0, 0.0, 0.0};
    const std::size_t n = static_cast<std::size_t>(width_) * height_;
    for (std::size_t i = 0; i < n; ++i) {
        for (int c = 0; c < channels_; ++c) acc[c] += pixels_[i * channels_ + c];
    }
    std::array<float, 3> out{0.0f, 0.0f, 0.0f};
    if (n == 0) return out;
    for (int c = 0; c < channels_; ++c) out[c] = static_cast<float>(acc[c] / static_cast<double>(n));
    return out;
}

std::vector<float> Image::luminance() const {
    const std::size_t n = static_cast<std::size_t>(width_) * height_;
    std::vector<float> out(n);
    if (channels_ == 1) {
        out.assign(pixels_.begin(), pixels_.end());
        return out;
    }
    for (std::size_t i = 0; i < n; ++i) {
        const float* p = &pixels_[i * 3];
        out[i] = 0.299f * p[0] + 0.587f * p[1] + 0.114f * p[2];
    }
    return out;
}

}  // namespace rotsiam
