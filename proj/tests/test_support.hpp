#pragma once

// Independent oracles and fixtures shared by the unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <random>

#include "rotsiam/features.hpp"
#include "rotsiam/geometry.hpp"
#include "rotsiam/image.hpp"
#include "rotsiam/matching.hpp"

namespace rotsiam::testing {

inline Image random_image(int w, int h, int channels, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<float> u(0.0f, 1.0f);
    Image img(w, h, channels);
    for (float& v : img.pixels()) v = u(rng);
    return img;
}

inline FeatureMap random_map(int c, int h, int w, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    FeatureMap m(c, h, w);
    for (double& v : m.data()) v = u(rng);
    return m;
}

/// Point-in-rotated-box test written from the box definition alone.
inline bool inside(const OrientedBox& b, double px, double py) {
    const double dx = px - b.x, dy = py - b.y;
    const double c = std::cos(b.theta), s = std::sin(b.theta);
    const double u = c * dx + s * dy;
    const double v = -s * dx + c * dy;
    return std::abs(u) <= 0.5 * b.w && std::abs(v) <= 0.5 * b.h;
}

/// Monte-Carlo IoU: uniform samples over the joint bounding square.
inline double monte_carlo_iou(const OrientedBox& a, const OrientedBox& b, int samples, std::uint64_t seed) {
    const double ra = 0.5 * std::hypot(a.w, a.h), rb = 0.5 * std::hypot(b.w, b.h);
    const double x0 = std::min(a.x - ra, b.x - rb), x1 = std::max(a.x + ra, b.x + rb);
    const double y0 = std::min(a.y - ra, b.y - rb), y1 = std::max(a.y + ra, b.y + rb);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(x0, x1), uy(y0, y1);
    long inter = 0, uni = 0;
    for (int i = 0; i < samples; ++i) {
        const double px = ux(rng), py = uy(rng);
        const bool ia = inside(a, px, py), ib = inside(b, px, py);
        inter += ia && ib;
        uni += ia || ib;
    }
    return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

/// Stratified Monte-Carlo IoU: one uniform sample per cell of a k x k grid
/// laid over the smaller box gives the fraction of it inside the other box.
inline double stratified_iou(const OrientedBox& a, const OrientedBox& b, int k, std::uint64_t seed) {
    const OrientedBox& small = a.w * a.h <= b.w * b.h ? a : b;
    const OrientedBox& other = &small == &a ? b : a;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> jitter(0.0, 1.0);
    const double c = std::cos(small.theta), s = std::sin(small.theta);
    long hits = 0;
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
            const double u = ((j + jitter(rng)) / k - 0.5) * small.w;
            const double v = ((i + jitter(rng)) / k - 0.5) * small.h;
            hits += inside(other, small.x + c * u - s * v, small.y + s * u + c * v);
        }
    }
    const double area_s = small.w * small.h, area_o = other.w * other.h;
    const double inter = area_s * static_cast<double>(hits) / (static_cast<double>(k) * k);
    return inter / (area_s + area_o - inter);
}

/// Closed-form IoU of two upright boxes.
inline double axis_iou(const OrientedBox& a, const OrientedBox& b) {
    const double ix = std::max(0.0, std::min(a.x + a.w / 2, b.x + b.w / 2) - std::max(a.x - a.w / 2, b.x - b.w / 2));
    const double iy = std::max(0.0, std::min(a.y + a.h / 2, b.y + b.h / 2) - std::max(a.y - a.h / 2, b.y - b.h / 2));
    const double inter = ix * iy;
    return inter / (a.w * a.h + b.w * b.h - inter);
}

/// Triple-loop sliding dot product.
inline ResponseMap brute_force_correlation(const FeatureMap& t, const FeatureMap& s) {
    ResponseMap out(s.height() - t.height() + 1, s.width() - t.width() + 1, s.stride());
    for (int i = 0; i < out.height; ++i) {
        for (int j = 0; j < out.width; ++j) {
            long double acc = 0.0L;
            for (int c = 0; c < t.channels(); ++c) {
                for (int y = 0; y < t.height(); ++y) {
                    for (int x = 0; x < t.width(); ++x) acc += static_cast<long double>(t.at(c, y, x)) * s.at(c, i + y, j + x);
                }
            }
            out.at(i, j) = static_cast<double>(acc);
        }
    }
    return out;
}

}  // namespace rotsiam::testing
