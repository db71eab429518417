#include "rotsiam/matching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <tuple>

#include "rotsiam/geometry.hpp"

namespace rotsiam {

double ResponseMap::max() const {
    if (data.empty()) throw std::invalid_argument("response map: empty");
    return *std::max_element(data.begin(), data.end());
}

double ResponseMap::min() const {
    if (data.empty()) throw std::invalid_argument("response map: empty");
    return *std::min_element(data.begin(), data.end());
}

ResponseMap cross_correlate(const FeatureMap& templ, const FeatureMap& search) {
    if (templ.channels() != search.channels()) {
        throw std::invalid_argument("cross_correlate: channel mismatch (" + std::to_string(templ.channels()) + " vs " +
                                    std::to_string(search.channels()) + ")");
    }
    if (templ.height() > search.height() || templ.width() > search.width()) {
        throw std::invalid_argument("cross_correlate: template larger than search map");
    }
    if (templ.stride() != search.stride()) throw std::invalid_argument("cross_correlate: stride mismatch");
    const int th = templ.height(), tw = templ.width();
    ResponseMap out(search.height() - th + 1, search.width() - tw + 1, search.stride());
    for (int c = 0; c < templ.channels(); ++c) {
        for (int i = 0; i < out.height; ++i) {
            for (int j = 0; j < out.width; ++j) {
                double acc = 0.0;
                for (int y = 0; y < th; ++y) {
                    for (int x = 0; x < tw; ++x) acc += templ.at(c, y, x) * search.at(c, i + y, j + x);
                }
                out.at(i, j) += acc;
            }
        }
    }
    return out;
}

ResponseMap local_energy(const FeatureMap& search, int th, int tw, std::span<const double> weights) {
    if (th <= 0 || tw <= 0 || th > search.height() || tw > search.width()) {
        throw std::invalid_argument("local_energy: window does not fit the search map");
    }
    if (!weights.empty() && weights.size() != static_cast<std::size_t>(th) * tw) {
        throw std::invalid_argument("local_energy: weight count differs from the window size");
    }
    auto w = [&](int y, int x) { return weights.empty() ? 1.0 : weights[static_cast<std::size_t>(y) * tw + x]; };
    double wsum = 0.0;
    for (int y = 0; y < th; ++y) {
        for (int x = 0; x < tw; ++x) wsum += w(y, x);
    }
    ResponseMap out(search.height() - th + 1, search.width() - tw + 1, search.stride());
    if (!(wsum > 0.0)) return out;
    for (int c = 0; c < search.channels(); ++c) {
        for (int i = 0; i < out.height; ++i) {
            for (int j = 0; j < out.width; ++j) {
                double s1 = 0.0, s2 = 0.0;
                for (int y = 0; y < th; ++y) {
                    for (int x = 0; x < tw; ++x) {
                        const double v = search.at(c, i + y, j + x);
                        s1 += w(y, x) * v;
                        s2 += w(y, x) * v * v;
                    }
                }
                out.at(i, j) += std::max(0.0, s2 - s1 * s1 / wsum);
            }
        }
    }
    return out;
}

ResponseMap normalize(const ResponseMap& r) {
    ResponseMap out = r;
    const double lo = r.min(), hi = r.max();
    if (!(hi > lo)) {
        std::fill(out.data.begin(), out.data.end(), 0.0);
        return out;
    }
    for (auto& v : out.data) v = (v - lo) / (hi - lo);
    return out;
}

std::vector<ResponseMap> normalize_jointly(const std::vector<ResponseMap>& maps) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& m : maps) {
        lo = std::min(lo, m.min());
        hi = std::max(hi, m.max());
    }
    std::vector<ResponseMap> out = maps;
    for (auto& m : out) {
        for (auto& v : m.data) v = hi > lo ? (v - lo) / (hi - lo) : 0.0;
    }
    return out;
}

std::vector<double> hann_window(int height, int width) {
    auto hann = [](int n) {
        std::vector<double> w(static_cast<std::size_t>(n), 1.0);
        if (n == 1) return w;
        for (int i = 0; i < n; ++i) w[static_cast<std::size_t>(i)] = 0.5 - 0.5 * std::cos(2.0 * kPi * i / (n - 1));
        return w;
    };
    const auto wy = hann(height), wx = hann(width);
    std::vector<double> out(static_cast<std::size_t>(height) * width);
    double peak = 0.0;
    for (int i = 0; i < height; ++i) {
        for (int j = 0; j < width; ++j) {
            const double v = wy[static_cast<std::size_t>(i)] * wx[static_cast<std::size_t>(j)];
            out[static_cast<std::size_t>(i) * width + j] = v;
            peak = std::max(peak, v);
        }
    }
    if (peak > 0.0) {
        for (auto& v : out) v /= peak;
    }
    return out;
}

ResponseMap apply_window(const ResponseMap& r, double weight) {
    if (weight < 0.0 || weight > 1.0) throw std::invalid_argument("apply_window: weight must be in [0, 1]");
    ResponseMap out = r;
    if (weight == 0.0) return out;
    const auto win = hann_window(r.height, r.width);
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] = (1.0 - weight) * r.data[i] + weight * win[i];
    return out;
}

namespace {

double cubic_weight(double t) {
    constexpr double a = -0.5;
    t = std::abs(t);
    if (t <= 1.0) return ((a + 2.0) * t - (a + 3.0)) * t * t + 1.0;
    if (t < 2.0) return ((a * t - 5.0 * a) * t + 8.0 * a) * t - 4.0 * a;
    return 0.0;
}

}  // namespace

double bicubic_at(const ResponseMap& r, double row, double col) {
    const int r0 = static_cast<int>(std::floor(row)), c0 = static_cast<int>(std::floor(col));
    double acc = 0.0;
    for (int dy = -1; dy <= 2; ++dy) {
        const double wy = cubic_weight(row - (r0 + dy));
        if (wy == 0.0) continue;
        const int ry = std::clamp(r0 + dy, 0, r.height - 1);
        for (int dx = -1; dx <= 2; ++dx) {
            const double wx = cubic_weight(col - (c0 + dx));
            if (wx == 0.0) continue;
            acc += wy * wx * r.at(ry, std::clamp(c0 + dx, 0, r.width - 1));
        }
    }
    return acc;
}

ResponseMap resample(const ResponseMap& r, int height, int width, double stride, int upsample) {
    ResponseMap out(height, width, stride, upsample);
    const double src_step = r.stride / r.upsample, dst_step = stride / upsample;
    const double ratio = dst_step / src_step;
    const double sc_r = 0.5 * (r.height - 1), sc_c = 0.5 * (r.width - 1);
    const double dc_r = 0.5 * (height - 1), dc_c = 0.5 * (width - 1);
    for (int i = 0; i < height; ++i) {
        for (int j = 0; j < width; ++j) out.at(i, j) = bicubic_at(r, sc_r + (i - dc_r) * ratio, sc_c + (j - dc_c) * ratio);
    }
    return out;
}

ResponseMap fuse(const std::vector<ResponseMap>& levels, const std::vector<double>& weights) {
    if (levels.empty() || levels.size() != weights.size()) throw std::invalid_argument("fuse: need one weight per level");
    double total = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw std::invalid_argument("fuse: negative weight");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("fuse: weights must sum to 1");
    const ResponseMap& ref = levels.front();
    ResponseMap out(ref.height, ref.width, ref.stride, ref.upsample);
    for (std::size_t l = 0; l < levels.size(); ++l) {
        if (weights[l] == 0.0) continue;
        const bool same = levels[l].height == ref.height && levels[l].width == ref.width &&
                          levels[l].stride / levels[l].upsample == ref.stride / ref.upsample;
        const ResponseMap grid = same ? levels[l] : resample(levels[l], ref.height, ref.width, ref.stride, ref.upsample);
        for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += weights[l] * grid.data[i];
    }
    return out;
}

PeakSelection select_peak(std::span<const std::pair<CandidateSpec, ResponseMap>> cands) {
    if (cands.empty()) throw std::invalid_argument("select_peak: no candidates");
    const int h = cands.front().second.height, w = cands.front().second.width;
    for (const auto& [spec, map] : cands) {
        if (map.height != h || map.width != w) throw std::invalid_argument("select_peak: maps differ in size");
    }
    PeakSelection best;
    bool have = false;
    // Lexicographic key: higher score first, then the tie-break chain.
    auto better = [&](double score, const CandidateSpec& spec, int row, int col, std::size_t k) {
        if (!have) return true;
        if (score != best.score) return score > best.score;
        const CandidateSpec& bs = cands[best.index].first;
        const auto key = std::make_tuple(std::abs(spec.a), std::abs(spec.s - 1.0), row, col, k);
        const auto best_key = std::make_tuple(std::abs(bs.a), std::abs(bs.s - 1.0), best.row, best.col, best.index);
        return key < best_key;
    };
    for (std::size_t k = 0; k < cands.size(); ++k) {
        const auto& [spec, map] = cands[k];
        for (int r = 0; r < h; ++r) {
            for (int c = 0; c < w; ++c) {
                const double score = spec.penalty * map.at(r, c);
                if (better(score, spec, r, c, k)) {
                    best = {k, r, c, score};
                    have = true;
                }
            }
        }
    }
    return best;
}

std::pair<double, double> refine_peak(const ResponseMap& r, int row, int col, int upsample) {
    if (upsample < 1) throw std::invalid_argument("refine_peak: upsample must be >= 1");
    double best = -std::numeric_limits<double>::infinity();
    std::pair<double, double> pos{static_cast<double>(row), static_cast<double>(col)};
    for (int i = -upsample; i <= upsample; ++i) {
        const double y = row + static_cast<double>(i) / upsample;
        if (y < 0.0 || y > r.height - 1) continue;
        for (int j = -upsample; j <= upsample; ++j) {
            const double x = col + static_cast<double>(j) / upsample;
            if (x < 0.0 || x > r.width - 1) continue;
            const double v = bicubic_at(r, y, x);
            // Strict improvement keeps the grid cell on plateaus.
            if (v > best + 1e-12 || (std::abs(v - best) <= 1e-12 && i == 0 && j == 0)) {
                best = v;
                pos = {y, x};
            }
        }
    }
    return pos;
}

Displacement peak_to_displacement(int row, int col, const ResponseMap& r, int upsample, double crop_ratio, double theta) {
    const auto [py, px] = refine_peak(r, row, col, upsample);
    const double step = r.stride / r.upsample;
    const double u = (px - 0.5 * (r.width - 1)) * step * crop_ratio;
    const double v = (py - 0.5 * (r.height - 1)) * step * crop_ratio;
    const double c = std::cos(theta), s = std::sin(theta);
    return {c * u - s * v, s * u + c * v};
}

}  // namespace rotsiam
