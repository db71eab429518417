#pragma once

#include <span>
#include <utility>
#include <vector>

#include "rotsiam/features.hpp"

namespace rotsiam {

/// 2-D score surface. `stride` is input pixels per native cell; a map that was
/// upsampled by `upsample` has effective spacing stride / upsample.
struct ResponseMap {
    int height = 0;
    int width = 0;
    std::vector<double> data;
    int upsample = 1;
    double stride = kFeatureStride;

    ResponseMap() = default;
    ResponseMap(int h, int w, double stride_ = kFeatureStride, int upsample_ = 1)
        : height(h), width(w), data(static_cast<std::size_t>(h) * w, 0.0), upsample(upsample_), stride(stride_) {}

    double& at(int r, int c) { return data[static_cast<std::size_t>(r) * width + c]; }
    double at(int r, int c) const { return data[static_cast<std::size_t>(r) * width + c]; }
    double max() const;
    double min() const;
};

/// One (scale, angle) hypothesis with its selection penalty.
struct CandidateSpec {
    double s = 1.0;
    double a = 0.0;
    double penalty = 1.0;

    bool is_identity() const { return s == 1.0 && a == 0.0; }
};

/// Valid sliding inner product summed over channels.
ResponseMap cross_correlate(const FeatureMap& templ, const FeatureMap& search);

/// Energy of each th x tw search window about its own per-channel mean,
/// summed over channels, with optional per-cell weights (row-major th x tw).
/// Dividing a correlation with a zero-mean template by sqrt of this gives a
/// normalized cross-correlation.
ResponseMap local_energy(const FeatureMap& search, int th, int tw, std::span<const double> weights = {});

/// Min-max rescale to [0, 1]; a constant map becomes all zeros.
ResponseMap normalize(const ResponseMap& r);

/// Rescales every map with the shared min and max of the whole set, so
/// relative heights across maps survive.
std::vector<ResponseMap> normalize_jointly(const std::vector<ResponseMap>& maps);

/// Outer product of 1-D Hann windows, scaled so the maximum is 1.
std::vector<double> hann_window(int height, int width);

/// (1 - weight) * r + weight * Hann.
ResponseMap apply_window(const ResponseMap& r, double weight);

/// Keys cubic convolution (a = -0.5) at a continuous position, clamped edges.
double bicubic_at(const ResponseMap& r, double row, double col);

/// Resamples `r` onto a grid of the given size and spacing, keeping the map
/// centers aligned.
ResponseMap resample(const ResponseMap& r, int height, int width, double stride, int upsample);

/// Weighted sum after resampling every level onto the first level's grid.
/// Weights must be non-negative and sum to 1.
ResponseMap fuse(const std::vector<ResponseMap>& levels, const std::vector<double>& weights);

struct PeakSelection {
    std::size_t index = 0;
    int row = 0;
    int col = 0;
    double score = 0.0;
};

/// argmax over (k, row, col) of penalty_k * R_k(row, col). Ties prefer the
/// smaller |a|, then s closer to 1, then row-major order, then lower k.
PeakSelection select_peak(std::span<const std::pair<CandidateSpec, ResponseMap>> cands);

/// Sub-cell peak position: bicubic samples of the map at spacing
/// 1/upsample within one cell of (row, col).
std::pair<double, double> refine_peak(const ResponseMap& r, int row, int col, int upsample);

struct Displacement {
    double dx = 0.0;
    double dy = 0.0;
};

/// Frame-space displacement of the refined peak from the map center: cells
/// to patch pixels via the map stride, patch pixels to frame pixels via
/// `crop_ratio` (frame px per patch px), then rotated by `theta`.
Displacement peak_to_displacement(int row, int col, const ResponseMap& r, int upsample, double crop_ratio = 1.0,
                                  double theta = 0.0);

}  // namespace rotsiam
