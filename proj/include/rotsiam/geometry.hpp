#pragma once

#include <array>
#include <optional>
#include <vector>

#include "rotsiam/image.hpp"

namespace rotsiam {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

/// Upright box given by its center and size.
struct AxisBox {
    double x = 0.0;
    double y = 0.0;
    double w = 1.0;
    double h = 1.0;
};

/// Box rotated by theta about its center. The box axes are the image axes
/// rotated by theta (x toward y positive), so theta = 0 is an AxisBox.
struct OrientedBox {
    double x = 0.0;
    double y = 0.0;
    double w = 1.0;
    double h = 1.0;
    double theta = 0.0;

    OrientedBox() = default;
    OrientedBox(double x_, double y_, double w_, double h_, double theta_ = 0.0)
        : x(x_), y(y_), w(w_), h(h_), theta(theta_) {}
    explicit OrientedBox(const AxisBox& b) : x(b.x), y(b.y), w(b.w), h(b.h) {}

    Point center() const { return {x, y}; }
    /// Corners in counter-clockwise order (in the y-down image frame the
    /// winding appears clockwise; area formulas use the absolute value).
    std::array<Point, 4> corners() const;
    bool operator==(const OrientedBox&) const = default;
};

inline constexpr double kPi = 3.14159265358979323846;

/// Wraps an angle into (-pi, pi].
double normalize_angle(double a);

/// Throws std::invalid_argument unless w > 0 and h > 0 and all fields finite.
void validate(const AxisBox& b);
void validate(const OrientedBox& b);

/// Side of the square context region around a box: sqrt((w+p)(h+p)) with
/// p = (w+h)/4.
double context_side(double w, double h);
inline double context_side(const AxisBox& b) { return context_side(b.w, b.h); }

/// Samples an out_size x out_size patch. Output pixel offset (u, v) from the
/// patch center maps to center + R(theta) * (u, v) * side / out_size in the
/// source image. Bilinear interpolation; samples outside the image read
/// `fill` (the image mean color when not given).
Image extract_patch(const Image& img, Point center, double side, double theta, int out_size,
                    std::optional<std::array<float, 3>> fill = std::nullopt);

/// Area of a simple polygon (absolute value of the shoelace sum).
double polygon_area(const std::vector<Point>& poly);

/// Intersection of two convex polygons (Sutherland-Hodgman).
std::vector<Point> clip_convex(const std::vector<Point>& subject, const std::vector<Point>& clip);

double rotated_iou(const OrientedBox& a, const OrientedBox& b);
double center_distance(const OrientedBox& a, const OrientedBox& b);

/// Minimum-area rectangle enclosing a point set (rotating calipers over the
/// convex hull). The returned angle lies in (-pi/4, pi/4].
OrientedBox min_area_rect(const std::vector<Point>& points);

/// Smallest upright box containing the rotated box.
AxisBox bounding_axis_box(const OrientedBox& b);

}  // namespace rotsiam
