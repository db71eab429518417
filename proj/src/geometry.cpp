#include "rotsiam/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rotsiam {

std::array<Point, 4> OrientedBox::corners() const {
    const double c = std::cos(theta), s = std::sin(theta);
    const double hw = 0.5 * w, hh = 0.5 * h;
    const std::array<std::array<double, 2>, 4> local{{{-hw, -hh}, {hw, -hh}, {hw, hh}, {-hw, hh}}};
    std::array<Point, 4> out;
    for (std::size_t i = 0; i < 4; ++i) {
        out[i] = {x + c * local[i][0] - s * local[i][1], y + s * local[i][0] + c * local[i][1]};
    }
    return out;
}

double normalize_angle(double a) {
    if (!std::isfinite(a)) throw std::invalid_argument("normalize_angle: non-finite angle");
    a = std::remainder(a, 2.0 * kPi);  // [-pi, pi]
    if (a <= -kPi) a += 2.0 * kPi;
    return a;
}

void validate(const AxisBox& b) {
    if (!(std::isfinite(b.x) && std::isfinite(b.y) && std::isfinite(b.w) && std::isfinite(b.h)) ||
        !(b.w > 0.0) || !(b.h > 0.0)) {
        throw std::invalid_argument("box: width and height must be positive and finite");
    }
}

void validate(const OrientedBox& b) {
    validate(AxisBox{b.x, b.y, b.w, b.h});
    if (!std::isfinite(b.theta)) throw std::invalid_argument("box: non-finite angle");
}

double context_side(double w, double h) {
    const double p = 0.25 * (w + h);
    return std::sqrt((w + p) * (h + p));
}

Image extract_patch(const Image& img, Point center, double side, double theta, int out_size,
                    std::optional<std::array<float, 3>> fill) {
    if (!(side > 0.0) || !std::isfinite(side)) throw std::invalid_argument("extract_patch: side must be positive");
    if (out_size <= 0) throw std::invalid_argument("extract_patch: out_size must be positive");
    const std::array<float, 3> pad = fill ? *fill : img.mean();
    const int ch = img.channels();
    const int W = img.width(), H = img.height();
    Image out(out_size, out_size, ch);

    const double k = side / out_size;
    const double c = std::cos(theta) * k, s = std::sin(theta) * k;
    const double half = 0.5 * (out_size - 1);

    auto sample = [&](int xi, int yi, int channel) -> float {
        if (xi < 0 || yi < 0 || xi >= W || yi >= H) return pad[channel];
        return img.at(yi, xi, channel);
    };

    for (int row = 0; row < out_size; ++row) {
        const double v = row - half;
        for (int col = 0; col < out_size; ++col) {
            const double u = col - half;
            const double x = center.x + c * u - s * v;
            const double y = center.y + s * u + c * v;
            const double xf = std::floor(x), yf = std::floor(y);
            const double fx = x - xf, fy = y - yf;
            // Far outside: skip the interpolation entirely.
            if (xf < -2.0 || yf < -2.0 || xf > W + 1.0 || yf > H + 1.0) {
                for (int q = 0; q < ch; ++q) out.at(row, col, q) = pad[q];
                continue;
            }
            const int x0 = static_cast<int>(xf), y0 = static_cast<int>(yf);
            for (int q = 0; q < ch; ++q) {
                const double top = (1.0 - fx) * sample(x0, y0, q) + fx * sample(x0 + 1, y0, q);
                const double bot = (1.0 - fx) * sample(x0, y0 + 1, q) + fx * sample(x0 + 1, y0 + 1, q);
                out.at(row, col, q) = static_cast<float>((1.0 - fy) * top + fy * bot);
            }
        }
    }
    return out;
}

double polygon_area(const std::vector<Point>& poly) {
    double acc = 0.0;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point& p = poly[i];
        const Point& q = poly[(i + 1) % n];
        acc += p.x * q.y - q.x * p.y;
    }
    return 0.5 * std::abs(acc);
}

namespace {

double signed_area(const std::vector<Point>& poly) {
    double acc = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Point& p = poly[i];
        const Point& q = poly[(i + 1) % poly.size()];
        acc += p.x * q.y - q.x * p.y;
    }
    return 0.5 * acc;
}

double cross(Point o, Point a, Point b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }

}  // namespace

std::vector<Point> clip_convex(const std::vector<Point>& subject, const std::vector<Point>& clip) {
    if (subject.size() < 3 || clip.size() < 3) return {};
    const double orient = signed_area(clip) >= 0.0 ? 1.0 : -1.0;
    std::vector<Point> output = subject;
    for (std::size_t i = 0; i < clip.size() && !output.empty(); ++i) {
        const Point a = clip[i];
        const Point b = clip[(i + 1) % clip.size()];
        auto inside = [&](Point p) { return orient * cross(a, b, p) >= 0.0; };
        auto intersect = [&](Point p, Point q) {
            const double dp = cross(a, b, p), dq = cross(a, b, q);
            const double t = dp / (dp - dq);
            return Point{p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)};
        };
        std::vector<Point> input;
        input.swap(output);
        for (std::size_t j = 0; j < input.size(); ++j) {
            const Point cur = input[j];
            const Point prev = input[(j + input.size() - 1) % input.size()];
            const bool cur_in = inside(cur), prev_in = inside(prev);
            if (cur_in) {
                if (!prev_in) output.push_back(intersect(prev, cur));
                output.push_back(cur);
            } else if (prev_in) {
                output.push_back(intersect(prev, cur));
            }
        }
    }
    return output;
}

double rotated_iou(const OrientedBox& a, const OrientedBox& b) {
    if (a == b) return 1.0;
    const auto ca = a.corners(), cb = b.corners();
    const double area_a = a.w * a.h, area_b = b.w * b.h;
    // Cheap rejection on circumscribed circles.
    const double ra = 0.5 * std::hypot(a.w, a.h), rb = 0.5 * std::hypot(b.w, b.h);
    if (std::hypot(a.x - b.x, a.y - b.y) >= ra + rb) return 0.0;
    const auto inter_poly =
        clip_convex(std::vector<Point>(ca.begin(), ca.end()), std::vector<Point>(cb.begin(), cb.end()));
    const double inter = inter_poly.size() < 3 ? 0.0 : polygon_area(inter_poly);
    const double uni = area_a + area_b - inter;
    if (!(uni > 0.0)) return 0.0;
    return std::clamp(inter / uni, 0.0, 1.0);
}

double center_distance(const OrientedBox& a, const OrientedBox& b) { return std::hypot(a.x - b.x, a.y - b.y); }

OrientedBox min_area_rect(const std::vector<Point>& points) {
    if (points.size() < 3) throw std::invalid_argument("min_area_rect: need at least 3 points");
    std::vector<Point> pts = points;
    std::sort(pts.begin(), pts.end(), [](Point p, Point q) { return p.x < q.x || (p.x == q.x && p.y < q.y); });
    std::vector<Point> hull(2 * pts.size());
    std::size_t k = 0;
    for (const Point& p : pts) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
        hull[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
        while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k > 1 ? k - 1 : k);
    if (hull.size() < 3) throw std::invalid_argument("min_area_rect: degenerate point set");

    double best_area = std::numeric_limits<double>::infinity();
    OrientedBox best;
    for (std::size_t i = 0; i < hull.size(); ++i) {
        const Point p = hull[i], q = hull[(i + 1) % hull.size()];
        const double phi = std::atan2(q.y - p.y, q.x - p.x);
        const double c = std::cos(phi), s = std::sin(phi);
        double umin = std::numeric_limits<double>::infinity(), umax = -umin, vmin = umin, vmax = -umin;
        for (const Point& h : hull) {
            const double u = c * h.x + s * h.y;
            const double v = -s * h.x + c * h.y;
            umin = std::min(umin, u);
            umax = std::max(umax, u);
            vmin = std::min(vmin, v);
            vmax = std::max(vmax, v);
        }
        const double area = (umax - umin) * (vmax - vmin);
        if (area < best_area) {
            best_area = area;
            const double uc = 0.5 * (umin + umax), vc = 0.5 * (vmin + vmax);
            best = OrientedBox(c * uc - s * vc, s * uc + c * vc, umax - umin, vmax - vmin, phi);
        }
    }
    while (best.theta > kPi / 4.0) {
        best.theta -= kPi / 2.0;
        std::swap(best.w, best.h);
    }
    while (best.theta <= -kPi / 4.0) {
        best.theta += kPi / 2.0;
        std::swap(best.w, best.h);
    }
    return best;
}

AxisBox bounding_axis_box(const OrientedBox& b) {
    const double c = std::abs(std::cos(b.theta)), s = std::abs(std::sin(b.theta));
    return {b.x, b.y, c * b.w + s * b.h, s * b.w + c * b.h};
}

}  // namespace rotsiam
