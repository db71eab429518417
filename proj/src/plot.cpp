#include "rotsiam/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace rotsiam {

namespace {

constexpr double kPanelW = 360.0, kPanelH = 300.0;
constexpr double kLeft = 50.0, kRight = 15.0, kTop = 30.0, kBottom = 45.0;
constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                   "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

void draw_panel(std::ostringstream& o, const Panel& p, double ox) {
    const double pw = kPanelW - kLeft - kRight, ph = kPanelH - kTop - kBottom;
    const double xr = p.x_max > p.x_min ? p.x_max - p.x_min : 1.0;
    const double yr = p.y_max > p.y_min ? p.y_max - p.y_min : 1.0;
    auto X = [&](double x) { return ox + kLeft + (x - p.x_min) / xr * pw; };
    auto Y = [&](double y) { return kTop + ph - (y - p.y_min) / yr * ph; };

    o << "<text x=\"" << fmt(ox + kPanelW / 2) << "\" y=\"18\" text-anchor=\"middle\" font-size=\"13\">" << escape(p.title)
      << "</text>\n";
    o << "<rect x=\"" << fmt(ox + kLeft) << "\" y=\"" << fmt(kTop) << "\" width=\"" << fmt(pw) << "\" height=\"" << fmt(ph)
      << "\" fill=\"none\" stroke=\"#000\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double xv = p.x_min + xr * i / 4.0, yv = p.y_min + yr * i / 4.0;
        o << "<text x=\"" << fmt(X(xv)) << "\" y=\"" << fmt(kTop + ph + 14) << "\" text-anchor=\"middle\" font-size=\"10\">"
          << fmt(xv) << "</text>\n";
        o << "<text x=\"" << fmt(ox + kLeft - 4) << "\" y=\"" << fmt(Y(yv) + 3) << "\" text-anchor=\"end\" font-size=\"10\">"
          << fmt(yv) << "</text>\n";
    }
    o << "<text x=\"" << fmt(ox + kLeft + pw / 2) << "\" y=\"" << fmt(kPanelH - 8)
      << "\" text-anchor=\"middle\" font-size=\"11\">" << escape(p.x_label) << "</text>\n";
    o << "<text transform=\"translate(" << fmt(ox + 12) << ',' << fmt(kTop + ph / 2)
      << ") rotate(-90)\" text-anchor=\"middle\" font-size=\"11\">" << escape(p.y_label) << "</text>\n";

    for (std::size_t c = 0; c < p.curves.size(); ++c) {
        const auto& cv = p.curves[c];
        const char* color = kColors[c % std::size(kColors)];
        std::string d;
        bool pen = false;
        for (std::size_t i = 0; i < std::min(cv.x.size(), cv.y.size()); ++i) {
            if (!std::isfinite(cv.y[i]) || !std::isfinite(cv.x[i])) {
                pen = false;
                continue;
            }
            const double y = std::clamp(cv.y[i], p.y_min, p.y_max);
            d += (pen ? " L" : " M") + fmt(X(cv.x[i])) + ',' + fmt(Y(y));
            pen = true;
        }
        if (!d.empty()) {
            o << "<path d=\"" << d.substr(1) << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"/>\n";
        }
        const double ly = kTop + 12 + 13.0 * static_cast<double>(c);
        o << "<text x=\"" << fmt(ox + kLeft + pw - 4) << "\" y=\"" << fmt(ly) << "\" text-anchor=\"end\" font-size=\"10\" fill=\""
          << color << "\">" << escape(cv.label) << "</text>\n";
    }
}

}  // namespace

std::string render_svg(const std::vector<Panel>& panels) {
    std::ostringstream o;
    const double w = kPanelW * static_cast<double>(std::max<std::size_t>(panels.size(), 1));
    o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(w) << "\" height=\"" << fmt(kPanelH)
      << "\" viewBox=\"0 0 " << fmt(w) << ' ' << fmt(kPanelH) << "\" font-family=\"sans-serif\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n";
    for (std::size_t i = 0; i < panels.size(); ++i) draw_panel(o, panels[i], kPanelW * static_cast<double>(i));
    o << "</svg>\n";
    return o.str();
}

std::vector<Panel> trace_panels(const std::vector<LoadedTrace>& traces) {
    Panel success{"Success", "overlap threshold", "success rate", 0.0, 1.0, 0.0, 1.0, {}};
    Panel precision{"Precision", "location error threshold (px)", "precision", 0.0, 50.0, 0.0, 1.0, {}};
    Panel eo{"Expected overlap", "segment length (frames)", "expected overlap", 1.0, 1.0, 0.0, 1.0, {}};
    const auto taus = success_thresholds();
    for (const auto& lt : traces) {
        const auto& t = lt.trace;
        std::vector<double> ov, err;
        for (std::size_t f = 0; f < t.size(); ++f) {
            if (t.status[f] == FrameStatus::Init) continue;
            ov.push_back(t.overlaps[f]);
            err.push_back(center_distance(t.predicted[f], lt.groundtruth[f]));
        }
        const auto sc = success_curve(ov, taus);
        char label[128];
        std::snprintf(label, sizeof label, "%s [%.3f]", lt.name.c_str(), auc(sc));
        success.curves.push_back({label, taus, sc});

        const auto pc = precision_curve(err, 50);
        std::vector<double> radii(pc.size());
        for (std::size_t r = 0; r < radii.size(); ++r) radii[r] = static_cast<double>(r);
        std::snprintf(label, sizeof label, "%s [%.3f]", lt.name.c_str(), precision_at(err));
        precision.curves.push_back({label, radii, pc});

        const int n = static_cast<int>(std::max<std::size_t>(t.size(), 1));
        const auto curve = expected_overlap_curve({t}, n);
        std::vector<double> lens(curve.size());
        for (std::size_t i = 0; i < lens.size(); ++i) lens[i] = static_cast<double>(i + 1);
        eo.x_max = std::max(eo.x_max, static_cast<double>(n));
        eo.curves.push_back({lt.name, lens, curve});
    }
    return {success, precision, eo};
}

}  // namespace rotsiam
