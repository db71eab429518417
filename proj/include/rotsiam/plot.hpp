#pragma once

#include <string>
#include <vector>

#include "rotsiam/sequence_io.hpp"

namespace rotsiam {

struct Curve {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;  ///< NaN breaks the line
};

struct Panel {
    std::string title;
    std::string x_label;
    std::string y_label;
    double x_min = 0.0, x_max = 1.0;
    double y_min = 0.0, y_max = 1.0;
    std::vector<Curve> curves;
};

/// Panels side by side in one standalone SVG document.
std::string render_svg(const std::vector<Panel>& panels);

/// Success, precision and expected-overlap panels, one curve per trace.
std::vector<Panel> trace_panels(const std::vector<LoadedTrace>& traces);

}  // namespace rotsiam
