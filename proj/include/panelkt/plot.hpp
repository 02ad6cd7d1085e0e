#pragma once

#include <string>
#include <vector>

namespace panelkt {

struct PlotSeries {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> lower;  ///< band; may be empty
    std::vector<double> upper;
};

/// Static SVG line chart: one polyline per series, optional shaded bands, y
/// fixed to [0, 1] (rejection rates).
std::string power_curve_svg(const std::vector<PlotSeries>& series, const std::string& x_label,
                            const std::string& y_label, const std::string& title);

}  // namespace panelkt
