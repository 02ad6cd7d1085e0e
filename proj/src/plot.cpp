#include "panelkt/plot.hpp"

#include "panelkt/panel_io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

namespace panelkt {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 160.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

constexpr std::array<const char*, 8> kPalette = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                                 "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

std::string escape(const std::string& text) {
    std::string out;
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string num(double v) {
    // Two decimals are plenty for pixel coordinates and keep output stable.
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(2);
    os << v;
    return os.str();
}

}  // namespace

std::string power_curve_svg(const std::vector<PlotSeries>& series, const std::string& x_label,
                            const std::string& y_label, const std::string& title) {
    double xmin = std::numeric_limits<double>::infinity();
    double xmax = -std::numeric_limits<double>::infinity();
    for (const auto& s : series)
        for (double v : s.x) {
            xmin = std::min(xmin, v);
            xmax = std::max(xmax, v);
        }
    if (!std::isfinite(xmin)) {
        xmin = 0.0;
        xmax = 1.0;
    }
    if (xmax == xmin) {
        xmin -= 0.5;
        xmax += 0.5;
    }
    const double pw = kWidth - kLeft - kRight;
    const double ph = kHeight - kTop - kBottom;
    auto px = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double y) { return kTop + (1.0 - std::clamp(y, 0.0, 1.0)) * ph; };

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth) << "\" height=\"" << num(kHeight)
        << "\" viewBox=\"0 0 " << num(kWidth) << ' ' << num(kHeight) << "\">\n"
        << "<rect x=\"0\" y=\"0\" width=\"" << num(kWidth) << "\" height=\"" << num(kHeight)
        << "\" fill=\"white\"/>\n"
        << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
        << escape(title) << "</text>\n";

    // Axes, ticks and grid.
    svg << "<g stroke=\"black\" stroke-width=\"1\">\n"
        << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(kTop + ph) << "\" x2=\"" << num(kLeft + pw) << "\" y2=\""
        << num(kTop + ph) << "\"/>\n"
        << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(kLeft) << "\" y2=\""
        << num(kTop + ph) << "\"/>\n</g>\n";
    svg << "<g font-size=\"11\" fill=\"black\">\n";
    for (int k = 0; k <= 5; ++k) {
        const double y = k / 5.0;
        svg << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(py(y)) << "\" x2=\"" << num(kLeft + pw) << "\" y2=\""
            << num(py(y)) << "\" stroke=\"#dddddd\"/>\n"
            << "<text x=\"" << num(kLeft - 8) << "\" y=\"" << num(py(y) + 4) << "\" text-anchor=\"end\">"
            << format_double(y) << "</text>\n";
        const double x = xmin + (xmax - xmin) * k / 5.0;
        svg << "<text x=\"" << num(px(x)) << "\" y=\"" << num(kTop + ph + 18) << "\" text-anchor=\"middle\">"
            << num(x) << "</text>\n";
    }
    svg << "</g>\n";
    svg << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kHeight - 16)
        << "\" text-anchor=\"middle\" font-size=\"13\">" << escape(x_label) << "</text>\n"
        << "<text x=\"18\" y=\"" << num(kTop + ph / 2) << "\" text-anchor=\"middle\" font-size=\"13\" "
        << "transform=\"rotate(-90 18 " << num(kTop + ph / 2) << ")\">" << escape(y_label) << "</text>\n";

    for (std::size_t s = 0; s < series.size(); ++s) {
        const auto& ser = series[s];
        const char* colour = kPalette[s % kPalette.size()];
        if (!ser.lower.empty() && ser.lower.size() == ser.x.size() && ser.upper.size() == ser.x.size()) {
            svg << "<polygon fill=\"" << colour << "\" fill-opacity=\"0.15\" stroke=\"none\" points=\"";
            for (std::size_t i = 0; i < ser.x.size(); ++i) svg << num(px(ser.x[i])) << ',' << num(py(ser.upper[i])) << ' ';
            for (std::size_t i = ser.x.size(); i-- > 0;) svg << num(px(ser.x[i])) << ',' << num(py(ser.lower[i])) << ' ';
            svg << "\"/>\n";
        }
        svg << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"2\" points=\"";
        for (std::size_t i = 0; i < ser.x.size(); ++i)
            svg << (i ? " " : "") << num(px(ser.x[i])) << ',' << num(py(ser.y[i]));
        svg << "\"><title>" << escape(ser.name) << "</title></polyline>\n";
        const double ly = kTop + 10 + 20.0 * static_cast<double>(s);
        svg << "<line x1=\"" << num(kLeft + pw + 12) << "\" y1=\"" << num(ly) << "\" x2=\"" << num(kLeft + pw + 32)
            << "\" y2=\"" << num(ly) << "\" stroke=\"" << colour << "\" stroke-width=\"2\"/>\n"
            << "<text x=\"" << num(kLeft + pw + 38) << "\" y=\"" << num(ly + 4) << "\" font-size=\"11\">"
            << escape(ser.name) << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace panelkt
