#ifndef WLAB_SVG_HPP
#define WLAB_SVG_HPP

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include "wlab/util.hpp"

namespace wlab {

/// Minimal self-contained SVG emission for heatmaps and scatter fits.
/// Plot data always accompanies the drawing in CSV form; the SVG is a
/// convenience view with no plotting dependency.
namespace svg {

inline std::string heat_color(double v) {
    // blue -> white -> red over [0, 1]
    const double t = std::clamp(v, 0.0, 1.0);
    int r, g, b;
    if (t < 0.5) {
        const double s = t / 0.5;
        r = int(255 * s);
        g = int(255 * s);
        b = 255;
    } else {
        const double s = (t - 0.5) / 0.5;
        r = 255;
        g = int(255 * (1.0 - s));
        b = int(255 * (1.0 - s));
    }
    char buf[8];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
    return buf;
}

/// values[row][col]; rows labeled by `row_labels`, columns span x_lo..x_hi.
inline void write_heatmap(const std::string& path, const std::vector<std::vector<double>>& values,
                          const std::vector<std::string>& row_labels, const std::string& title) {
    std::ofstream out(path);
    if (!out) throw LabError("svg: cannot open '" + path + "'");
    const int rows = int(values.size());
    const int cols = rows ? int(values[0].size()) : 0;
    const int cw = 12, ch = 24, left = 70, top = 40;
    const int width = left + cols * cw + 20;
    const int height = top + rows * ch + 20;

    double lo = 1e300, hi = -1e300;
    for (const auto& r : values)
        for (double v : r) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    if (hi <= lo) hi = lo + 1.0;

    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='"
        << height << "'>\n";
    out << "<text x='10' y='20' font-size='14'>" << title << "</text>\n";
    for (int i = 0; i < rows; ++i) {
        out << "<text x='8' y='" << top + i * ch + ch / 2 + 4 << "' font-size='11'>"
            << row_labels[i] << "</text>\n";
        for (int j = 0; j < cols; ++j) {
            const double t = (values[i][j] - lo) / (hi - lo);
            out << "<rect x='" << left + j * cw << "' y='" << top + i * ch << "' width='"
                << cw << "' height='" << ch << "' fill='" << heat_color(t) << "'/>\n";
        }
    }
    out << "<text x='10' y='" << height - 6 << "' font-size='11'>range ["
        << format_double(lo) << ", " << format_double(hi) << "]</text>\n";
    out << "</svg>\n";
}

/// Scatter of (x, y) with a fitted line overlaid.
inline void write_scatter_fit(const std::string& path, const std::vector<double>& x,
                              const std::vector<double>& y, const LineFit& fit,
                              const std::string& title) {
    std::ofstream out(path);
    if (!out) throw LabError("svg: cannot open '" + path + "'");
    const int width = 420, height = 320, margin = 50;
    double xlo = 1e300, xhi = -1e300, ylo = 1e300, yhi = -1e300;
    for (double v : x) {
        xlo = std::min(xlo, v);
        xhi = std::max(xhi, v);
    }
    for (double v : y) {
        ylo = std::min(ylo, v);
        yhi = std::max(yhi, v);
    }
    if (xhi <= xlo) xhi = xlo + 1;
    if (yhi <= ylo) yhi = ylo + 1;
    auto px = [&](double v) { return margin + (v - xlo) / (xhi - xlo) * (width - 2 * margin); };
    auto py = [&](double v) {
        return height - margin - (v - ylo) / (yhi - ylo) * (height - 2 * margin);
    };

    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='"
        << height << "'>\n";
    out << "<text x='10' y='20' font-size='14'>" << title << "</text>\n";
    out << "<rect x='" << margin << "' y='" << margin << "' width='" << width - 2 * margin
        << "' height='" << height - 2 * margin << "' fill='none' stroke='#888'/>\n";
    out << "<line x1='" << px(xlo) << "' y1='" << py(fit.intercept + fit.slope * xlo)
        << "' x2='" << px(xhi) << "' y2='" << py(fit.intercept + fit.slope * xhi)
        << "' stroke='#c33' stroke-width='1.5'/>\n";
    for (std::size_t i = 0; i < x.size(); ++i) {
        out << "<circle cx='" << px(x[i]) << "' cy='" << py(y[i])
            << "' r='3' fill='#236'/>\n";
    }
    out << "<text x='10' y='" << height - 8 << "' font-size='11'>slope "
        << format_double(fit.slope) << "</text>\n";
    out << "</svg>\n";
}

} // namespace svg
} // namespace wlab

#endif
