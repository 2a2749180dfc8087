#pragma once

#include <algorithm>
#include <ostream>
#include <string>
#include <vector>

#include "ptl/text.hpp"

namespace ptl::tools {

/// Hand-rolled single-polyline chart: axes, min/max tick labels, one
/// series. Deterministic output, no dependencies.
inline void write_line_chart_svg(std::ostream& out, const std::vector<double>& xs,
                                 const std::vector<double>& ys,
                                 const std::string& x_label, const std::string& y_label) {
    constexpr double kWidth = 640.0;
    constexpr double kHeight = 400.0;
    constexpr double kMargin = 56.0;

    double x_lo = xs.empty() ? 0.0 : *std::min_element(xs.begin(), xs.end());
    double x_hi = xs.empty() ? 1.0 : *std::max_element(xs.begin(), xs.end());
    double y_lo = ys.empty() ? 0.0 : *std::min_element(ys.begin(), ys.end());
    double y_hi = ys.empty() ? 1.0 : *std::max_element(ys.begin(), ys.end());
    if (x_hi <= x_lo) {
        x_hi = x_lo + 1.0;
    }
    if (y_hi <= y_lo) {
        y_hi = y_lo + 1.0;
    }

    const auto px = [&](double x) {
        return kMargin + (x - x_lo) / (x_hi - x_lo) * (kWidth - 2.0 * kMargin);
    };
    const auto py = [&](double y) {
        return kHeight - kMargin - (y - y_lo) / (y_hi - y_lo) * (kHeight - 2.0 * kMargin);
    };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" "
           "viewBox=\"0 0 640 400\">\n";
    out << "<rect width=\"640\" height=\"400\" fill=\"white\"/>\n";
    out << "<line x1=\"" << fmt_fixed(kMargin, 1) << "\" y1=\"" << fmt_fixed(py(y_lo), 1)
        << "\" x2=\"" << fmt_fixed(kWidth - kMargin, 1) << "\" y2=\""
        << fmt_fixed(py(y_lo), 1) << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << fmt_fixed(kMargin, 1) << "\" y1=\"" << fmt_fixed(py(y_lo), 1)
        << "\" x2=\"" << fmt_fixed(kMargin, 1) << "\" y2=\"" << fmt_fixed(py(y_hi), 1)
        << "\" stroke=\"black\"/>\n";

    out << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i != 0) {
            out << ' ';
        }
        out << fmt_fixed(px(xs[i]), 2) << ',' << fmt_fixed(py(ys[i]), 2);
    }
    out << "\"/>\n";

    out << "<text x=\"" << fmt_fixed(kMargin, 1) << "\" y=\"392\" font-size=\"11\">"
        << fmt_fixed(x_lo, 4) << "</text>\n";
    out << "<text x=\"" << fmt_fixed(kWidth - kMargin, 1)
        << "\" y=\"392\" font-size=\"11\" text-anchor=\"end\">" << fmt_fixed(x_hi, 4)
        << "</text>\n";
    out << "<text x=\"4\" y=\"" << fmt_fixed(py(y_lo), 1) << "\" font-size=\"11\">"
        << fmt_fixed(y_lo, 4) << "</text>\n";
    out << "<text x=\"4\" y=\"" << fmt_fixed(py(y_hi) + 10.0, 1) << "\" font-size=\"11\">"
        << fmt_fixed(y_hi, 4) << "</text>\n";
    out << "<text x=\"320\" y=\"399\" font-size=\"12\" text-anchor=\"middle\">" << x_label
        << "</text>\n";
    out << "<text x=\"12\" y=\"14\" font-size=\"12\">" << y_label << "</text>\n";
    out << "</svg>\n";
}

}  // namespace ptl::tools
