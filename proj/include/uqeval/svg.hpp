#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "uqeval/calibration.hpp"
#include "uqeval/io.hpp"

namespace uqeval {

namespace detail {

inline void svg_rect(std::string& out, double x, double y, double w, double h,
                     const char* fill, const char* extra = "") {
    out += "<rect x=\"" + format_double(x) + "\" y=\"" + format_double(y) +
           "\" width=\"" + format_double(w) + "\" height=\"" + format_double(h) +
           "\" fill=\"" + fill + "\"" + extra + "/>\n";
}

inline void svg_line(std::string& out, double x1, double y1, double x2, double y2,
                     const char* stroke, const char* extra = "") {
    out += "<line x1=\"" + format_double(x1) + "\" y1=\"" + format_double(y1) +
           "\" x2=\"" + format_double(x2) + "\" y2=\"" + format_double(y2) +
           "\" stroke=\"" + stroke + "\"" + extra + "/>\n";
}

inline void svg_text(std::string& out, double x, double y, const std::string& text,
                     const std::string& extra = "") {
    out += "<text x=\"" + format_double(x) + "\" y=\"" + format_double(y) +
           "\" font-family=\"sans-serif\"" + extra + ">" + text + "</text>\n";
}

} // namespace detail

/// Reliability diagram as a self-contained SVG 1.1 document: accuracy
/// bars over the confidence axis, a red overlay between accuracy and
/// mean confidence (above the bar = over-confident), the identity
/// diagonal, and a sample-density strip underneath. The markup is
/// hand-rolled and a pure function of the rows, so reruns are
/// byte-identical.
inline std::string reliability_diagram_svg(const std::vector<ReliabilityRow>& rows,
                                           const std::string& title) {
    // plot box for the diagram, then a strip below for the densities
    constexpr double width = 640.0, height = 540.0;
    constexpr double left = 64.0, right = 616.0;
    constexpr double top = 48.0, bottom = 384.0;
    constexpr double strip_top = 420.0, strip_bottom = 500.0;

    const auto px = [&](double v) { return left + v * (right - left); };
    const auto py = [&](double v) { return bottom - v * (bottom - top); };

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
           format_double(width) + "\" height=\"" + format_double(height) + "\">\n";
    detail::svg_rect(out, 0, 0, width, height, "#ffffff");
    detail::svg_text(out, left, 28, title, " font-size=\"16\"");

    for (int tick = 0; tick <= 5; ++tick) {
        const double v = tick / 5.0;
        detail::svg_line(out, px(v), bottom, px(v), top, "#dddddd");
        detail::svg_line(out, left, py(v), right, py(v), "#dddddd");
        detail::svg_text(out, px(v) - 10, bottom + 18, format_double(v),
                         " font-size=\"12\"");
        detail::svg_text(out, left - 40, py(v) + 4, format_double(v),
                         " font-size=\"12\"");
    }

    for (const auto& row : rows) {
        const double x = px(row.lo);
        const double w = std::max(px(row.hi) - px(row.lo), 1.0);
        detail::svg_rect(out, x, py(row.empirical_accuracy), w,
                         bottom - py(row.empirical_accuracy), "#5b8cbc",
                         " stroke=\"#3a6a96\" stroke-width=\"1\"");
        const double gap_top = py(std::max(row.empirical_accuracy, row.mean_confidence));
        const double gap_bottom = py(std::min(row.empirical_accuracy, row.mean_confidence));
        if (gap_bottom > gap_top)
            detail::svg_rect(out, x, gap_top, w, gap_bottom - gap_top, "#c44e52",
                             " fill-opacity=\"0.55\"");
    }

    detail::svg_line(out, px(0), py(0), px(1), py(1), "#555555",
                     " stroke-dasharray=\"6,4\"");
    detail::svg_line(out, left, bottom, right, bottom, "#000000");
    detail::svg_line(out, left, bottom, left, top, "#000000");
    detail::svg_text(out, (left + right) / 2 - 36, bottom + 34, "confidence",
                     " font-size=\"13\"");
    detail::svg_text(out, 16, (top + bottom) / 2, "accuracy",
                     " font-size=\"13\" transform=\"rotate(-90 16 "
                     + format_double((top + bottom) / 2) + ")\"");

    double max_density = 0.0;
    for (const auto& row : rows) max_density = std::max(max_density, row.density);
    if (max_density > 0.0) {
        for (const auto& row : rows) {
            const double h = (strip_bottom - strip_top) * (row.density / max_density);
            detail::svg_rect(out, px(row.lo), strip_bottom - h,
                             std::max(px(row.hi) - px(row.lo), 1.0), h, "#888888");
        }
    }
    detail::svg_line(out, left, strip_bottom, right, strip_bottom, "#000000");
    detail::svg_text(out, left, strip_top - 8, "sample density", " font-size=\"12\"");

    out += "</svg>\n";
    return out;
}

} // namespace uqeval
