#pragma once

// Minimal static SVG line plots: one polyline per series, axis ticks, legend,
// optional log scales. Derived output only — the CSV stays the source of
// truth — so the implementation favors plain readable markup over features.

#include <string>
#include <vector>

namespace sgdf {

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;  // same length as x
};

struct AxesSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    bool log_y = false;
};

// Renders the series set to an <svg> document string. Requirements: at least
// one series, every series nonempty with matching x/y lengths, and strictly
// positive values on any log-scaled axis.
std::string render_svg_plot(const std::vector<PlotSeries>& series, const AxesSpec& axes);

// render + write to path.
void emit_svg_plot(const std::vector<PlotSeries>& series, const AxesSpec& axes,
                   const std::string& path);

}  // namespace sgdf
