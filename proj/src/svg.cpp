#include "sgdf/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sgdf {

namespace {

constexpr double kWidth = 720.0, kHeight = 440.0;
constexpr double kLeft = 70.0, kRight = 24.0, kTop = 42.0, kBottom = 52.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
constexpr std::size_t kPaletteSize = sizeof(kPalette) / sizeof(kPalette[0]);

std::string escape_xml(const std::string& s) {
    std::string out;
    out.reserve(s.size());
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

std::string num(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

// Round-number tick positions covering [lo, hi] (linear data coordinates).
std::vector<double> linear_ticks(double lo, double hi) {
    if (!(hi > lo)) return {lo};
    const double span = hi - lo;
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (raw <= m * mag) {
            step = m * mag;
            break;
        }
    }
    std::vector<double> ticks;
    double t = std::ceil(lo / step) * step;
    for (; t <= hi + 1e-9 * span; t += step) ticks.push_back(t);
    return ticks;
}

// Decade ticks for log axes.
std::vector<double> log_ticks(double lo, double hi) {
    std::vector<double> ticks;
    const int d0 = static_cast<int>(std::ceil(std::log10(lo) - 1e-9));
    const int d1 = static_cast<int>(std::floor(std::log10(hi) + 1e-9));
    for (int d = d0; d <= d1; ++d) ticks.push_back(std::pow(10.0, d));
    if (ticks.empty()) ticks = {lo, hi};
    return ticks;
}

std::string tick_label(double v) {
    std::ostringstream os;
    os.precision(4);
    os << v;
    return os.str();
}

struct AxisMap {
    double lo = 0.0, hi = 1.0;
    bool log = false;

    double to_unit(double v) const {
        if (log) return (std::log10(v) - std::log10(lo)) / (std::log10(hi) - std::log10(lo));
        return (v - lo) / (hi - lo);
    }
};

}  // namespace

std::string render_svg_plot(const std::vector<PlotSeries>& series, const AxesSpec& axes) {
    if (series.empty())
        throw std::invalid_argument("render_svg_plot: at least one series required");

    double x_lo = 0.0, x_hi = 0.0, y_lo = 0.0, y_hi = 0.0;
    bool first_point = true;
    for (std::size_t si = 0; si < series.size(); ++si) {
        const PlotSeries& s = series[si];
        if (s.x.size() != s.y.size())
            throw std::invalid_argument("render_svg_plot: series '" + s.label +
                                        "' has mismatched x/y lengths");
        if (s.x.empty())
            throw std::invalid_argument("render_svg_plot: series '" + s.label + "' is empty");
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            const double x = s.x[i], y = s.y[i];
            if (!std::isfinite(x) || !std::isfinite(y))
                throw std::invalid_argument("render_svg_plot: non-finite point in series '" +
                                            s.label + "'");
            if (axes.log_x && !(x > 0.0))
                throw std::invalid_argument(
                    "render_svg_plot: log-x axis requires positive x, series '" + s.label + "'");
            if (axes.log_y && !(y > 0.0))
                throw std::invalid_argument(
                    "render_svg_plot: log-y axis requires positive y, series '" + s.label + "'");
            if (first_point) {
                x_lo = x_hi = x;
                y_lo = y_hi = y;
                first_point = false;
            } else {
                x_lo = std::min(x_lo, x);
                x_hi = std::max(x_hi, x);
                y_lo = std::min(y_lo, y);
                y_hi = std::max(y_hi, y);
            }
        }
    }
    // Degenerate ranges (constant series) get a symmetric pad so the line
    // sits mid-plot instead of dividing by zero.
    if (x_hi == x_lo) {
        const double pad = axes.log_x ? 0.0 : (x_lo == 0.0 ? 1.0 : std::fabs(x_lo) * 0.5);
        if (axes.log_x) {
            x_lo *= 0.5;
            x_hi *= 2.0;
        } else {
            x_lo -= pad;
            x_hi += pad;
        }
    }
    if (y_hi == y_lo) {
        if (axes.log_y) {
            y_lo *= 0.5;
            y_hi *= 2.0;
        } else {
            const double pad = y_lo == 0.0 ? 1.0 : std::fabs(y_lo) * 0.5;
            y_lo -= pad;
            y_hi += pad;
        }
    }

    const AxisMap xm{x_lo, x_hi, axes.log_x};
    const AxisMap ym{y_lo, y_hi, axes.log_y};
    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;
    auto px = [&](double v) { return kLeft + xm.to_unit(v) * plot_w; };
    auto py = [&](double v) { return kTop + (1.0 - ym.to_unit(v)) * plot_h; };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"16\">" << escape_xml(axes.title)
        << "</text>\n";

    // frame
    svg << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << plot_w
        << "\" height=\"" << plot_h << "\" fill=\"none\" stroke=\"#333\"/>\n";

    const std::vector<double> xt = axes.log_x ? log_ticks(x_lo, x_hi) : linear_ticks(x_lo, x_hi);
    const std::vector<double> yt = axes.log_y ? log_ticks(y_lo, y_hi) : linear_ticks(y_lo, y_hi);
    for (double t : xt) {
        if (t < x_lo || t > x_hi) continue;
        const double X = px(t);
        svg << "<line x1=\"" << num(X) << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << num(X)
            << "\" y2=\"" << kTop + plot_h + 5 << "\" stroke=\"#333\"/>\n";
        svg << "<line x1=\"" << num(X) << "\" y1=\"" << kTop << "\" x2=\"" << num(X)
            << "\" y2=\"" << kTop + plot_h << "\" stroke=\"#ddd\"/>\n";
        svg << "<text x=\"" << num(X) << "\" y=\"" << kTop + plot_h + 18
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
            << tick_label(t) << "</text>\n";
    }
    for (double t : yt) {
        if (t < y_lo || t > y_hi) continue;
        const double Y = py(t);
        svg << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << num(Y) << "\" x2=\"" << kLeft
            << "\" y2=\"" << num(Y) << "\" stroke=\"#333\"/>\n";
        svg << "<line x1=\"" << kLeft << "\" y1=\"" << num(Y) << "\" x2=\"" << kLeft + plot_w
            << "\" y2=\"" << num(Y) << "\" stroke=\"#ddd\"/>\n";
        svg << "<text x=\"" << kLeft - 8 << "\" y=\"" << num(Y + 4)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
            << tick_label(t) << "</text>\n";
    }

    svg << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 12
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
        << escape_xml(axes.x_label) << "</text>\n";
    svg << "<text x=\"18\" y=\"" << kTop + plot_h / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
        << "transform=\"rotate(-90 18 " << kTop + plot_h / 2 << ")\">"
        << escape_xml(axes.y_label) << "</text>\n";

    for (std::size_t si = 0; si < series.size(); ++si) {
        const PlotSeries& s = series[si];
        const char* color = kPalette[si % kPaletteSize];
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (i) svg << ' ';
            svg << num(px(s.x[i])) << ',' << num(py(s.y[i]));
        }
        svg << "\"/>\n";
        // legend entry
        const double ly = kTop + 14 + 18.0 * static_cast<double>(si);
        const double lx = kLeft + plot_w - 150;
        svg << "<line x1=\"" << lx << "\" y1=\"" << ly << "\" x2=\"" << lx + 24 << "\" y2=\"" << ly
            << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        svg << "<text x=\"" << lx + 30 << "\" y=\"" << ly + 4
            << "\" font-family=\"sans-serif\" font-size=\"12\">" << escape_xml(s.label)
            << "</text>\n";
    }

    svg << "</svg>\n";
    return svg.str();
}

void emit_svg_plot(const std::vector<PlotSeries>& series, const AxesSpec& axes,
                   const std::string& path) {
    const std::string doc = render_svg_plot(series, axes);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << doc;
    out.flush();
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace sgdf
