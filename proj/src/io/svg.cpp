#include "sectopo/io/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <tuple>

namespace sectopo::io {

namespace {

constexpr double kPadLeft = 52.0;
constexpr double kPadRight = 14.0;
constexpr double kPadTop = 30.0;
constexpr double kPadBottom = 42.0;
constexpr double kHeader = 28.0;

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    std::string s(buf);
    return s == "-0.00" ? "0.00" : s;
}

std::string tick(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.3g", std::abs(v) < 1e-12 ? 0.0 : v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char ch : s) {
        switch (ch) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += ch;
        }
    }
    return out;
}

void open_document(std::ostringstream& out, double width, double height) {
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << fmt(width)
        << "\" height=\"" << fmt(height) << "\" viewBox=\"0 0 " << fmt(width) << ' ' << fmt(height)
        << "\" font-family=\"sans-serif\" font-size=\"11\">\n"
        << "<rect x=\"0\" y=\"0\" width=\"" << fmt(width) << "\" height=\"" << fmt(height)
        << "\" fill=\"white\"/>\n";
}

void text(std::ostringstream& out, double x, double y, const std::string& s, const char* anchor = "middle",
          const char* extra = "") {
    out << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" text-anchor=\"" << anchor << "\"" << extra
        << '>' << escape(s) << "</text>\n";
}

// Frame, ticks at both ends of each axis and the axis labels.
void axes(std::ostringstream& out, const Axis& x, const Axis& y, const std::string& x_label,
          const std::string& y_label) {
    out << "<rect x=\"" << fmt(x.px_lo) << "\" y=\"" << fmt(y.px_hi) << "\" width=\"" << fmt(x.px_hi - x.px_lo)
        << "\" height=\"" << fmt(y.px_lo - y.px_hi) << "\" fill=\"none\" stroke=\"black\"/>\n";
    text(out, x.px_lo, y.px_lo + 14.0, tick(x.lo));
    text(out, x.px_hi, y.px_lo + 14.0, tick(x.hi));
    text(out, x.px_lo - 4.0, y.px_lo, tick(y.lo), "end");
    text(out, x.px_lo - 4.0, y.px_hi + 8.0, tick(y.hi), "end");
    text(out, 0.5 * (x.px_lo + x.px_hi), y.px_lo + 30.0, x_label);
    const double cy = 0.5 * (y.px_lo + y.px_hi);
    const double cx = x.px_lo - 36.0;
    out << "<text x=\"" << fmt(cx) << "\" y=\"" << fmt(cy) << "\" text-anchor=\"middle\" transform=\"rotate(-90 "
        << fmt(cx) << ' ' << fmt(cy) << ")\">" << escape(y_label) << "</text>\n";
}

std::pair<double, double> padded_range(double lo, double hi) {
    if (!(hi > lo)) {
        const double half = std::max(1e-3, 0.05 * std::abs(lo));
        return {lo - half, hi + half};
    }
    const double pad = 0.05 * (hi - lo);
    return {lo - pad, hi + pad};
}

} // namespace

std::size_t scatter_columns(std::size_t panels) {
    if (panels <= 1) return 1;
    return panels <= 4 ? 2 : 3;
}

PanelGeometry panel_geometry(const ScatterPanel& panel, std::size_t index, std::size_t columns) {
    PanelGeometry g;
    g.left = static_cast<double>(index % columns) * kPanelWidth;
    g.top = kHeader + static_cast<double>(index / columns) * kPanelHeight;

    double x_lo = -1.0, x_hi = 1.0, y_lo = -1.0, y_hi = 1.0;
    if (!panel.points.empty()) {
        x_lo = y_lo = std::numeric_limits<double>::infinity();
        x_hi = y_hi = -std::numeric_limits<double>::infinity();
        for (const PlanePoint& p : panel.points) {
            x_lo = std::min(x_lo, p[0]);
            x_hi = std::max(x_hi, p[0]);
            y_lo = std::min(y_lo, p[1]);
            y_hi = std::max(y_hi, p[1]);
        }
        std::tie(x_lo, x_hi) = padded_range(x_lo, x_hi);
        std::tie(y_lo, y_hi) = padded_range(y_lo, y_hi);
    }
    g.x = {x_lo, x_hi, g.left + kPadLeft, g.left + kPanelWidth - kPadRight};
    // SVG y grows downwards.
    g.y = {y_lo, y_hi, g.top + kPanelHeight - kPadBottom, g.top + kPadTop};
    return g;
}

std::string render_scatter_svg(std::span<const ScatterPanel> panels, const std::string& title) {
    const std::size_t columns = scatter_columns(panels.size());
    const std::size_t rows = std::max<std::size_t>(1, (panels.size() + columns - 1) / columns);
    const double width = static_cast<double>(columns) * kPanelWidth;
    const double height = kHeader + static_cast<double>(rows) * kPanelHeight;

    std::ostringstream out;
    open_document(out, width, height);
    text(out, 0.5 * width, 18.0, title, "middle", " font-size=\"13\"");
    for (std::size_t k = 0; k < panels.size(); ++k) {
        const ScatterPanel& panel = panels[k];
        const PanelGeometry g = panel_geometry(panel, k, columns);
        out << "<g class=\"panel\">\n";
        text(out, g.left + 0.5 * kPanelWidth, g.top + 18.0, panel.title);
        axes(out, g.x, g.y, panel.x_label, panel.y_label);
        if (panel.points.empty()) {
            text(out, 0.5 * (g.x.px_lo + g.x.px_hi), 0.5 * (g.y.px_lo + g.y.px_hi), "Empty", "middle",
                 " fill=\"gray\"");
        }
        for (const PlanePoint& p : panel.points)
            out << "<circle cx=\"" << fmt(g.x.map(p[0])) << "\" cy=\"" << fmt(g.y.map(p[1]))
                << "\" r=\"1.2\"/>\n";
        out << "</g>\n";
    }
    out << "</svg>\n";
    return out.str();
}

std::string render_heatmap_svg(const HeatmapGrid& grid) {
    const std::size_t nx = grid.x_values.size();
    const std::size_t ny = grid.y_values.size();
    const double cell = nx * ny > 0 ? std::clamp(360.0 / static_cast<double>(std::max(nx, ny)), 6.0, 60.0) : 60.0;
    const double plot_w = cell * static_cast<double>(std::max<std::size_t>(nx, 1));
    const double plot_h = cell * static_cast<double>(std::max<std::size_t>(ny, 1));
    const double legend = 70.0;
    const double width = kPadLeft + plot_w + kPadRight + legend;
    const double height = kHeader + kPadTop + plot_h + kPadBottom;
    const double x0 = kPadLeft;
    const double y_bottom = kHeader + kPadTop + plot_h;

    std::ostringstream out;
    open_document(out, width, height);
    text(out, 0.5 * width, 18.0, grid.title, "middle", " font-size=\"13\"");
    for (std::size_t ix = 0; ix < nx; ++ix)
        for (std::size_t iy = 0; iy < ny; ++iy) {
            const double v = std::clamp(grid.values[ix * ny + iy], 0.0, 1.0);
            const int shade = static_cast<int>(std::lround(255.0 * (1.0 - v)));
            out << "<rect x=\"" << fmt(x0 + cell * static_cast<double>(ix)) << "\" y=\""
                << fmt(y_bottom - cell * static_cast<double>(iy + 1)) << "\" width=\"" << fmt(cell)
                << "\" height=\"" << fmt(cell) << "\" fill=\"rgb(" << shade << ',' << shade << ',' << shade
                << ")\"><title>" << tick(grid.x_values[ix]) << ", " << tick(grid.y_values[iy]) << ": "
                << fmt(v) << "</title></rect>\n";
        }
    const auto first_last = [](const std::vector<double>& v) {
        return v.empty() ? std::pair{0.0, 1.0} : std::pair{v.front(), v.back()};
    };
    const auto [xa, xb] = first_last(grid.x_values);
    const auto [ya, yb] = first_last(grid.y_values);
    const Axis x{xa, xb, x0 + 0.5 * cell, x0 + plot_w - 0.5 * cell};
    const Axis y{ya, yb, y_bottom - 0.5 * cell, y_bottom - plot_h + 0.5 * cell};
    out << "<rect x=\"" << fmt(x0) << "\" y=\"" << fmt(y_bottom - plot_h) << "\" width=\"" << fmt(plot_w)
        << "\" height=\"" << fmt(plot_h) << "\" fill=\"none\" stroke=\"black\"/>\n";
    text(out, x.px_lo, y_bottom + 14.0, tick(xa));
    if (nx > 1) text(out, x.px_hi, y_bottom + 14.0, tick(xb));
    text(out, x0 - 4.0, y.px_lo + 4.0, tick(ya), "end");
    if (ny > 1) text(out, x0 - 4.0, y.px_hi + 4.0, tick(yb), "end");
    text(out, x0 + 0.5 * plot_w, y_bottom + 30.0, grid.x_label);
    const double cy = y_bottom - 0.5 * plot_h;
    out << "<text x=\"" << fmt(x0 - 36.0) << "\" y=\"" << fmt(cy) << "\" text-anchor=\"middle\" transform=\"rotate(-90 "
        << fmt(x0 - 36.0) << ' ' << fmt(cy) << ")\">" << escape(grid.y_label) << "</text>\n";

    // Ramp legend: 0 white at the bottom, 1 black at the top.
    const double lx = x0 + plot_w + 24.0;
    const double ly = y_bottom - plot_h;
    out << "<defs><linearGradient id=\"ramp\" x1=\"0\" y1=\"1\" x2=\"0\" y2=\"0\">"
        << "<stop offset=\"0\" stop-color=\"white\"/><stop offset=\"1\" stop-color=\"black\"/>"
        << "</linearGradient></defs>\n";
    out << "<rect x=\"" << fmt(lx) << "\" y=\"" << fmt(ly) << "\" width=\"14.00\" height=\"" << fmt(plot_h)
        << "\" fill=\"url(#ramp)\" stroke=\"black\"/>\n";
    text(out, lx + 18.0, y_bottom, "0", "start");
    text(out, lx + 18.0, ly + 8.0, "1", "start");
    out << "</svg>\n";
    return out.str();
}

std::string render_bar_svg(const BarChart& chart) {
    const std::size_t n = chart.x_values.size();
    const double plot_w = 400.0;
    const double plot_h = 240.0;
    const double width = kPadLeft + plot_w + kPadRight;
    const double height = kHeader + kPadTop + plot_h + kPadBottom;
    const double x0 = kPadLeft;
    const double y_bottom = kHeader + kPadTop + plot_h;
    const double y_max = chart.y_max > 0.0 ? chart.y_max : 1.0;

    std::ostringstream out;
    open_document(out, width, height);
    text(out, 0.5 * width, 18.0, chart.title, "middle", " font-size=\"13\"");
    const Axis y{0.0, y_max, y_bottom, y_bottom - plot_h};
    const double slot = plot_w / static_cast<double>(std::max<std::size_t>(n, 1));
    for (std::size_t k = 0; k < n; ++k) {
        const double h = std::clamp(chart.heights[k], 0.0, y_max);
        const double left = x0 + slot * static_cast<double>(k) + 0.15 * slot;
        out << "<rect x=\"" << fmt(left) << "\" y=\"" << fmt(y.map(h)) << "\" width=\"" << fmt(0.7 * slot)
            << "\" height=\"" << fmt(y_bottom - y.map(h)) << "\" fill=\"gray\" stroke=\"black\"><title>"
            << tick(chart.x_values[k]) << ": " << fmt(chart.heights[k]) << "</title></rect>\n";
        text(out, left + 0.35 * slot, y_bottom + 14.0, tick(chart.x_values[k]));
    }
    out << "<rect x=\"" << fmt(x0) << "\" y=\"" << fmt(y_bottom - plot_h) << "\" width=\"" << fmt(plot_w)
        << "\" height=\"" << fmt(plot_h) << "\" fill=\"none\" stroke=\"black\"/>\n";
    text(out, x0 - 4.0, y_bottom, "0", "end");
    text(out, x0 - 4.0, y_bottom - plot_h + 8.0, tick(y_max), "end");
    text(out, x0 + 0.5 * plot_w, y_bottom + 30.0, chart.x_label);
    const double cy = y_bottom - 0.5 * plot_h;
    out << "<text x=\"" << fmt(x0 - 36.0) << "\" y=\"" << fmt(cy) << "\" text-anchor=\"middle\" transform=\"rotate(-90 "
        << fmt(x0 - 36.0) << ' ' << fmt(cy) << ")\">" << escape(chart.y_label) << "</text>\n";
    out << "</svg>\n";
    return out.str();
}

} // namespace sectopo::io
