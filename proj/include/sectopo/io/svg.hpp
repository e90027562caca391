#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "sectopo/sections.hpp"

namespace sectopo::io {

struct ScatterPanel {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<PlanePoint> points;
};

/// Affine map from data range [lo, hi] to pixel range [px_lo, px_hi].
struct Axis {
    double lo = 0.0;
    double hi = 1.0;
    double px_lo = 0.0;
    double px_hi = 1.0;

    double map(double v) const { return px_lo + (v - lo) / (hi - lo) * (px_hi - px_lo); }
};

struct PanelGeometry {
    double left = 0.0;
    double top = 0.0;
    Axis x;
    Axis y;
};

inline constexpr double kPanelWidth = 320.0;
inline constexpr double kPanelHeight = 300.0;

/// 1 column for one panel, 2 up to four panels, 3 beyond.
std::size_t scatter_columns(std::size_t panels);

/// Placement of panel `index`; data ranges are the padded bounding box of
/// the points, or [-1, 1] for an empty panel.
PanelGeometry panel_geometry(const ScatterPanel& panel, std::size_t index, std::size_t columns);

/// One panel per plane in a grid; each point is a <circle> with cx, cy
/// printed to two decimals. Identical input gives identical bytes.
std::string render_scatter_svg(std::span<const ScatterPanel> panels, const std::string& title = {});

struct HeatmapGrid {
    std::vector<double> x_values;
    std::vector<double> y_values;
    /// values[ix * y_values.size() + iy], each in [0, 1].
    std::vector<double> values;
    std::string x_label;
    std::string y_label;
    std::string title;
};

/// Cells shaded from white (0) to black (1).
std::string render_heatmap_svg(const HeatmapGrid& grid);

struct BarChart {
    std::vector<double> x_values;
    std::vector<double> heights;
    double y_max = 1.0;
    std::string x_label;
    std::string y_label;
    std::string title;
};

std::string render_bar_svg(const BarChart& chart);

} // namespace sectopo::io
