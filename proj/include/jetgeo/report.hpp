#pragma once

#include <string>
#include <vector>

#include "jetgeo/specfile.hpp"

namespace jetgeo {

/// Number rendering used everywhere in reports and CSV: %.17g, enough
/// digits for a lossless double round-trip.
std::string format_double(double v);

/// Analyze report for every evaluation point of the document, as
/// deterministic JSON text: fixed key order, fixed number format, so
/// identical documents yield byte-identical reports.
std::string render_report(const SpecDocument& doc);

/// One axis of a rectangular sweep: count values spanning [lo, hi].
struct GridAxis {
    std::string name;
    double lo = 0.0;
    double hi = 0.0;
    int count = 0;
};

/// Rectangular grid over (t, x1..xn), axes in that canonical order.
struct GridSpec {
    std::vector<GridAxis> axes;
};

/// Parse "t=0:1:11;x1=-2:2:21;x2=-2:2:21".  Each of t, x1..xn must
/// appear exactly once (any order in the text); count >= 1, and a
/// one-point axis must have hi == lo.  Throws SpecError.
GridSpec parse_grid(const std::string& text, int n);

/// CSV sweep of the Yang-Mills energy over the grid.  Header
/// t,x1..xn,eym; rows iterate t outermost, xn innermost.
std::string render_ym_map(const SpecDocument& doc, const GridSpec& grid);

/// True when the metric's curvature tensor vanishes structurally; then
/// the spatial torsion does not depend on the fiber coordinates and a
/// defaulted x1 = 0 cannot change it.
bool metric_curvature_is_flat(const MetricPair& metric);

} // namespace jetgeo
