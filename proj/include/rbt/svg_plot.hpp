#pragma once

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "rbt/scenario.hpp"

namespace rbt::sim {

namespace detail {

struct Axis {
    double lo = 0.0, hi = 1.0;
    double px0 = 0.0, px1 = 1.0;

    double map(double v) const {
        if (hi == lo) return 0.5 * (px0 + px1);
        return px0 + (v - lo) / (hi - lo) * (px1 - px0);
    }
};

inline void expand(double v, double& lo, double& hi) {
    if (!std::isfinite(v)) return;
    lo = std::fmin(lo, v);
    hi = std::fmax(hi, v);
}

inline std::string fmt(double v) {
    std::ostringstream out;
    out.precision(4);
    out << v;
    return out.str();
}

inline void draw_panel(std::ostream& out, const Axis& x, const Axis& y, double top,
                       double height, const std::string& ylabel) {
    out << "<rect x='" << x.px0 << "' y='" << top << "' width='" << (x.px1 - x.px0)
        << "' height='" << height << "' fill='none' stroke='#888'/>\n";
    out << "<text x='8' y='" << (top + height / 2) << "' font-size='11' fill='#333' "
        << "transform='rotate(-90 8," << (top + height / 2) << ")' text-anchor='middle'>"
        << ylabel << "</text>\n";
    for (int i = 0; i <= 4; ++i) {
        const double v = y.lo + (y.hi - y.lo) * i / 4.0;
        const double py = y.map(v);
        out << "<line x1='" << x.px0 << "' y1='" << py << "' x2='" << x.px1 << "' y2='" << py
            << "' stroke='#eee'/>\n"
            << "<text x='" << (x.px0 - 4) << "' y='" << (py + 3)
            << "' font-size='9' fill='#555' text-anchor='end'>" << fmt(v) << "</text>\n";
    }
}

} // namespace detail

/// Two-panel scatter of a sweep result: estimated vs. true moisture on top,
/// SNR underneath, both against the swept value.
inline void write_sweep_svg(std::ostream& out, const std::vector<SweepRow>& rows) {
    const double width = 640, panel = 200, gap = 48, left = 64, right = 24;
    const double height = 2 * panel + 3 * gap;

    double x_lo = 1e300, x_hi = -1e300;
    double th_lo = 1e300, th_hi = -1e300;
    double snr_lo = 1e300, snr_hi = -1e300;
    for (const auto& r : rows) {
        detail::expand(r.value, x_lo, x_hi);
        detail::expand(r.true_theta, th_lo, th_hi);
        if (r.est_theta) detail::expand(*r.est_theta, th_lo, th_hi);
        detail::expand(r.snr_db, snr_lo, snr_hi);
    }
    if (x_lo > x_hi) { x_lo = 0; x_hi = 1; }
    if (th_lo > th_hi) { th_lo = 0; th_hi = 1; }
    if (snr_lo > snr_hi) { snr_lo = 0; snr_hi = 1; }
    const double th_pad = 0.05 * (th_hi - th_lo + 1e-9);
    const double snr_pad = 0.05 * (snr_hi - snr_lo + 1e-9);

    detail::Axis x{x_lo, x_hi, left, width - right};
    detail::Axis y_theta{th_lo - th_pad, th_hi + th_pad, gap + panel, gap};
    detail::Axis y_snr{snr_lo - snr_pad, snr_hi + snr_pad, 2 * gap + 2 * panel, 2 * gap + panel};

    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='" << height
        << "' font-family='sans-serif'>\n";
    const std::string var = rows.empty() ? "value" : rows.front().variable;
    out << "<text x='" << width / 2 << "' y='16' font-size='13' text-anchor='middle'>sweep over "
        << var << "</text>\n";

    detail::draw_panel(out, x, y_theta, gap, panel, "theta (cm3/cm3)");
    detail::draw_panel(out, x, y_snr, 2 * gap + panel, panel, "SNR (dB)");
    out << "<text x='" << width / 2 << "' y='" << (height - 10)
        << "' font-size='11' text-anchor='middle'>" << var << "</text>\n";

    for (const auto& r : rows) {
        const double px = x.map(r.value);
        out << "<circle cx='" << px << "' cy='" << y_theta.map(r.true_theta)
            << "' r='2.5' fill='none' stroke='#555'/>\n";
        if (r.est_theta)
            out << "<circle cx='" << px << "' cy='" << y_theta.map(*r.est_theta)
                << "' r='2.5' fill='#1f77b4'/>\n";
        if (std::isfinite(r.snr_db))
            out << "<circle cx='" << px << "' cy='" << y_snr.map(r.snr_db)
                << "' r='2.5' fill='#d62728'/>\n";
    }
    out << "<circle cx='" << (left + 8) << "' cy='" << (gap - 10)
        << "' r='2.5' fill='none' stroke='#555'/>"
        << "<text x='" << (left + 14) << "' y='" << (gap - 7) << "' font-size='10'>true</text>\n";
    out << "<circle cx='" << (left + 52) << "' cy='" << (gap - 10) << "' r='2.5' fill='#1f77b4'/>"
        << "<text x='" << (left + 58) << "' y='" << (gap - 7)
        << "' font-size='10'>estimated</text>\n";
    out << "</svg>\n";
}

} // namespace rbt::sim
