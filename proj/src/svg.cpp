#include "poclab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace poclab {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

struct AxisRange {
    double lo, hi;
};

AxisRange data_range(const std::vector<PlotCurve>& curves, bool use_x, bool log_scale) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& c : curves) {
        const auto& v = use_x ? c.x : c.y;
        for (double t : v) {
            if (log_scale && !(t > 0)) continue;
            lo = std::min(lo, t);
            hi = std::max(hi, t);
        }
    }
    if (!(lo < hi)) {
        if (!std::isfinite(lo)) {
            lo = log_scale ? 1.0 : 0.0;
            hi = log_scale ? 10.0 : 1.0;
        } else {
            hi = lo + (log_scale ? lo * 9 : 1.0);
        }
    }
    return {lo, hi};
}

struct PanelGeom {
    double x0, y0, w, h;  // axes box in page coordinates
};

void render_panel(std::string& out, const PlotPanel& p, const PanelGeom& g) {
    const AxisRange xr = data_range(p.curves, true, p.log_x);
    const AxisRange yr = data_range(p.curves, false, p.log_y);
    auto tx = [&](double v) {
        double a = p.log_x ? std::log10(std::max(v, 1e-300)) : v;
        double lo = p.log_x ? std::log10(xr.lo) : xr.lo;
        double hi = p.log_x ? std::log10(xr.hi) : xr.hi;
        return g.x0 + (a - lo) / (hi - lo) * g.w;
    };
    auto ty = [&](double v) {
        double a = p.log_y ? std::log10(std::max(v, 1e-300)) : v;
        double lo = p.log_y ? std::log10(yr.lo) : yr.lo;
        double hi = p.log_y ? std::log10(yr.hi) : yr.hi;
        return g.y0 + g.h - (a - lo) / (hi - lo) * g.h;
    };

    out += "<rect x=\"" + num(g.x0) + "\" y=\"" + num(g.y0) + "\" width=\"" + num(g.w) +
           "\" height=\"" + num(g.h) + "\" fill=\"none\" stroke=\"black\"/>\n";
    out += "<text x=\"" + num(g.x0 + g.w / 2) + "\" y=\"" + num(g.y0 - 8) +
           "\" text-anchor=\"middle\" font-size=\"13\">" + p.title + "</text>\n";
    out += "<text x=\"" + num(g.x0 + g.w / 2) + "\" y=\"" + num(g.y0 + g.h + 30) +
           "\" text-anchor=\"middle\" font-size=\"11\">" + p.x_label + "</text>\n";
    out += "<text x=\"" + num(g.x0 - 38) + "\" y=\"" + num(g.y0 + g.h / 2) +
           "\" text-anchor=\"middle\" font-size=\"11\" transform=\"rotate(-90 " +
           num(g.x0 - 38) + " " + num(g.y0 + g.h / 2) + ")\">" + p.y_label + "</text>\n";

    // Ticks: decades on log axes, 5 even ticks otherwise.
    auto tick_values = [&](const AxisRange& r, bool log_scale) {
        std::vector<double> ticks;
        if (log_scale) {
            const int e0 = (int)std::ceil(std::log10(r.lo) - 1e-9);
            const int e1 = (int)std::floor(std::log10(r.hi) + 1e-9);
            for (int e = e0; e <= e1; ++e) ticks.push_back(std::pow(10.0, e));
            if (ticks.empty()) ticks = {r.lo, r.hi};
        } else {
            for (int i = 0; i <= 4; ++i) ticks.push_back(r.lo + (r.hi - r.lo) * i / 4);
        }
        return ticks;
    };
    for (double v : tick_values(xr, p.log_x)) {
        const double x = tx(v);
        out += "<line x1=\"" + num(x) + "\" y1=\"" + num(g.y0 + g.h) + "\" x2=\"" + num(x) +
               "\" y2=\"" + num(g.y0 + g.h + 4) + "\" stroke=\"black\"/>\n";
        out += "<text x=\"" + num(x) + "\" y=\"" + num(g.y0 + g.h + 16) +
               "\" text-anchor=\"middle\" font-size=\"9\">" + num(v) + "</text>\n";
    }
    for (double v : tick_values(yr, p.log_y)) {
        const double y = ty(v);
        out += "<line x1=\"" + num(g.x0 - 4) + "\" y1=\"" + num(y) + "\" x2=\"" + num(g.x0) +
               "\" y2=\"" + num(y) + "\" stroke=\"black\"/>\n";
        out += "<text x=\"" + num(g.x0 - 6) + "\" y=\"" + num(y + 3) +
               "\" text-anchor=\"end\" font-size=\"9\">" + num(v) + "</text>\n";
    }

    for (size_t ci = 0; ci < p.curves.size(); ++ci) {
        const auto& c = p.curves[ci];
        std::string path;
        bool pen_down = false;
        for (size_t i = 0; i < c.x.size(); ++i) {
            if ((p.log_x && !(c.x[i] > 0)) || (p.log_y && !(c.y[i] > 0))) {
                pen_down = false;
                continue;
            }
            path += (pen_down ? " L" : " M");
            path += num(tx(c.x[i])) + " " + num(ty(c.y[i]));
            pen_down = true;
        }
        out += "<path d=\"" + path + "\" fill=\"none\" stroke=\"" +
               kPalette[ci % 8] + "\" stroke-width=\"1.4\"/>\n";
        out += "<text x=\"" + num(g.x0 + g.w - 6) + "\" y=\"" +
               num(g.y0 + 14 + 13 * (double)ci) +
               "\" text-anchor=\"end\" font-size=\"10\" fill=\"" + kPalette[ci % 8] + "\">" +
               c.label + "</text>\n";
    }
    if (!p.annotation.empty()) {
        out += "<text x=\"" + num(g.x0 + 8) + "\" y=\"" + num(g.y0 + g.h - 8) +
               "\" font-size=\"11\">" + p.annotation + "</text>\n";
    }
}

}  // namespace

std::string emit_plot(const std::vector<PlotPanel>& panels,
                      const std::string& meta_comment) {
    if (panels.empty()) throw ConfigError("plot needs at least one panel");
    const double pw = 360, ph = 260, margin = 60;
    const double width = margin + panels.size() * (pw + margin);
    const double height = ph + 2 * margin;
    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) +
           "\" height=\"" + num(height) + "\" font-family=\"sans-serif\">\n";
    if (!meta_comment.empty()) out += "<!-- " + meta_comment + " -->\n";
    for (size_t i = 0; i < panels.size(); ++i) {
        PanelGeom g{margin + i * (pw + margin), margin, pw, ph};
        render_panel(out, panels[i], g);
    }
    out += "</svg>\n";
    return out;
}

std::string plot_loss_and_integral(const std::vector<PlotCurve>& loss_curves,
                                   const std::vector<PlotCurve>& r_curves,
                                   const std::string& meta_comment) {
    PlotPanel left{"loss", "t", "L", true, true, loss_curves, {}};
    PlotPanel right{"integral of sqrt(loss)", "t", "R", false, false, r_curves, {}};
    return emit_plot({left, right}, meta_comment);
}

std::string plot_scaling(const PlotCurve& points, double slope, double intercept,
                         const std::string& meta_comment) {
    PlotPanel p{"error vs width", "m", "error^2", true, true, {points}, {}};
    PlotCurve fit;
    fit.label = "fit";
    for (double x : points.x) {
        fit.x.push_back(x);
        fit.y.push_back(std::exp(intercept + slope * std::log(x)));
    }
    p.curves.push_back(fit);
    p.annotation = "slope = " + num(slope);
    return emit_plot({p}, meta_comment);
}

std::string plot_density_triptych(const DensityField& target,
                                  const std::vector<PlotCurve>& loss_curves,
                                  const std::vector<PlotCurve>& r_curves,
                                  const std::string& meta_comment) {
    const SphereGrid& g = *target.grid;
    const double pw = 360, ph = 260, margin = 60;
    const double width = margin + 3 * (pw + margin);
    const double height = ph + 2 * margin;
    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) +
           "\" height=\"" + num(height) + "\" font-family=\"sans-serif\">\n";
    if (!meta_comment.empty()) out += "<!-- " + meta_comment + " -->\n";

    // Equirectangular density heatmap, shading by mass/area.
    double dmax = 0.0;
    for (long c = 0; c < g.cells(); ++c)
        dmax = std::max(dmax, target.masses[c] / g.cell_areas[c]);
    const double cw = pw / g.n_lon, chh = ph / g.n_lat;
    out += "<text x=\"" + num(margin + pw / 2) + "\" y=\"" + num(margin - 8) +
           "\" text-anchor=\"middle\" font-size=\"13\">target density</text>\n";
    for (int i = 0; i < g.n_lat; ++i) {
        for (int j = 0; j < g.n_lon; ++j) {
            const double d = target.masses[g.index(i, j)] / g.cell_areas[g.index(i, j)];
            const double u = dmax > 0 ? d / dmax : 0.0;
            const int r = (int)(255 * std::min(1.0, 0.2 + 0.8 * u));
            const int b = (int)(255 * std::max(0.0, 1.0 - u));
            char color[16];
            std::snprintf(color, sizeof(color), "#%02x40%02x", r, b);
            out += "<rect x=\"" + num(margin + j * cw) + "\" y=\"" + num(margin + i * chh) +
                   "\" width=\"" + num(cw + 0.5) + "\" height=\"" + num(chh + 0.5) +
                   "\" fill=\"" + color + "\"/>\n";
        }
    }

    PlotPanel lp{"loss", "t", "L", false, true, loss_curves, {}};
    PlotPanel rp{"R", "t", "R", false, false, r_curves, {}};
    PanelGeom g1{margin + (pw + margin), margin, pw, ph};
    PanelGeom g2{margin + 2 * (pw + margin), margin, pw, ph};
    render_panel(out, lp, g1);
    render_panel(out, rp, g2);
    out += "</svg>\n";
    return out;
}

}  // namespace poclab
