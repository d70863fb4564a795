#pragma once

#include <string>
#include <vector>

#include "poclab/euler.hpp"

namespace poclab {

struct PlotCurve {
    std::string label;
    std::vector<double> x, y;
};

struct PlotPanel {
    std::string title, x_label, y_label;
    bool log_x = false, log_y = false;
    std::vector<PlotCurve> curves;
    std::string annotation;  // drawn inside the axes, e.g. a fitted slope
};

// Deterministic standalone SVG with one <path> per curve per panel.
std::string emit_plot(const std::vector<PlotPanel>& panels,
                      const std::string& meta_comment = {});

// Loss (log-log) next to its running sqrt-integral, legend keyed by label.
std::string plot_loss_and_integral(const std::vector<PlotCurve>& loss_curves,
                                   const std::vector<PlotCurve>& r_curves,
                                   const std::string& meta_comment = {});

// Squared error against width on log axes with the fitted slope annotated.
std::string plot_scaling(const PlotCurve& points, double slope, double intercept,
                         const std::string& meta_comment = {});

// Density heatmap (equirectangular) above the loss and R panels.
std::string plot_density_triptych(const DensityField& target,
                                  const std::vector<PlotCurve>& loss_curves,
                                  const std::vector<PlotCurve>& r_curves,
                                  const std::string& meta_comment = {});

}  // namespace poclab
