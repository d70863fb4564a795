#pragma once

#include <string>
#include <vector>

#include "poclab/dynamics.hpp"

namespace poclab {

struct LossCurve {
    std::vector<double> times;   // strictly increasing
    std::vector<double> values;  // nonnegative
    std::string config_hash;
    std::uint64_t seed = 0;

    void validate() const;
};

LossCurve make_loss_curve(const std::vector<LossCurvePoint>& pts,
                          std::string config_hash = {}, std::uint64_t seed = 0);

// R(t) = int_0^t sqrt(L_s) ds by trapezoid on the curve's grid (linear
// interpolation of sqrt(L) inside a cell when t falls between nodes).
double sqrt_loss_integral(const LossCurve& curve, double t);

// 1 + min(t, int min(t, s) sqrt(L_s) ds) over the recorded horizon.
double s_tilde(const LossCurve& curve, double t);

// int s^2 sqrt(L_s) ds over the recorded horizon.
double s_prime(const LossCurve& curve);

struct DeltaNorms {
    double l2 = 0.0;    // (E_i |row_i|^2)^(1/2)
    double l4 = 0.0;    // (E_i |row_i|^4)^(1/4)
    double linf = 0.0;  // max_i |row_i|
};

DeltaNorms delta_norms(std::span<const double> delta, long m, int d);
DeltaNorms delta_norms(const CoupledSnapshot& snap);

// Squared RKHS error of the finite system against the mean-field proxy, with
// its triangle decomposition into the coupling and Monte-Carlo parts. For
// the empirical kernel the embedding distance equals the L2(D) function
// error, which is how the large-ensemble case is evaluated.
struct PocError {
    double total = 0.0;     // |m_hat - m_ref_full|^2
    double coupling = 0.0;  // |m_coupled - m_hat|^2
    double monte_carlo = 0.0;  // |m_coupled - m_ref_full|^2
};

PocError poc_error(const CoupledSnapshot& snap, const Ensemble& reference_full,
                   const DataSample& data, const ActivationSpec& act);

struct ScalingFit {
    std::vector<double> log_x, log_y;
    std::vector<double> std_err;  // per-point standard error of log_y (may be empty)
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    long window_begin = 0, window_end = 0;  // index range used
    double burn_in = 0.0;                   // decay fits only
    bool super_polynomial = false;          // decay steepens with the window
};

ScalingFit linear_fit(std::span<const double> xs, std::span<const double> ys);

// Tail power-law fit log L ~ c log(t - B); B chosen by grid search over
// [0, 0.3 T] maximizing r^2.
ScalingFit decay_exponent_fit(const LossCurve& curve, double burn_in_fraction);

// Log-log fit of seed-averaged errors against the width m.
// errors_by_m: for each width, (m, per-seed squared errors).
ScalingFit poc_scaling_fit(
    const std::vector<std::pair<double, std::vector<double>>>& errors_by_m);

}  // namespace poclab
