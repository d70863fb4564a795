#include "poclab/diagnostics.hpp"

#include <algorithm>
#include <cmath>

namespace poclab {

void LossCurve::validate() const {
    if (times.size() != values.size() || times.empty())
        throw ConfigError("loss curve needs matching nonempty times/values");
    for (size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1]))
            throw ConfigError("loss curve times must be strictly increasing");
}

LossCurve make_loss_curve(const std::vector<LossCurvePoint>& pts,
                          std::string config_hash, std::uint64_t seed) {
    LossCurve c;
    c.config_hash = std::move(config_hash);
    c.seed = seed;
    for (const auto& p : pts) {
        c.times.push_back(p.t);
        c.values.push_back(p.loss);
    }
    c.validate();
    return c;
}

namespace {

// Trapezoid of g over [0, t] where g is linear between curve nodes.
double trapezoid_to(const LossCurve& c, double t,
                    const std::function<double(double, double)>& g) {
    double acc = 0.0;
    for (size_t i = 1; i < c.times.size(); ++i) {
        const double t0 = c.times[i - 1], t1 = c.times[i];
        if (t <= t0) break;
        const double a = g(t0, c.values[i - 1]);
        const double b = g(t1, c.values[i]);
        if (t >= t1) {
            acc += 0.5 * (a + b) * (t1 - t0);
        } else {
            const double frac = (t - t0) / (t1 - t0);
            const double gb = a + frac * (b - a);
            acc += 0.5 * (a + gb) * (t - t0);
            break;
        }
    }
    return acc;
}

}  // namespace

double sqrt_loss_integral(const LossCurve& curve, double t) {
    curve.validate();
    if (t > curve.times.back() + 1e-9)
        throw ConfigError("integral endpoint beyond the recorded horizon");
    return trapezoid_to(curve, t,
                        [](double, double v) { return std::sqrt(std::max(v, 0.0)); });
}

double s_tilde(const LossCurve& curve, double t) {
    curve.validate();
    const double horizon = curve.times.back();
    const double integral = trapezoid_to(curve, horizon, [&](double s, double v) {
        return std::min(t, s) * std::sqrt(std::max(v, 0.0));
    });
    return 1.0 + std::min(t, integral);
}

double s_prime(const LossCurve& curve) {
    curve.validate();
    return trapezoid_to(curve, curve.times.back(), [](double s, double v) {
        return s * s * std::sqrt(std::max(v, 0.0));
    });
}

DeltaNorms delta_norms(std::span<const double> delta, long m, int d) {
    DeltaNorms out;
    double s2 = 0.0, s4 = 0.0;
    for (long i = 0; i < m; ++i) {
        double n2 = 0.0;
        for (int c = 0; c < d; ++c) {
            const double v = delta[(size_t)i * d + c];
            n2 += v * v;
        }
        s2 += n2;
        s4 += n2 * n2;
        out.linf = std::max(out.linf, std::sqrt(n2));
    }
    out.l2 = std::sqrt(s2 / (double)m);
    out.l4 = std::pow(s4 / (double)m, 0.25);
    return out;
}

DeltaNorms delta_norms(const CoupledSnapshot& snap) {
    return delta_norms(snap.delta, snap.m, snap.d);
}

PocError poc_error(const CoupledSnapshot& snap, const Ensemble& reference_full,
                   const DataSample& data, const ActivationSpec& act) {
    Ensemble hat, coupled;
    hat.m = coupled.m = snap.m;
    hat.d = coupled.d = snap.d;
    hat.domain = coupled.domain = reference_full.domain;
    hat.weights = snap.xi_hat;
    coupled.weights = snap.xi_ref;

    PocError out;
    out.total = mse_function_error(data, act, hat, reference_full);
    out.coupling = mse_function_error(data, act, coupled, hat);
    out.monte_carlo = mse_function_error(data, act, coupled, reference_full);
    return out;
}

ScalingFit linear_fit(std::span<const double> xs, std::span<const double> ys) {
    ScalingFit f;
    f.log_x.assign(xs.begin(), xs.end());
    f.log_y.assign(ys.begin(), ys.end());
    const size_t n = xs.size();
    if (n < 2) throw ConfigError("fit needs at least two points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (size_t i = 0; i < n; ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
        syy += ys[i] * ys[i];
    }
    const double den = n * sxx - sx * sx;
    if (std::abs(den) < 1e-30) throw ConfigError("degenerate abscissae in fit");
    f.slope = (n * sxy - sx * sy) / den;
    f.intercept = (sy - f.slope * sx) / n;
    double ss_res = 0.0, ss_tot = 0.0;
    const double ymean = sy / n;
    for (size_t i = 0; i < n; ++i) {
        const double pred = f.intercept + f.slope * xs[i];
        ss_res += (ys[i] - pred) * (ys[i] - pred);
        ss_tot += (ys[i] - ymean) * (ys[i] - ymean);
    }
    f.r2 = ss_tot > 0 ? std::max(0.0, 1.0 - ss_res / ss_tot) : 1.0;
    f.window_begin = 0;
    f.window_end = (long)n;
    return f;
}

ScalingFit decay_exponent_fit(const LossCurve& curve, double burn_in_fraction) {
    curve.validate();
    const size_t n = curve.times.size();
    const size_t first = (size_t)std::floor(burn_in_fraction * (double)n);
    const double t_end = curve.times.back();

    ScalingFit best;
    bool have = false;
    for (int bi = 0; bi <= 30; ++bi) {
        const double B = 0.3 * t_end * bi / 30.0;
        std::vector<double> xs, ys;
        for (size_t i = first; i < n; ++i) {
            const double dt = curve.times[i] - B;
            if (dt <= 0 || curve.values[i] <= 0) continue;
            xs.push_back(std::log(dt));
            ys.push_back(std::log(curve.values[i]));
        }
        if (xs.size() < 8) continue;
        ScalingFit f = linear_fit(xs, ys);
        f.burn_in = B;
        f.window_begin = (long)first;
        f.window_end = (long)n;
        if (!have || f.r2 > best.r2) {
            best = f;
            have = true;
        }
    }
    if (!have) throw ConfigError("too few usable points after burn-in for a decay fit");

    // Exponential decay has no stable log-log slope: it keeps steepening as
    // the window moves right. Compare half-window slopes to flag it.
    const size_t k = best.log_x.size();
    if (k >= 16) {
        const auto s1 = linear_fit(std::span<const double>(best.log_x).subspan(0, k / 2),
                                   std::span<const double>(best.log_y).subspan(0, k / 2));
        const auto s2 = linear_fit(std::span<const double>(best.log_x).subspan(k / 2),
                                   std::span<const double>(best.log_y).subspan(k / 2));
        if (std::abs(s2.slope) > 1.3 * std::abs(s1.slope) + 0.5) best.super_polynomial = true;
    }
    return best;
}

ScalingFit poc_scaling_fit(
    const std::vector<std::pair<double, std::vector<double>>>& errors_by_m) {
    if (errors_by_m.size() < 2) throw ConfigError("scaling fit needs several widths");
    std::vector<double> xs, ys, se;
    for (const auto& [m, errs] : errors_by_m) {
        if (errs.empty()) throw ConfigError("scaling fit: empty seed set");
        double mean = 0.0;
        for (double e : errs) mean += e;
        mean /= (double)errs.size();
        double var = 0.0;
        for (double e : errs) var += (e - mean) * (e - mean);
        var = errs.size() > 1 ? var / (double)(errs.size() - 1) : 0.0;
        xs.push_back(std::log(m));
        ys.push_back(std::log(mean));
        // Standard error of the mean propagated through the log.
        se.push_back(mean > 0 ? std::sqrt(var / (double)errs.size()) / mean : 0.0);
    }
    ScalingFit f = linear_fit(xs, ys);
    f.std_err = se;
    return f;
}

}  // namespace poclab
