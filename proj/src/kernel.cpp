#include "poclab/kernel.hpp"

#include <algorithm>
#include <cmath>

#include "poclab/parallel.hpp"
#include "poclab/summation.hpp"

namespace poclab {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kInvTwoPi = 1.0 / kTwoPi;
}  // namespace

void DataSample::validate() const {
    if (n < 1) throw ConfigError("data sample needs n >= 1");
    double s = 0.0;
    for (long i = 0; i < n; ++i) {
        if (weights[i] < 0) throw ConfigError("data weights must be nonnegative");
        s += weights[i];
    }
    if (std::abs(s - 1.0) > 1e-12) throw ConfigError("data weights must sum to 1");
}

DataSample make_uniform_data(std::vector<double> inputs, std::vector<double> labels, int d) {
    DataSample out;
    out.d = d;
    out.n = (long)labels.size();
    out.inputs = std::move(inputs);
    out.labels = std::move(labels);
    out.weights.assign(out.n, 1.0 / (double)out.n);
    out.validate();
    return out;
}

KernelSpec KernelSpec::empirical(DataSample data, ActivationSpec act) {
    data.validate();
    KernelSpec k;
    k.kind = KernelKind::Empirical;
    k.data = std::move(data);
    k.act = act;
    return k;
}

namespace {

struct ArccosGeom {
    double nw, nwp;    // norms
    double c;          // cos angle of the normalized pair
    double theta, sin_theta;
    std::span<const double> w, wp;
};

ArccosGeom arccos_geom(std::span<const double> w, std::span<const double> wp) {
    ArccosGeom g;
    g.w = w;
    g.wp = wp;
    g.nw = norm2(w);
    g.nwp = norm2(wp);
    double c = 0.0;
    if (g.nw > 0 && g.nwp > 0) c = dot(w, wp) / (g.nw * g.nwp);
    g.c = std::clamp(c, -1.0, 1.0);
    g.theta = std::acos(g.c);
    g.sin_theta = std::sin(g.theta);
    return g;
}

}  // namespace

double kernel_eval(const KernelSpec& k, std::span<const double> w,
                   std::span<const double> wp) {
    if (k.kind == KernelKind::Empirical) {
        const DataSample& D = k.data;
        return pairwise_sum(std::size_t{0}, (std::size_t)D.n, [&](std::size_t i) {
            const double a = activation_eval(k.act, 0, dot(w, D.x((long)i)));
            const double b = activation_eval(k.act, 0, dot(wp, D.x((long)i)));
            return D.weights[i] * a * b;
        });
    }
    const ArccosGeom g = arccos_geom(w, wp);
    return g.nw * g.nwp * kInvTwoPi * (g.sin_theta + (M_PI - g.theta) * g.c);
}

double potential_eval(const DataSample& data, const ActivationSpec& act,
                      std::span<const double> w) {
    return pairwise_sum(std::size_t{0}, (std::size_t)data.n, [&](std::size_t i) {
        return data.weights[i] * data.labels[i] *
               activation_eval(act, 0, dot(w, data.x((long)i)));
    });
}

void potential_grad(const DataSample& data, const ActivationSpec& act,
                    std::span<const double> w, std::span<double> out) {
    const int d = data.d;
    for (int c = 0; c < d; ++c) out[c] = 0.0;
    for (long i = 0; i < data.n; ++i) {
        const double g = data.weights[i] * data.labels[i] *
                         activation_eval(act, 1, dot(w, data.x(i)));
        const auto x = data.x(i);
        for (int c = 0; c < d; ++c) out[c] += g * x[c];
    }
}

void kernel_grad(const KernelSpec& k, std::span<const double> w,
                 std::span<const double> wp, std::span<double> out) {
    const size_t d = w.size();
    for (size_t c = 0; c < d; ++c) out[c] = 0.0;
    if (k.kind == KernelKind::Empirical) {
        const DataSample& D = k.data;
        for (long i = 0; i < D.n; ++i) {
            const auto x = D.x(i);
            const double g = D.weights[i] * activation_eval(k.act, 1, dot(w, x)) *
                             activation_eval(k.act, 0, dot(wp, x));
            for (size_t c = 0; c < d; ++c) out[c] += g * x[c];
        }
        return;
    }
    // grad_w K = (|w'|/2pi) (sin t * w/|w| + (pi - t) * w'/|w'|)
    const ArccosGeom g = arccos_geom(w, wp);
    if (g.nw <= 0 || g.nwp <= 0) return;
    const double a = g.nwp * kInvTwoPi * g.sin_theta / g.nw;
    const double b = kInvTwoPi * (M_PI - g.theta);
    for (size_t c = 0; c < d; ++c) out[c] = a * w[c] + b * wp[c];
}

void kernel_cross_grad(const KernelSpec& k, std::span<const double> w,
                       std::span<const double> wp, std::span<double> out) {
    const size_t d = w.size();
    std::fill(out.begin(), out.end(), 0.0);
    if (k.kind == KernelKind::Empirical) {
        const DataSample& D = k.data;
        for (long i = 0; i < D.n; ++i) {
            const auto x = D.x(i);
            const double g = D.weights[i] * activation_eval(k.act, 1, dot(w, x)) *
                             activation_eval(k.act, 1, dot(wp, x));
            for (size_t a = 0; a < d; ++a)
                for (size_t b = 0; b < d; ++b) out[a * d + b] += g * x[a] * x[b];
        }
        return;
    }
    // d^2 K / dw dw' = (1/2pi) [ (pi-t) I + sin t * u u'^T
    //                            + (u' - c u)(u - c u')^T / sin t ],
    // u = w/|w|, u' = w'/|w'|. The last term vanishes like t as t -> 0 and
    // like (pi - t) at t -> pi; skip it near the poles of sin.
    const ArccosGeom g = arccos_geom(w, wp);
    if (g.nw <= 0 || g.nwp <= 0) return;
    std::vector<double> u(d), up(d);
    for (size_t c = 0; c < d; ++c) u[c] = w[c] / g.nw;
    for (size_t c = 0; c < d; ++c) up[c] = wp[c] / g.nwp;
    const double diag = kInvTwoPi * (M_PI - g.theta);
    for (size_t a = 0; a < d; ++a) {
        for (size_t b = 0; b < d; ++b) {
            double v = kInvTwoPi * g.sin_theta * u[a] * up[b];
            if (g.sin_theta > 1e-8) {
                v += kInvTwoPi * (up[a] - g.c * u[a]) * (u[b] - g.c * up[b]) / g.sin_theta;
            }
            out[a * d + b] = v + (a == b ? diag : 0.0);
        }
    }
}

void kernel_hess(const KernelSpec& k, std::span<const double> w,
                 std::span<const double> wp, std::span<double> out) {
    const size_t d = w.size();
    std::fill(out.begin(), out.end(), 0.0);
    if (k.kind == KernelKind::Empirical) {
        if (!k.act.smooth())
            throw UnsupportedDerivative("kernel hessian needs a smoothed activation");
        const DataSample& D = k.data;
        for (long i = 0; i < D.n; ++i) {
            const auto x = D.x(i);
            const double g = D.weights[i] * activation_eval(k.act, 2, dot(w, x)) *
                             activation_eval(k.act, 0, dot(wp, x));
            for (size_t a = 0; a < d; ++a)
                for (size_t b = 0; b < d; ++b) out[a * d + b] += g * x[a] * x[b];
        }
        return;
    }
    // d^2 K / dw^2 = (|w'|/(2pi |w|)) [ sin t (I - u u^T)
    //                                   + (u' - c u)(u' - c u)^T / sin t ].
    const ArccosGeom g = arccos_geom(w, wp);
    if (g.nw <= 0 || g.nwp <= 0) return;
    std::vector<double> u(d), up(d);
    for (size_t c = 0; c < d; ++c) u[c] = w[c] / g.nw;
    for (size_t c = 0; c < d; ++c) up[c] = wp[c] / g.nwp;
    const double scale = g.nwp / (kTwoPi * g.nw);
    for (size_t a = 0; a < d; ++a) {
        for (size_t b = 0; b < d; ++b) {
            double v = g.sin_theta * ((a == b ? 1.0 : 0.0) - u[a] * u[b]);
            if (g.sin_theta > 1e-8) {
                v += (up[a] - g.c * u[a]) * (up[b] - g.c * u[b]) / g.sin_theta;
            }
            out[a * d + b] = scale * v;
        }
    }
}

double kernel_mean_embedding_pair_loss(const KernelSpec& k,
                                       const WeightedEnsembleView& A,
                                       const WeightedEnsembleView& B) {
    const long ma = A.size(), mb = B.size();
    auto gram = [&](const WeightedEnsembleView& U, const WeightedEnsembleView& V) {
        const long mu = U.size(), mv = V.size();
        return pairwise_sum(std::size_t{0}, (std::size_t)(mu * mv), [&](std::size_t p) {
            const long i = (long)(p / (std::size_t)mv);
            const long j = (long)(p % (std::size_t)mv);
            return U.mass(i) * V.mass(j) *
                   kernel_eval(k, U.ensemble->row(i), V.ensemble->row(j));
        });
    };
    (void)ma;
    (void)mb;
    return gram(A, A) - 2.0 * gram(A, B) + gram(B, B);
}

double kernel_mean_embedding_pair_loss(const KernelSpec& k, const Ensemble& A,
                                       const Ensemble& B) {
    return kernel_mean_embedding_pair_loss(k, WeightedEnsembleView{&A, {}},
                                           WeightedEnsembleView{&B, {}});
}

std::vector<double> ensemble_predictions(const DataSample& data,
                                         const ActivationSpec& act,
                                         const Ensemble& e, int workers) {
    std::vector<double> out((size_t)data.n, 0.0);
    const double inv_m = 1.0 / (double)e.m;
    parallel_for(data.n, workers, [&](long i) {
        const auto x = data.x(i);
        out[i] = inv_m * pairwise_sum(std::size_t{0}, (std::size_t)e.m, [&](std::size_t j) {
            return activation_eval(act, 0, dot(e.row((long)j), x));
        });
    });
    return out;
}

double mse_function_error(const DataSample& data, const ActivationSpec& act,
                          const Ensemble& A, const Ensemble& B) {
    const auto fa = ensemble_predictions(data, act, A);
    const auto fb = ensemble_predictions(data, act, B);
    return pairwise_sum(std::size_t{0}, (std::size_t)data.n, [&](std::size_t i) {
        const double r = fa[i] - fb[i];
        return data.weights[i] * r * r;
    });
}

double excess_loss(const DataSample& data, const ActivationSpec& act,
                   const Ensemble& e, std::span<const double> fstar_values,
                   int workers) {
    const auto f = ensemble_predictions(data, act, e, workers);
    return pairwise_sum(std::size_t{0}, (std::size_t)data.n, [&](std::size_t i) {
        const double r = f[i] - data.labels[i];
        const double rs = fstar_values[i] - data.labels[i];
        return data.weights[i] * (r * r - rs * rs);
    });
}

double excess_loss(const DataSample& data, const ActivationSpec& act,
                   const Ensemble& e, int workers) {
    return excess_loss(data, act, e, data.labels, workers);
}

}  // namespace poclab
