#include "poclab/operators.hpp"

#include <algorithm>
#include <cmath>

#include "poclab/linalg.hpp"
#include "poclab/parallel.hpp"
#include "poclab/summation.hpp"

namespace poclab {

double operator_norm(std::span<const double> mat, int d) {
    // Largest singular value via the top eigenvalue of M^T M.
    std::vector<double> mtm((size_t)d * d, 0.0);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
            double s = 0.0;
            for (int c = 0; c < d; ++c) s += mat[c * d + a] * mat[c * d + b];
            mtm[a * d + b] = s;
        }
    const auto ev = symmetric_eigenvalues(mtm, d);
    double mx = 0.0;
    for (double v : ev) mx = std::max(mx, v);
    return std::sqrt(std::max(mx, 0.0));
}

std::vector<double> velocity_jacobian(std::span<const double> w,
                                      const DataSample& data,
                                      const ActivationSpec& act,
                                      const DomainSpec& domain,
                                      std::span<const double> measure_predictions) {
    if (!act.smooth())
        throw UnsupportedDerivative("velocity jacobian needs a smoothed activation");
    const int d = data.d;
    std::vector<double> raw(d, 0.0);
    std::vector<double> grad((size_t)d * d, 0.0);
    for (long l = 0; l < data.n; ++l) {
        const auto x = data.x(l);
        const double z = dot(w, x);
        const double res = data.weights[l] * (data.labels[l] - measure_predictions[l]);
        const double g1 = res * activation_eval(act, 1, z);
        const double g2 = res * activation_eval(act, 2, z);
        for (int a = 0; a < d; ++a) {
            raw[a] += g1 * x[a];
            for (int b = 0; b < d; ++b) grad[a * d + b] += g2 * x[a] * x[b];
        }
    }
    if (!domain.is_sphere()) return grad;
    // d/dw [ (I - w w^T) r(w) ] = grad r - (w.r) I - w r^T - w (w^T grad r).
    std::vector<double> jac((size_t)d * d, 0.0);
    const double wr = dot(w, std::span<const double>(raw));
    std::vector<double> wgrad(d, 0.0);
    for (int b = 0; b < d; ++b) {
        double s = 0.0;
        for (int c = 0; c < d; ++c) s += w[c] * grad[c * d + b];
        wgrad[b] = s;
    }
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            jac[a * d + b] = grad[a * d + b] - (a == b ? wr : 0.0) - w[a] * raw[b] -
                             w[a] * wgrad[b];
    return jac;
}

namespace {

// Right-multiply a row-major d x d matrix by the tangent projector at w.
std::vector<double> right_project(std::span<const double> jac,
                                  std::span<const double> w,
                                  const DomainSpec& domain, int d) {
    if (!domain.is_sphere()) return {jac.begin(), jac.end()};
    std::vector<double> out((size_t)d * d);
    for (int a = 0; a < d; ++a) {
        double jw = 0.0;
        for (int c = 0; c < d; ++c) jw += jac[a * d + c] * w[c];
        for (int b = 0; b < d; ++b) out[a * d + b] = jac[a * d + b] - jw * w[b];
    }
    return out;
}

}  // namespace

std::vector<double> local_hessian(std::span<const double> w,
                                  const DataSample& data,
                                  const ActivationSpec& act,
                                  const DomainSpec& domain,
                                  std::span<const double> proxy_predictions) {
    const auto jac = velocity_jacobian(w, data, act, domain, proxy_predictions);
    return right_project(jac, w, domain, data.d);
}

std::vector<double> local_hessian(std::span<const double> w,
                                  const Ensemble& mean_field_proxy,
                                  const DataSample& data,
                                  const ActivationSpec& act,
                                  const DomainSpec& domain) {
    const auto preds = ensemble_predictions(data, act, mean_field_proxy);
    return local_hessian(w, data, act, domain, preds);
}

std::vector<double> local_hessian_fd(std::span<const double> w,
                                     const DataSample& data,
                                     const ActivationSpec& act,
                                     const DomainSpec& domain,
                                     std::span<const double> proxy_predictions,
                                     double h) {
    const int d = data.d;
    const double step = h * (1.0 + norm2(w));
    std::vector<double> jac((size_t)d * d);
    std::vector<double> wp(w.begin(), w.end()), wm(w.begin(), w.end());
    std::vector<double> vp(d), vm(d);
    for (int b = 0; b < d; ++b) {
        wp[b] = w[b] + step;
        wm[b] = w[b] - step;
        velocity(wp, data, act, domain, proxy_predictions, vp);
        velocity(wm, data, act, domain, proxy_predictions, vm);
        for (int a = 0; a < d; ++a) jac[a * d + b] = (vp[a] - vm[a]) / (2.0 * step);
        wp[b] = w[b];
        wm[b] = w[b];
    }
    return right_project(jac, w, domain, d);
}

namespace {

// Tangent-projected fluctuation rows, m x d.
std::vector<double> project_rows(std::span<const double> delta, const Ensemble& xi,
                                 const DomainSpec& domain) {
    std::vector<double> out(delta.begin(), delta.end());
    if (!domain.is_sphere()) return out;
    const int d = xi.d;
    for (long j = 0; j < xi.m; ++j) {
        const auto w = xi.row(j);
        double c = 0.0;
        for (int a = 0; a < d; ++a) c += w[a] * delta[(size_t)j * d + a];
        for (int a = 0; a < d; ++a) out[(size_t)j * d + a] = delta[(size_t)j * d + a] - c * w[a];
    }
    return out;
}

// Feature-map image a(x_l) = E_j s'(xi_j . x_l) x_l . (P_j delta_j).
std::vector<double> feature_image(std::span<const double> pdelta, const Ensemble& xi,
                                  const DataSample& data, const ActivationSpec& act,
                                  int workers) {
    std::vector<double> a((size_t)data.n, 0.0);
    const int d = xi.d;
    const double inv_m = 1.0 / (double)xi.m;
    parallel_for(data.n, workers, [&](long l) {
        const auto x = data.x(l);
        double s = 0.0;
        for (long j = 0; j < xi.m; ++j) {
            const double sp = activation_eval(act, 1, dot(xi.row(j), x));
            if (sp == 0.0) continue;
            double dx = 0.0;
            for (int c = 0; c < d; ++c) dx += pdelta[(size_t)j * d + c] * x[c];
            s += sp * dx;
        }
        a[l] = inv_m * s;
    });
    return a;
}

}  // namespace

double h_quadratic_form(std::span<const double> delta, const Ensemble& xi,
                        const DataSample& data, const ActivationSpec& act,
                        const DomainSpec& domain, int workers) {
    const auto pdelta = project_rows(delta, xi, domain);
    const auto a = feature_image(pdelta, xi, data, act, workers);
    return pairwise_sum(std::size_t{0}, (std::size_t)data.n,
                        [&](std::size_t l) { return data.weights[l] * a[l] * a[l]; });
}

std::vector<double> apply_interaction_hessian(std::span<const double> delta,
                                              const Ensemble& xi,
                                              const DataSample& data,
                                              const ActivationSpec& act,
                                              const DomainSpec& domain,
                                              int workers) {
    const auto pdelta = project_rows(delta, xi, domain);
    const auto a = feature_image(pdelta, xi, data, act, workers);
    const int d = xi.d;
    std::vector<double> out((size_t)xi.m * d, 0.0);
    parallel_for(xi.m, workers, [&](long i) {
        const auto w = xi.row(i);
        double* row = out.data() + (size_t)i * d;
        for (long l = 0; l < data.n; ++l) {
            const auto x = data.x(l);
            const double g = data.weights[l] * a[l] * activation_eval(act, 1, dot(w, x));
            if (g == 0.0) continue;
            for (int c = 0; c < d; ++c) row[c] += g * x[c];
        }
        if (domain.is_sphere()) {
            double c = 0.0;
            for (int a2 = 0; a2 < d; ++a2) c += w[a2] * row[a2];
            for (int a2 = 0; a2 < d; ++a2) row[a2] -= c * w[a2];
        }
    });
    return out;
}

std::vector<double> beta_source(const Ensemble& xi_coupled,
                                const Ensemble& reference_full,
                                const DataSample& data,
                                const ActivationSpec& act,
                                const DomainSpec& domain, int workers) {
    // E_j grad K(w_i, xi_j) factors through the mean prediction of the
    // ensemble, so both means cost O(m n) instead of O(m^2 n).
    const auto f_coupled = ensemble_predictions(data, act, xi_coupled, workers);
    const auto f_ref = ensemble_predictions(data, act, reference_full, workers);
    const int d = xi_coupled.d;
    std::vector<double> out((size_t)xi_coupled.m * d, 0.0);
    parallel_for(xi_coupled.m, workers, [&](long i) {
        const auto w = xi_coupled.row(i);
        double* row = out.data() + (size_t)i * d;
        for (long l = 0; l < data.n; ++l) {
            const auto x = data.x(l);
            const double g = data.weights[l] * (f_coupled[l] - f_ref[l]) *
                             activation_eval(act, 1, dot(w, x));
            if (g == 0.0) continue;
            for (int c = 0; c < d; ++c) row[c] += g * x[c];
        }
        if (domain.is_sphere()) {
            double c = 0.0;
            for (int a = 0; a < d; ++a) c += w[a] * row[a];
            for (int a = 0; a < d; ++a) row[a] -= c * w[a];
        }
    });
    return out;
}

namespace {

Ensemble ensemble_from_rows(std::span<const double> rows, long m, int d,
                            const DomainSpec& domain) {
    Ensemble e;
    e.m = m;
    e.d = d;
    e.domain = domain;
    e.weights.assign(rows.begin(), rows.end());
    return e;
}

}  // namespace

LinearizedResidual linearized_residual(const CoupledSnapshot& prev,
                                       const CoupledSnapshot& mid,
                                       const CoupledSnapshot& next,
                                       const Ensemble& reference_full,
                                       const DataSample& data,
                                       const ActivationSpec& act,
                                       const DomainSpec& domain,
                                       int workers) {
    const double h1 = mid.t - prev.t, h2 = next.t - mid.t;
    if (!(h1 > 0) || std::abs(h1 - h2) > 1e-9)
        throw ConfigError("linearized residual needs equispaced snapshots");
    const double h = h2;
    const long m = mid.m;
    const int d = mid.d;

    const Ensemble xi = ensemble_from_rows(mid.xi_ref, m, d, domain);
    const auto preds_full = ensemble_predictions(data, act, reference_full, workers);
    const auto hdelta = apply_interaction_hessian(mid.delta, xi, data, act, domain, workers);
    const auto beta = beta_source(xi, reference_full, data, act, domain, workers);

    std::vector<double> res_norms(m, 0.0), der_norms(m, 0.0);
    parallel_for(m, workers, [&](long i) {
        const auto D = local_hessian(xi.row(i), data, act, domain, preds_full);
        double rn = 0.0, dn = 0.0;
        for (int a = 0; a < d; ++a) {
            const double ddelta =
                (next.delta[(size_t)i * d + a] - prev.delta[(size_t)i * d + a]) / (2.0 * h);
            double dd = 0.0;
            for (int b = 0; b < d; ++b) dd += D[a * d + b] * mid.delta[(size_t)i * d + b];
            const double rhs = dd - hdelta[(size_t)i * d + a] + beta[(size_t)i * d + a];
            rn += (ddelta - rhs) * (ddelta - rhs);
            dn += ddelta * ddelta;
        }
        res_norms[i] = std::sqrt(rn);
        der_norms[i] = std::sqrt(dn);
    });
    LinearizedResidual out;
    out.residual_linf = *std::max_element(res_norms.begin(), res_norms.end());
    out.ddelta_linf = *std::max_element(der_norms.begin(), der_norms.end());
    return out;
}

OperatorDiagnostics operator_diagnostics(const CoupledSnapshot& snap,
                                         const Ensemble& reference_full,
                                         const DataSample& data,
                                         const ActivationSpec& act,
                                         const DomainSpec& domain,
                                         int workers) {
    OperatorDiagnostics diag;
    diag.t = snap.t;
    diag.sqrt_loss = std::sqrt(std::max(snap.loss_mf, 0.0));
    const long m = snap.m;
    const int d = snap.d;
    const Ensemble xi = ensemble_from_rows(snap.xi_ref, m, d, domain);
    const auto preds_full = ensemble_predictions(data, act, reference_full, workers);

    diag.d_op_norms.assign(m, 0.0);
    parallel_for(m, workers, [&](long i) {
        const auto D = local_hessian(xi.row(i), data, act, domain, preds_full);
        diag.d_op_norms[i] = operator_norm(D, d);
    });
    diag.d_op_max = *std::max_element(diag.d_op_norms.begin(), diag.d_op_norms.end());

    diag.h_quadratic = h_quadratic_form(snap.delta, xi, data, act, domain, workers);

    const auto beta = beta_source(xi, reference_full, data, act, domain, workers);
    for (long i = 0; i < m; ++i) {
        double n2 = 0.0;
        for (int c = 0; c < d; ++c) n2 += beta[(size_t)i * d + c] * beta[(size_t)i * d + c];
        diag.beta_linf = std::max(diag.beta_linf, std::sqrt(n2));
    }
    return diag;
}

std::vector<ToyOdePoint> toy_ode(std::span<const double> lambdas,
                                 std::span<const double> e_coeffs,
                                 std::span<const double> t_grid) {
    if (lambdas.size() != e_coeffs.size())
        throw ConfigError("toy_ode needs matching spectrum and source lengths");
    for (double l : lambdas)
        if (l < 0) throw ConfigError("toy_ode eigenvalues must be nonnegative");
    std::vector<ToyOdePoint> out;
    out.reserve(t_grid.size());
    for (double t : t_grid) {
        double n2 = 0.0, q = 0.0;
        for (size_t i = 0; i < lambdas.size(); ++i) {
            const double l = lambdas[i];
            const double c = l > 0 ? (e_coeffs[i] / l) * (1.0 - std::exp(-l * t))
                                   : e_coeffs[i] * t;
            n2 += c * c;
            q += l * c * c;
        }
        out.push_back({t, std::sqrt(n2), q});
    }
    return out;
}

}  // namespace poclab
