#include "poclab/model_core.hpp"

#include <cmath>

#include "poclab/parallel.hpp"

namespace poclab {

DomainSpec DomainSpec::euclidean(int d) {
    if (d < 1) throw ConfigError("euclidean domain requires d >= 1");
    return {DomainKind::Euclidean, d};
}

DomainSpec DomainSpec::sphere(int d) {
    if (d < 2) throw ConfigError("sphere domain requires d >= 2");
    return {DomainKind::Sphere, d};
}

ActivationSpec ActivationSpec::smoothed_relu(double tau) {
    if (!(tau > 0)) throw ConfigError("smoothed_relu requires tau > 0");
    return {ActivationKind::SmoothedRelu, tau};
}

namespace {

double softplus(double z) {
    // Stable on both tails.
    if (z > 35.0) return z;
    if (z < -35.0) return std::exp(z);
    return std::log1p(std::exp(z));
}

double logistic(double z) {
    if (z >= 0) {
        const double e = std::exp(-z);
        return 1.0 / (1.0 + e);
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

}  // namespace

double activation_eval(const ActivationSpec& act, int order, double z) {
    if (act.kind == ActivationKind::Relu) {
        switch (order) {
            case 0: return z > 0 ? z : 0.0;
            case 1: return z > 0 ? 1.0 : 0.0;
            default:
                throw UnsupportedDerivative("relu has no second derivative; use smoothed_relu");
        }
    }
    const double u = z / act.tau;
    switch (order) {
        case 0: return act.tau * softplus(u);
        case 1: return logistic(u);
        case 2: {
            const double s = logistic(u);
            return s * (1.0 - s) / act.tau;
        }
        default:
            throw UnsupportedDerivative("activation derivatives available up to order 2");
    }
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(std::span<const double> v) { return std::sqrt(dot(v, v)); }

void project_to_domain(const DomainSpec& domain, std::span<const double> w,
                       std::span<double> out) {
    if (domain.kind == DomainKind::Euclidean) {
        for (size_t i = 0; i < w.size(); ++i) out[i] = w[i];
        return;
    }
    const double n = norm2(w);
    if (!(n > 0) || !std::isfinite(n))
        throw DegenerateProjection("cannot project zero or non-finite vector to the sphere");
    for (size_t i = 0; i < w.size(); ++i) out[i] = w[i] / n;
}

std::vector<double> project_to_domain(const DomainSpec& domain,
                                      std::span<const double> w) {
    std::vector<double> out(w.size());
    project_to_domain(domain, w, out);
    return out;
}

void tangent_project(const DomainSpec& domain, std::span<const double> w,
                     std::span<const double> v, std::span<double> out) {
    if (domain.kind == DomainKind::Euclidean) {
        for (size_t i = 0; i < v.size(); ++i) out[i] = v[i];
        return;
    }
    const double c = dot(w, v);
    for (size_t i = 0; i < v.size(); ++i) out[i] = v[i] - c * w[i];
}

std::vector<double> tangent_project(const DomainSpec& domain,
                                    std::span<const double> w,
                                    std::span<const double> v) {
    std::vector<double> out(v.size());
    tangent_project(domain, w, v, out);
    return out;
}

Ensemble Ensemble::head(long k) const {
    Ensemble out;
    out.m = k;
    out.d = d;
    out.domain = domain;
    out.weights.assign(weights.begin(), weights.begin() + k * d);
    return out;
}

namespace {

// One particle from its own substream; attempt a consumes normal draws
// [a*d, (a+1)*d).
void draw_particle(const DomainSpec& domain, const InitSpec& init,
                   const RngSpec& sub, std::span<double> row) {
    const int d = domain.d;
    switch (init.kind) {
        case InitKind::UniformSphere: {
            for (std::uint64_t attempt = 0;; ++attempt) {
                double n2 = 0.0;
                for (int j = 0; j < d; ++j) {
                    row[j] = rng_normal(sub, attempt * d + j);
                    n2 += row[j] * row[j];
                }
                if (n2 > 1e-24) {
                    const double inv = 1.0 / std::sqrt(n2);
                    for (int j = 0; j < d; ++j) row[j] *= inv;
                    return;
                }
            }
        }
        case InitKind::Gaussian: {
            const double clip = init.clip_factor * init.scale;
            for (std::uint64_t attempt = 0;; ++attempt) {
                double n2 = 0.0;
                for (int j = 0; j < d; ++j) {
                    row[j] = init.scale * rng_normal(sub, attempt * d + j);
                    n2 += row[j] * row[j];
                }
                if (n2 <= clip * clip) return;
            }
        }
        case InitKind::UniformCap: {
            const double cmin = std::cos(init.cap_radius);
            for (std::uint64_t attempt = 0;; ++attempt) {
                double n2 = 0.0;
                for (int j = 0; j < d; ++j) {
                    row[j] = rng_normal(sub, attempt * d + j);
                    n2 += row[j] * row[j];
                }
                if (n2 <= 1e-24) continue;
                const double inv = 1.0 / std::sqrt(n2);
                for (int j = 0; j < d; ++j) row[j] *= inv;
                if (row[0] >= cmin) return;
            }
        }
    }
}

}  // namespace

Ensemble sample_init(const DomainSpec& domain, long m, const InitSpec& init,
                     const RngSpec& rng) {
    if (m < 1) throw ConfigError("ensemble needs m >= 1");
    const bool sphere = domain.is_sphere();
    if ((init.kind == InitKind::UniformSphere || init.kind == InitKind::UniformCap) && !sphere)
        throw ConfigError("spherical initialization requires a sphere domain");
    if (init.kind == InitKind::Gaussian && sphere)
        throw ConfigError("gaussian initialization requires a euclidean domain");

    Ensemble e;
    e.m = m;
    e.d = domain.d;
    e.domain = domain;
    e.weights.assign((size_t)m * domain.d, 0.0);
    parallel_for(m, 0, [&](long i) {
        draw_particle(domain, init, rng_substream(rng, (std::uint64_t)i), e.row(i));
    });
    return e;
}

}  // namespace poclab
