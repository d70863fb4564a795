#include "poclab/targets.hpp"

#include <cmath>
#include <fstream>

#include "json.hpp"

namespace poclab {

SobolevTarget sobolev_coeffs(double gamma, int k_max, int d) {
    if (k_max < 2) throw ConfigError("sobolev target needs k_max >= 2");
    if (!(gamma > 0)) throw ConfigError("sobolev target needs gamma > 0");
    SobolevTarget t;
    t.gamma = gamma;
    t.k_max = k_max;
    t.d = d;
    t.f_hat.assign(k_max + 1, 0.0);
    t.f_hat[0] = 0.5;
    t.f_hat[1] = 0.25;
    const double p = gamma + 2.5;
    for (int k = 2; k <= k_max; k += 2) {
        double c = 0.5 * std::pow(k / std::sqrt(2.0), -p);
        if (c < 1e-15) c = 0.0;
        t.f_hat[k] = c;
    }
    // Dropped tail, both signs of k.
    double tail = 0.0;
    for (int k = k_max + (k_max % 2 == 0 ? 2 : 1); k <= 4 * 1024 * 1024; k += 2) {
        const double c = 0.5 * std::pow(k / std::sqrt(2.0), -p);
        tail += 2.0 * c;
        if (c < 1e-18) break;
    }
    t.tail_bound = tail;
    return t;
}

double target_eval_angle(const SobolevTarget& t, double theta) {
    return target_eval(t, std::vector<double>{std::cos(theta)});
}

double target_eval(const SobolevTarget& t, std::span<const double> x) {
    const double x1 = x[0];
    if (!(x1 >= -1.0 && x1 <= 1.0))
        throw DomainError("target evaluation needs x_1 in [-1, 1]");
    // cos(k arccos x) = T_k(x): Chebyshev recurrence, no trig in the loop.
    double tkm1 = 1.0, tk = x1;
    double s = t.f_hat[0];
    for (int k = 1; k <= t.k_max; ++k) {
        s += 2.0 * t.f_hat[k] * tk;
        const double tkp1 = 2.0 * x1 * tk - tkm1;
        tkm1 = tk;
        tk = tkp1;
    }
    return s;
}

std::vector<double> relu_fourier_coeffs(int k_max) {
    std::vector<double> phi(k_max + 1, 0.0);
    phi[0] = 1.0 / M_PI;
    if (k_max >= 1) phi[1] = 0.25;
    for (int j = 1; 2 * j <= k_max; ++j) {
        const double sign = (j % 2 == 1) ? 1.0 : -1.0;
        phi[2 * j] = sign / (M_PI * (4.0 * j * j - 1.0));
    }
    return phi;
}

RhoStarS1 rho_star_s1(const SobolevTarget& t, int quad_points) {
    const auto phi = relu_fourier_coeffs(t.k_max);
    RhoStarS1 r;
    r.k_max = t.k_max;
    r.gamma = t.gamma;
    r.mu_hat.assign(t.k_max + 1, 0.0);
    for (int k = 0; k <= t.k_max; ++k)
        if (phi[k] != 0.0) r.mu_hat[k] = t.f_hat[k] / phi[k];

    double sob = std::norm(r.mu_hat[0]);
    for (int k = 1; k <= t.k_max; ++k)
        sob += 2.0 * std::pow(1.0 + (double)k * k, t.gamma) * std::norm(r.mu_hat[k]);
    r.sobolev_norm = sob;

    r.quad_angles.resize(quad_points);
    r.quad_weights.assign(quad_points, 2.0 * M_PI / quad_points);
    r.quad_density.resize(quad_points);
    for (int q = 0; q < quad_points; ++q) {
        const double w = 2.0 * M_PI * q / quad_points;
        r.quad_angles[q] = w;
        double dens = r.mu_hat[0].real();
        for (int k = 1; k <= t.k_max; ++k)
            dens += 2.0 * r.mu_hat[k].real() * std::cos(k * w);
        r.quad_density[q] = dens / (2.0 * M_PI);
    }
    return r;
}

double RhoStarS1::function_eval(double theta) const {
    double s = 0.0;
    for (size_t q = 0; q < quad_angles.size(); ++q) {
        const double c = std::cos(theta - quad_angles[q]);
        if (c > 0) s += quad_weights[q] * quad_density[q] * c;
    }
    return s;
}

DataSample data_circle(const SobolevTarget& t, long n) {
    if (n < 1) throw ConfigError("data_circle needs n >= 1");
    std::vector<double> x((size_t)n * 2), y(n);
    for (long i = 0; i < n; ++i) {
        const double a = 2.0 * M_PI * i / n;
        x[2 * i] = std::cos(a);
        x[2 * i + 1] = std::sin(a);
        y[i] = target_eval(t, std::span<const double>(x).subspan(2 * i, 2));
    }
    return make_uniform_data(std::move(x), std::move(y), 2);
}

DataSample data_sphere_clamped(const SobolevTarget& t, int d, long n,
                               const RngSpec& rng) {
    if (d < 3) throw ConfigError("sphere-clamped data needs d >= 3");
    if (n < 1) throw ConfigError("data needs n >= 1");
    const double radius = std::sqrt((double)d - 1.0);
    std::vector<double> x((size_t)n * d), y(n);
    for (long i = 0; i < n; ++i) {
        const RngSpec sub = rng_substream(rng, (std::uint64_t)i);
        for (std::uint64_t attempt = 0;; ++attempt) {
            double n2 = 0.0;
            for (int j = 0; j < d; ++j) {
                x[(size_t)i * d + j] = rng_normal(sub, attempt * d + j);
                n2 += x[(size_t)i * d + j] * x[(size_t)i * d + j];
            }
            if (n2 > 1e-24) {
                const double s = radius / std::sqrt(n2);
                for (int j = 0; j < d; ++j) {
                    double v = x[(size_t)i * d + j] * s;
                    v = std::min(1.0, std::max(-1.0, v));
                    x[(size_t)i * d + j] = v;
                }
                break;
            }
        }
        y[i] = target_eval(t, std::span<const double>(x).subspan((size_t)i * d, d));
    }
    return make_uniform_data(std::move(x), std::move(y), d);
}

void SobolevTarget::to_json_file(const std::string& path) const {
    nlohmann::json j;
    j["gamma"] = gamma;
    j["k_max"] = k_max;
    j["d"] = d;
    j["tail_bound"] = tail_bound;
    j["f_hat"] = f_hat;
    std::ofstream out(path);
    out << j.dump(2) << "\n";
}

}  // namespace poclab
