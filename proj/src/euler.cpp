#include "poclab/euler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "poclab/parallel.hpp"
#include "poclab/summation.hpp"

namespace poclab {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// 8-point Gauss-Legendre rule on [-1, 1].
constexpr double kGlNode[8] = {-0.9602898564975363, -0.7966664774136267,
                               -0.5255324099163290, -0.1834346424956498,
                               0.1834346424956498,  0.5255324099163290,
                               0.7966664774136267,  0.9602898564975363};
constexpr double kGlWeight[8] = {0.1012285362903763, 0.2223810344533745,
                                 0.3137066458778873, 0.3626837833783620,
                                 0.3626837833783620, 0.3137066458778873,
                                 0.2223810344533745, 0.1012285362903763};

std::array<double, 3> sphere_point(double theta, double phi) {
    return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
            std::cos(theta)};
}

double dot3(const std::array<double, 3>& a, const std::array<double, 3>& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

// log-free stable vMF density on S^2: kappa e^{kappa(mu.w - 1)} / (2 pi (1 - e^{-2 kappa})).
double vmf_density(const std::array<double, 3>& mu, double kappa,
                   const std::array<double, 3>& w) {
    const double c = kappa / (kTwoPi * (1.0 - std::exp(-2.0 * kappa)));
    return c * std::exp(kappa * (dot3(mu, w) - 1.0));
}

}  // namespace

SphereGrid build_grid(int n_lat, int n_lon) {
    if (n_lat < 4 || n_lon < 8) throw ConfigError("grid needs n_lat >= 4, n_lon >= 8");
    SphereGrid g;
    g.n_lat = n_lat;
    g.n_lon = n_lon;
    const double dphi = kTwoPi / n_lon;

    std::vector<double> theta_b(n_lat + 1), cos_b(n_lat + 1);
    for (int i = 0; i <= n_lat; ++i) {
        theta_b[i] = M_PI * i / n_lat;
        cos_b[i] = std::cos(theta_b[i]);
    }

    g.cell_centers.resize((size_t)n_lat * n_lon);
    g.cell_areas.resize((size_t)n_lat * n_lon);
    for (int i = 0; i < n_lat; ++i) {
        const double area = dphi * (cos_b[i] - cos_b[i + 1]);
        const double theta_c = 0.5 * (theta_b[i] + theta_b[i + 1]);
        for (int j = 0; j < n_lon; ++j) {
            const long c = g.index(i, j);
            g.cell_areas[c] = area;
            g.cell_centers[c] = sphere_point(theta_c, dphi * (j + 0.5));
        }
    }

    g.cell_edges.resize(g.cells());
    auto add_edge = [&](long a, long b, double len, std::array<double, 3> normal) {
        const long e = (long)g.edges.size();
        g.edges.push_back({a, b, len, normal});
        g.cell_edges[a].push_back({e, +1});
        g.cell_edges[b].push_back({e, -1});
    };

    // Meridian edges (zonal flux), wrap in longitude.
    for (int i = 0; i < n_lat; ++i) {
        const double theta_c = 0.5 * (theta_b[i] + theta_b[i + 1]);
        const double len = theta_b[i + 1] - theta_b[i];
        for (int j = 0; j < n_lon; ++j) {
            const int jn = (j + 1) % n_lon;
            const double phi_edge = dphi * (j + 1);
            // Eastward tangent at the edge midpoint.
            std::array<double, 3> n{-std::sin(phi_edge), std::cos(phi_edge), 0.0};
            (void)theta_c;
            add_edge(g.index(i, j), g.index(i, jn), len, n);
        }
    }
    // Latitude-circle edges (meridional flux); the pole circles have zero
    // length and are omitted.
    for (int i = 0; i + 1 < n_lat; ++i) {
        const double theta_edge = theta_b[i + 1];
        const double len = std::sin(theta_edge) * dphi;
        for (int j = 0; j < n_lon; ++j) {
            const double phi_c = dphi * (j + 0.5);
            // Southward tangent (increasing colatitude) at the edge midpoint.
            std::array<double, 3> n{std::cos(theta_edge) * std::cos(phi_c),
                                    std::cos(theta_edge) * std::sin(phi_c),
                                    -std::sin(theta_edge)};
            add_edge(g.index(i, j), g.index(i + 1, j), len, n);
        }
    }
    return g;
}

double DensityField::total_mass() const {
    return pairwise_sum(std::size_t{0}, masses.size(),
                        [&](std::size_t i) { return masses[i]; });
}

DensityField target_density(const TargetDensitySpec& spec, const SphereGrid& grid) {
    DensityField f;
    f.grid = &grid;
    f.masses.assign(grid.cells(), 0.0);
    const double dphi = kTwoPi / grid.n_lon;

    switch (spec.kind) {
        case TargetDensityKind::Uniform: {
            for (long c = 0; c < grid.cells(); ++c) f.masses[c] = grid.cell_areas[c];
            break;
        }
        case TargetDensityKind::VmfMixture: {
            if (spec.vmf.empty()) throw ConfigError("vMF mixture needs components");
            for (int i = 0; i < grid.n_lat; ++i) {
                const double t0 = M_PI * i / grid.n_lat, t1 = M_PI * (i + 1) / grid.n_lat;
                for (int j = 0; j < grid.n_lon; ++j) {
                    const double p0 = dphi * j, p1 = dphi * (j + 1);
                    double mass = 0.0;
                    for (int a = 0; a < 8; ++a) {
                        const double th = 0.5 * (t0 + t1) + 0.5 * (t1 - t0) * kGlNode[a];
                        const double wth = 0.5 * (t1 - t0) * kGlWeight[a] * std::sin(th);
                        for (int b = 0; b < 8; ++b) {
                            const double ph = 0.5 * (p0 + p1) + 0.5 * (p1 - p0) * kGlNode[b];
                            const auto w = sphere_point(th, ph);
                            double dens = 0.0;
                            for (const auto& comp : spec.vmf)
                                dens += comp.weight * vmf_density(comp.mu, comp.kappa, w);
                            mass += wth * 0.5 * (p1 - p0) * kGlWeight[b] * dens;
                        }
                    }
                    f.masses[grid.index(i, j)] = mass;
                }
            }
            break;
        }
        case TargetDensityKind::UniformBand: {
            const double lo = spec.band_lat_min, hi = spec.band_lat_max;
            if (!(hi > lo)) throw ConfigError("uniform band needs lat_max > lat_min");
            for (int i = 0; i < grid.n_lat; ++i) {
                const double t0 = M_PI * i / grid.n_lat, t1 = M_PI * (i + 1) / grid.n_lat;
                const double a = std::max(t0, lo), b = std::min(t1, hi);
                if (b <= a) continue;
                const double band_area = dphi * (std::cos(a) - std::cos(b));
                for (int j = 0; j < grid.n_lon; ++j)
                    f.masses[grid.index(i, j)] = band_area;
            }
            break;
        }
        case TargetDensityKind::PointMasses: {
            if (spec.points.empty()) throw ConfigError("point target needs points");
            for (const auto& p : spec.points) {
                const double theta = std::acos(std::clamp(p.location[2], -1.0, 1.0));
                double phi = std::atan2(p.location[1], p.location[0]);
                if (phi < 0) phi += kTwoPi;
                int i = std::min((int)(theta / M_PI * grid.n_lat), grid.n_lat - 1);
                int j = std::min((int)(phi / kTwoPi * grid.n_lon), grid.n_lon - 1);
                f.masses[grid.index(i, j)] += p.weight;
            }
            break;
        }
    }
    const double total = f.total_mass();
    if (!(total > 0)) throw ConfigError("target density has no mass");
    for (double& m : f.masses) m /= total;
    return f;
}

std::vector<std::array<double, 3>> grid_velocity(const DensityField& rho,
                                                 const DensityField& rho_star,
                                                 int workers) {
    if (rho.grid != rho_star.grid) throw ConfigError("density fields on different grids");
    const SphereGrid& g = *rho.grid;
    const long C = g.cells();
    std::vector<double> dm(C);
    for (long c = 0; c < C; ++c) dm[c] = rho_star.masses[c] - rho.masses[c];

    std::vector<std::array<double, 3>> v(C);
    parallel_for(C, workers, [&](long i) {
        const auto& wi = g.cell_centers[i];
        double vx = 0.0, vy = 0.0, vz = 0.0;
        for (long c = 0; c < C; ++c) {
            if (dm[c] == 0.0) continue;
            const auto& wc = g.cell_centers[c];
            const double cth = std::clamp(dot3(wi, wc), -1.0, 1.0);
            const double theta = std::acos(cth);
            // Tangential part of grad_w K under the relu arc-cosine kernel.
            const double coef = dm[c] * (M_PI - theta) / kTwoPi;
            vx += coef * (wc[0] - cth * wi[0]);
            vy += coef * (wc[1] - cth * wi[1]);
            vz += coef * (wc[2] - cth * wi[2]);
        }
        v[i] = {vx, vy, vz};
    });
    return v;
}

namespace {

std::vector<double> edge_normal_speeds(const SphereGrid& g,
                                       const std::vector<std::array<double, 3>>& v) {
    std::vector<double> vn(g.edges.size());
    for (size_t e = 0; e < g.edges.size(); ++e) {
        const auto& ed = g.edges[e];
        const std::array<double, 3> avg{0.5 * (v[ed.a][0] + v[ed.b][0]),
                                        0.5 * (v[ed.a][1] + v[ed.b][1]),
                                        0.5 * (v[ed.a][2] + v[ed.b][2])};
        vn[e] = dot3(avg, ed.normal);
    }
    return vn;
}

double admissible_dt_from_vn(const SphereGrid& g, const std::vector<double>& vn,
                             double cfl) {
    double dt = std::numeric_limits<double>::infinity();
    for (long c = 0; c < g.cells(); ++c) {
        double out = 0.0;
        for (const auto& [e, sign] : g.cell_edges[c]) {
            const double s = sign * vn[e];
            if (s > 0) out += s * g.edges[e].length;
        }
        if (out > 0) dt = std::min(dt, cfl * g.cell_areas[c] / out);
    }
    return dt;
}

}  // namespace

double admissible_dt(const DensityField& rho,
                     const std::vector<std::array<double, 3>>& velocity,
                     double cfl) {
    const SphereGrid& g = *rho.grid;
    return admissible_dt_from_vn(g, edge_normal_speeds(g, velocity), cfl);
}

DensityField upwind_step(const DensityField& rho,
                         const std::vector<std::array<double, 3>>& velocity,
                         double dt, double cfl) {
    const SphereGrid& g = *rho.grid;
    const auto vn = edge_normal_speeds(g, velocity);
    const double dt_adm = admissible_dt_from_vn(g, vn, cfl);
    if (dt > dt_adm)
        throw CflError(dt_adm, "advection step too large; admissible dt = " +
                                   std::to_string(dt_adm));

    DensityField out = rho;
    for (size_t e = 0; e < g.edges.size(); ++e) {
        const auto& ed = g.edges[e];
        if (vn[e] == 0.0 || ed.length == 0.0) continue;
        const long donor = vn[e] > 0 ? ed.a : ed.b;
        const double flux = ed.length * vn[e] * (rho.masses[donor] / g.cell_areas[donor]);
        out.masses[ed.a] -= dt * flux;
        out.masses[ed.b] += dt * flux;
    }
    return out;
}

double kmd_loss(const DensityField& rho, const DensityField& rho_star, int workers) {
    if (rho.grid != rho_star.grid) throw ConfigError("density fields on different grids");
    const SphereGrid& g = *rho.grid;
    const long C = g.cells();
    std::vector<double> dm(C);
    for (long c = 0; c < C; ++c) dm[c] = rho.masses[c] - rho_star.masses[c];

    std::vector<double> inner(C, 0.0);
    parallel_for(C, workers, [&](long i) {
        const auto& wi = g.cell_centers[i];
        inner[i] = pairwise_sum(std::size_t{0}, (std::size_t)C, [&](std::size_t j) {
            if (dm[j] == 0.0) return 0.0;
            const auto& wj = g.cell_centers[j];
            const double cth = std::clamp(dot3(wi, wj), -1.0, 1.0);
            const double theta = std::acos(cth);
            const double k = (std::sin(theta) + (M_PI - theta) * cth) / kTwoPi;
            return dm[j] * k;
        });
    });
    return pairwise_sum(std::size_t{0}, (std::size_t)C,
                        [&](std::size_t i) { return dm[i] * inner[i]; });
}

EulerResult run_euler(const EulerConfig& config, const SphereGrid& grid) {
    DensityField rho = target_density(config.rho0, grid);
    const DensityField rho_star = target_density(config.target, grid);

    EulerResult res;
    const int S = std::max(config.snapshot_count, 2);
    std::vector<double> snap_times(S);
    for (int k = 0; k < S; ++k) snap_times[k] = config.t_max * k / (S - 1);

    double t = 0.0;
    int next_snap = 0;
    auto record = [&](double tt) {
        res.times.push_back(tt);
        res.loss.push_back(kmd_loss(rho, rho_star, config.workers));
        if (config.store_snapshots) res.snapshots.push_back(rho);
        res.mass_drift = std::max(res.mass_drift, std::abs(rho.total_mass() - 1.0));
    };

    while (true) {
        if (next_snap < S && t >= snap_times[next_snap] - 1e-12) {
            record(snap_times[next_snap]);
            ++next_snap;
        }
        if (t >= config.t_max - 1e-12) break;
        const auto v = grid_velocity(rho, rho_star, config.workers);
        double dt = config.dt > 0 ? config.dt : admissible_dt(rho, v, config.cfl);
        if (!std::isfinite(dt)) dt = snap_times[1] - snap_times[0];
        if (next_snap < S) dt = std::min(dt, snap_times[next_snap] - t);
        dt = std::min(dt, config.t_max - t);
        rho = upwind_step(rho, v, dt, config.cfl);
        t += dt;
        ++res.steps;
    }

    // Trapezoidal integral of sqrt(loss) on the snapshot grid.
    res.r_curve.assign(res.times.size(), 0.0);
    for (size_t k = 1; k < res.times.size(); ++k) {
        const double a = std::sqrt(std::max(res.loss[k - 1], 0.0));
        const double b = std::sqrt(std::max(res.loss[k], 0.0));
        res.r_curve[k] = res.r_curve[k - 1] + 0.5 * (a + b) * (res.times[k] - res.times[k - 1]);
    }
    return res;
}

}  // namespace poclab
