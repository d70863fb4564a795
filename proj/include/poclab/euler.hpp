#pragma once

#include <array>
#include <vector>

#include "poclab/errors.hpp"

namespace poclab {

// Latitude-longitude tiling of the unit sphere with exact cell areas.
// n_lat colatitude rows x n_lon longitude columns; the polar rows have a
// degenerate (zero length) edge at the pole vertex.
struct SphereGrid {
    int n_lat = 0, n_lon = 0;
    std::vector<std::array<double, 3>> cell_centers;  // unit vectors
    std::vector<double> cell_areas;                   // sums to 4 pi

    struct Edge {
        long a, b;                     // adjacent cell indices
        double length;                 // arc length of the shared edge
        std::array<double, 3> normal;  // unit tangent at the edge midpoint, a -> b
    };
    std::vector<Edge> edges;
    // Per-cell list of (edge index, +1 if the cell is 'a' else -1).
    std::vector<std::vector<std::pair<long, int>>> cell_edges;

    long cells() const { return (long)cell_areas.size(); }
    long index(int i_lat, int i_lon) const { return (long)i_lat * n_lon + i_lon; }
};

SphereGrid build_grid(int n_lat, int n_lon);

struct DensityField {
    std::vector<double> masses;  // nonnegative, sums to 1
    const SphereGrid* grid = nullptr;

    double total_mass() const;
};

struct VmfComponent {
    std::array<double, 3> mu{0.0, 0.0, 1.0};
    double kappa = 10.0;
    double weight = 1.0;
};

struct PointMass {
    std::array<double, 3> location{0.0, 0.0, 1.0};
    double weight = 1.0;
};

enum class TargetDensityKind { VmfMixture, UniformBand, PointMasses, Uniform };

struct TargetDensitySpec {
    TargetDensityKind kind = TargetDensityKind::Uniform;
    std::vector<VmfComponent> vmf;     // VmfMixture
    double band_lat_min = 0.3;         // UniformBand, colatitude range (radians)
    double band_lat_max = 1.2;
    std::vector<PointMass> points;     // PointMasses
};

DensityField target_density(const TargetDensitySpec& spec, const SphereGrid& grid);

// Kernel-mean-discrepancy descent velocity at every cell center under the
// closed-form relu arc-cosine kernel; tangent 3-vectors.
std::vector<std::array<double, 3>> grid_velocity(const DensityField& rho,
                                                 const DensityField& rho_star,
                                                 int workers = 0);

// Donor-cell finite-volume advection step. Raises CflError (carrying the
// admissible dt) when dt exceeds cfl * min_c area_c / outflux_c.
DensityField upwind_step(const DensityField& rho,
                         const std::vector<std::array<double, 3>>& velocity,
                         double dt, double cfl = 0.5);

// Largest stable dt for this velocity field at the given CFL number.
double admissible_dt(const DensityField& rho,
                     const std::vector<std::array<double, 3>>& velocity,
                     double cfl = 0.5);

// Discrete KMD loss between the two mass fields (arc-cosine kernel).
double kmd_loss(const DensityField& rho, const DensityField& rho_star,
                int workers = 0);

struct EulerConfig {
    int n_lat = 64, n_lon = 128;
    TargetDensitySpec target;
    TargetDensitySpec rho0;
    double t_max = 50.0;
    double dt = 0.0;        // 0 -> adaptive from the CFL bound each step
    double cfl = 0.5;
    int snapshot_count = 65;
    bool store_snapshots = false;
    int workers = 0;
};

struct EulerResult {
    std::vector<double> times;
    std::vector<double> loss;      // KMD loss at the snapshot times
    std::vector<double> r_curve;   // trapezoidal integral of sqrt(loss)
    std::vector<DensityField> snapshots;
    double mass_drift = 0.0;       // max |total mass - 1| seen
    long steps = 0;
};

EulerResult run_euler(const EulerConfig& config, const SphereGrid& grid);

}  // namespace poclab
