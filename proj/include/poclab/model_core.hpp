#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "poclab/errors.hpp"
#include "poclab/rng.hpp"

namespace poclab {

// Parameter space: R^d or the unit sphere S^{d-1} inside R^d.
enum class DomainKind { Euclidean, Sphere };

struct DomainSpec {
    DomainKind kind = DomainKind::Euclidean;
    int d = 1;

    static DomainSpec euclidean(int d);
    static DomainSpec sphere(int d);
    bool is_sphere() const { return kind == DomainKind::Sphere; }
};

enum class ActivationKind { Relu, SmoothedRelu };

// relu:           s(z) = max(z, 0),      s'(0) = 0 by convention.
// smoothed_relu:  s(z) = tau*softplus(z/tau); s' = logistic(z/tau);
//                 s'' = logistic'(z/tau)/tau. tau -> 0 recovers relu.
struct ActivationSpec {
    ActivationKind kind = ActivationKind::Relu;
    double tau = 0.1;

    static ActivationSpec relu() { return {ActivationKind::Relu, 0.0}; }
    static ActivationSpec smoothed_relu(double tau);
    bool smooth() const { return kind == ActivationKind::SmoothedRelu; }
};

// order: 0 -> s(z), 1 -> s'(z), 2 -> s''(z). Second derivative requires the
// smoothed kind.
double activation_eval(const ActivationSpec& act, int order, double z);

// A set of m weight vectors in the given domain, stored row-major m x d.
struct Ensemble {
    std::vector<double> weights;
    long m = 0;
    int d = 0;
    DomainSpec domain;

    std::span<const double> row(long i) const { return {weights.data() + i * d, (size_t)d}; }
    std::span<double> row(long i) { return {weights.data() + i * d, (size_t)d}; }
    // View of the first k rows, sharing the domain. Copies.
    Ensemble head(long k) const;
};

enum class InitKind { UniformSphere, Gaussian, UniformCap };

struct InitSpec {
    InitKind kind = InitKind::UniformSphere;
    double scale = 1.0;        // gaussian std dev
    double cap_radius = 0.5;   // geodesic radius around e1, radians
    double clip_factor = 10.0; // gaussian draws rejected beyond clip_factor*scale
};

// Identity on R^d; w/|w| on the sphere. Zero-norm sphere input raises
// DegenerateProjection.
void project_to_domain(const DomainSpec& domain, std::span<const double> w,
                       std::span<double> out);
std::vector<double> project_to_domain(const DomainSpec& domain,
                                      std::span<const double> w);

// Orthogonal projection onto the tangent space at w: identity on R^d,
// v - (w.v)w on the sphere.
void tangent_project(const DomainSpec& domain, std::span<const double> w,
                     std::span<const double> v, std::span<double> out);
std::vector<double> tangent_project(const DomainSpec& domain,
                                    std::span<const double> w,
                                    std::span<const double> v);

// m i.i.d. rows from the initial law. Deterministic in rng; row i depends
// only on (rng, i), so parallel fills agree with serial ones.
Ensemble sample_init(const DomainSpec& domain, long m, const InitSpec& init,
                     const RngSpec& rng);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> v);

}  // namespace poclab
