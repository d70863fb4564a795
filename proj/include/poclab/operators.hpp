#pragma once

#include <vector>

#include "poclab/dynamics.hpp"

namespace poclab {

// Jacobian of the projected velocity field at w, measure frozen. Row-major
// d x d with J[a][b] = d velocity_a / d w_b, including the derivative of the
// tangent projector on the sphere. Needs a smoothed activation.
std::vector<double> velocity_jacobian(std::span<const double> w,
                                      const DataSample& data,
                                      const ActivationSpec& act,
                                      const DomainSpec& domain,
                                      std::span<const double> measure_predictions);

// Local Hessian at particle w: J(w) P_w, the derivative of a particle's own
// velocity along tangent perturbations.
std::vector<double> local_hessian(std::span<const double> w,
                                  const Ensemble& mean_field_proxy,
                                  const DataSample& data,
                                  const ActivationSpec& act,
                                  const DomainSpec& domain);
std::vector<double> local_hessian(std::span<const double> w,
                                  const DataSample& data,
                                  const ActivationSpec& act,
                                  const DomainSpec& domain,
                                  std::span<const double> proxy_predictions);

// Central finite difference of velocity(), for validation.
std::vector<double> local_hessian_fd(std::span<const double> w,
                                     const DataSample& data,
                                     const ActivationSpec& act,
                                     const DomainSpec& domain,
                                     std::span<const double> proxy_predictions,
                                     double h = 1e-5);

// Quadratic form delta^T H delta of the interaction Hessian
// H(i,j) = P_i grad_1 grad_2 K(xi_i, xi_j) P_j over the normalized inner
// product on [m] x R^d, evaluated through the feature map
// V delta (x) = E_j s'(xi_j . x) x . (P_j delta_j) in O(m n) without
// materializing H.
double h_quadratic_form(std::span<const double> delta, const Ensemble& xi,
                        const DataSample& data, const ActivationSpec& act,
                        const DomainSpec& domain, int workers = 0);

// (H delta)(i) = E_j H(i,j) delta_j, via the feature map applied twice.
std::vector<double> apply_interaction_hessian(std::span<const double> delta,
                                              const Ensemble& xi,
                                              const DataSample& data,
                                              const ActivationSpec& act,
                                              const DomainSpec& domain,
                                              int workers = 0);

// Source term at each coupled particle: the tangent-projected difference of
// kernel-gradient means over the m coupled characteristics versus the full
// reference ensemble. Returns m x d row-major.
std::vector<double> beta_source(const Ensemble& xi_coupled,
                                const Ensemble& reference_full,
                                const DataSample& data,
                                const ActivationSpec& act,
                                const DomainSpec& domain, int workers = 0);

struct LinearizedResidual {
    double residual_linf = 0.0;     // max_i |dDelta/dt - (D Delta - H Delta + beta)|
    double ddelta_linf = 0.0;       // max_i |dDelta/dt|
};

// Empirical defect of the linearized fluctuation dynamics, measured from
// three equispaced snapshots and the reference ensemble at the middle time.
LinearizedResidual linearized_residual(const CoupledSnapshot& prev,
                                       const CoupledSnapshot& mid,
                                       const CoupledSnapshot& next,
                                       const Ensemble& reference_full,
                                       const DataSample& data,
                                       const ActivationSpec& act,
                                       const DomainSpec& domain,
                                       int workers = 0);

// Diagnostics bundle computed at one snapshot.
struct OperatorDiagnostics {
    double t = 0.0;
    std::vector<double> d_op_norms;  // per-particle operator norm of the local Hessian
    double d_op_max = 0.0;
    double h_quadratic = 0.0;        // Delta^T H Delta
    double beta_linf = 0.0;
    double residual_norm = -1.0;     // -1 when no 3-point window was available
    double ddelta_norm = 0.0;
    double sqrt_loss = 0.0;          // sqrt of the mean-field proxy loss
};

OperatorDiagnostics operator_diagnostics(const CoupledSnapshot& snap,
                                         const Ensemble& reference_full,
                                         const DataSample& data,
                                         const ActivationSpec& act,
                                         const DomainSpec& domain,
                                         int workers = 0);

// Constant-coefficient probe system dX/dt = -H X + e in an eigenbasis of H:
// per mode, X_i(t) = (e_i / l_i)(1 - exp(-l_i t)), or e_i t when l_i = 0.
struct ToyOdePoint {
    double t;
    double x_norm;   // |X_t|
    double xhx;      // X_t^T H X_t
};

std::vector<ToyOdePoint> toy_ode(std::span<const double> lambdas,
                                 std::span<const double> e_coeffs,
                                 std::span<const double> t_grid);

// Operator norm of a small row-major d x d matrix (largest singular value).
double operator_norm(std::span<const double> mat, int d);

}  // namespace poclab
