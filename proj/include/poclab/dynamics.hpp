#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "poclab/kernel.hpp"

namespace poclab {

// One coupled run: a wide reference system integrated at step eta_ref acts
// as the mean-field proxy; the finite system of its first m particles is
// integrated at step eta under its own measure.
struct FlowConfig {
    DomainSpec domain;
    ActivationSpec activation;
    DataSample data;                       // reference + measurement data
    std::optional<DataSample> data_finite; // finite system's own sample, if distinct
    InitSpec init;
    RngSpec rng;

    double eta = 0.1;
    double eta_ref = 0.1;   // must divide eta
    double t_max = 1.0;
    long m = 0;
    long m_ref = 0;
    std::vector<double> snapshot_times;
    double c_step = 1.0;     // Lipschitz proxy: requires eta <= 0.1/c_step
    double divergence_guard = 1e6;
    bool store_full_reference = false;
    int workers = 0;

    void validate() const;
};

struct CoupledSnapshot {
    double t = 0.0;
    std::vector<double> xi_ref;   // m x d, first reference rows (coupled characteristics)
    std::vector<double> xi_hat;   // m x d, finite system
    std::vector<double> delta;    // m x d, xi_hat - xi_ref, exact
    double loss_ref = 0.0;        // excess loss of the m coupled characteristics
    double loss_hat = 0.0;        // excess loss of the finite system (measurement data)
    double loss_mf = 0.0;         // excess loss of the full reference ensemble
    double max_particle_norm = 0.0;
    long m = 0;
    int d = 0;
};

struct CoupledTrajectory {
    FlowConfig config;
    std::vector<CoupledSnapshot> snapshots;
    // Full m_ref reference ensembles per snapshot when requested (needed for
    // the operator diagnostics).
    std::vector<Ensemble> full_reference;
};

struct LossCurvePoint {
    double t;
    double loss;
};

// velocity(w, rho) = P_w( grad F(w) - E_{w' ~ rho} grad_w K(w, w') ), computed
// in the O(n d) residual form sum_i weight_i (y_i - f_rho(x_i)) s'(w.x_i) x_i
// given the measure's predictions. P_w is applied with the raw formula
// v - (w.v) w, which extends smoothly off the sphere (finite-difference
// probes rely on this).
void velocity(std::span<const double> w, const DataSample& data,
              const ActivationSpec& act, const DomainSpec& domain,
              std::span<const double> measure_predictions, std::span<double> out);

// Convenience form that evaluates the measure's predictions itself.
std::vector<double> velocity(std::span<const double> w, const Ensemble& measure,
                             const DataSample& data, const ActivationSpec& act,
                             const DomainSpec& domain);

// One frozen-measure Euler step: every particle sees the ensemble as it was
// at the step start, then is projected back to the domain.
Ensemble gd_step(const Ensemble& e, const DataSample& data,
                 const ActivationSpec& act, double eta, int workers = 0);

CoupledTrajectory run_coupled(const FlowConfig& config);

// Reference system only; records the excess loss at snapshot times. Optional
// sink receives the evolving ensemble at each snapshot.
std::vector<LossCurvePoint> run_reference_only(
    const FlowConfig& config,
    const std::function<void(double, const Ensemble&)>& snapshot_sink = {});

}  // namespace poclab
