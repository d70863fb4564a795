#include "poclab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "poclab/parallel.hpp"
#include "poclab/summation.hpp"

namespace poclab {

void FlowConfig::validate() const {
    data.validate();
    if (data.d != domain.d) throw ConfigError("data dimension must match domain");
    if (data_finite) {
        data_finite->validate();
        if (data_finite->d != domain.d)
            throw ConfigError("finite-system data dimension must match domain");
    }
    if (m < 1 || m_ref < m) throw ConfigError("need 1 <= m <= m_ref");
    if (!(eta_ref > 0) || eta_ref > eta)
        throw ConfigError("need 0 < eta_ref <= eta");
    if (eta > 0.1 / c_step + 1e-12)
        throw ConfigError("step size exceeds 0.1/c_step admissibility bound");
    const double ratio = eta / eta_ref;
    if (std::abs(ratio - std::round(ratio)) > 1e-9)
        throw ConfigError("eta must be an integer multiple of eta_ref");
    if (!(t_max > 0)) throw ConfigError("t_max must be positive");
    for (double t : snapshot_times)
        if (t < -1e-12 || t > t_max + 1e-12)
            throw ConfigError("snapshot times must lie in [0, t_max]");
}

void velocity(std::span<const double> w, const DataSample& data,
              const ActivationSpec& act, const DomainSpec& domain,
              std::span<const double> measure_predictions, std::span<double> out) {
    const int d = data.d;
    for (int c = 0; c < d; ++c) out[c] = 0.0;
    for (long l = 0; l < data.n; ++l) {
        const auto x = data.x(l);
        const double g = data.weights[l] * (data.labels[l] - measure_predictions[l]) *
                         activation_eval(act, 1, dot(w, x));
        if (g == 0.0) continue;
        for (int c = 0; c < d; ++c) out[c] += g * x[c];
    }
    if (domain.is_sphere()) {
        const double c = dot(w, out);
        for (int j = 0; j < d; ++j) out[j] -= c * w[j];
    }
}

std::vector<double> velocity(std::span<const double> w, const Ensemble& measure,
                             const DataSample& data, const ActivationSpec& act,
                             const DomainSpec& domain) {
    const auto preds = ensemble_predictions(data, act, measure);
    std::vector<double> out(data.d);
    velocity(w, data, act, domain, preds, out);
    return out;
}

Ensemble gd_step(const Ensemble& e, const DataSample& data,
                 const ActivationSpec& act, double eta, int workers) {
    const auto preds = ensemble_predictions(data, act, e, workers);
    Ensemble out = e;
    parallel_for(e.m, workers, [&](long i) {
        thread_local std::vector<double> v;
        v.resize((size_t)e.d);
        velocity(e.row(i), data, act, e.domain, preds, v);
        const auto w = e.row(i);
        for (int c = 0; c < e.d; ++c) v[c] = w[c] + eta * v[c];
        project_to_domain(e.domain, v, out.row(i));
    });
    return out;
}

namespace {

void check_finite(const Ensemble& e, double t, double guard) {
    for (long i = 0; i < e.m; ++i) {
        for (int c = 0; c < e.d; ++c) {
            const double v = e.weights[(size_t)i * e.d + c];
            if (!std::isfinite(v) || std::abs(v) > guard)
                throw DivergedRun(t, i, "trajectory diverged at t=" + std::to_string(t) +
                                            ", particle " + std::to_string(i));
        }
    }
}

double max_row_norm(const Ensemble& e) {
    double mx = 0.0;
    for (long i = 0; i < e.m; ++i) mx = std::max(mx, norm2(e.row(i)));
    return mx;
}

// Snapshot times snapped down to the coarse (eta) grid, as fine-step indices.
std::set<long> snapshot_steps(const FlowConfig& cfg) {
    const long k = (long)std::llround(cfg.eta / cfg.eta_ref);
    const long total = (long)std::llround(cfg.t_max / cfg.eta_ref);
    std::set<long> steps;
    for (double t : cfg.snapshot_times) {
        long coarse = (long)std::floor(t / cfg.eta + 1e-9);
        long s = std::min(coarse * k, total);
        steps.insert(s);
    }
    return steps;
}

}  // namespace

CoupledTrajectory run_coupled(const FlowConfig& config) {
    config.validate();
    CoupledTrajectory traj;
    traj.config = config;

    const DataSample& data_ref = config.data;
    const DataSample& data_hat = config.data_finite ? *config.data_finite : config.data;

    Ensemble ref = sample_init(config.domain, config.m_ref, config.init, config.rng);
    Ensemble hat = ref.head(config.m);

    const long k = (long)std::llround(config.eta / config.eta_ref);
    const long total = (long)std::llround(config.t_max / config.eta_ref);
    const std::set<long> snaps = snapshot_steps(config);

    for (long s = 0;; ++s) {
        const double t = s * config.eta_ref;
        if (snaps.count(s)) {
            CoupledSnapshot snap;
            snap.t = t;
            snap.m = config.m;
            snap.d = config.domain.d;
            snap.xi_ref.assign(ref.weights.begin(),
                               ref.weights.begin() + config.m * config.domain.d);
            snap.xi_hat = hat.weights;
            snap.delta.resize(snap.xi_hat.size());
            for (size_t j = 0; j < snap.delta.size(); ++j)
                snap.delta[j] = snap.xi_hat[j] - snap.xi_ref[j];
            snap.loss_mf = excess_loss(data_ref, config.activation, ref, config.workers);
            snap.loss_ref =
                excess_loss(data_ref, config.activation, ref.head(config.m), config.workers);
            snap.loss_hat = excess_loss(data_ref, config.activation, hat, config.workers);
            snap.max_particle_norm = std::max(max_row_norm(ref), max_row_norm(hat));
            traj.snapshots.push_back(std::move(snap));
            if (config.store_full_reference) traj.full_reference.push_back(ref);
        }
        if (s >= total) break;
        ref = gd_step(ref, data_ref, config.activation, config.eta_ref, config.workers);
        if (s % k == 0)
            hat = gd_step(hat, data_hat, config.activation, config.eta, config.workers);
        check_finite(ref, t + config.eta_ref, config.divergence_guard);
        check_finite(hat, t + config.eta_ref, config.divergence_guard);
    }
    return traj;
}

std::vector<LossCurvePoint> run_reference_only(
    const FlowConfig& config,
    const std::function<void(double, const Ensemble&)>& snapshot_sink) {
    config.validate();
    Ensemble ref = sample_init(config.domain, config.m_ref, config.init, config.rng);
    const long total = (long)std::llround(config.t_max / config.eta_ref);
    std::set<long> snaps;
    for (double t : config.snapshot_times)
        snaps.insert(std::min((long)std::floor(t / config.eta_ref + 1e-9), total));

    std::vector<LossCurvePoint> curve;
    for (long s = 0;; ++s) {
        const double t = s * config.eta_ref;
        if (snaps.count(s)) {
            curve.push_back({t, excess_loss(config.data, config.activation, ref, config.workers)});
            if (snapshot_sink) snapshot_sink(t, ref);
        }
        if (s >= total) break;
        ref = gd_step(ref, config.data, config.activation, config.eta_ref, config.workers);
        check_finite(ref, t + config.eta_ref, config.divergence_guard);
    }
    return curve;
}

}  // namespace poclab
