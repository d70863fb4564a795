#pragma once

#include <span>
#include <vector>

#include "poclab/model_core.hpp"

namespace poclab {

// n weighted covariate/label pairs. Weights are quadrature weights summing
// to one (1/n for i.i.d. samples).
struct DataSample {
    std::vector<double> inputs;   // n x d row-major
    std::vector<double> labels;   // n
    std::vector<double> weights;  // n, nonnegative, sums to 1
    long n = 0;
    int d = 0;

    std::span<const double> x(long i) const { return {inputs.data() + i * d, (size_t)d}; }
    void validate() const;
};

DataSample make_uniform_data(std::vector<double> inputs, std::vector<double> labels, int d);

enum class KernelKind { Empirical, ArccosRelu };

// empirical:    K(w,w') = sum_i weight_i s(w.x_i) s(w'.x_i)
// arccos_relu:  closed form of E[relu(w.g) relu(w'.g)], g standard normal:
//               (|w||w'|/2pi) (sin t + (pi - t) cos t), t = angle(w, w').
struct KernelSpec {
    KernelKind kind = KernelKind::ArccosRelu;
    DataSample data;      // empirical only
    ActivationSpec act;   // empirical only

    static KernelSpec empirical(DataSample data, ActivationSpec act);
    static KernelSpec arccos_relu() { return {}; }
};

double kernel_eval(const KernelSpec& k, std::span<const double> w,
                   std::span<const double> wp);

// F(w) = sum_i weight_i y_i s(w.x_i).
double potential_eval(const DataSample& data, const ActivationSpec& act,
                      std::span<const double> w);
void potential_grad(const DataSample& data, const ActivationSpec& act,
                    std::span<const double> w, std::span<double> out);

// Derivatives in the first argument / mixed. Matrices are row-major d x d;
// cross grad rows index w-components, columns w'-components.
void kernel_grad(const KernelSpec& k, std::span<const double> w,
                 std::span<const double> wp, std::span<double> out);
void kernel_cross_grad(const KernelSpec& k, std::span<const double> w,
                       std::span<const double> wp, std::span<double> out);
void kernel_hess(const KernelSpec& k, std::span<const double> w,
                 std::span<const double> wp, std::span<double> out);

// Optional per-row masses for weighted ensembles; empty means uniform 1/m.
struct WeightedEnsembleView {
    const Ensemble* ensemble = nullptr;
    std::span<const double> masses;  // empty -> uniform
    long size() const { return ensemble->m; }
    double mass(long i) const {
        return masses.empty() ? 1.0 / (double)ensemble->m : masses[i];
    }
};

// Squared RKHS distance between the kernel mean embeddings of A and B:
// E_AA K - 2 E_AB K + E_BB K, evaluated as an explicit Gram double sum in a
// fixed pairwise order.
double kernel_mean_embedding_pair_loss(const KernelSpec& k,
                                       const WeightedEnsembleView& A,
                                       const WeightedEnsembleView& B);
double kernel_mean_embedding_pair_loss(const KernelSpec& k, const Ensemble& A,
                                       const Ensemble& B);

// Network outputs f_E(x_i) = (1/m) sum_j s(w_j . x_i) for every data row.
std::vector<double> ensemble_predictions(const DataSample& data,
                                         const ActivationSpec& act,
                                         const Ensemble& e, int workers = 0);

// L2(D) squared distance between the two network outputs.
double mse_function_error(const DataSample& data, const ActivationSpec& act,
                          const Ensemble& A, const Ensemble& B);

// Excess mean squared error against precomputed target values f*(x_i):
// sum_i weight_i [ (f_E(x_i) - y_i)^2 - (f*(x_i) - y_i)^2 ].
double excess_loss(const DataSample& data, const ActivationSpec& act,
                   const Ensemble& e, std::span<const double> fstar_values,
                   int workers = 0);
double excess_loss(const DataSample& data, const ActivationSpec& act,
                   const Ensemble& e, int workers = 0);  // noiseless: f* = labels

}  // namespace poclab
