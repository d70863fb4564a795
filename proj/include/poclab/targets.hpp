#pragma once

#include <complex>
#include <vector>

#include "poclab/kernel.hpp"

namespace poclab {

// Single-index target f*(x) = sum_{k in Z} c_k cos(k arccos(x_1)) with the
// symmetric coefficient table
//   c_0 = 1/2, c_{+-1} = 1/4, c_k = (1/2)(k/sqrt 2)^{-(gamma+2.5)} for
//   even |k| > 1, zero for odd |k| > 1.
// f_hat stores the k >= 0 half; evaluation doubles the k >= 1 terms.
struct SobolevTarget {
    double gamma = 1.0;
    int k_max = 512;
    int d = 2;
    std::vector<double> f_hat;   // index k = 0..k_max
    double tail_bound = 0.0;     // sum of dropped |c_k|, k > k_max

    void to_json_file(const std::string& path) const;
};

SobolevTarget sobolev_coeffs(double gamma, int k_max, int d = 2);

// f*(x); depends on x only through x_1, which must lie in [-1, 1].
double target_eval(const SobolevTarget& t, std::span<const double> x);
double target_eval_angle(const SobolevTarget& t, double theta);

// Fourier coefficients of relu(cos t) in the complex convention
// h(t) = sum_k h_k e^{ikt}: 1/pi at k = 0, 1/4 at |k| = 1,
// (-1)^{j-1} / (pi (4 j^2 - 1)) at |k| = 2j, zero at odd |k| > 1.
std::vector<double> relu_fourier_coeffs(int k_max);

// Recovered first-layer measure on the circle: mu_k = c_k / phi_k wherever
// phi_k != 0. Coefficients are real here; the type keeps the complex storage
// so the Hermitian pairing is explicit.
struct RhoStarS1 {
    std::vector<std::complex<double>> mu_hat;  // k = 0..k_max
    int k_max = 0;
    double sobolev_norm = 0.0;  // sum over Z of (1 + k^2)^gamma |mu_k|^2
    double gamma = 0.0;
    std::vector<double> quad_angles;   // angular quadrature grid
    std::vector<double> quad_weights;  // trapezoid weights, sum 2 pi
    std::vector<double> quad_density;  // signed density at the grid angles

    // E_{w ~ rho*} relu(cos(theta - w)) by quadrature.
    double function_eval(double theta) const;
};

RhoStarS1 rho_star_s1(const SobolevTarget& t, int quad_points = 4096);

// n covariates evenly spaced on the unit circle, noiseless labels f*(x_i).
DataSample data_circle(const SobolevTarget& t, long n);

// n covariates uniform on sqrt(d-1) S^{d-1}, coordinates then clamped to
// [-1, 1]; labels evaluate f* at the clamped point.
DataSample data_sphere_clamped(const SobolevTarget& t, int d, long n,
                               const RngSpec& rng);

}  // namespace poclab
