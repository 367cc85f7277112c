#pragma once

// Exact reference mathematics: ideal softmax, the collapsed one-dimensional
// sigmoid used to score sweeps, the softmax Jacobian and the square-law
// activation of a saturated differential network. Every analysis scores the
// circuit against these functions.

#include <cstddef>
#include <span>
#include <vector>

namespace asmx::oracle {

using RealVector = std::vector<double>;
using ProbabilityVector = std::vector<double>;

/// Dense row-major square matrix.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    [[nodiscard]] double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
    double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
};

/// exp(z_j/scale) / sum_k exp(z_k/scale), evaluated after subtracting max(z).
/// Throws DomainError for an empty or non-finite input or scale <= 0.
ProbabilityVector softmax(std::span<const double> z, double scale = 1.0);

/// First output of softmax([x, x_others, ..., x_others], scale) with
/// `n_branches` entries in total.
double sigmoid_reference(double x, double x_others, double scale, int n_branches);

/// d softmax_i / d z_j = softmax_i (delta_ij - softmax_j) / scale.
Matrix softmax_gradient(std::span<const double> z, double scale = 1.0);

/// (x_i - g)^2 / sum_k (x_k - g)^2. Every x_k must exceed g (positive overdrive).
ProbabilityVector square_law_activation(std::span<const double> x, double g);

/// Index of the largest element; ties resolve to the lowest index.
std::size_t argmax(std::span<const double> v);

}  // namespace asmx::oracle
