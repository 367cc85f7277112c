#include "asmx/oracle.hpp"

#include "asmx/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace asmx::oracle {

namespace {

void check_vector(std::span<const double> z, const char* what) {
    if (z.empty()) {
        throw DomainError(std::string(what) + ": empty input vector");
    }
    for (double v : z) {
        if (!std::isfinite(v)) {
            throw DomainError(std::string(what) + ": non-finite input element");
        }
    }
}

void check_scale(double scale, const char* what) {
    if (!(scale > 0.0) || !std::isfinite(scale)) {
        throw DomainError(std::string(what) + ": scale must be positive and finite");
    }
}

}  // namespace

ProbabilityVector softmax(std::span<const double> z, double scale) {
    check_vector(z, "softmax");
    check_scale(scale, "softmax");

    const double peak = *std::max_element(z.begin(), z.end());
    ProbabilityVector out(z.size());
    double total = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        out[i] = std::exp((z[i] - peak) / scale);
        total += out[i];
    }
    for (double& v : out) {
        v /= total;
    }
    return out;
}

double sigmoid_reference(double x, double x_others, double scale, int n_branches) {
    if (n_branches < 2) {
        throw DomainError("sigmoid_reference: n_branches must be at least 2");
    }
    check_scale(scale, "sigmoid_reference");
    if (!std::isfinite(x) || !std::isfinite(x_others)) {
        throw DomainError("sigmoid_reference: non-finite input");
    }
    // Closed form of softmax(...)[0]; avoids building the vector for every sweep point.
    const double others = static_cast<double>(n_branches - 1);
    const double d = (x - x_others) / scale;
    if (d >= 0.0) {
        return 1.0 / (1.0 + others * std::exp(-d));
    }
    const double e = std::exp(d);
    return e / (e + others);
}

Matrix softmax_gradient(std::span<const double> z, double scale) {
    const auto s = softmax(z, scale);
    const std::size_t n = s.size();
    Matrix jac{n, n, std::vector<double>(n * n)};
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double kron = (i == j) ? 1.0 : 0.0;
            jac(i, j) = s[i] * (kron - s[j]) / scale;
        }
    }
    return jac;
}

ProbabilityVector square_law_activation(std::span<const double> x, double g) {
    check_vector(x, "square_law_activation");
    if (!std::isfinite(g)) {
        throw DomainError("square_law_activation: non-finite g");
    }
    ProbabilityVector out(x.size());
    double total = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double overdrive = x[i] - g;
        if (!(overdrive > 0.0)) {
            throw DomainError("square_law_activation: branch " + std::to_string(i) +
                              " not in saturation (x <= g)");
        }
        out[i] = overdrive * overdrive;
        total += out[i];
    }
    for (double& v : out) {
        v /= total;
    }
    return out;
}

std::size_t argmax(std::span<const double> v) {
    if (v.empty()) {
        throw DomainError("argmax: empty input vector");
    }
    // max_element returns the first of equal maxima.
    return static_cast<std::size_t>(std::distance(v.begin(), std::max_element(v.begin(), v.end())));
}

}  // namespace asmx::oracle
