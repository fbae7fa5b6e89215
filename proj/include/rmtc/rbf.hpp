#pragma once

// Multiquadric radial basis function interpolation baseline.
//
// phi(r) = sqrt(1 + (r/eps)^2). Fitting solves the dense symmetric system
// Phi w = b with Phi_kl = phi(||c_k - c_l||); Phi is assembled symmetric by
// construction and solved with a partial-pivoting LU (the multiquadric
// kernel matrix is nonsingular but indefinite, so a Cholesky-type
// factorization does not apply). The reciprocal condition estimate of the
// factorization guards against a badly chosen eps.
//
// Sample coordinates are grid-cell indices, optionally scaled per mode by a
// physical resolution (e.g. meters per cell).

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rmtc/errors.hpp"
#include "rmtc/samples.hpp"
#include "rmtc/tensor.hpp"

namespace rmtc {

struct RbfModel {
    Eigen::MatrixXd centers;  // one row per sample, one column per mode
    Eigen::VectorXd weights;
    double epsilon = 1.0;
};

namespace detail {

inline Eigen::MatrixXd sample_coordinates(const SampleSet& samples,
                                          std::span<const double> scale) {
    const std::size_t order = samples.dims().size();
    if (!scale.empty() && scale.size() != order)
        throw std::invalid_argument("rbf: scale must have one entry per mode");
    Eigen::MatrixXd coords(static_cast<Eigen::Index>(samples.size()),
                           static_cast<Eigen::Index>(order));
    for (std::size_t k = 0; k < samples.size(); ++k) {
        const auto idx = samples.multi_index(k);
        for (std::size_t m = 0; m < order; ++m)
            coords(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(m)) =
                static_cast<double>(idx[m]) * (scale.empty() ? 1.0 : scale[m]);
    }
    return coords;
}

}  // namespace detail

inline double multiquadric(double r, double epsilon) {
    const double t = r / epsilon;
    return std::sqrt(1.0 + t * t);
}

inline RbfModel fit_rbf(const SampleSet& samples, double epsilon,
                        std::span<const double> scale = {}) {
    if (samples.empty()) throw std::invalid_argument("fit_rbf: need at least one sample");
    if (epsilon <= 0.0) throw std::invalid_argument("fit_rbf: epsilon must be > 0");

    RbfModel model;
    model.epsilon = epsilon;
    model.centers = detail::sample_coordinates(samples, scale);

    const auto n = static_cast<Eigen::Index>(samples.size());
    Eigen::MatrixXd phi(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        phi(i, i) = 1.0;  // phi(0)
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double r = (model.centers.row(i) - model.centers.row(j)).norm();
            const double v = multiquadric(r, epsilon);
            phi(i, j) = v;
            phi(j, i) = v;
        }
    }

    Eigen::PartialPivLU<Eigen::MatrixXd> lu(phi);
    const double rcond = lu.rcond();
    if (!(rcond > 1e-12))
        throw numerical_error("fit_rbf: interpolation matrix is ill-conditioned "
                              "(rcond estimate " + std::to_string(rcond) +
                              "); try a different epsilon");

    Eigen::VectorXd b(n);
    const auto vals = samples.values();
    for (Eigen::Index i = 0; i < n; ++i) b(i) = vals[static_cast<std::size_t>(i)];
    model.weights = lu.solve(b);
    if (!model.weights.allFinite())
        throw numerical_error("fit_rbf: non-finite weights; try a different epsilon");
    return model;
}

inline double predict_rbf(const RbfModel& model, std::span<const double> coord) {
    if (static_cast<Eigen::Index>(coord.size()) != model.centers.cols())
        throw std::invalid_argument("predict_rbf: coordinate dimension mismatch");
    double acc = 0.0;
    for (Eigen::Index k = 0; k < model.centers.rows(); ++k) {
        double r2 = 0.0;
        for (Eigen::Index m = 0; m < model.centers.cols(); ++m) {
            const double d = coord[static_cast<std::size_t>(m)] - model.centers(k, m);
            r2 += d * d;
        }
        acc += model.weights(k) * multiquadric(std::sqrt(r2), model.epsilon);
    }
    return acc;
}

// Fit once, evaluate the kernel expansion at every grid cell.
inline DenseTensor reconstruct_rbf(const SampleSet& samples, const std::vector<std::size_t>& dims,
                                   double epsilon, std::span<const double> scale = {}) {
    if (samples.dims() != dims)
        throw std::invalid_argument("reconstruct_rbf: sample dims do not match target dims");
    const RbfModel model = fit_rbf(samples, epsilon, scale);
    DenseTensor out(dims);
    std::vector<double> coord(dims.size());
    for (std::size_t flat = 0; flat < out.size(); ++flat) {
        std::size_t rest = flat;
        for (std::size_t m = 0; m < dims.size(); ++m) {
            coord[m] = static_cast<double>(rest % dims[m]) * (scale.empty() ? 1.0 : scale[m]);
            rest /= dims[m];
        }
        out[flat] = predict_rbf(model, coord);
    }
    return out;
}

// Log-spaced candidate shape parameters around the grid diameter; the line
// search scores them by holdout cross-validation.
inline std::vector<double> default_epsilon_grid(const std::vector<std::size_t>& dims,
                                                std::span<const double> scale = {}) {
    double diam2 = 0.0;
    for (std::size_t m = 0; m < dims.size(); ++m) {
        const double extent =
            static_cast<double>(dims[m] - 1) * (scale.empty() ? 1.0 : scale[m]);
        diam2 += extent * extent;
    }
    const double diameter = std::max(std::sqrt(diam2), 1.0);
    std::vector<double> grid;
    for (int p = -6; p <= 1; ++p) grid.push_back(diameter * std::ldexp(1.0, p));
    return grid;
}

}  // namespace rmtc
