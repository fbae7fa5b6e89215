#pragma once

// Proximal maps used by the completion solver, each a standalone
// deterministic operator:
//
//   shrink              singular value soft-thresholding of a matrix
//   prox_nuclear        prox of ||X_(m)||_* (shrink the unfolding, refold)
//   prox_data_fidelity  prox of (lambda/2)||A(X) - b||^2
//   prox_l2tv           prox of alpha * Tv2 along one mode (closed form via
//                       a tridiagonal Toeplitz system)
//   prox_l1tv           prox of alpha * Tv1 along one mode (exact direct
//                       1-D solver per fiber)
//   consensus_mean      prox of the indicator of the diagonal set in the
//                       product space (blockwise mean)

#include <Eigen/Core>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <cstring>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rmtc/errors.hpp"
#include "rmtc/samples.hpp"
#include "rmtc/tensor.hpp"

namespace rmtc {

// U * diag(max(sigma_i - tau, 0)) * V^T. Exact SVD; JacobiSVD for small
// inner dimension, BDCSVD otherwise.
inline Eigen::MatrixXd shrink(const Eigen::MatrixXd& x, double tau) {
    if (tau < 0.0) throw std::invalid_argument("shrink: tau must be >= 0");
    if (!x.allFinite()) throw numerical_error("shrink: non-finite input matrix");
    Eigen::MatrixXd u, v;
    Eigen::VectorXd s;
    if (std::min(x.rows(), x.cols()) <= 16) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
        u = svd.matrixU();
        v = svd.matrixV();
        s = svd.singularValues();
    } else {
        Eigen::BDCSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
        u = svd.matrixU();
        v = svd.matrixV();
        s = svd.singularValues();
    }
    const Eigen::VectorXd shrunk = (s.array() - tau).max(0.0).matrix();
    return u * shrunk.asDiagonal() * v.transpose();
}

inline DenseTensor prox_nuclear(const DenseTensor& t, int mode, double gamma) {
    if (gamma <= 0.0) throw std::invalid_argument("prox_nuclear: gamma must be > 0");
    Unfolding u = unfold(t, mode);
    u.values = shrink(u.values, gamma);
    return refold(u);
}

// At sampled positions (lambda*gamma*b_j + x_j) / (lambda*gamma + 1),
// untouched elsewhere.
inline DenseTensor prox_data_fidelity(const DenseTensor& t, const SampleSet& samples,
                                      double lambda, double gamma) {
    if (lambda <= 0.0) throw std::invalid_argument("prox_data_fidelity: lambda must be > 0");
    if (gamma <= 0.0) throw std::invalid_argument("prox_data_fidelity: gamma must be > 0");
    if (samples.dims() != t.dims())
        throw std::invalid_argument("prox_data_fidelity: sample dims do not match tensor dims");
    DenseTensor out = t;
    const double lg = lambda * gamma;
    const auto idx = samples.flat_indices();
    const auto b = samples.values();
    for (std::size_t k = 0; k < idx.size(); ++k)
        out[idx[k]] = (lg * b[k] + t[idx[k]]) / (lg + 1.0);
    return out;
}

// The stationarity system of the per-fiber L2-TV prox is A y = x / gamma
// with A symmetric tridiagonal Toeplitz: diagonal 4*alpha + 1/gamma,
// off-diagonal -2*alpha. A is strictly diagonally dominant for alpha >= 0,
// gamma > 0, so the Thomas elimination below needs no pivoting.
//
// The operator materializes M = (1/gamma) A^{-1} once (dense: the inverse of
// a tridiagonal matrix is full) and applies it as a matrix product per
// fiber. With the heuristic flag every row of M is rescaled to sum to 1, so
// constant fibers pass through unchanged; the rescaled operator is no
// longer a proximal map.
class TridiagonalOperator {
public:
    TridiagonalOperator(std::size_t k, double alpha, double gamma, bool heuristic)
        : size_(k), alpha_(alpha), gamma_(gamma), heuristic_(heuristic) {
        if (k < 1) throw std::invalid_argument("TridiagonalOperator: size must be >= 1");
        if (alpha < 0.0) throw std::invalid_argument("TridiagonalOperator: alpha must be >= 0");
        if (gamma <= 0.0) throw std::invalid_argument("TridiagonalOperator: gamma must be > 0");
        materialize();
    }

    std::size_t size() const noexcept { return size_; }
    double alpha() const noexcept { return alpha_; }
    double gamma() const noexcept { return gamma_; }
    bool heuristic() const noexcept { return heuristic_; }

    // (1/gamma) A^{-1}, row-rescaled when heuristic is set.
    const Eigen::MatrixXd& matrix() const noexcept { return m_; }

    Eigen::VectorXd apply(const Eigen::VectorXd& x) const { return m_ * x; }

private:
    void materialize() {
        const auto n = static_cast<Eigen::Index>(size_);
        const double d = 4.0 * alpha_ + 1.0 / gamma_;
        const double e = -2.0 * alpha_;

        // LU of the Toeplitz tridiagonal, shared across all unit-vector
        // right-hand sides.
        Eigen::VectorXd pivot(n);
        pivot(0) = d;
        for (Eigen::Index i = 1; i < n; ++i) pivot(i) = d - e * (e / pivot(i - 1));

        m_.resize(n, n);
        Eigen::VectorXd z(n);
        for (Eigen::Index j = 0; j < n; ++j) {
            for (Eigen::Index i = 0; i < n; ++i) z(i) = (i == j) ? 1.0 : 0.0;
            for (Eigen::Index i = 1; i < n; ++i) z(i) -= (e / pivot(i - 1)) * z(i - 1);
            z(n - 1) /= pivot(n - 1);
            for (Eigen::Index i = n - 2; i >= 0; --i) z(i) = (z(i) - e * z(i + 1)) / pivot(i);
            m_.col(j) = z / gamma_;
        }

        if (heuristic_)
            for (Eigen::Index i = 0; i < n; ++i) m_.row(i) /= m_.row(i).sum();
    }

    std::size_t size_;
    double alpha_;
    double gamma_;
    bool heuristic_;
    Eigen::MatrixXd m_;
};

inline TridiagonalOperator build_tridiagonal(std::size_t k, double alpha, double gamma,
                                             bool heuristic) {
    return TridiagonalOperator(k, alpha, gamma, heuristic);
}

inline DenseTensor prox_l2tv(const DenseTensor& t, int mode, double alpha, double gamma,
                             bool heuristic) {
    detail::check_mode(t, mode);
    const TridiagonalOperator op(t.dims()[static_cast<std::size_t>(mode)], alpha, gamma,
                                 heuristic);
    return mode_multiply(t, mode, op.matrix());
}

// Exact minimizer of w * sum |y_{k+1} - y_k| + 1/2 * sum (x_k - y_k)^2,
// computed with Condat's direct algorithm (taut-string family). Runs in
// O(K) for typical inputs, no inner tolerance. The dual variable stays in
// [-w, w]; a segment is flushed as soon as its value is forced.
inline std::vector<double> prox_l1tv_fiber(std::span<const double> x, double w) {
    if (w < 0.0) throw std::invalid_argument("prox_l1tv_fiber: weight must be >= 0");
    const std::size_t n = x.size();
    std::vector<double> y(x.begin(), x.end());
    for (double v : y)
        if (!std::isfinite(v)) throw numerical_error("prox_l1tv_fiber: non-finite input");
    if (n <= 1 || w == 0.0) return y;

    const std::ptrdiff_t last = static_cast<std::ptrdiff_t>(n) - 1;
    std::ptrdiff_t k = 0;   // current sample
    std::ptrdiff_t k0 = 0;  // start of the segment under construction
    std::ptrdiff_t km = 0;  // last position where umin was clamped to w
    std::ptrdiff_t kp = 0;  // last position where umax was clamped to -w
    double vmin = x[0] - w;
    double vmax = x[0] + w;
    double umin = w;
    double umax = -w;

    for (;;) {
        while (k == last) {
            if (umin < 0.0) {
                // vmin too high: negative jump at the tail.
                do y[static_cast<std::size_t>(k0++)] = vmin; while (k0 <= km);
                km = k = k0;
                vmin = x[static_cast<std::size_t>(k)];
                umin = w;
                umax = vmin + w - vmax;
            } else if (umax > 0.0) {
                // vmax too low: positive jump at the tail.
                do y[static_cast<std::size_t>(k0++)] = vmax; while (k0 <= kp);
                kp = k = k0;
                vmax = x[static_cast<std::size_t>(k)];
                umax = -w;
                umin = vmax - w - vmin;
            } else {
                vmin += umin / static_cast<double>(k - k0 + 1);
                do y[static_cast<std::size_t>(k0++)] = vmin; while (k0 <= k);
                return y;
            }
        }
        umin += x[static_cast<std::size_t>(k + 1)] - vmin;
        if (umin < -w) {
            // Negative jump: the segment value is vmin.
            do y[static_cast<std::size_t>(k0++)] = vmin; while (k0 <= km);
            kp = km = k = k0;
            vmin = x[static_cast<std::size_t>(k)];
            vmax = vmin + 2.0 * w;
            umin = w;
            umax = -w;
        } else {
            umax += x[static_cast<std::size_t>(k + 1)] - vmax;
            if (umax > w) {
                // Positive jump: the segment value is vmax.
                do y[static_cast<std::size_t>(k0++)] = vmax; while (k0 <= kp);
                kp = km = k = k0;
                vmax = x[static_cast<std::size_t>(k)];
                vmin = vmax - 2.0 * w;
                umin = w;
                umax = -w;
            } else {
                // No jump: extend the segment, keep the bounds tight.
                ++k;
                if (umin >= w) {
                    km = k;
                    vmin += (umin - w) / static_cast<double>(k - k0 + 1);
                    umin = w;
                }
                if (umax <= -w) {
                    kp = k;
                    vmax += (umax + w) / static_cast<double>(k - k0 + 1);
                    umax = -w;
                }
            }
        }
    }
}

// Applies prox_l1tv_fiber with weight gamma * alpha to every mode fiber;
// the Tv1 term is separable across fibers.
inline DenseTensor prox_l1tv(const DenseTensor& t, int mode, double alpha, double gamma) {
    detail::check_mode(t, mode);
    if (alpha < 0.0) throw std::invalid_argument("prox_l1tv: alpha must be >= 0");
    if (gamma <= 0.0) throw std::invalid_argument("prox_l1tv: gamma must be > 0");
    if (alpha == 0.0) return t;
    const auto s = detail::mode_split(t.dims(), mode);
    const double w = gamma * alpha;
    DenseTensor out = t;
    std::vector<double> fiber(s.n);
    for (std::size_t hi = 0; hi < s.high; ++hi)
        for (std::size_t lo = 0; lo < s.low; ++lo) {
            const std::size_t base = hi * s.low * s.n + lo;
            for (std::size_t r = 0; r < s.n; ++r) fiber[r] = t[base + r * s.low];
            const std::vector<double> solved = prox_l1tv_fiber(fiber, w);
            for (std::size_t r = 0; r < s.n; ++r) out[base + r * s.low] = solved[r];
        }
    return out;
}

// Blockwise mean (1/M) sum Z_i, the prox of the diagonal-set indicator.
// Identical blocks are returned unchanged, which keeps the operation
// bitwise idempotent.
inline DenseTensor consensus_mean(std::span<const DenseTensor> z) {
    if (z.empty()) throw std::invalid_argument("consensus_mean: need at least one tensor");
    const auto& dims = z[0].dims();
    for (const auto& t : z)
        if (t.dims() != dims)
            throw std::invalid_argument("consensus_mean: tensor dims mismatch");

    bool all_equal = true;
    for (std::size_t i = 1; i < z.size() && all_equal; ++i)
        all_equal = std::memcmp(z[0].data(), z[i].data(), z[0].size() * sizeof(double)) == 0;
    if (all_equal) return z[0];

    DenseTensor out = z[0];
    for (std::size_t i = 1; i < z.size(); ++i) {
        const double* p = z[i].data();
        double* q = out.data();
        for (std::size_t j = 0; j < out.size(); ++j) q[j] += p[j];
    }
    const double inv = 1.0 / static_cast<double>(z.size());
    for (std::size_t j = 0; j < out.size(); ++j) out[j] *= inv;
    return out;
}

inline DenseTensor consensus_mean(const std::vector<DenseTensor>& z) {
    return consensus_mean(std::span<const DenseTensor>(z.data(), z.size()));
}

}  // namespace rmtc
