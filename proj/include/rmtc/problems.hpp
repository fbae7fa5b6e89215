#pragma once

// Assembles the three completion objectives into ordered prox-operator
// lists, evaluates objective values, and provides the NMSE metric.
//
//   Rank       minimize sum_i ||X_(i)||_* + (lambda/2) ||A(X) - b||^2
//   L2TVRank   adds sum_i alpha_i * Tv2 along mode-i fibers
//   L1TVRank   adds sum_i alpha_i * Tv1 along mode-i fibers
//
// Operator ordering: [TV per mode,] nuclear per mode, data fidelity last.

#include <Eigen/SVD>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rmtc/prox.hpp"
#include "rmtc/samples.hpp"
#include "rmtc/solver.hpp"
#include "rmtc/tensor.hpp"

namespace rmtc {

enum class Method { Rank, L2TVRank, L1TVRank };

inline std::string method_name(Method m) {
    switch (m) {
        case Method::Rank: return "rank";
        case Method::L2TVRank: return "l2tv";
        case Method::L1TVRank: return "l1tv";
    }
    return "?";
}

struct ProblemSpec {
    Method method = Method::Rank;
    std::vector<double> alphas;  // one per mode; unused for Rank
    bool heuristic = true;       // row-rescaled L2-TV operator; L2TVRank only
    SolverConfig solver;

    void validate(std::size_t order) const {
        solver.validate();
        if (method != Method::Rank) {
            if (alphas.size() != order)
                throw std::invalid_argument("ProblemSpec: need one alpha per mode (" +
                                            std::to_string(order) + "), got " +
                                            std::to_string(alphas.size()));
            for (double a : alphas)
                if (!(a >= 0.0))
                    throw std::invalid_argument("ProblemSpec: alphas must be >= 0");
        }
    }
};

// Sum of squared differences between neighbors along every mode fiber.
inline double tv2(const DenseTensor& x, int mode) {
    detail::check_mode(x, mode);
    const auto s = detail::mode_split(x.dims(), mode);
    double acc = 0.0;
    for (std::size_t hi = 0; hi < s.high; ++hi)
        for (std::size_t lo = 0; lo < s.low; ++lo) {
            const std::size_t base = hi * s.low * s.n + lo;
            for (std::size_t r = 0; r + 1 < s.n; ++r) {
                const double d = x[base + (r + 1) * s.low] - x[base + r * s.low];
                acc += d * d;
            }
        }
    return acc;
}

// Sum of absolute differences between neighbors along every mode fiber.
inline double tv1(const DenseTensor& x, int mode) {
    detail::check_mode(x, mode);
    const auto s = detail::mode_split(x.dims(), mode);
    double acc = 0.0;
    for (std::size_t hi = 0; hi < s.high; ++hi)
        for (std::size_t lo = 0; lo < s.low; ++lo) {
            const std::size_t base = hi * s.low * s.n + lo;
            for (std::size_t r = 0; r + 1 < s.n; ++r)
                acc += std::abs(x[base + (r + 1) * s.low] - x[base + r * s.low]);
        }
    return acc;
}

inline double nuclear_norm(const Eigen::MatrixXd& x) {
    if (std::min(x.rows(), x.cols()) <= 16)
        return Eigen::JacobiSVD<Eigen::MatrixXd>(x).singularValues().sum();
    return Eigen::BDCSVD<Eigen::MatrixXd>(x).singularValues().sum();
}

// Rank: M = N + 1 operators; TV methods: M = 2N + 1. The data-fidelity
// operator is always last and is the only one that reads lambda.
inline std::vector<ProxOp> build_prox_list(const ProblemSpec& spec,
                                           const std::vector<std::size_t>& dims,
                                           const SampleSet& samples) {
    if (samples.dims() != dims)
        throw std::invalid_argument("build_prox_list: sample dims do not match tensor dims");
    spec.validate(dims.size());

    const int order = static_cast<int>(dims.size());
    std::vector<ProxOp> ops;

    if (spec.method == Method::L2TVRank) {
        for (int mode = 0; mode < order; ++mode) {
            // The materialized tridiagonal inverse is reused across calls
            // with the same gamma (constant within one solve).
            auto cache = std::make_shared<std::optional<TridiagonalOperator>>();
            const double alpha = spec.alphas[static_cast<std::size_t>(mode)];
            const bool heuristic = spec.heuristic;
            ops.push_back([mode, alpha, heuristic, cache](const DenseTensor& x, double gamma,
                                                          double) {
                const std::size_t k = x.dims()[static_cast<std::size_t>(mode)];
                if (!cache->has_value() || (*cache)->size() != k || (*cache)->gamma() != gamma)
                    cache->emplace(k, alpha, gamma, heuristic);
                return mode_multiply(x, mode, (*cache)->matrix());
            });
        }
    } else if (spec.method == Method::L1TVRank) {
        for (int mode = 0; mode < order; ++mode) {
            const double alpha = spec.alphas[static_cast<std::size_t>(mode)];
            ops.push_back([mode, alpha](const DenseTensor& x, double gamma, double) {
                return prox_l1tv(x, mode, alpha, gamma);
            });
        }
    }

    for (int mode = 0; mode < order; ++mode)
        ops.push_back([mode](const DenseTensor& x, double gamma, double) {
            return prox_nuclear(x, mode, gamma);
        });

    auto sample_copy = std::make_shared<SampleSet>(samples);
    ops.push_back([sample_copy](const DenseTensor& x, double gamma, double lambda) {
        return prox_data_fidelity(x, *sample_copy, lambda, gamma);
    });

    return ops;
}

inline std::size_t lambda_aware_index(const std::vector<ProxOp>& ops) { return ops.size() - 1; }

inline double objective_value(const ProblemSpec& spec, const DenseTensor& x,
                              const SampleSet& samples, double lambda) {
    if (samples.dims() != x.dims())
        throw std::invalid_argument("objective_value: sample dims do not match tensor dims");
    const int order = static_cast<int>(x.order());
    double acc = 0.0;
    if (spec.method == Method::L2TVRank)
        for (int mode = 0; mode < order; ++mode)
            acc += spec.alphas[static_cast<std::size_t>(mode)] * tv2(x, mode);
    else if (spec.method == Method::L1TVRank)
        for (int mode = 0; mode < order; ++mode)
            acc += spec.alphas[static_cast<std::size_t>(mode)] * tv1(x, mode);
    for (int mode = 0; mode < order; ++mode) acc += nuclear_norm(unfold(x, mode).values);
    const double mis = samples.misfit(x);
    acc += 0.5 * lambda * mis * mis;
    return acc;
}

// 10*log10( sum_{j in holdout} (est_j - truth_j)^2 / sum truth_j^2 ).
// Returns -infinity when the numerator is exactly zero; throws when only
// the denominator vanishes.
inline double nmse_db(const DenseTensor& estimate, const DenseTensor& truth,
                      std::span<const std::size_t> holdout) {
    if (estimate.dims() != truth.dims())
        throw std::invalid_argument("nmse_db: dims mismatch");
    if (holdout.empty()) throw std::invalid_argument("nmse_db: empty holdout set");
    double num = 0.0, den = 0.0;
    for (std::size_t j : holdout) {
        if (j >= truth.size()) throw std::invalid_argument("nmse_db: holdout index out of range");
        const double d = estimate[j] - truth[j];
        num += d * d;
        den += truth[j] * truth[j];
    }
    if (num == 0.0) return -std::numeric_limits<double>::infinity();
    if (den == 0.0) throw std::domain_error("nmse_db: zero reference energy on the holdout set");
    return 10.0 * std::log10(num / den);
}

// Same metric scored against held-out samples instead of a full tensor.
inline double nmse_db(const DenseTensor& estimate, const SampleSet& holdout) {
    if (estimate.dims() != holdout.dims())
        throw std::invalid_argument("nmse_db: dims mismatch");
    if (holdout.empty()) throw std::invalid_argument("nmse_db: empty holdout set");
    double num = 0.0, den = 0.0;
    const auto idx = holdout.flat_indices();
    const auto vals = holdout.values();
    for (std::size_t k = 0; k < idx.size(); ++k) {
        const double d = estimate[idx[k]] - vals[k];
        num += d * d;
        den += vals[k] * vals[k];
    }
    if (num == 0.0) return -std::numeric_limits<double>::infinity();
    if (den == 0.0) throw std::domain_error("nmse_db: zero reference energy on the holdout set");
    return 10.0 * std::log10(num / den);
}

// All flat positions of `dims` not present in `mask` (mask need not be
// sorted). Used to build the evaluation set Omega_m.
inline std::vector<std::size_t> complement_indices(const std::vector<std::size_t>& dims,
                                                   std::span<const std::size_t> mask) {
    std::size_t total = 1;
    for (std::size_t d : dims) total *= d;
    std::vector<bool> in_mask(total, false);
    for (std::size_t j : mask) {
        if (j >= total) throw std::invalid_argument("complement_indices: index out of range");
        in_mask[j] = true;
    }
    std::vector<std::size_t> out;
    out.reserve(total - mask.size());
    for (std::size_t j = 0; j < total; ++j)
        if (!in_mask[j]) out.push_back(j);
    return out;
}

}  // namespace rmtc
