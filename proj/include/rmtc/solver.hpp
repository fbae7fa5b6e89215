#pragma once

// Douglas-Rachford iteration on the M-fold product space, generic over an
// ordered list of proximal operators, with a continuation schedule on the
// data-fidelity weight lambda.
//
// One step:  x <- x + t * (prox_gf(2 * prox_gg(x) - x) - prox_gg(x))
// where prox_gf applies the i-th operator to block i and prox_gg replicates
// the blockwise consensus mean. The iteration is sequential and uses fixed
// summation orders, so a run is bitwise reproducible.

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rmtc/errors.hpp"
#include "rmtc/prox.hpp"
#include "rmtc/samples.hpp"
#include "rmtc/tensor.hpp"

namespace rmtc {

// A proximal operator parameterized by the prox weight gamma. Operators that
// do not depend on the data-fidelity weight ignore the lambda argument.
using ProxOp = std::function<DenseTensor(const DenseTensor&, double gamma, double lambda)>;

struct ProductState {
    std::vector<DenseTensor> blocks;

    std::size_t block_count() const noexcept { return blocks.size(); }

    bool all_finite() const noexcept {
        for (const auto& b : blocks)
            if (!b.all_finite()) return false;
        return true;
    }
};

// Norm on the product space (plain Euclidean over the concatenated blocks).
inline double product_norm(const ProductState& s) {
    double acc = 0.0;
    for (const auto& b : s.blocks) acc += inner(b, b);
    return std::sqrt(acc);
}

inline double product_distance(const ProductState& a, const ProductState& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.blocks.size(); ++i) {
        const double* pa = a.blocks[i].data();
        const double* pb = b.blocks[i].data();
        for (std::size_t j = 0; j < a.blocks[i].size(); ++j) {
            const double d = pa[j] - pb[j];
            acc += d * d;
        }
    }
    return std::sqrt(acc);
}

struct SolverConfig {
    double gamma = 1.0;
    double step = 1.0;  // t in (0, 2]
    int max_inner_iters = 500;
    double inner_tol = 1e-6;    // relative fixed-point residual
    double lambda0 = 0.1;       // continuation start
    double lambda_multiplier = 10.0;
    int max_outer_rounds = 6;
    double outer_tol = 1e-4;    // relative change of the reconstruction

    void validate() const {
        if (gamma <= 0.0) throw std::invalid_argument("SolverConfig: gamma must be > 0");
        if (step <= 0.0 || step > 2.0)
            throw std::invalid_argument("SolverConfig: step must be in (0, 2]");
        if (max_inner_iters < 1)
            throw std::invalid_argument("SolverConfig: max_inner_iters must be >= 1");
        if (inner_tol <= 0.0) throw std::invalid_argument("SolverConfig: inner_tol must be > 0");
        if (lambda0 <= 0.0) throw std::invalid_argument("SolverConfig: lambda0 must be > 0");
        if (lambda_multiplier <= 1.0)
            throw std::invalid_argument("SolverConfig: lambda_multiplier must be > 1");
        if (max_outer_rounds < 1)
            throw std::invalid_argument("SolverConfig: max_outer_rounds must be >= 1");
        if (outer_tol <= 0.0) throw std::invalid_argument("SolverConfig: outer_tol must be > 0");
    }
};

struct RoundRecord {
    double lambda = 0.0;
    int inner_iters = 0;
    double final_residual = 0.0;            // relative fixed-point residual
    std::optional<double> misfit;           // ||A(X) - b||_2, when samples known
    std::optional<double> objective;        // when an objective callback is given
};

struct SolverReport {
    std::vector<RoundRecord> rounds;
    std::string termination;  // "outer_tol" or "max_rounds"
    // Consensus diagnostic at exit: the block solutions are the prox
    // outputs prox_i(2*mean - Z_i), which all coincide with the
    // reconstruction at a fixed point. This is their largest relative
    // deviation from it.
    double max_block_deviation = 0.0;

    int total_inner_iters() const noexcept {
        int n = 0;
        for (const auto& r : rounds) n += r.inner_iters;
        return n;
    }
};

// One Douglas-Rachford step; no hidden state.
inline ProductState dr_step(const ProductState& state, std::span<const ProxOp> prox_list,
                            double gamma, double step, double lambda = 0.0) {
    const std::size_t m = state.blocks.size();
    if (prox_list.size() != m)
        throw std::invalid_argument("dr_step: prox list size does not match block count");
    if (m == 0) throw std::invalid_argument("dr_step: empty state");

    const DenseTensor p = consensus_mean(state.blocks);
    ProductState next;
    next.blocks.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
        DenseTensor reflected = state.blocks[i];
        {
            const double* pp = p.data();
            double* pr = reflected.data();
            for (std::size_t j = 0; j < reflected.size(); ++j) pr[j] = 2.0 * pp[j] - pr[j];
        }
        const DenseTensor q = prox_list[i](reflected, gamma, lambda);
        if (q.dims() != p.dims())
            throw std::invalid_argument("dr_step: prox operator changed tensor dims");
        DenseTensor updated = state.blocks[i];
        double* pu = updated.data();
        const double* pq = q.data();
        const double* pp = p.data();
        for (std::size_t j = 0; j < updated.size(); ++j) pu[j] += step * (pq[j] - pp[j]);
        next.blocks.push_back(std::move(updated));
    }
    return next;
}

// Full solve: outer continuation over lambda, inner Douglas-Rachford loop.
//
// All blocks start from the scattered samples A*(b) (zeros when no samples
// are supplied). The operator at lambda_aware_index is the one that consumes
// the scheduled lambda; every operator receives it, the others ignore it.
// Returns the consensus mean of the final state.
inline std::pair<DenseTensor, SolverReport> solve(
    std::span<const ProxOp> prox_list, const std::vector<std::size_t>& dims,
    const SolverConfig& config, std::size_t lambda_aware_index,
    const SampleSet* samples = nullptr,
    const std::function<double(const DenseTensor&, double lambda)>& objective = {}) {
    config.validate();
    if (prox_list.empty()) throw std::invalid_argument("solve: empty prox list");
    if (lambda_aware_index >= prox_list.size())
        throw std::invalid_argument("solve: lambda_aware_index out of range");
    if (samples && samples->dims() != dims)
        throw std::invalid_argument("solve: sample dims do not match solve dims");

    const std::size_t m = prox_list.size();
    ProductState state;
    state.blocks.assign(m, samples ? samples->scatter() : DenseTensor(dims));

    SolverReport report;
    DenseTensor prev_recon = consensus_mean(state.blocks);
    double lambda = config.lambda0;

    for (int round = 1; round <= config.max_outer_rounds; ++round) {
        double residual = std::numeric_limits<double>::infinity();
        int iters = 0;
        for (int it = 1; it <= config.max_inner_iters; ++it) {
            ProductState next = dr_step(state, prox_list, config.gamma, config.step, lambda);
            if (!next.all_finite())
                throw divergence_error("solve: non-finite iterate in round " +
                                           std::to_string(round) + ", inner iteration " +
                                           std::to_string(it),
                                       round, it);
            residual = product_distance(next, state) / std::max(1.0, product_norm(state));
            state = std::move(next);
            iters = it;
            if (residual < config.inner_tol) break;
        }

        const DenseTensor recon = consensus_mean(state.blocks);
        RoundRecord rec;
        rec.lambda = lambda;
        rec.inner_iters = iters;
        rec.final_residual = residual;
        if (samples) rec.misfit = samples->misfit(recon);
        if (objective) rec.objective = objective(recon, lambda);
        report.rounds.push_back(rec);

        DenseTensor diff = recon;
        {
            const double* pp = prev_recon.data();
            double* pd = diff.data();
            for (std::size_t j = 0; j < diff.size(); ++j) pd[j] -= pp[j];
        }
        const double rel_change = norm(diff) / std::max(1.0, norm(prev_recon));
        if (rel_change < config.outer_tol) {
            report.termination = "outer_tol";
            prev_recon = recon;
            break;
        }
        prev_recon = recon;
        lambda *= config.lambda_multiplier;
    }
    if (report.termination.empty()) report.termination = "max_rounds";

    const DenseTensor& recon = prev_recon;
    const double final_lambda = report.rounds.back().lambda;
    double max_dev = 0.0;
    const double denom = std::max(1.0, norm(recon));
    for (std::size_t i = 0; i < m; ++i) {
        DenseTensor reflected = state.blocks[i];
        const double* pr = recon.data();
        double* pf = reflected.data();
        for (std::size_t j = 0; j < reflected.size(); ++j) pf[j] = 2.0 * pr[j] - pf[j];
        DenseTensor block_solution = prox_list[i](reflected, config.gamma, final_lambda);
        double* pd = block_solution.data();
        for (std::size_t j = 0; j < block_solution.size(); ++j) pd[j] -= pr[j];
        max_dev = std::max(max_dev, norm(block_solution) / denom);
    }
    report.max_block_deviation = max_dev;

    return {recon, std::move(report)};
}

inline std::pair<DenseTensor, SolverReport> solve(
    const std::vector<ProxOp>& prox_list, const std::vector<std::size_t>& dims,
    const SolverConfig& config, std::size_t lambda_aware_index,
    const SampleSet* samples = nullptr,
    const std::function<double(const DenseTensor&, double lambda)>& objective = {}) {
    return solve(std::span<const ProxOp>(prox_list.data(), prox_list.size()), dims, config,
                 lambda_aware_index, samples, objective);
}

}  // namespace rmtc
