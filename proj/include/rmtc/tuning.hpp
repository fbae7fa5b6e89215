#pragma once

// Holdout cross-validation and hyperparameter grid search, plus the
// algorithm dispatch shared by the CLI and the sweep harness.
//
// The holdout split removes a fixed fraction of the given samples (default
// 25%) as a test set; candidates are trained on the remainder and scored by
// NMSE on the held-out entries. The split is a partial Fisher-Yates draw
// from the pinned SplitMix64 stream, so it is deterministic given the seed.
// lambda is never part of the grid; it follows the continuation schedule.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rmtc/format.hpp"
#include "rmtc/problems.hpp"
#include "rmtc/rbf.hpp"
#include "rmtc/rng.hpp"
#include "rmtc/samples.hpp"
#include "rmtc/solver.hpp"

namespace rmtc {

// The four reconstruction algorithms exposed by the toolkit.
enum class Algorithm { Rank, L2TV, L1TV, Rbf };

inline std::string algorithm_name(Algorithm a) {
    switch (a) {
        case Algorithm::Rank: return "rank";
        case Algorithm::L2TV: return "l2tv";
        case Algorithm::L1TV: return "l1tv";
        case Algorithm::Rbf: return "rbf";
    }
    return "?";
}

inline std::optional<Algorithm> parse_algorithm(std::string_view name) {
    if (name == "rank") return Algorithm::Rank;
    if (name == "l2tv") return Algorithm::L2TV;
    if (name == "l1tv") return Algorithm::L1TV;
    if (name == "rbf") return Algorithm::Rbf;
    return std::nullopt;
}

struct CvConfig {
    double holdout_fraction = 0.25;
    std::vector<std::vector<double>> alpha_grid;  // candidates: shared (size 1) or per-mode
    std::vector<double> epsilon_grid;
    std::uint64_t seed = 0;
};

// Shared per-mode alpha candidates used when a caller gives no grid.
inline std::vector<std::vector<double>> default_alpha_grid() {
    return {{0.0}, {1e-3}, {1e-2}, {1e-1}, {1.0}};
}

class tuning_error : public std::runtime_error {
public:
    tuning_error(const std::string& what, std::string table)
        : std::runtime_error(what + "\n" + table), table_(std::move(table)) {}
    const std::string& table() const noexcept { return table_; }

private:
    std::string table_;
};

// Disjoint (train, test) partition with |test| = round(fraction * n),
// rounding half-up. Test entries are a uniform draw; train preserves the
// original sample order.
inline std::pair<SampleSet, SampleSet> holdout_split(const SampleSet& samples, double fraction,
                                                     std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction < 1.0))
        throw std::invalid_argument("holdout_split: fraction must be in (0, 1)");
    const std::size_t n = samples.size();
    if (n < 2) throw std::invalid_argument("holdout_split: need at least 2 samples");
    const auto n_test =
        static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 0.5));
    if (n_test == 0 || n_test == n)
        throw std::invalid_argument("holdout_split: fraction leaves train or test empty");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    SplitMix64 rng(seed);
    for (std::size_t i = 0; i < n_test; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.next_below(n - i));
        std::swap(order[i], order[j]);
    }
    std::vector<bool> is_test(n, false);
    for (std::size_t i = 0; i < n_test; ++i) is_test[order[i]] = true;

    SampleSet train(samples.dims()), test(samples.dims());
    const auto idx = samples.flat_indices();
    const auto vals = samples.values();
    for (std::size_t k = 0; k < n; ++k)
        (is_test[k] ? test : train).add_flat(idx[k], vals[k]);
    return {std::move(train), std::move(test)};
}

struct TuneOptions {
    SolverConfig solver;
    bool heuristic = true;       // l2tv row rescaling
    std::vector<double> scale;   // rbf coordinate scale, empty = cell units
};

struct CandidateScore {
    std::vector<double> params;  // alpha vector, or {epsilon} for rbf
    double nmse_db = std::numeric_limits<double>::infinity();
    bool failed = false;
    std::string error;
};

struct GridSearchResult {
    std::size_t best_index = 0;
    std::vector<CandidateScore> table;

    const CandidateScore& best() const { return table[best_index]; }
};

inline std::string render_params(Algorithm alg, std::span<const double> params) {
    if (alg == Algorithm::Rank || params.empty()) return "-";
    std::string out = (alg == Algorithm::Rbf) ? "epsilon=" : "alpha=";
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (i) out += ';';
        out += detail::format_double(params[i]);
    }
    return out;
}

namespace detail {

inline std::vector<double> expand_alphas(std::span<const double> candidate, std::size_t order) {
    if (candidate.size() == 1) return std::vector<double>(order, candidate[0]);
    if (candidate.size() == order) return {candidate.begin(), candidate.end()};
    throw std::invalid_argument("alpha candidate must have 1 or " + std::to_string(order) +
                                " entries");
}

inline std::string render_table(Algorithm alg, const std::vector<CandidateScore>& table) {
    std::string out;
    for (const auto& row : table) {
        out += render_params(alg, row.params);
        out += row.failed ? " failed: " + row.error
                          : " nmse_db: " + format_double(row.nmse_db);
        out += '\n';
    }
    return out;
}

}  // namespace detail

// Reconstruct with explicit hyperparameters on the full sample set.
// `params` is the alpha vector (possibly shared, size 1) for the TV
// methods, {epsilon} for rbf, and ignored for rank.
inline DenseTensor run_algorithm(Algorithm alg, const SampleSet& samples,
                                 const std::vector<std::size_t>& dims,
                                 std::span<const double> params, const TuneOptions& opts) {
    if (alg == Algorithm::Rbf) {
        if (params.size() != 1)
            throw std::invalid_argument("run_algorithm: rbf needs exactly one epsilon");
        return reconstruct_rbf(samples, dims, params[0],
                               std::span<const double>(opts.scale));
    }
    ProblemSpec spec;
    spec.solver = opts.solver;
    spec.heuristic = opts.heuristic;
    switch (alg) {
        case Algorithm::Rank: spec.method = Method::Rank; break;
        case Algorithm::L2TV: spec.method = Method::L2TVRank; break;
        case Algorithm::L1TV: spec.method = Method::L1TVRank; break;
        default: break;
    }
    if (spec.method != Method::Rank)
        spec.alphas = detail::expand_alphas(params, dims.size());
    const auto ops = build_prox_list(spec, dims, samples);
    return solve(ops, dims, spec.solver, lambda_aware_index(ops), &samples).first;
}

// Scores every candidate on the holdout split, in grid order; ties are
// broken by the first occurrence. Candidates whose solve diverges are
// recorded as failed; if all fail, throws tuning_error carrying the table.
inline GridSearchResult grid_search(Algorithm alg, const SampleSet& samples,
                                    const std::vector<std::size_t>& dims, const CvConfig& cv,
                                    const TuneOptions& opts) {
    std::vector<std::vector<double>> candidates;
    if (alg == Algorithm::Rank) {
        candidates.push_back({});
    } else if (alg == Algorithm::Rbf) {
        for (double e : cv.epsilon_grid) candidates.push_back({e});
    } else {
        candidates = cv.alpha_grid;
    }
    if (candidates.empty()) throw std::invalid_argument("grid_search: empty candidate grid");

    const auto [train, test] = holdout_split(samples, cv.holdout_fraction, cv.seed);

    GridSearchResult result;
    for (const auto& cand : candidates) {
        CandidateScore score;
        score.params = cand;
        try {
            const DenseTensor recon = run_algorithm(alg, train, dims, cand, opts);
            score.nmse_db = nmse_db(recon, test);
        } catch (const numerical_error& e) {
            score.failed = true;
            score.error = e.what();
        }
        result.table.push_back(std::move(score));
    }

    std::size_t best = candidates.size();
    for (std::size_t i = 0; i < result.table.size(); ++i) {
        if (result.table[i].failed) continue;
        if (best == candidates.size() || result.table[i].nmse_db < result.table[best].nmse_db)
            best = i;
    }
    if (best == candidates.size())
        throw tuning_error("grid_search: every candidate failed",
                           detail::render_table(alg, result.table));
    result.best_index = best;
    return result;
}

}  // namespace rmtc
