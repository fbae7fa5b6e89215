#pragma once

// Benchmark harness: for every (fraction, seed, method) cell, draw a
// sampling mask, tune hyperparameters by holdout cross-validation on the
// drawn samples, retrain on the full sample set, and score NMSE over all
// unsampled positions. Cells are independent and may run on worker
// threads; the result table is assembled in (fraction, seed, method) order
// whatever the execution order, so the CSV is identical at any parallelism
// level.

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <fstream>
#include <limits>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "rmtc/datagen.hpp"
#include "rmtc/io.hpp"
#include "rmtc/problems.hpp"
#include "rmtc/tuning.hpp"

namespace rmtc {

struct SweepOptions {
    std::vector<double> fractions;
    std::vector<std::uint64_t> seeds;
    std::vector<Algorithm> methods;
    CvConfig cv;        // cv.seed is replaced by the cell seed
    TuneOptions tune;
    int threads = 0;    // 0 = hardware concurrency
};

struct SweepRow {
    double fraction = 0.0;
    std::uint64_t seed = 0;
    Algorithm method = Algorithm::Rank;
    double nmse_db = 0.0;
    double wall_time_s = 0.0;
    std::string params;
};

inline constexpr const char* kSweepCsvHeader = "fraction,seed,method,nmse_db,wall_time_s,params";

namespace detail {

inline SweepRow run_sweep_cell(const DenseTensor& truth, double fraction, std::uint64_t seed,
                               Algorithm method, const SweepOptions& opts) {
    const auto t0 = std::chrono::steady_clock::now();

    const auto mask = random_mask(truth.dims(), fraction, seed);
    const SampleSet samples = make_samples(truth, mask);

    CvConfig cv = opts.cv;
    cv.seed = seed;
    if (cv.alpha_grid.empty()) cv.alpha_grid = default_alpha_grid();
    if (cv.epsilon_grid.empty())
        cv.epsilon_grid = default_epsilon_grid(truth.dims(), opts.tune.scale);

    std::vector<double> params;
    if (method != Algorithm::Rank) {
        const auto search = grid_search(method, samples, truth.dims(), cv, opts.tune);
        params = search.best().params;
    }
    const DenseTensor recon = run_algorithm(method, samples, truth.dims(), params, opts.tune);
    const auto holdout = complement_indices(truth.dims(), mask);
    const double score = nmse_db(recon, truth, holdout);

    const auto t1 = std::chrono::steady_clock::now();
    SweepRow row;
    row.fraction = fraction;
    row.seed = seed;
    row.method = method;
    row.nmse_db = score;
    row.wall_time_s = std::chrono::duration<double>(t1 - t0).count();
    row.params = render_params(method, params);
    return row;
}

}  // namespace detail

inline std::vector<SweepRow> sweep(const DenseTensor& truth, const SweepOptions& opts) {
    if (opts.fractions.empty() || opts.seeds.empty() || opts.methods.empty())
        throw std::invalid_argument("sweep: fractions, seeds and methods must be nonempty");

    struct Cell {
        double fraction;
        std::uint64_t seed;
        Algorithm method;
    };
    std::vector<Cell> cells;
    for (double f : opts.fractions)
        for (std::uint64_t s : opts.seeds)
            for (Algorithm m : opts.methods) cells.push_back({f, s, m});

    std::vector<SweepRow> rows(cells.size());
    std::vector<std::exception_ptr> failures(cells.size());

    unsigned threads = opts.threads > 0 ? static_cast<unsigned>(opts.threads)
                                        : std::thread::hardware_concurrency();
    if (threads == 0) threads = 1;
    threads = std::min<unsigned>(threads, static_cast<unsigned>(cells.size()));

    auto worker = [&](unsigned w) {
        for (std::size_t i = w; i < cells.size(); i += threads) {
            try {
                rows[i] = detail::run_sweep_cell(truth, cells[i].fraction, cells[i].seed,
                                                 cells[i].method, opts);
            } catch (...) {
                failures[i] = std::current_exception();
            }
        }
    };

    if (threads <= 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (unsigned w = 0; w < threads; ++w) pool.emplace_back(worker, w);
        for (auto& t : pool) t.join();
    }

    for (const auto& f : failures)
        if (f) std::rethrow_exception(f);
    return rows;
}

inline void write_sweep_csv(std::span<const SweepRow> rows, std::ostream& out) {
    out << kSweepCsvHeader << '\n';
    for (const auto& r : rows) {
        out << detail::format_double(r.fraction) << ',' << r.seed << ','
            << algorithm_name(r.method) << ',' << detail::format_double(r.nmse_db) << ','
            << detail::format_double(r.wall_time_s) << ',' << r.params << '\n';
    }
}

inline std::vector<SweepRow> read_sweep_csv(const std::string& path) {
    std::ifstream in = detail::open_in(path);
    std::string line_text;
    std::size_t line = 0;
    if (!std::getline(in, line_text)) throw parse_error(path, 1, "missing CSV header");
    ++line;
    if (!line_text.empty() && line_text.back() == '\r') line_text.pop_back();
    if (line_text != kSweepCsvHeader)
        throw parse_error(path, line, "unexpected CSV header '" + line_text + "'");

    std::vector<SweepRow> rows;
    while (std::getline(in, line_text)) {
        ++line;
        if (line_text.empty()) continue;
        const auto fields = detail::split_csv(line_text);
        if (fields.size() != 6)
            throw parse_error(path, line, "expected 6 fields, got " +
                                              std::to_string(fields.size()));
        SweepRow r;
        r.fraction = detail::parse_double_token(fields[0], path, line);
        r.seed = detail::parse_size_token(fields[1], path, line);
        const auto alg = parse_algorithm(fields[2]);
        if (!alg) throw parse_error(path, line, "unknown method '" + fields[2] + "'");
        r.method = *alg;
        r.nmse_db = fields[3] == "-inf"
                        ? -std::numeric_limits<double>::infinity()
                        : detail::parse_double_token(fields[3], path, line);
        r.wall_time_s = detail::parse_double_token(fields[4], path, line);
        r.params = fields[5];
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace rmtc
