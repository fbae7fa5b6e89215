// Command-line front end: generate synthetic maps, draw samples, run the
// completion algorithms, tune hyperparameters, evaluate reconstructions,
// and sweep the full benchmark grid.
//
// Every command is deterministic given its flags; diagnostics go to
// standard error, results to files or standard output.

#include <CLI11.hpp>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <rmtc/rmtc.hpp>

namespace {

std::size_t parse_unsigned(const std::string& tok, const std::string& context) {
    if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos)
        throw std::invalid_argument("bad " + context + ": '" + tok +
                                    "' is not a nonnegative integer");
    try {
        return std::stoull(tok);
    } catch (...) {
        throw std::invalid_argument("bad " + context + ": '" + tok + "' is out of range");
    }
}

std::vector<std::size_t> parse_dims(const std::string& text) {
    std::vector<std::size_t> dims;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t next = text.find('x', pos);
        const std::string tok = text.substr(pos, next == std::string::npos ? next : next - pos);
        const std::size_t value = parse_unsigned(tok, "dims '" + text + "'");
        if (value == 0)
            throw std::invalid_argument("bad dims '" + text + "': extents must be >= 1");
        dims.push_back(value);
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    if (dims.empty()) throw std::invalid_argument("bad dims '" + text + "'");
    return dims;
}

std::vector<double> parse_double_list(const std::string& text, const char* what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            out.push_back(std::stod(tok));
        } catch (...) {
            throw std::invalid_argument(std::string("bad ") + what + " list '" + text + "'");
        }
    }
    if (out.empty()) throw std::invalid_argument(std::string("empty ") + what + " list");
    return out;
}

std::vector<std::string> split_names(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(tok);
    return out;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
    std::vector<std::uint64_t> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ','))
        out.push_back(parse_unsigned(tok, "seed list '" + text + "'"));
    if (out.empty()) throw std::invalid_argument("empty seed list");
    return out;
}

rmtc::Algorithm require_algorithm(const std::string& name) {
    const auto alg = rmtc::parse_algorithm(name);
    if (!alg)
        throw std::invalid_argument("unknown method '" + name +
                                    "' (expected rank, l2tv, l1tv or rbf)");
    return *alg;
}

// Candidate grid file: one candidate per line, numbers separated by
// whitespace; '#' starts a comment.
std::vector<std::vector<double>> read_grid_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open grid spec '" + path + "'");
    std::vector<std::vector<double>> grid;
    std::string line_text;
    std::size_t line = 0;
    while (std::getline(in, line_text)) {
        ++line;
        const auto hash = line_text.find('#');
        if (hash != std::string::npos) line_text = line_text.substr(0, hash);
        const auto toks = rmtc::detail::split_ws(line_text);
        if (toks.empty()) continue;
        std::vector<double> cand;
        for (const auto tok : toks)
            cand.push_back(rmtc::detail::parse_double_token(tok, path, line));
        grid.push_back(std::move(cand));
    }
    return grid;
}

void write_report(const std::string& path, const std::string& method,
                  const rmtc::SolverReport& report) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open report file '" + path + "'");
    out << "REPORT v1\n";
    out << "method: " << method << '\n';
    out << "termination: " << report.termination << '\n';
    out << "max_block_deviation: " << rmtc::detail::format_double(report.max_block_deviation)
        << '\n';
    out << "round lambda inner_iters residual misfit objective\n";
    for (std::size_t i = 0; i < report.rounds.size(); ++i) {
        const auto& r = report.rounds[i];
        out << (i + 1) << ' ' << rmtc::detail::format_double(r.lambda) << ' ' << r.inner_iters
            << ' ' << rmtc::detail::format_double(r.final_residual) << ' '
            << (r.misfit ? rmtc::detail::format_double(*r.misfit) : "-") << ' '
            << (r.objective ? rmtc::detail::format_double(*r.objective) : "-") << '\n';
    }
}

struct SolverFlags {
    double gamma = 1.0;
    double step = 1.0;
    double lambda0 = 0.1;
    double lambda_mult = 10.0;
    int max_rounds = 6;
    int max_inner = 500;
    double inner_tol = 1e-6;
    double outer_tol = 1e-4;

    void attach(CLI::App* cmd) {
        cmd->add_option("--gamma", gamma, "prox regularization parameter");
        cmd->add_option("--step", step, "Douglas-Rachford step size in (0,2]");
        cmd->add_option("--lambda0", lambda0, "initial data-fidelity weight");
        cmd->add_option("--lambda-mult", lambda_mult, "continuation multiplier");
        cmd->add_option("--max-rounds", max_rounds, "max continuation rounds");
        cmd->add_option("--max-inner", max_inner, "max inner iterations per round");
        cmd->add_option("--inner-tol", inner_tol, "inner fixed-point residual tolerance");
        cmd->add_option("--outer-tol", outer_tol, "outer reconstruction-change tolerance");
    }

    rmtc::SolverConfig config() const {
        rmtc::SolverConfig c;
        c.gamma = gamma;
        c.step = step;
        c.lambda0 = lambda0;
        c.lambda_multiplier = lambda_mult;
        c.max_outer_rounds = max_rounds;
        c.max_inner_iters = max_inner;
        c.inner_tol = inner_tol;
        c.outer_tol = outer_tol;
        return c;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rmtc: radio map reconstruction by low-rank tensor completion"};
    app.require_subcommand(1);

    // ---- generate ----
    std::string gen_dims = "30x30x3";
    int gen_rank = 1;
    double gen_smoothness = 0.0, gen_noise = 0.0;
    std::uint64_t gen_seed = 0;
    std::string gen_out;
    auto* gen = app.add_subcommand("generate", "write a synthetic ground-truth tensor");
    gen->add_option("--dims", gen_dims, "tensor dims as n1xn2x...xnN");
    gen->add_option("--rank", gen_rank, "low-rank component rank");
    gen->add_option("--smoothness", gen_smoothness, "correlation length in cells");
    gen->add_option("--noise-db", gen_noise, "shadowing noise std in dB");
    gen->add_option("--seed", gen_seed, "generator seed");
    gen->add_option("--out", gen_out, "output tensor file")->required();

    // ---- ingest ----
    std::string ing_csv, ing_out;
    rmtc::GridColumnMap ing_map;
    auto* ing = app.add_subcommand("ingest", "convert a gridded CSV to a tensor file");
    ing->add_option("--csv", ing_csv, "input CSV on a complete regular grid")->required();
    ing->add_option("--x-column", ing_map.x, "x coordinate column name");
    ing->add_option("--y-column", ing_map.y, "y coordinate column name");
    ing->add_option("--height-column", ing_map.height, "height coordinate column name");
    ing->add_option("--value-column", ing_map.value, "value column name");
    ing->add_option("--out", ing_out, "output tensor file")->required();

    // ---- sample ----
    std::string smp_tensor, smp_out;
    double smp_fraction = 0.0;
    std::uint64_t smp_seed = 0;
    auto* smp = app.add_subcommand("sample", "draw a random sample set from a tensor");
    smp->add_option("--tensor", smp_tensor, "input tensor file")->required();
    smp->add_option("--fraction", smp_fraction, "sampling fraction in [0,1]")->required();
    smp->add_option("--seed", smp_seed, "mask seed");
    smp->add_option("--out", smp_out, "output sample file")->required();

    // ---- complete ----
    std::string cpl_samples, cpl_method, cpl_alpha = "0", cpl_out, cpl_report;
    bool cpl_no_heuristic = false;
    double cpl_epsilon = 0.0;
    SolverFlags cpl_solver;
    auto* cpl = app.add_subcommand("complete", "reconstruct a tensor from samples");
    cpl->add_option("--samples", cpl_samples, "input sample file")->required();
    cpl->add_option("--method", cpl_method, "rank, l2tv, l1tv or rbf")->required();
    cpl->add_option("--alpha", cpl_alpha, "TV weight: one shared value or per-mode list");
    cpl->add_flag("--no-heuristic", cpl_no_heuristic, "disable l2tv row rescaling");
    cpl->add_option("--epsilon", cpl_epsilon, "rbf shape parameter (required for rbf)");
    cpl->add_option("--out", cpl_out, "output tensor file")->required();
    cpl->add_option("--report", cpl_report, "optional solver report file");
    cpl_solver.attach(cpl);

    // ---- tune ----
    std::string tun_samples, tun_method, tun_grid, tun_out;
    std::uint64_t tun_seed = 0;
    double tun_holdout = 0.25;
    bool tun_no_heuristic = false;
    SolverFlags tun_solver;
    auto* tun = app.add_subcommand("tune", "choose hyperparameters by holdout CV");
    tun->add_option("--samples", tun_samples, "input sample file")->required();
    tun->add_option("--method", tun_method, "rank, l2tv, l1tv or rbf")->required();
    tun->add_option("--grid-spec", tun_grid, "candidate file, one candidate per line");
    tun->add_option("--seed", tun_seed, "holdout split seed");
    tun->add_option("--holdout-fraction", tun_holdout, "held-out fraction (default 0.25)");
    tun->add_flag("--no-heuristic", tun_no_heuristic, "disable l2tv row rescaling");
    tun->add_option("--out-params", tun_out, "output parameter file")->required();
    tun_solver.attach(tun);

    // ---- evaluate ----
    std::string ev_estimate, ev_truth, ev_samples;
    auto* ev = app.add_subcommand("evaluate", "NMSE of an estimate over unsampled positions");
    ev->add_option("--estimate", ev_estimate, "reconstructed tensor file")->required();
    ev->add_option("--truth", ev_truth, "ground-truth tensor file")->required();
    ev->add_option("--samples", ev_samples, "sample file defining the observed set")->required();

    // ---- sweep ----
    std::string sw_truth, sw_fractions, sw_seeds, sw_methods = "rank,l2tv,l1tv,rbf", sw_out;
    std::string sw_alpha_grid, sw_epsilon_grid;
    bool sw_no_heuristic = false;
    int sw_threads = 0;
    SolverFlags sw_solver;
    auto* sw = app.add_subcommand("sweep", "benchmark grid over fractions, seeds and methods");
    sw->add_option("--truth", sw_truth, "ground-truth tensor file")->required();
    sw->add_option("--fractions", sw_fractions, "comma list of sampling fractions")->required();
    sw->add_option("--seeds", sw_seeds, "comma list of seeds")->required();
    sw->add_option("--methods", sw_methods, "comma list of methods");
    sw->add_option("--alpha-grid", sw_alpha_grid, "comma list of shared alpha candidates");
    sw->add_option("--epsilon-grid", sw_epsilon_grid, "comma list of epsilon candidates");
    sw->add_flag("--no-heuristic", sw_no_heuristic, "disable l2tv row rescaling");
    sw->add_option("--threads", sw_threads, "worker threads (0 = hardware)");
    sw->add_option("--out-csv", sw_out, "output CSV file")->required();
    sw_solver.attach(sw);

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            rmtc::SyntheticSpec spec;
            spec.dims = parse_dims(gen_dims);
            spec.rank = gen_rank;
            spec.smoothness = gen_smoothness;
            spec.noise_db = gen_noise;
            spec.seed = gen_seed;
            rmtc::write_tensor(rmtc::synthetic_map(spec), gen_out);
        } else if (ing->parsed()) {
            const rmtc::GridData grid = rmtc::ingest_grid_csv(ing_csv, ing_map);
            rmtc::write_tensor(grid.tensor, ing_out, grid.scale);
        } else if (smp->parsed()) {
            const rmtc::DenseTensor truth = rmtc::read_tensor(smp_tensor);
            const auto mask = rmtc::random_mask(truth.dims(), smp_fraction, smp_seed);
            rmtc::write_samples(rmtc::make_samples(truth, mask), smp_out);
        } else if (cpl->parsed()) {
            const rmtc::Algorithm alg = require_algorithm(cpl_method);
            const rmtc::SampleSet samples = rmtc::read_samples(cpl_samples);
            samples.validate();
            const auto& dims = samples.dims();

            if (alg == rmtc::Algorithm::Rbf) {
                if (cpl_epsilon <= 0.0)
                    throw std::invalid_argument("method rbf requires --epsilon > 0");
                const auto recon = rmtc::reconstruct_rbf(samples, dims, cpl_epsilon);
                rmtc::write_tensor(recon, cpl_out);
                if (!cpl_report.empty()) {
                    std::ofstream rep(cpl_report);
                    rep << "REPORT v1\nmethod: rbf\ntermination: direct_fit\n";
                }
            } else {
                rmtc::ProblemSpec spec;
                spec.solver = cpl_solver.config();
                spec.heuristic = !cpl_no_heuristic;
                spec.method = alg == rmtc::Algorithm::Rank ? rmtc::Method::Rank
                              : alg == rmtc::Algorithm::L2TV ? rmtc::Method::L2TVRank
                                                             : rmtc::Method::L1TVRank;
                if (spec.method != rmtc::Method::Rank) {
                    auto alphas = parse_double_list(cpl_alpha, "alpha");
                    if (alphas.size() == 1) alphas.assign(dims.size(), alphas[0]);
                    spec.alphas = std::move(alphas);
                }
                const auto ops = rmtc::build_prox_list(spec, dims, samples);
                const auto objective = [&spec, &samples](const rmtc::DenseTensor& x,
                                                         double lambda) {
                    return rmtc::objective_value(spec, x, samples, lambda);
                };
                auto [recon, report] = rmtc::solve(ops, dims, spec.solver,
                                                   rmtc::lambda_aware_index(ops), &samples,
                                                   objective);
                rmtc::write_tensor(recon, cpl_out);
                if (!cpl_report.empty()) write_report(cpl_report, cpl_method, report);
            }
        } else if (tun->parsed()) {
            const rmtc::Algorithm alg = require_algorithm(tun_method);
            const rmtc::SampleSet samples = rmtc::read_samples(tun_samples);
            samples.validate();

            rmtc::CvConfig cv;
            cv.holdout_fraction = tun_holdout;
            cv.seed = tun_seed;
            if (!tun_grid.empty()) {
                const auto grid = read_grid_spec(tun_grid);
                if (grid.empty())
                    throw std::invalid_argument("grid spec '" + tun_grid +
                                                "' contains no candidates");
                if (alg == rmtc::Algorithm::Rbf) {
                    for (const auto& cand : grid) {
                        if (cand.size() != 1)
                            throw std::invalid_argument(
                                "rbf grid candidates must be single epsilon values");
                        cv.epsilon_grid.push_back(cand[0]);
                    }
                } else {
                    cv.alpha_grid = grid;
                }
            } else if (alg != rmtc::Algorithm::Rank) {
                if (alg == rmtc::Algorithm::Rbf)
                    cv.epsilon_grid = rmtc::default_epsilon_grid(samples.dims());
                else
                    cv.alpha_grid = rmtc::default_alpha_grid();
            }

            rmtc::TuneOptions opts;
            opts.solver = tun_solver.config();
            opts.heuristic = !tun_no_heuristic;
            const auto result = rmtc::grid_search(alg, samples, samples.dims(), cv, opts);

            std::ofstream out(tun_out);
            if (!out) throw std::runtime_error("cannot open '" + tun_out + "' for writing");
            out << "PARAMS v1\n";
            out << "method: " << tun_method << '\n';
            out << "chosen: " << rmtc::render_params(alg, result.best().params) << '\n';
            out << "table:\n";
            for (const auto& row : result.table) {
                out << rmtc::render_params(alg, row.params);
                if (row.failed)
                    out << " failed: " << row.error << '\n';
                else
                    out << " nmse_db: " << rmtc::detail::format_double(row.nmse_db) << '\n';
            }
        } else if (ev->parsed()) {
            const rmtc::DenseTensor estimate = rmtc::read_tensor(ev_estimate);
            const rmtc::DenseTensor truth = rmtc::read_tensor(ev_truth);
            const rmtc::SampleSet samples = rmtc::read_samples(ev_samples);
            if (samples.dims() != truth.dims())
                throw std::invalid_argument("sample dims do not match truth dims");
            const auto holdout =
                rmtc::complement_indices(truth.dims(), samples.flat_indices());
            const double score = rmtc::nmse_db(estimate, truth, holdout);
            std::cout << rmtc::detail::format_double(score) << '\n';
        } else if (sw->parsed()) {
            const rmtc::TensorFile truth = rmtc::read_tensor_file(sw_truth);
            rmtc::SweepOptions opts;
            opts.fractions = parse_double_list(sw_fractions, "fraction");
            opts.seeds = parse_seed_list(sw_seeds);
            for (const auto& name : split_names(sw_methods))
                opts.methods.push_back(require_algorithm(name));
            if (!sw_alpha_grid.empty())
                for (double a : parse_double_list(sw_alpha_grid, "alpha"))
                    opts.cv.alpha_grid.push_back({a});
            if (!sw_epsilon_grid.empty())
                opts.cv.epsilon_grid = parse_double_list(sw_epsilon_grid, "epsilon");
            opts.tune.solver = sw_solver.config();
            opts.tune.heuristic = !sw_no_heuristic;
            opts.tune.scale = truth.scale;
            opts.threads = sw_threads;

            const auto rows = rmtc::sweep(truth.tensor, opts);
            std::ofstream out(sw_out);
            if (!out) throw std::runtime_error("cannot open '" + sw_out + "' for writing");
            rmtc::write_sweep_csv(rows, out);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
