#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rmtc {

// Numerical failure: non-finite data where finite values are required,
// ill-conditioned linear systems, SVD breakdown.
class numerical_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The solver produced a non-finite iterate. Carries the outer round and
// inner iteration (both 1-based) at which the blow-up was detected.
class divergence_error : public numerical_error {
public:
    divergence_error(const std::string& what, int round, long iteration)
        : numerical_error(what), round_(round), iteration_(iteration) {}

    int round() const noexcept { return round_; }
    long iteration() const noexcept { return iteration_; }

private:
    int round_;
    long iteration_;
};

// Malformed input file. line is 1-based; 0 when the problem is not
// attributable to a single line.
class parse_error : public std::runtime_error {
public:
    parse_error(std::string path, std::size_t line, const std::string& what)
        : std::runtime_error(path + ":" + std::to_string(line) + ": " + what),
          path_(std::move(path)),
          line_(line) {}

    const std::string& path() const noexcept { return path_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string path_;
    std::size_t line_;
};

}  // namespace rmtc
