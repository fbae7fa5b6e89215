#pragma once

// Dense N-order real tensor with Hilbert-space operations, mode-m
// unfolding/refolding and mode multiplication.
//
// Storage is a flat array with the FIRST index varying fastest, i.e. the
// flat offset of (i_0, ..., i_{N-1}) is sum_k i_k * stride_k with
// stride_k = n_0 * ... * n_{k-1}. Modes and indices are 0-based throughout
// the library; the 1-based convention of the file formats is confined to
// the I/O layer.

#include <Eigen/Core>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rmtc {

class DenseTensor {
public:
    DenseTensor() = default;

    explicit DenseTensor(std::vector<std::size_t> dims)
        : dims_(std::move(dims)), values_(checked_size(dims_), 0.0) {}

    DenseTensor(std::vector<std::size_t> dims, std::vector<double> values)
        : dims_(std::move(dims)), values_(std::move(values)) {
        if (values_.size() != checked_size(dims_)) {
            throw std::invalid_argument(
                "DenseTensor: value count " + std::to_string(values_.size()) +
                " does not match product of dims " + std::to_string(checked_size(dims_)));
        }
    }

    const std::vector<std::size_t>& dims() const noexcept { return dims_; }
    std::size_t order() const noexcept { return dims_.size(); }
    std::size_t size() const noexcept { return values_.size(); }

    double* data() noexcept { return values_.data(); }
    const double* data() const noexcept { return values_.data(); }
    std::vector<double>& values() noexcept { return values_; }
    const std::vector<double>& values() const noexcept { return values_; }

    double operator[](std::size_t flat) const { return values_[flat]; }
    double& operator[](std::size_t flat) { return values_[flat]; }

    std::size_t flat_index(std::span<const std::size_t> idx) const {
        if (idx.size() != dims_.size())
            throw std::invalid_argument("DenseTensor: multi-index order mismatch");
        std::size_t flat = 0, stride = 1;
        for (std::size_t k = 0; k < dims_.size(); ++k) {
            if (idx[k] >= dims_[k])
                throw std::invalid_argument("DenseTensor: index out of range in mode " +
                                            std::to_string(k));
            flat += idx[k] * stride;
            stride *= dims_[k];
        }
        return flat;
    }

    std::vector<std::size_t> multi_index(std::size_t flat) const {
        std::vector<std::size_t> idx(dims_.size());
        for (std::size_t k = 0; k < dims_.size(); ++k) {
            idx[k] = flat % dims_[k];
            flat /= dims_[k];
        }
        return idx;
    }

    bool all_finite() const noexcept {
        for (double v : values_)
            if (!std::isfinite(v)) return false;
        return true;
    }

private:
    static std::size_t checked_size(const std::vector<std::size_t>& dims) {
        if (dims.empty())
            throw std::invalid_argument("DenseTensor: order must be >= 1");
        std::size_t n = 1;
        for (std::size_t d : dims) {
            if (d == 0) throw std::invalid_argument("DenseTensor: every extent must be >= 1");
            n *= d;
        }
        return n;
    }

    std::vector<std::size_t> dims_;
    std::vector<double> values_;
};

// Mode-m unfolding: rows are indexed by i_m, columns enumerate the remaining
// indices with smaller modes varying fastest (the same order they appear in
// flat storage).
struct Unfolding {
    int mode = 0;
    std::vector<std::size_t> parent_dims;
    Eigen::MatrixXd values;  // n_mode x prod(other dims)
};

namespace detail {

inline void check_mode(const DenseTensor& t, int mode) {
    if (mode < 0 || static_cast<std::size_t>(mode) >= t.order())
        throw std::invalid_argument("mode " + std::to_string(mode) +
                                    " out of range for order-" + std::to_string(t.order()) +
                                    " tensor");
}

// Fiber geometry for a mode: stride below the mode, extent, count above.
struct ModeSplit {
    std::size_t low;   // prod of dims before the mode
    std::size_t n;     // extent of the mode
    std::size_t high;  // prod of dims after the mode
};

inline ModeSplit mode_split(const std::vector<std::size_t>& dims, int mode) {
    ModeSplit s{1, dims[static_cast<std::size_t>(mode)], 1};
    for (int k = 0; k < mode; ++k) s.low *= dims[static_cast<std::size_t>(k)];
    for (std::size_t k = static_cast<std::size_t>(mode) + 1; k < dims.size(); ++k)
        s.high *= dims[k];
    return s;
}

}  // namespace detail

inline Unfolding unfold(const DenseTensor& t, int mode) {
    detail::check_mode(t, mode);
    const auto s = detail::mode_split(t.dims(), mode);
    Unfolding u;
    u.mode = mode;
    u.parent_dims = t.dims();
    u.values.resize(static_cast<Eigen::Index>(s.n),
                    static_cast<Eigen::Index>(s.low * s.high));
    const double* src = t.data();
    for (std::size_t hi = 0; hi < s.high; ++hi)
        for (std::size_t r = 0; r < s.n; ++r) {
            const double* block = src + (hi * s.n + r) * s.low;
            for (std::size_t lo = 0; lo < s.low; ++lo)
                u.values(static_cast<Eigen::Index>(r),
                         static_cast<Eigen::Index>(hi * s.low + lo)) = block[lo];
        }
    return u;
}

inline DenseTensor refold(const Unfolding& u) {
    if (u.parent_dims.empty())
        throw std::invalid_argument("refold: empty parent dims");
    if (u.mode < 0 || static_cast<std::size_t>(u.mode) >= u.parent_dims.size())
        throw std::invalid_argument("refold: mode out of range");
    const auto s = detail::mode_split(u.parent_dims, u.mode);
    if (static_cast<std::size_t>(u.values.rows()) != s.n ||
        static_cast<std::size_t>(u.values.cols()) != s.low * s.high)
        throw std::invalid_argument("refold: matrix shape inconsistent with parent dims");
    DenseTensor t(u.parent_dims);
    double* dst = t.data();
    for (std::size_t hi = 0; hi < s.high; ++hi)
        for (std::size_t r = 0; r < s.n; ++r) {
            double* block = dst + (hi * s.n + r) * s.low;
            for (std::size_t lo = 0; lo < s.low; ++lo)
                block[lo] = u.values(static_cast<Eigen::Index>(r),
                                     static_cast<Eigen::Index>(hi * s.low + lo));
        }
    return t;
}

// Z = t x_mode y, defined by Z_(mode) = y * T_(mode). The mode extent
// becomes y.rows().
inline DenseTensor mode_multiply(const DenseTensor& t, int mode, const Eigen::MatrixXd& y) {
    detail::check_mode(t, mode);
    const auto s = detail::mode_split(t.dims(), mode);
    if (static_cast<std::size_t>(y.cols()) != s.n)
        throw std::invalid_argument("mode_multiply: matrix has " + std::to_string(y.cols()) +
                                    " columns, mode extent is " + std::to_string(s.n));
    Unfolding u = unfold(t, mode);
    u.values = y * u.values;
    u.parent_dims[static_cast<std::size_t>(mode)] = static_cast<std::size_t>(y.rows());
    return refold(u);
}

inline double inner(const DenseTensor& a, const DenseTensor& b) {
    if (a.dims() != b.dims())
        throw std::invalid_argument("inner: tensor dims mismatch");
    double acc = 0.0;
    const double* pa = a.data();
    const double* pb = b.data();
    for (std::size_t i = 0; i < a.size(); ++i) acc += pa[i] * pb[i];
    return acc;
}

inline double norm(const DenseTensor& a) { return std::sqrt(inner(a, a)); }

}  // namespace rmtc
