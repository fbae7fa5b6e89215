#pragma once

// Observed entries of a tensor: the set Omega of sampled positions and the
// vector b of sampled values. Gathering at Omega is the sampling operator A,
// scattering back with zeros elsewhere is its adjoint.
//
// Positions are stored as flat offsets into the ambient tensor (first index
// fastest); multi-index conversion happens on demand.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "rmtc/tensor.hpp"

namespace rmtc {

class SampleSet {
public:
    SampleSet() = default;

    explicit SampleSet(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
        ambient_ = 1;
        for (std::size_t d : dims_) {
            if (d == 0) throw std::invalid_argument("SampleSet: every extent must be >= 1");
            ambient_ *= d;
        }
        if (dims_.empty()) throw std::invalid_argument("SampleSet: order must be >= 1");
    }

    const std::vector<std::size_t>& dims() const noexcept { return dims_; }
    std::size_t ambient_size() const noexcept { return ambient_; }
    std::size_t size() const noexcept { return flat_.size(); }
    bool empty() const noexcept { return flat_.empty(); }

    std::span<const std::size_t> flat_indices() const noexcept { return flat_; }
    std::span<const double> values() const noexcept { return vals_; }

    void add_flat(std::size_t flat, double value) {
        if (flat >= ambient_)
            throw std::invalid_argument("SampleSet: flat index out of range");
        flat_.push_back(flat);
        vals_.push_back(value);
    }

    void add(std::span<const std::size_t> idx, double value) {
        std::size_t flat = 0, stride = 1;
        if (idx.size() != dims_.size())
            throw std::invalid_argument("SampleSet: multi-index order mismatch");
        for (std::size_t k = 0; k < dims_.size(); ++k) {
            if (idx[k] >= dims_[k])
                throw std::invalid_argument("SampleSet: index out of range in mode " +
                                            std::to_string(k));
            flat += idx[k] * stride;
            stride *= dims_[k];
        }
        flat_.push_back(flat);
        vals_.push_back(value);
    }

    std::vector<std::size_t> multi_index(std::size_t k) const {
        std::vector<std::size_t> idx(dims_.size());
        std::size_t flat = flat_[k];
        for (std::size_t m = 0; m < dims_.size(); ++m) {
            idx[m] = flat % dims_[m];
            flat /= dims_[m];
        }
        return idx;
    }

    // Positions unique, values finite. Throws on violation.
    void validate() const {
        std::unordered_set<std::size_t> seen;
        seen.reserve(flat_.size());
        for (std::size_t k = 0; k < flat_.size(); ++k) {
            if (!seen.insert(flat_[k]).second)
                throw std::invalid_argument("SampleSet: duplicate sample position");
            if (!std::isfinite(vals_[k]))
                throw std::invalid_argument("SampleSet: non-finite sample value");
        }
    }

    // A(X): the tensor's values at Omega, in sample order.
    std::vector<double> gather(const DenseTensor& t) const {
        require_dims(t);
        std::vector<double> out(flat_.size());
        for (std::size_t k = 0; k < flat_.size(); ++k) out[k] = t[flat_[k]];
        return out;
    }

    // A*(b): sampled values scattered into place, zeros elsewhere.
    DenseTensor scatter() const {
        DenseTensor t(dims_);
        for (std::size_t k = 0; k < flat_.size(); ++k) t[flat_[k]] = vals_[k];
        return t;
    }

    // ||A(X) - b||_2
    double misfit(const DenseTensor& t) const {
        require_dims(t);
        double acc = 0.0;
        for (std::size_t k = 0; k < flat_.size(); ++k) {
            const double d = t[flat_[k]] - vals_[k];
            acc += d * d;
        }
        return std::sqrt(acc);
    }

private:
    void require_dims(const DenseTensor& t) const {
        if (t.dims() != dims_)
            throw std::invalid_argument("SampleSet: tensor dims do not match sample dims");
    }

    std::vector<std::size_t> dims_;
    std::size_t ambient_ = 0;
    std::vector<std::size_t> flat_;
    std::vector<double> vals_;
};

}  // namespace rmtc
