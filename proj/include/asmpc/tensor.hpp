#pragma once

// Dense row-major tensor of 64-bit floats. Rank is dynamic but in practice
// everything in this library is rank 1 or 2 and small (<= a few hundred
// elements), so storage is a plain vector and all loops are scalar.

#include <cmath>
#include <cstddef>
#include <sstream>
#include <string>
#include <vector>

#include "asmpc/error.hpp"
#include "asmpc/rng.hpp"

namespace asmpc {

class Tensor {
public:
    Tensor() = default;

    explicit Tensor(std::vector<std::size_t> shape)
        : shape_(std::move(shape)), v_(count(shape_), 0.0) {}

    Tensor(std::vector<std::size_t> shape, std::vector<double> values)
        : shape_(std::move(shape)), v_(std::move(values)) {
        if (v_.size() != count(shape_))
            throw ContractError("Tensor: value count " + std::to_string(v_.size()) +
                                " does not match shape " + shape_str());
    }

    static Tensor scalar(double v) { return Tensor({1}, {v}); }
    static Tensor vec(std::vector<double> v) {
        const std::size_t n = v.size();
        return Tensor({n}, std::move(v));
    }
    static Tensor mat(std::size_t rows, std::size_t cols, std::vector<double> v) {
        return Tensor({rows, cols}, std::move(v));
    }
    static Tensor zeros(std::vector<std::size_t> shape) { return Tensor(std::move(shape)); }
    static Tensor full(std::vector<std::size_t> shape, double fill) {
        Tensor t(std::move(shape));
        for (auto& x : t.v_) x = fill;
        return t;
    }

    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t rank() const { return shape_.size(); }
    std::size_t dim(std::size_t i) const { return shape_[i]; }
    std::size_t size() const { return v_.size(); }

    double operator[](std::size_t i) const { return v_[i]; }
    double& operator[](std::size_t i) { return v_[i]; }
    double at(std::size_t r, std::size_t c) const { return v_[r * shape_[1] + c]; }
    double& at(std::size_t r, std::size_t c) { return v_[r * shape_[1] + c]; }

    const std::vector<double>& values() const { return v_; }
    std::vector<double>& values() { return v_; }

    bool all_finite() const {
        for (double x : v_)
            if (!std::isfinite(x)) return false;
        return true;
    }

    bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }

    std::string shape_str() const {
        std::ostringstream os;
        os << "[";
        for (std::size_t i = 0; i < shape_.size(); ++i) os << (i ? "x" : "") << shape_[i];
        os << "]";
        return os.str();
    }

private:
    static std::size_t count(const std::vector<std::size_t>& shape) {
        std::size_t n = 1;
        for (auto d : shape) n *= d;
        return n;
    }

    std::vector<std::size_t> shape_;
    std::vector<double> v_;
};

inline Tensor randn(std::vector<std::size_t> shape, RngStream& rng, double stddev = 1.0) {
    Tensor t(std::move(shape));
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = stddev * rng.normal();
    return t;
}

}  // namespace asmpc
