#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "imperceptor/errors.hpp"

namespace imperceptor {

// Dense row-major tensor of doubles. Invariant: product(shape) == data.size().
struct Tensor {
    std::vector<int> shape;
    std::vector<double> data;

    Tensor() = default;

    explicit Tensor(std::vector<int> s) : shape(std::move(s)) {
        data.assign(static_cast<std::size_t>(count(shape)), 0.0);
    }

    Tensor(std::vector<int> s, std::vector<double> d)
        : shape(std::move(s)), data(std::move(d)) {
        if (static_cast<std::int64_t>(data.size()) != count(shape)) {
            throw ShapeError("tensor data length " + std::to_string(data.size()) +
                             " does not match shape " + shape_string(shape));
        }
    }

    static Tensor zeros(std::vector<int> s) { return Tensor(std::move(s)); }

    static Tensor full(std::vector<int> s, double value) {
        Tensor t(std::move(s));
        for (double& v : t.data) v = value;
        return t;
    }

    std::int64_t numel() const { return static_cast<std::int64_t>(data.size()); }

    bool same_shape(const Tensor& o) const { return shape == o.shape; }

    bool all_finite() const {
        for (double v : data) {
            if (!std::isfinite(v)) return false;
        }
        return true;
    }

    static std::int64_t count(const std::vector<int>& s) {
        std::int64_t n = 1;
        for (int d : s) {
            if (d <= 0) throw ShapeError("non-positive dimension in shape " + shape_string(s));
            n *= d;
        }
        return n;
    }

    static std::string shape_string(const std::vector<int>& s) {
        std::ostringstream os;
        os << "[";
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (i) os << "x";
            os << s[i];
        }
        os << "]";
        return os.str();
    }
};

// Gradient of a scalar with respect to one tensor; value has that tensor's shape.
struct Gradient {
    std::string with_respect_to;
    Tensor value;
};

}  // namespace imperceptor
