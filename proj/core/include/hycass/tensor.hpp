#pragma once

#include <cassert>
#include <cstdint>
#include <vector>

#include "hycass/error.hpp"

namespace hycass {

/// Element count of a shape, rejecting overflow past 2^31 elements.
inline int64_t shape_numel(const std::vector<int>& shape) {
    int64_t n = 1;
    for (int d : shape) {
        require(d >= 0, Err::invalid_argument, "negative tensor dimension");
        n *= d;
        require(n <= (int64_t(1) << 31), Err::dimension_overflow, "tensor too large");
    }
    return n;
}

/// Dense row-major tensor. Feature maps are {H, W, Ch}, conv kernels
/// {out, in, k, k}, linear weights {out, in}, vectors {n}.
template <typename T>
struct Tensor {
    std::vector<int> shape;
    std::vector<T> data;

    Tensor() = default;
    explicit Tensor(std::vector<int> s) : shape(std::move(s)), data(shape_numel(shape), T(0)) {}

    static Tensor zeros_like(const Tensor& other) { return Tensor(other.shape); }

    int rank() const { return int(shape.size()); }
    int dim(int i) const { return shape[size_t(i)]; }
    int64_t numel() const { return int64_t(data.size()); }

    T& operator[](int64_t i) { return data[size_t(i)]; }
    const T& operator[](int64_t i) const { return data[size_t(i)]; }

    T& at(int i, int j) {
        assert(rank() == 2);
        return data[size_t(i) * shape[1] + j];
    }
    const T& at(int i, int j) const {
        assert(rank() == 2);
        return data[size_t(i) * shape[1] + j];
    }
    T& at(int i, int j, int k) {
        assert(rank() == 3);
        return data[(size_t(i) * shape[1] + j) * shape[2] + k];
    }
    const T& at(int i, int j, int k) const {
        assert(rank() == 3);
        return data[(size_t(i) * shape[1] + j) * shape[2] + k];
    }
    T& at(int i, int j, int k, int l) {
        assert(rank() == 4);
        return data[((size_t(i) * shape[1] + j) * shape[2] + k) * shape[3] + l];
    }
    const T& at(int i, int j, int k, int l) const {
        assert(rank() == 4);
        return data[((size_t(i) * shape[1] + j) * shape[2] + k) * shape[3] + l];
    }

    bool same_shape(const Tensor& other) const { return shape == other.shape; }
};

template <typename To, typename From>
Tensor<To> tensor_cast(const Tensor<From>& src) {
    Tensor<To> out(src.shape);
    for (int64_t i = 0; i < src.numel(); ++i) out[i] = To(src[i]);
    return out;
}

}  // namespace hycass
