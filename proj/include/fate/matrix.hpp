#pragma once

#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

namespace fate {

// Dense row-major matrix of doubles. Rows are contiguous so the SIMD kernels
// can run over them directly.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), data(r * c, fill) {}

    double* row(std::size_t i) {
        assert(i < rows);
        return data.data() + i * cols;
    }
    const double* row(std::size_t i) const {
        assert(i < rows);
        return data.data() + i * cols;
    }
    std::span<double> row_span(std::size_t i) { return {row(i), cols}; }
    std::span<const double> row_span(std::size_t i) const { return {row(i), cols}; }

    double& at(std::size_t i, std::size_t j) {
        assert(i < rows && j < cols);
        return data[i * cols + j];
    }
    double at(std::size_t i, std::size_t j) const {
        assert(i < rows && j < cols);
        return data[i * cols + j];
    }

    bool operator==(const Matrix&) const = default;
};

}  // namespace fate
