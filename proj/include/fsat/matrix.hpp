#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "fsat/errors.hpp"

namespace fsat {

// Dense row-major real matrix; rows are STFT frames, columns are bins.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> v;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), v(r * c, fill) {}

    double& at(std::size_t r, std::size_t c) { return v[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return v[r * cols + c]; }
    bool empty() const { return v.empty(); }

    bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }
};

struct ComplexMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::complex<double>> v;

    ComplexMatrix() = default;
    ComplexMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), v(r * c) {}

    std::complex<double>& at(std::size_t r, std::size_t c) { return v[r * cols + c]; }
    const std::complex<double>& at(std::size_t r, std::size_t c) const { return v[r * cols + c]; }
};

inline void require_same_shape(const Matrix& a, std::size_t rows, std::size_t cols, const char* what) {
    if (a.rows != rows || a.cols != cols)
        throw SizeError(std::string(what) + ": shape mismatch");
}

}  // namespace fsat
