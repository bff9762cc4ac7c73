#pragma once

#include <cstddef>
#include <vector>

#include "barow/errors.hpp"

namespace barow {

using Vector = std::vector<double>;

/// Dense row-major matrix of doubles. Small type, value semantics.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    /// Pointer to the start of row i.
    double* row(std::size_t i) { return data_.data() + i * cols_; }
    const double* row(std::size_t i) const { return data_.data() + i * cols_; }

    friend bool operator==(const Matrix& a, const Matrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

namespace linalg {

// Multiplication kernels. Parallelized over output elements with a fixed
// per-element accumulation order, so results do not depend on the thread
// count and match the serial reference bit for bit.

Matrix multiply(const Matrix& a, const Matrix& b);      // a * b
Matrix multiply_abt(const Matrix& a, const Matrix& b);  // a * b^T
Matrix multiply_atb(const Matrix& a, const Matrix& b);  // a^T * b
Vector multiply(const Matrix& a, const Vector& v);      // a * v
Vector multiply_t(const Matrix& a, const Vector& v);    // a^T * v

Matrix transpose(const Matrix& a);
void symmetrize(Matrix& a);             // a <- (a + a^T) / 2
void add_scaled_identity(Matrix& a, double s);
double trace(const Matrix& a);

double dot(const Vector& a, const Vector& b);
double norm2(const Vector& v);
double frobenius_norm(const Matrix& a);

/// Cholesky factorization a = L L^T of a symmetric positive-definite
/// matrix. Returns the lower factor. Throws NumericalError if a pivot is
/// not strictly positive.
Matrix cholesky(const Matrix& a);

Vector solve_lower(const Matrix& L, Vector b);    // L x = b
Vector solve_lower_t(const Matrix& L, Vector b);  // L^T x = b
Vector cholesky_solve(const Matrix& L, Vector b);
Matrix cholesky_solve(const Matrix& L, Matrix b);

/// 2 * sum(log L_ii): log-determinant of the matrix L was factored from.
double logdet_from_cholesky(const Matrix& L);

/// Eigenvalues of a symmetric matrix by cyclic Jacobi sweeps, ascending.
/// Used by invariant checks and tests; not on the update path.
std::vector<double> symmetric_eigenvalues(Matrix a);

namespace serial {

// Plain-loop reference implementations kept for kernel tests and the
// benchmark target.
Matrix multiply(const Matrix& a, const Matrix& b);
Matrix multiply_abt(const Matrix& a, const Matrix& b);
Matrix multiply_atb(const Matrix& a, const Matrix& b);
Vector multiply(const Matrix& a, const Vector& v);
Vector multiply_t(const Matrix& a, const Vector& v);
Matrix cholesky(const Matrix& a);

} // namespace serial

} // namespace linalg
} // namespace barow
