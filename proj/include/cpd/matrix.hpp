#pragma once

#include <cstddef>
#include <initializer_list>
#include <optional>
#include <vector>

namespace cpd {

/// Dense real matrix, row-major. Sized for the small regression kernels this
/// library needs (K, M up to a few dozen); no sparse or blocked paths.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols);
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries);

    static Matrix identity(std::size_t n);
    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return entries_.empty(); }

    double& operator()(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }

    double* data() { return entries_.data(); }
    const double* data() const { return entries_.data(); }
    const std::vector<double>& entries() const { return entries_; }

    bool same_shape(const Matrix& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }

    Matrix& operator+=(const Matrix& other);
    Matrix& operator-=(const Matrix& other);
    Matrix& operator*=(double s);

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> entries_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(double s, Matrix m);
Matrix operator*(Matrix m, double s);

Matrix multiply(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& m);
double trace(const Matrix& m);
double max_abs(const Matrix& m);

/// sqrt(sum of squared entries); works for any rectangular matrix.
double frobenius_norm(const Matrix& m);

/// Gaussian elimination with partial pivoting. Throws SingularMatrixError when
/// a pivot falls below 1e-12 times the largest initial entry magnitude.
Matrix invert(const Matrix& m);

/// Solves A X = B for X (LU with partial pivoting, same pivot tolerance as invert).
Matrix solve(const Matrix& a, const Matrix& b);

/// Real vector with explicit dimension; entries must be finite on construction.
struct Vector {
    Vector() = default;
    explicit Vector(std::size_t dim);
    Vector(std::size_t dim, std::vector<double> entries);
    Vector(std::initializer_list<double> entries);

    std::size_t dim = 0;
    std::vector<double> entries;

    double& operator[](std::size_t i) { return entries[i]; }
    double operator[](std::size_t i) const { return entries[i]; }
};

/// Eigenvalues of a symmetric matrix, ascending. The input is symmetrized by
/// averaging before the cyclic Jacobi iteration; rotations run until the
/// off-diagonal norm drops below 1e-12 times the Frobenius norm.
Vector sym_eigenvalues(const Matrix& m);

/// Cholesky test: true iff the factorization succeeds with every pivot above
/// 1e-12 * trace(m) / rows.
bool is_positive_definite(const Matrix& m);

/// Lower-triangular Cholesky factor, or nullopt when the matrix is not
/// positive definite at the relative tolerance used by is_positive_definite.
std::optional<Matrix> cholesky(const Matrix& m);

/// Solves A X = B for symmetric positive definite A via Cholesky; throws
/// SingularMatrixError if the factorization fails.
Matrix solve_spd(const Matrix& a, const Matrix& b);

} // namespace cpd
