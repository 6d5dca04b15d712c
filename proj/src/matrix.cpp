#include "cpd/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "cpd/errors.hpp"

namespace cpd {

namespace {

void require_finite(const std::vector<double>& entries, const char* what) {
    for (double v : entries) {
        if (!std::isfinite(v)) {
            throw DimMismatchError(std::string(what) + ": non-finite entry");
        }
    }
}

} // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), entries_(rows * cols, 0.0) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (entries_.size() != rows_ * cols_) {
        throw DimMismatchError("Matrix: entry count does not match rows*cols");
    }
    require_finite(entries_, "Matrix");
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = 1.0;
    }
    return m;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows.begin()->size();
    Matrix m(r, c);
    std::size_t i = 0;
    for (const auto& row : rows) {
        if (row.size() != c) {
            throw DimMismatchError("Matrix::from_rows: ragged rows");
        }
        std::size_t j = 0;
        for (double v : row) {
            m(i, j++) = v;
        }
        ++i;
    }
    require_finite(m.entries_, "Matrix::from_rows");
    return m;
}

Matrix& Matrix::operator+=(const Matrix& other) {
    if (!same_shape(other)) {
        throw DimMismatchError("Matrix::operator+=: shape mismatch");
    }
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        entries_[i] += other.entries_[i];
    }
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
    if (!same_shape(other)) {
        throw DimMismatchError("Matrix::operator-=: shape mismatch");
    }
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        entries_[i] -= other.entries_[i];
    }
    return *this;
}

Matrix& Matrix::operator*=(double s) {
    for (double& v : entries_) {
        v *= s;
    }
    return *this;
}

Matrix operator+(Matrix a, const Matrix& b) {
    a += b;
    return a;
}

Matrix operator-(Matrix a, const Matrix& b) {
    a -= b;
    return a;
}

Matrix operator*(double s, Matrix m) {
    m *= s;
    return m;
}

Matrix operator*(Matrix m, double s) {
    m *= s;
    return m;
}

Matrix multiply(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw DimMismatchError("multiply: inner dimensions differ");
    }
    Matrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) {
                continue;
            }
            for (std::size_t j = 0; j < b.cols(); ++j) {
                out(i, j) += aik * b(k, j);
            }
        }
    }
    return out;
}

Matrix transpose(const Matrix& m) {
    Matrix out(m.cols(), m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            out(j, i) = m(i, j);
        }
    }
    return out;
}

double trace(const Matrix& m) {
    if (m.rows() != m.cols()) {
        throw NotSquareError("trace: matrix is not square");
    }
    double t = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        t += m(i, i);
    }
    return t;
}

double max_abs(const Matrix& m) {
    double v = 0.0;
    for (double e : m.entries()) {
        v = std::max(v, std::abs(e));
    }
    return v;
}

double frobenius_norm(const Matrix& m) {
    double s = 0.0;
    for (double e : m.entries()) {
        s += e * e;
    }
    return std::sqrt(s);
}

namespace {

// LU elimination on the augmented block [A | B], reducing A to identity.
// Shared by invert() and solve().
Matrix gauss_solve(Matrix a, Matrix b) {
    if (a.rows() != a.cols()) {
        throw NotSquareError("solve: coefficient matrix is not square");
    }
    if (a.rows() != b.rows()) {
        throw DimMismatchError("solve: right-hand side row count mismatch");
    }
    const std::size_t n = a.rows();
    const std::size_t m = b.cols();
    const double tol = 1e-12 * max_abs(a);

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        double best = std::abs(a(col, col));
        for (std::size_t r = col + 1; r < n; ++r) {
            const double v = std::abs(a(r, col));
            if (v > best) {
                best = v;
                pivot = r;
            }
        }
        if (best < tol || best == 0.0) {
            throw SingularMatrixError("solve: pivot below tolerance (degenerate system)");
        }
        if (pivot != col) {
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(a(col, j), a(pivot, j));
            }
            for (std::size_t j = 0; j < m; ++j) {
                std::swap(b(col, j), b(pivot, j));
            }
        }
        const double inv_piv = 1.0 / a(col, col);
        for (std::size_t j = col; j < n; ++j) {
            a(col, j) *= inv_piv;
        }
        for (std::size_t j = 0; j < m; ++j) {
            b(col, j) *= inv_piv;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) {
                continue;
            }
            const double f = a(r, col);
            if (f == 0.0) {
                continue;
            }
            for (std::size_t j = col; j < n; ++j) {
                a(r, j) -= f * a(col, j);
            }
            for (std::size_t j = 0; j < m; ++j) {
                b(r, j) -= f * b(col, j);
            }
        }
    }
    return b;
}

} // namespace

Matrix invert(const Matrix& m) {
    if (m.rows() != m.cols()) {
        throw NotSquareError("invert: matrix is not square");
    }
    return gauss_solve(m, Matrix::identity(m.rows()));
}

Matrix solve(const Matrix& a, const Matrix& b) {
    return gauss_solve(a, b);
}

Vector::Vector(std::size_t d) : dim(d), entries(d, 0.0) {}

Vector::Vector(std::size_t d, std::vector<double> e) : dim(d), entries(std::move(e)) {
    if (entries.size() != dim) {
        throw DimMismatchError("Vector: entry count does not match dim");
    }
    require_finite(entries, "Vector");
}

Vector::Vector(std::initializer_list<double> e) : dim(e.size()), entries(e) {
    require_finite(entries, "Vector");
}

Vector sym_eigenvalues(const Matrix& m) {
    if (m.rows() != m.cols()) {
        throw NotSquareError("sym_eigenvalues: matrix is not square");
    }
    const std::size_t n = m.rows();
    // Symmetrize by averaging; D(t)-type inputs are symmetric up to roundoff.
    Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            a(i, j) = 0.5 * (m(i, j) + m(j, i));
        }
    }

    const double stop = 1e-12 * frobenius_norm(a);
    const int max_sweeps = 64;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                off += 2.0 * a(i, j) * a(i, j);
            }
        }
        if (std::sqrt(off) <= stop) {
            break;
        }
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) {
                    continue;
                }
                const double app = a(p, p);
                const double aqq = a(q, q);
                const double tau = (aqq - app) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
        }
    }

    Vector ev(n);
    for (std::size_t i = 0; i < n; ++i) {
        ev[i] = a(i, i);
    }
    std::sort(ev.entries.begin(), ev.entries.end());
    return ev;
}

std::optional<Matrix> cholesky(const Matrix& m) {
    if (m.rows() != m.cols()) {
        throw NotSquareError("cholesky: matrix is not square");
    }
    const std::size_t n = m.rows();
    double tr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        tr += m(i, i);
    }
    const double tol = n > 0 ? 1e-12 * tr / static_cast<double>(n) : 0.0;

    Matrix l(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = m(i, j);
            for (std::size_t k = 0; k < j; ++k) {
                s -= l(i, k) * l(j, k);
            }
            if (i == j) {
                if (s <= tol || s <= 0.0) {
                    return std::nullopt;
                }
                l(i, i) = std::sqrt(s);
            } else {
                l(i, j) = s / l(j, j);
            }
        }
    }
    return l;
}

bool is_positive_definite(const Matrix& m) {
    return cholesky(m).has_value();
}

Matrix solve_spd(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) {
        throw DimMismatchError("solve_spd: right-hand side row count mismatch");
    }
    auto l = cholesky(a);
    if (!l) {
        throw SingularMatrixError("solve_spd: matrix is not positive definite");
    }
    const std::size_t n = a.rows();
    const std::size_t m = b.cols();
    Matrix x = b;
    // Forward substitution L y = b.
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            double s = x(i, j);
            for (std::size_t k = 0; k < i; ++k) {
                s -= (*l)(i, k) * x(k, j);
            }
            x(i, j) = s / (*l)(i, i);
        }
    }
    // Back substitution L^T x = y.
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t ii = n; ii-- > 0;) {
            double s = x(ii, j);
            for (std::size_t k = ii + 1; k < n; ++k) {
                s -= (*l)(k, ii) * x(k, j);
            }
            x(ii, j) = s / (*l)(ii, ii);
        }
    }
    return x;
}

} // namespace cpd
