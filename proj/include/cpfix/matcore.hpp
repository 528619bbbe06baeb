#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace cpfix {

using Complex = std::complex<double>;

/// Default tolerances shared across the kernel.
inline constexpr double kHermitianTol = 1e-9;
inline constexpr double kPsdTol = 1e-10;

/// Dense complex matrix, row-major.
class CMatrix {
public:
    CMatrix() = default;
    CMatrix(std::size_t rows, std::size_t cols);
    /// Takes ownership of row-major entries; throws ShapeMismatch or
    /// InvalidArgument (non-finite entry).
    CMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries);
    CMatrix(std::initializer_list<std::initializer_list<Complex>> rows);

    static CMatrix identity(std::size_t n);
    static CMatrix zeros(std::size_t rows, std::size_t cols) { return CMatrix(rows, cols); }
    static CMatrix diagonal(std::span<const Complex> d);
    static CMatrix diagonal(std::span<const double> d);
    /// Matrix unit E_{ij} of size n x n.
    static CMatrix unit(std::size_t n, std::size_t i, std::size_t j);
    static CMatrix column(std::span<const Complex> v);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool is_square() const noexcept { return rows_ == cols_; }
    bool empty() const noexcept { return data_.empty(); }

    Complex& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const Complex& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<Complex> data() noexcept { return data_; }
    std::span<const Complex> data() const noexcept { return data_; }

    CMatrix adjoint() const;
    CMatrix transpose() const;
    CMatrix col(std::size_t j) const;
    std::vector<Complex> col_vector(std::size_t j) const;
    void set_col(std::size_t j, std::span<const Complex> v);
    /// Sub-block starting at (r0, c0).
    CMatrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
    void set_block(std::size_t r0, std::size_t c0, const CMatrix& b);

    Complex trace() const;
    double frobenius_norm() const;
    double max_abs() const;
    bool all_finite() const;

    CMatrix& operator+=(const CMatrix& o);
    CMatrix& operator-=(const CMatrix& o);
    CMatrix& operator*=(Complex s);

    friend CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
    friend CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
    friend CMatrix operator*(CMatrix a, Complex s) { return a *= s; }
    friend CMatrix operator*(Complex s, CMatrix a) { return a *= s; }
    friend CMatrix operator*(const CMatrix& a, const CMatrix& b);
    friend CMatrix operator-(CMatrix a) { return a *= -1.0; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Complex> data_;
};

/// Hermitian inner product tr(a* b) of two equally shaped matrices.
Complex inner(const CMatrix& a, const CMatrix& b);
CMatrix kron(const CMatrix& a, const CMatrix& b);
/// Vertical concatenation of equally wide matrices.
CMatrix vstack(std::span<const CMatrix> parts);
/// Columns gathered into one matrix.
CMatrix hstack_columns(std::span<const std::vector<Complex>> columns, std::size_t rows);

double hermitian_defect(const CMatrix& a);

struct EigenDecomposition {
    std::vector<double> values;  // ascending
    CMatrix vectors;             // unitary, column k pairs with values[k]
    int sweeps = 0;
};

/// Cyclic Jacobi eigensolver for complex Hermitian matrices.
EigenDecomposition eig_hermitian(const CMatrix& a, double hermitian_tol = kHermitianTol,
                                 int max_sweeps = 100);

/// Largest singular value.
double op_norm(const CMatrix& a);

/// Orthonormal basis of the approximate kernel of L: right singular vectors
/// whose singular value is at most tol * max(1, ||L||).
std::vector<std::vector<Complex>> nullspace(const CMatrix& l, double tol);

/// Hermitian PSD square root; eigenvalues in [-psd_tol, 0) are clamped to 0.
CMatrix psd_sqrt(const CMatrix& a, double psd_tol = kPsdTol);

/// Smallest eigenvalue of a Hermitian matrix.
double min_eigenvalue(const CMatrix& a, double hermitian_tol = kHermitianTol);

bool is_psd(const CMatrix& a, double tol, double hermitian_tol = kHermitianTol);

/// Orthonormalize vectors (modified Gram-Schmidt, two passes), dropping any
/// whose residual falls below drop_tol relative to its original norm.
std::vector<std::vector<Complex>> orthonormalize(std::span<const std::vector<Complex>> vectors,
                                                 double drop_tol = 1e-8);

/// Distance from v to span(basis); basis must be orthonormal.
double distance_to_span(std::span<const Complex> v, std::span<const std::vector<Complex>> basis);

double vector_norm(std::span<const Complex> v);

} // namespace cpfix
