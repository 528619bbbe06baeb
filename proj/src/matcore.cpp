#include "cpfix/matcore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "cpfix/error.hpp"

namespace cpfix {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::NotPSD: return "NotPSD";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::NotProjection: return "NotProjection";
    case ErrorKind::NotUnitary: return "NotUnitary";
    case ErrorKind::NotCP: return "NotCP";
    case ErrorKind::NotContractive: return "NotContractive";
    case ErrorKind::NotEndomorphism: return "NotEndomorphism";
    case ErrorKind::NotCommuting: return "NotCommuting";
    case ErrorKind::CoInvarianceViolated: return "CoInvarianceViolated";
    case ErrorKind::SemigroupLawViolated: return "SemigroupLawViolated";
    case ErrorKind::NotMinimal: return "NotMinimal";
    case ErrorKind::Divergent: return "Divergent";
    case ErrorKind::NotInCStar: return "NotInCStar";
    case ErrorKind::NotFixed: return "NotFixed";
    case ErrorKind::Inconsistent: return "Inconsistent";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ValidationFailed: return "ValidationFailed";
    case ErrorKind::UnknownFamily: return "UnknownFamily";
    }
    return "Unknown";
}

CMatrix::CMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, Complex{0.0, 0.0}) {}

CMatrix::CMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != rows * cols)
        throw Error(ErrorKind::ShapeMismatch, "entry count " + std::to_string(data_.size()) +
                                                  " != " + std::to_string(rows) + "x" +
                                                  std::to_string(cols));
    if (!all_finite()) throw Error(ErrorKind::InvalidArgument, "non-finite matrix entry");
}

CMatrix::CMatrix(std::initializer_list<std::initializer_list<Complex>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) throw Error(ErrorKind::ShapeMismatch, "ragged initializer");
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

CMatrix CMatrix::identity(std::size_t n) {
    CMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

CMatrix CMatrix::diagonal(std::span<const Complex> d) {
    CMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
}

CMatrix CMatrix::diagonal(std::span<const double> d) {
    CMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
}

CMatrix CMatrix::unit(std::size_t n, std::size_t i, std::size_t j) {
    CMatrix m(n, n);
    m(i, j) = 1.0;
    return m;
}

CMatrix CMatrix::column(std::span<const Complex> v) {
    return CMatrix(v.size(), 1, std::vector<Complex>(v.begin(), v.end()));
}

CMatrix CMatrix::adjoint() const {
    CMatrix r(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) r(j, i) = std::conj((*this)(i, j));
    return r;
}

CMatrix CMatrix::transpose() const {
    CMatrix r(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
    return r;
}

CMatrix CMatrix::col(std::size_t j) const {
    CMatrix c(rows_, 1);
    for (std::size_t i = 0; i < rows_; ++i) c(i, 0) = (*this)(i, j);
    return c;
}

std::vector<Complex> CMatrix::col_vector(std::size_t j) const {
    std::vector<Complex> v(rows_);
    for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
    return v;
}

void CMatrix::set_col(std::size_t j, std::span<const Complex> v) {
    if (v.size() != rows_) throw Error(ErrorKind::ShapeMismatch, "column length");
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
}

CMatrix CMatrix::block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
    if (r0 + nr > rows_ || c0 + nc > cols_) throw Error(ErrorKind::ShapeMismatch, "block range");
    CMatrix b(nr, nc);
    for (std::size_t i = 0; i < nr; ++i)
        for (std::size_t j = 0; j < nc; ++j) b(i, j) = (*this)(r0 + i, c0 + j);
    return b;
}

void CMatrix::set_block(std::size_t r0, std::size_t c0, const CMatrix& b) {
    if (r0 + b.rows() > rows_ || c0 + b.cols() > cols_)
        throw Error(ErrorKind::ShapeMismatch, "block range");
    for (std::size_t i = 0; i < b.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) (*this)(r0 + i, c0 + j) = b(i, j);
}

Complex CMatrix::trace() const {
    Complex t = 0.0;
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
    return t;
}

double CMatrix::frobenius_norm() const {
    double s = 0.0;
    for (const auto& z : data_) s += std::norm(z);
    return std::sqrt(s);
}

double CMatrix::max_abs() const {
    double m = 0.0;
    for (const auto& z : data_) m = std::max(m, std::abs(z));
    return m;
}

bool CMatrix::all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](const Complex& z) {
        return std::isfinite(z.real()) && std::isfinite(z.imag());
    });
}

CMatrix& CMatrix::operator+=(const CMatrix& o) {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw Error(ErrorKind::ShapeMismatch, "operator+");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& o) {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw Error(ErrorKind::ShapeMismatch, "operator-");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
}

CMatrix& CMatrix::operator*=(Complex s) {
    for (auto& z : data_) z *= s;
    return *this;
}

CMatrix operator*(const CMatrix& a, const CMatrix& b) {
    if (a.cols_ != b.rows_)
        throw Error(ErrorKind::ShapeMismatch, std::to_string(a.rows_) + "x" +
                                                  std::to_string(a.cols_) + " * " +
                                                  std::to_string(b.rows_) + "x" +
                                                  std::to_string(b.cols_));
    CMatrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
        Complex* crow = &c.data_[i * c.cols_];
        for (std::size_t k = 0; k < a.cols_; ++k) {
            const Complex aik = a.data_[i * a.cols_ + k];
            if (aik == Complex{}) continue;
            const Complex* brow = &b.data_[k * b.cols_];
            for (std::size_t j = 0; j < b.cols_; ++j) crow[j] += aik * brow[j];
        }
    }
    return c;
}

Complex inner(const CMatrix& a, const CMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw Error(ErrorKind::ShapeMismatch, "inner");
    Complex s = 0.0;
    auto da = a.data();
    auto db = b.data();
    for (std::size_t k = 0; k < da.size(); ++k) s += std::conj(da[k]) * db[k];
    return s;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix r(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            for (std::size_t k = 0; k < b.rows(); ++k)
                for (std::size_t l = 0; l < b.cols(); ++l)
                    r(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
    return r;
}

CMatrix vstack(std::span<const CMatrix> parts) {
    if (parts.empty()) return {};
    std::size_t rows = 0;
    const std::size_t cols = parts.front().cols();
    for (const auto& p : parts) {
        if (p.cols() != cols) throw Error(ErrorKind::ShapeMismatch, "vstack");
        rows += p.rows();
    }
    CMatrix r(rows, cols);
    std::size_t r0 = 0;
    for (const auto& p : parts) {
        r.set_block(r0, 0, p);
        r0 += p.rows();
    }
    return r;
}

CMatrix hstack_columns(std::span<const std::vector<Complex>> columns, std::size_t rows) {
    CMatrix r(rows, columns.size());
    for (std::size_t j = 0; j < columns.size(); ++j) r.set_col(j, columns[j]);
    return r;
}

double hermitian_defect(const CMatrix& a) {
    if (!a.is_square()) return std::numeric_limits<double>::infinity();
    double d = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i; j < a.cols(); ++j)
            d = std::max(d, std::abs(a(i, j) - std::conj(a(j, i))));
    return d;
}

EigenDecomposition eig_hermitian(const CMatrix& input, double hermitian_tol, int max_sweeps) {
    if (!input.is_square()) throw Error(ErrorKind::ShapeMismatch, "eig_hermitian needs a square matrix");
    const std::size_t n = input.rows();
    const double scale = std::max(1.0, input.max_abs());
    if (hermitian_defect(input) > hermitian_tol * scale)
        throw Error(ErrorKind::NotHermitian,
                    "defect " + std::to_string(hermitian_defect(input)));

    // Work on the exactly Hermitian part.
    CMatrix a(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        a(i, i) = input(i, i).real();
        for (std::size_t j = i + 1; j < n; ++j) {
            const Complex v = 0.5 * (input(i, j) + std::conj(input(j, i)));
            a(i, j) = v;
            a(j, i) = std::conj(v);
        }
    }
    CMatrix v = CMatrix::identity(n);

    const double fro = a.frobenius_norm();
    const double skip = std::numeric_limits<double>::epsilon() * 1e-2 * std::max(fro, 1e-300);

    int sweep = 0;
    for (; sweep < max_sweeps; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const Complex apq = a(p, q);
                const double mag = std::abs(apq);
                if (mag <= skip) continue;
                rotated = true;
                const Complex phase = apq / mag;
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                const double theta = (aqq - app) / (2.0 * mag);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                // J = D R with D = diag(1, conj(phase)) on (p, q).
                const Complex jpp = c;
                const Complex jpq = s;
                const Complex jqp = -s * std::conj(phase);
                const Complex jqq = c * std::conj(phase);
                for (std::size_t k = 0; k < n; ++k) {
                    const Complex akp = a(k, p);
                    const Complex akq = a(k, q);
                    a(k, p) = akp * jpp + akq * jqp;
                    a(k, q) = akp * jpq + akq * jqq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const Complex apk = a(p, k);
                    const Complex aqk = a(q, k);
                    a(p, k) = std::conj(jpp) * apk + std::conj(jqp) * aqk;
                    a(q, k) = std::conj(jpq) * apk + std::conj(jqq) * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                a(p, p) = app - t * mag;
                a(q, q) = aqq + t * mag;
                for (std::size_t k = 0; k < n; ++k) {
                    const Complex vkp = v(k, p);
                    const Complex vkq = v(k, q);
                    v(k, p) = vkp * jpp + vkq * jqp;
                    v(k, q) = vkp * jpq + vkq * jqq;
                }
            }
        }
        if (!rotated) break;
    }
    if (sweep == max_sweeps)
        throw Error(ErrorKind::NoConvergence,
                    "Jacobi did not converge in " + std::to_string(max_sweeps) + " sweeps");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        return a(i, i).real() < a(j, j).real();
    });
    EigenDecomposition out;
    out.values.resize(n);
    out.vectors = CMatrix(n, n);
    out.sweeps = sweep;
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = a(order[k], order[k]).real();
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
    }
    return out;
}

double op_norm(const CMatrix& a) {
    if (a.empty()) return 0.0;
    const CMatrix gram = a.rows() < a.cols() ? a * a.adjoint() : a.adjoint() * a;
    const auto e = eig_hermitian(gram, std::numeric_limits<double>::infinity());
    return std::sqrt(std::max(0.0, e.values.back()));
}

std::vector<std::vector<Complex>> nullspace(const CMatrix& l, double tol) {
    if (!(tol > 0)) throw Error(ErrorKind::InvalidArgument, "nullspace tol must be positive");
    const std::size_t n = l.cols();
    if (n == 0) return {};
    const CMatrix gram = l.adjoint() * l;
    const auto e = eig_hermitian(gram, std::numeric_limits<double>::infinity());
    const double norm = std::sqrt(std::max(0.0, e.values.back()));
    const double threshold = tol * std::max(1.0, norm);
    std::vector<std::vector<Complex>> basis;
    // Singular values are re-measured as ||L v|| directly: the Gram spectrum
    // only resolves them down to sqrt(eps) * ||L||.
    for (std::size_t k = 0; k < n; ++k) {
        if (e.values[k] > 4.0 * threshold * threshold + 1e-14 * norm * norm) break;
        auto vk = e.vectors.col_vector(k);
        const CMatrix lv = l * CMatrix::column(vk);
        if (lv.frobenius_norm() <= threshold) basis.push_back(std::move(vk));
    }
    return basis;
}

CMatrix psd_sqrt(const CMatrix& a, double psd_tol) {
    const auto e = eig_hermitian(a);
    const double scale = std::max(1.0, std::abs(e.values.empty() ? 0.0 : e.values.back()));
    const std::size_t n = a.rows();
    CMatrix d(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        double lam = e.values[k];
        if (lam < -psd_tol * scale)
            throw Error(ErrorKind::NotPSD, "eigenvalue " + std::to_string(lam));
        d(k, k) = std::sqrt(std::max(0.0, lam));
    }
    CMatrix r = e.vectors * d * e.vectors.adjoint();
    // Restore exact Hermitian symmetry lost to roundoff.
    for (std::size_t i = 0; i < n; ++i) {
        r(i, i) = r(i, i).real();
        for (std::size_t j = i + 1; j < n; ++j) {
            const Complex v = 0.5 * (r(i, j) + std::conj(r(j, i)));
            r(i, j) = v;
            r(j, i) = std::conj(v);
        }
    }
    return r;
}

double min_eigenvalue(const CMatrix& a, double hermitian_tol) {
    if (a.empty()) return 0.0;
    return eig_hermitian(a, hermitian_tol).values.front();
}

bool is_psd(const CMatrix& a, double tol, double hermitian_tol) {
    return min_eigenvalue(a, hermitian_tol) >= -tol;
}

double vector_norm(std::span<const Complex> v) {
    double s = 0.0;
    for (const auto& z : v) s += std::norm(z);
    return std::sqrt(s);
}

std::vector<std::vector<Complex>> orthonormalize(std::span<const std::vector<Complex>> vectors,
                                                 double drop_tol) {
    std::vector<std::vector<Complex>> basis;
    for (const auto& v0 : vectors) {
        const double n0 = vector_norm(v0);
        if (n0 == 0.0) continue;
        std::vector<Complex> v = v0;
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& b : basis) {
                Complex c = 0.0;
                for (std::size_t i = 0; i < v.size(); ++i) c += std::conj(b[i]) * v[i];
                for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * b[i];
            }
        }
        const double n1 = vector_norm(v);
        if (n1 <= drop_tol * n0) continue;
        for (auto& z : v) z /= n1;
        basis.push_back(std::move(v));
    }
    return basis;
}

double distance_to_span(std::span<const Complex> v, std::span<const std::vector<Complex>> basis) {
    std::vector<Complex> r(v.begin(), v.end());
    for (int pass = 0; pass < 2; ++pass) {
        for (const auto& b : basis) {
            Complex c = 0.0;
            for (std::size_t i = 0; i < r.size(); ++i) c += std::conj(b[i]) * r[i];
            for (std::size_t i = 0; i < r.size(); ++i) r[i] -= c * b[i];
        }
    }
    return vector_norm(r);
}

} // namespace cpfix
