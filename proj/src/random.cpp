#include "cpfix/random.hpp"

#include <cmath>

namespace cpfix {

double Rng::uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
}

std::size_t Rng::uniform_index(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
}

Complex Rng::cnormal() {
    const double s = std::sqrt(0.5);
    const double re = normal_(engine_);
    const double im = normal_(engine_);
    return {s * re, s * im};
}

CMatrix Rng::gaussian(std::size_t rows, std::size_t cols) {
    CMatrix m(rows, cols);
    for (auto& z : m.data()) z = cnormal();
    return m;
}

CMatrix Rng::hermitian(std::size_t n) {
    const CMatrix g = gaussian(n, n);
    return (g + g.adjoint()) * 0.5;
}

std::vector<Complex> Rng::unit_vector(std::size_t n) {
    std::vector<Complex> v(n);
    for (auto& z : v) z = cnormal();
    const double nv = vector_norm(v);
    for (auto& z : v) z /= nv;
    return v;
}

AlgebraElement Rng::unit_element(const BlockStructure& s) {
    std::vector<CMatrix> b;
    for (auto n : s.dims()) b.push_back(gaussian(n, n));
    AlgebraElement x(s, std::move(b));
    const double nx = x.norm();
    if (nx > 0) x *= 1.0 / nx;
    return x;
}

CMatrix unitary_exp(const CMatrix& h, double t) {
    const auto e = eig_hermitian(h);
    std::vector<Complex> d;
    for (double lam : e.values) d.push_back(std::polar(1.0, t * lam));
    return e.vectors * CMatrix::diagonal(std::span<const Complex>(d)) * e.vectors.adjoint();
}

} // namespace cpfix
