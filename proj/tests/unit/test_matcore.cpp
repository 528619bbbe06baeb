#include <doctest.h>

#include "cpfix/error.hpp"
#include "cpfix/random.hpp"
#include "helpers.hpp"

using namespace cpfix;
using cpfix::test::pauli_x;

namespace {

double reconstruction_residual(const CMatrix& a, const EigenDecomposition& e) {
    const CMatrix d = CMatrix::diagonal(std::span<const double>(e.values));
    return (e.vectors * d * e.vectors.adjoint() - a).max_abs();
}

}  // namespace

TEST_CASE("matrix construction rejects bad shapes and non-finite entries") {
    CHECK_THROWS_AS(CMatrix(2, 2, std::vector<Complex>(3)), Error);
    CHECK_THROWS_AS(CMatrix(1, 1, {Complex(std::nan(""), 0.0)}), Error);
    const CMatrix a{{1.0, 2.0}, {3.0, 4.0}};
    CHECK(a(1, 0) == Complex(3.0));
    CHECK(a.transpose()(0, 1) == Complex(3.0));
    CHECK_THROWS_AS(a * CMatrix(3, 3), Error);
}

TEST_CASE("eig_hermitian on small fixed cases") {
    auto e = eig_hermitian(CMatrix::identity(2));
    CHECK(e.values[0] == doctest::Approx(1.0));
    CHECK(e.values[1] == doctest::Approx(1.0));
    CHECK((e.vectors.adjoint() * e.vectors - CMatrix::identity(2)).max_abs() < 1e-12);

    const double d[] = {3.0, -1.0};
    e = eig_hermitian(CMatrix::diagonal(std::span<const double>(d)));
    CHECK(e.values[0] == doctest::Approx(-1.0));
    CHECK(e.values[1] == doctest::Approx(3.0));

    e = eig_hermitian(pauli_x());
    CHECK(e.values[0] == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(e.values[1] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(reconstruction_residual(pauli_x(), e) < 1e-14);
}

TEST_CASE("eig_hermitian rejects non-Hermitian input") {
    const CMatrix a{{0.0, 1.0}, {0.0, 0.0}};
    CHECK_THROWS_AS(eig_hermitian(a), Error);
    try {
        eig_hermitian(a);
    } catch (const Error& err) {
        CHECK(err.kind() == ErrorKind::NotHermitian);
    }
}

TEST_CASE("eig_hermitian reconstructs random Hermitian matrices up to 12x12") {
    Rng rng(7);
    for (std::size_t n = 1; n <= 12; ++n) {
        for (int rep = 0; rep < 3; ++rep) {
            const CMatrix a = rng.hermitian(n);
            const auto e = eig_hermitian(a);
            CHECK(reconstruction_residual(a, e) <= 1e-10 * std::max(1.0, op_norm(a)));
            CHECK((e.vectors.adjoint() * e.vectors - CMatrix::identity(n)).max_abs() <= 1e-10);
            CHECK(std::is_sorted(e.values.begin(), e.values.end()));
        }
    }
}

TEST_CASE("eig_hermitian handles degenerate spectra") {
    Rng rng(3);
    const CMatrix v = unitary_exp(rng.hermitian(5), 1.0);
    const double d[] = {2.0, 2.0, 2.0, -1.0, -1.0};
    const CMatrix a = v * CMatrix::diagonal(std::span<const double>(d)) * v.adjoint();
    const auto e = eig_hermitian(a);
    CHECK(e.values[0] == doctest::Approx(-1.0));
    CHECK(e.values[4] == doctest::Approx(2.0));
    CHECK(reconstruction_residual(a, e) < 1e-12);
}

TEST_CASE("op_norm") {
    CHECK(op_norm(CMatrix(3, 3)) == 0.0);
    Rng rng(11);
    const CMatrix u = unitary_exp(rng.hermitian(4), 0.7);
    CHECK(op_norm(u) == doctest::Approx(1.0).epsilon(1e-12));
    const CMatrix a{{0.0, 2.0}, {0.0, 0.0}};
    CHECK(op_norm(a) == doctest::Approx(2.0).epsilon(1e-14));
    for (int k = 0; k < 50; ++k) {
        const CMatrix x = rng.gaussian(4, 4);
        const CMatrix y = rng.gaussian(4, 4);
        CHECK(op_norm(x * y) <= op_norm(x) * op_norm(y) + 1e-10);
    }
}

TEST_CASE("nullspace") {
    CHECK(nullspace(CMatrix::identity(3), 1e-9).empty());
    const auto all = nullspace(CMatrix(3, 3), 1e-9);
    REQUIRE(all.size() == 3);
    const double d[] = {0.0, 1.0, 2.0};
    const auto one = nullspace(CMatrix::diagonal(std::span<const double>(d)), 1e-9);
    REQUIRE(one.size() == 1);
    CHECK(std::abs(one[0][0]) == doctest::Approx(1.0));
    CHECK(std::abs(one[0][1]) < 1e-12);

    Rng rng(5);
    const CMatrix a = rng.gaussian(3, 6);
    const auto ker = nullspace(a, 1e-9);
    CHECK(ker.size() == 3);
    for (const auto& v : ker) CHECK(vector_norm((a * CMatrix::column(v)).col_vector(0)) <= 1e-9 * std::max(1.0, op_norm(a)));
}

TEST_CASE("psd_sqrt") {
    const double d[] = {4.0, 9.0};
    const CMatrix r = psd_sqrt(CMatrix::diagonal(std::span<const double>(d)));
    CHECK(r(0, 0).real() == doctest::Approx(2.0));
    CHECK(r(1, 1).real() == doctest::Approx(3.0));
    CHECK(psd_sqrt(CMatrix(2, 2)).max_abs() == 0.0);

    const CMatrix a{{2.0, 1.0}, {1.0, 2.0}};
    const CMatrix b = psd_sqrt(a);
    const auto e = eig_hermitian(b);
    CHECK(e.values[0] == doctest::Approx(1.0));
    CHECK(e.values[1] == doctest::Approx(std::sqrt(3.0)));
    CHECK((b * b - a).max_abs() <= 1e-9 * 3.0);

    const double neg[] = {1.0, -1e-3};
    CHECK_THROWS_AS(psd_sqrt(CMatrix::diagonal(std::span<const double>(neg))), Error);
    const double tiny[] = {1.0, -1e-12};
    CHECK_NOTHROW(psd_sqrt(CMatrix::diagonal(std::span<const double>(tiny))));

    Rng rng(2);
    for (int k = 0; k < 20; ++k) {
        const CMatrix g = rng.gaussian(5, 5);
        const CMatrix p = g * g.adjoint();
        const CMatrix s = psd_sqrt(p);
        CHECK((s * s - p).max_abs() <= 1e-9 * std::max(1.0, op_norm(p)));
    }
}

TEST_CASE("is_psd") {
    CHECK(is_psd(CMatrix::identity(2), 1e-10));
    const double d[] = {1.0, -1.0};
    CHECK_FALSE(is_psd(CMatrix::diagonal(std::span<const double>(d)), 1e-10));
    CHECK(is_psd(CMatrix{{1.0, 1.0}, {1.0, 1.0}}, 1e-10));
    CHECK_THROWS_AS(is_psd(CMatrix{{0.0, 1.0}, {0.0, 0.0}}, 1e-10), Error);
}

TEST_CASE("orthonormalize and distance_to_span") {
    std::vector<std::vector<Complex>> v = {{1.0, 1.0, 0.0}, {2.0, 2.0, 0.0}, {0.0, 1.0, 1.0}};
    const auto b = orthonormalize(v);
    REQUIRE(b.size() == 2);
    CHECK(std::abs(vector_norm(b[0]) - 1.0) < 1e-14);
    const std::vector<Complex> z = {0.0, 0.0, 1.0};
    CHECK(distance_to_span(v[2], b) < 1e-14);
    CHECK(distance_to_span(z, b) == doctest::Approx(std::sqrt(1.0 / 3.0)));
}
