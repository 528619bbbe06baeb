#include <doctest.h>

#include "cpfix/error.hpp"
#include "cpfix/random.hpp"
#include "helpers.hpp"

using namespace cpfix;
using cpfix::test::pauli_x;

TEST_CASE("block structure") {
    BlockStructure s({2, 3});
    CHECK(s.hilbert_dim() == 5);
    CHECK(s.coord_dim() == 13);
    CHECK(s.coord_offset(1) == 4);
    CHECK_THROWS_AS(BlockStructure(std::vector<std::size_t>{}), Error);
    CHECK_THROWS_AS(BlockStructure({2, 0}), Error);
}

TEST_CASE("coordinates round-trip and trace inner product") {
    BlockStructure s({2, 3});
    Rng rng(1);
    const auto x = rng.unit_element(s);
    const auto y = rng.unit_element(s);
    const auto back = AlgebraElement::from_coords(s, x.coords());
    CHECK((back - x).norm() == 0.0);
    const Complex tr = (x.adjoint() * y).trace();
    CHECK(std::abs(inner(x, y) - tr) < 1e-12);
}

TEST_CASE("embed") {
    BlockStructure s({2, 1});
    AlgebraElement p(s, {CMatrix::identity(2), CMatrix(1, 1)});
    const CMatrix e = embed(p);
    CHECK(e(0, 0) == Complex(1.0));
    CHECK(e(1, 1) == Complex(1.0));
    CHECK(e(2, 2) == Complex(0.0));

    AlgebraElement x(s, {pauli_x(), CMatrix{{3.0}}});
    const CMatrix ex = embed(x);
    CHECK(ex(0, 1) == Complex(1.0));
    CHECK(ex(2, 2) == Complex(3.0));
    CHECK(op_norm(ex) == doctest::Approx(3.0));
    CHECK(x.norm() == doctest::Approx(3.0));
}

TEST_CASE("projection rounding") {
    BlockStructure s({2});
    AlgebraElement near(s, {CMatrix{{1.0 + 1e-8, 0.0}, {0.0, 1e-8}}});
    ProjectionElement p(near);
    CHECK(p.ranks()[0] == 1);
    CHECK((p.element().block(0) - CMatrix::unit(2, 0, 0)).max_abs() < 1e-15);
    AlgebraElement half(s, {CMatrix::identity(2) * 0.5});
    CHECK_THROWS_AS(ProjectionElement{half}, Error);
}

TEST_CASE("corner embeddings") {
    SUBCASE("p = 1") {
        BlockStructure s({2, 3});
        const auto emb = corner(s, ProjectionElement(AlgebraElement::identity(s)));
        CHECK(emb.corner == s);
        Rng rng(4);
        const auto x = rng.unit_element(s);
        CHECK((compress(emb, x) - x).norm() < 1e-15);
        CHECK((inject(emb, x) - x).norm() < 1e-15);
    }
    SUBCASE("M2 with p = E00") {
        BlockStructure s({2});
        const auto emb = corner(s, ProjectionElement(AlgebraElement::unit(s, 0, 0, 0)));
        CHECK(emb.corner == BlockStructure({1}));
        CHECK(std::abs(emb.isometries[0](0, 0)) == doctest::Approx(1.0));
        const CMatrix x{{1.0, 2.0}, {3.0, 4.0}};
        CHECK(compress(emb, cpfix::test::single(x)).block(0)(0, 0) == Complex(1.0));
        AlgebraElement y(emb.corner, {CMatrix{{Complex(5.0, 1.0)}}});
        const auto z = inject(emb, y).block(0);
        CHECK(z(0, 0) == Complex(5.0, 1.0));
        CHECK(z(1, 1) == Complex(0.0));
    }
    SUBCASE("M2+M2 with p = (I, 0) drops the second block") {
        BlockStructure s({2, 2});
        AlgebraElement p(s, {CMatrix::identity(2), CMatrix(2, 2)});
        const auto emb = corner(s, ProjectionElement(p));
        CHECK(emb.corner == BlockStructure({2}));
        REQUIRE(emb.block_map.size() == 1);
        CHECK(emb.block_map[0] == 0);
        CHECK_FALSE(emb.inverse_map[1].has_value());
    }
}

TEST_CASE("compression properties on random projections") {
    Rng rng(9);
    BlockStructure s({3, 2});
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<CMatrix> blocks;
        for (std::size_t b = 0; b < 2; ++b) {
            const auto n = s.dim(b);
            const CMatrix v = unitary_exp(rng.hermitian(n), 1.0);
            std::vector<double> d(n);
            for (auto& e : d) e = double(rng.uniform_index(2));
            blocks.push_back(v * CMatrix::diagonal(std::span<const double>(d)) * v.adjoint());
        }
        AlgebraElement pe(s, blocks);
        if (pe.trace().real() < 0.5) continue;
        ProjectionElement p(pe);
        const auto emb = corner(s, p);
        CHECK((compress(emb, p.element()) - AlgebraElement::identity(emb.corner)).norm() < 1e-12);
        for (int k = 0; k < 10; ++k) {
            const auto x = rng.unit_element(s);
            const auto y = rng.unit_element(emb.corner);
            CHECK(compress(emb, x).norm() <= x.norm() + 1e-12);
            CHECK((compress(emb, x.adjoint()) - compress(emb, x).adjoint()).norm() < 1e-12);
            CHECK((compress(emb, p.element() * x * p.element()) - compress(emb, x)).norm() < 1e-12);
            CHECK((compress(emb, inject(emb, y)) - y).norm() <= 1e-12);
            CHECK(inject(emb, y).norm() == doctest::Approx(y.norm()).epsilon(1e-12));
        }
    }
}

TEST_CASE("amplification") {
    BlockStructure s({2, 3});
    CHECK(amplify(s, 1) == s);
    CHECK(amplify(s, 2) == BlockStructure({4, 6}));

    Rng rng(6);
    const auto x = rng.unit_element(s);
    std::vector<AlgebraElement> entries(9, AlgebraElement(s));
    entries[5] = x * 2.5;
    CHECK(amplify_element(entries, 3).norm() == doctest::Approx(2.5).epsilon(1e-12));

    AlgebraElement p(s, {CMatrix::unit(2, 1, 1), CMatrix::identity(3)});
    const auto emb = corner(s, ProjectionElement(p));
    const std::size_t k = 2;
    std::vector<AlgebraElement> arr;
    for (std::size_t i = 0; i < k * k; ++i) arr.push_back(rng.unit_element(s));
    const auto entrywise = amplify_element(compress_entrywise(emb, arr), k);
    const auto direct = compress(amplify_corner(emb, k), amplify_element(arr, k));
    CHECK((entrywise - direct).norm() <= 1e-12);
}
