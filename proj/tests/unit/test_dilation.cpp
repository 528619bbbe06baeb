#include <doctest.h>

#include "cpfix/dilation.hpp"
#include "cpfix/error.hpp"
#include "cpfix/fixpoint.hpp"
#include "cpfix/random.hpp"
#include "helpers.hpp"

using namespace cpfix;
using cpfix::test::pauli_x;

namespace {

AlgebraElement block_zero(const BlockStructure& s) {
    AlgebraElement p(s);
    p.block(0) = CMatrix::identity(s.dim(0));
    return p;
}

double superop_distance(const CPMap& a, const CPMap& b) {
    return (to_superoperator(a).matrix - to_superoperator(b).matrix).max_abs();
}

}  // namespace

TEST_CASE("co-invariance") {
    BlockStructure s({2, 2, 2});
    const auto inst = build_tail_shift(2, 2, pauli_x());
    CHECK(check_coinvariance(inst.alpha, ProjectionElement(AlgebraElement::identity(s))));
    CHECK(check_coinvariance(inst.alpha, inst.p));
    const auto defect = apply(inst.alpha.generators()[0], AlgebraElement::identity(s) - inst.p.element());
    AlgebraElement expect(s);
    expect.block(2) = CMatrix::identity(2);
    CHECK((defect - expect).norm() == 0.0);

    Rng rng(3);
    BlockStructure m3({3});
    const auto u = AlgebraElement(m3, {unitary_exp(rng.hermitian(3), 1.0)});
    const auto fam = SemigroupFamily::create({conjugation(u)}, true);
    CHECK_FALSE(check_coinvariance(fam, ProjectionElement(AlgebraElement::unit(m3, 0, 0, 0))));
    CHECK_THROWS_AS(make_dilation({conjugation(u)}, AlgebraElement::unit(m3, 0, 0, 0)), Error);
}

TEST_CASE("minimality verdicts") {
    const auto inst = build_tail_shift(2, 2, pauli_x());
    const auto& s = inst.ambient;
    auto r = check_minimality(inst.alpha, ProjectionElement(AlgebraElement::identity(s)));
    CHECK(r.verdict == Minimality::Minimal);
    CHECK(r.steps == 0);

    CHECK(inst.minimality.verdict == Minimality::Minimal);
    CHECK(inst.minimality.steps == 2);
    CHECK(inst.minimality.limit.norm() == 0.0);
    CHECK(inst.minimality.monotone_margin >= -1e-12);

    BlockStructure m2({2});
    const auto fam = SemigroupFamily::create({identity_map(m2)}, true);
    const ProjectionElement p(AlgebraElement::unit(m2, 0, 0, 0));
    r = check_minimality(fam, p);
    CHECK(r.verdict == Minimality::NonMinimal);
    CHECK((r.limit - (AlgebraElement::identity(m2) - p.element())).norm() == 0.0);
}

TEST_CASE("compression to the corner") {
    const auto inst = build_tail_shift(2, 2, pauli_x());
    CHECK(inst.embedding.corner == BlockStructure({2}));
    const auto ad = conjugation(cpfix::test::single(pauli_x()));
    CHECK(superop_distance(inst.phi.generators()[0], ad) <= 1e-10);

    const auto whole = make_dilation({inst.alpha.generators()[0]}, AlgebraElement::identity(inst.ambient));
    CHECK(superop_distance(whole.phi.generators()[0], inst.alpha.generators()[0]) <= 1e-15);

    // Ad_u on M3 with u commuting with p: a single compressed Kraus operator of norm <= 1.
    BlockStructure m3({3});
    Rng rng(5);
    CMatrix u = CMatrix::identity(3);
    u.set_block(1, 1, unitary_exp(rng.hermitian(2), 0.7));
    AlgebraElement p(m3, {CMatrix::identity(3) - CMatrix::unit(3, 0, 0)});
    const auto di = make_dilation({conjugation(AlgebraElement(m3, {u}))}, p);
    REQUIRE(di.phi.generators()[0].kraus(0, 0).size() == 1);
    CHECK(op_norm(di.phi.generators()[0].kraus(0, 0)[0]) <= 1.0 + 1e-12);
}

TEST_CASE("tail shift fixed-space dimensions") {
    const auto tiny = build_tail_shift(1, 1, CMatrix::identity(1));
    CHECK(fixed_space(tiny.alpha).dimension() == 1);
    CHECK(fixed_space(tiny.phi).dimension() == 1);
    const auto fs = fixed_space(tiny.alpha);
    CHECK(std::abs(fs.basis[0].block(0)(0, 0) - fs.basis[0].block(1)(0, 0)) < 1e-12);

    const auto x = build_tail_shift(2, 2, pauli_x());
    CHECK(fixed_space(x.alpha).dimension() == 2);
    CHECK(fixed_space(x.phi).dimension() == 2);

    const auto r = build_tail_shift(2, 2, cpfix::test::phase_diag(std::numbers::pi / 3));
    CHECK(fixed_space(r.phi).dimension() == 2);

    CHECK_THROWS_AS(build_tail_shift(2, 2, CMatrix{{1.0, 1.0}, {0.0, 1.0}}), Error);
    CHECK_THROWS_AS(build_tail_shift(2, 0, pauli_x()), Error);
}

TEST_CASE("random instances") {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        RandomInstanceParams params;
        params.d = 1 + seed % 2;
        const auto inst = build_random_instance(seed, params);
        const std::size_t m = inst.ambient.num_blocks() - 1;
        CHECK(check_coinvariance(inst.alpha, inst.p));
        CHECK(inst.is_minimal());
        CHECK(inst.minimality.steps <= m);
        CHECK(inst.minimality.monotone_margin >= -1e-9);
        CHECK(validate_family(inst.phi).ok());
        CHECK(inst.alpha.is_endomorphic());

        // co-invariance survives composition
        const auto defect = AlgebraElement::identity(inst.ambient) - inst.p.element();
        for (std::size_t a = 0; a <= 2; ++a)
            for (std::size_t b = 0; b + a <= 4 && b < params.d * 4; ++b) {
                std::vector<std::size_t> s{a};
                if (params.d == 2) s.push_back(b);
                CHECK(min_eigenvalue(defect - inst.alpha.apply_power(s, defect)) >= -1e-9);
            }

        const auto again = build_random_instance(seed, params);
        CHECK(superop_distance(again.alpha.generators()[0], inst.alpha.generators()[0]) == 0.0);
    }
    RandomInstanceParams bad;
    bad.n_max = 5;
    CHECK_THROWS_AS(build_random_instance(0, bad), Error);
}
