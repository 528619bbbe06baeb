#include <doctest.h>

#include "cpfix/error.hpp"
#include "cpfix/random.hpp"
#include "helpers.hpp"

using namespace cpfix;
using cpfix::test::phase_diag;
using cpfix::test::single;

namespace {

const double kPi3 = std::numbers::pi / 3.0;
const BlockStructure kM2({2});

CPMap heisenberg_damping(double gamma) {
    CPMap phi(kM2);
    phi.add_kraus(0, 0, CMatrix{{1.0, 0.0}, {0.0, std::sqrt(1.0 - gamma)}});
    phi.add_kraus(0, 0, CMatrix{{0.0, 0.0}, {std::sqrt(gamma), 0.0}});
    return phi;
}

AlgebraElement e(std::size_t a, std::size_t b) { return AlgebraElement::unit(kM2, 0, a, b); }

}  // namespace

TEST_CASE("apply: identity, both conjugation conventions, damping") {
    Rng rng(1);
    BlockStructure s({2, 3});
    const auto x = rng.unit_element(s);
    CHECK((apply(identity_map(s), x) - x).norm() == 0.0);

    const auto u = single(phase_diag(kPi3));
    // y -> u y u^*
    const auto ad = apply(conjugation(u), e(0, 1));
    CHECK(std::abs(ad.block(0)(0, 1) - std::polar(1.0, -kPi3)) < 1e-15);
    // y -> u^* y u
    const auto rot = apply(rotation(kM2, kPi3), e(0, 1));
    CHECK(std::abs(rot.block(0)(0, 1) - std::polar(1.0, kPi3)) < 1e-15);

    const auto d = apply(heisenberg_damping(0.5), e(0, 0));
    CHECK((d - (e(0, 0) + e(1, 1) * 0.5)).norm() < 1e-15);
    CHECK((apply(amplitude_damping(kM2, 0.5), e(0, 0)) - d).norm() < 1e-15);
}

TEST_CASE("compose") {
    Rng rng(2);
    BlockStructure s({2, 3});
    const auto phi = random_mixture_family(5, s, 1)[0];
    CHECK((to_superoperator(compose(identity_map(s), phi)).matrix - to_superoperator(phi).matrix).max_abs() < 1e-14);

    const auto u = single(unitary_exp(rng.hermitian(2), 0.4));
    const auto v = single(unitary_exp(rng.hermitian(2), 1.3));
    // Ad_{u*} o Ad_{v*} = Ad_{(vu)*}
    const auto lhs = compose(conjugation(u.adjoint()), conjugation(v.adjoint()));
    const auto rhs = conjugation((v * u).adjoint());
    CHECK((to_superoperator(lhs).matrix - to_superoperator(rhs).matrix).max_abs() < 1e-14);

    const auto damp = heisenberg_damping(0.5);
    const auto twice = apply(compose(damp, damp), e(1, 1));
    CHECK((apply(damp, e(1, 1)) - e(1, 1) * 0.5).norm() < 1e-15);
    CHECK((twice - e(1, 1) * 0.25).norm() < 1e-15);
    CHECK((apply(compose(damp, damp), e(0, 0)) - (e(0, 0) + e(1, 1) * 0.75)).norm() < 1e-15);

    for (int k = 0; k < 10; ++k) {
        const auto a = random_mixture_family(10 + k, s, 1)[0];
        const auto b = amplitude_damping(s, rng.uniform());
        const auto x = rng.unit_element(s);
        CHECK((apply(compose(a, b), x) - apply(a, apply(b, x))).norm() <= 1e-10);
        const auto prod = to_superoperator(a) * to_superoperator(b);
        CHECK((to_superoperator(compose(a, b)).matrix - prod.matrix).max_abs() <= 1e-10);
    }
}

TEST_CASE("long compositions keep the Kraus list bounded") {
    BlockStructure s({2, 3});
    auto phi = random_mixture_family(3, s, 1)[0];
    CPMap acc = identity_map(s);
    for (int k = 0; k < 12; ++k) acc = compose(acc, phi);
    CHECK(acc.kraus_count() <= 4 * 4 + 9 * 9 + 2 * 6 * 6);
    Rng rng(8);
    const auto x = rng.unit_element(s);
    AlgebraElement y = x;
    for (int k = 0; k < 12; ++k) y = apply(phi, y);
    CHECK((apply(acc, x) - y).norm() <= 1e-10);
}

TEST_CASE("validate_cp") {
    auto r = validate_cp(identity_map(kM2));
    CHECK(r.is_cp);
    CHECK(r.is_contractive);
    CHECK(r.is_unital);
    r = validate_cp(heisenberg_damping(0.5), 1e-9, true);
    CHECK(r.is_cp);
    CHECK(r.is_contractive);
    CHECK(r.is_unital);
    r = validate_cp(scaled_identity(kM2, 2.0));
    CHECK_FALSE(r.is_contractive);
    r = validate_cp(scaled_identity(kM2, 0.5));
    CHECK(r.is_contractive);
    CHECK_FALSE(r.is_unital);
}

TEST_CASE("superoperators and Choi reconstruction") {
    CHECK((to_superoperator(identity_map(BlockStructure({2, 3}))).matrix - CMatrix::identity(13)).max_abs() == 0.0);

    // Ad_{u*} with u = diag(1, e^{i pi/3}) in the basis E00, E01, E10, E11.
    const auto sop = to_superoperator(rotation(kM2, kPi3)).matrix;
    const Complex expect[] = {1.0, std::polar(1.0, kPi3), std::polar(1.0, -kPi3), 1.0};
    for (std::size_t k = 0; k < 4; ++k) {
        CHECK(std::abs(sop(k, k) - expect[k]) < 1e-15);
        for (std::size_t l = 0; l < 4; ++l)
            if (l != k) CHECK(std::abs(sop(k, l)) < 1e-15);
    }

    BlockStructure s({2, 3});
    const auto phi = random_mixture_family(17, s, 1)[0];
    const auto back = from_superoperator(to_superoperator(phi));
    CHECK((to_superoperator(back).matrix - to_superoperator(phi).matrix).max_abs() <= 1e-12);

    // transpose is positive but not CP
    Superoperator t{kM2, kM2, CMatrix(4, 4)};
    t.matrix(0, 0) = 1.0;
    t.matrix(1, 2) = 1.0;
    t.matrix(2, 1) = 1.0;
    t.matrix(3, 3) = 1.0;
    CHECK(choi_min_eigenvalue(t) < -0.5);
    CHECK_THROWS_AS(from_superoperator(t), Error);
}

TEST_CASE("endomorphisms") {
    Rng rng(3);
    CHECK(validate_endomorphism(conjugation(single(unitary_exp(rng.hermitian(3), 0.9)))));
    BlockStructure s({2, 2, 2});
    CPMap shift(s);
    shift.add_kraus(0, 0, cpfix::test::pauli_x());
    shift.add_kraus(1, 0, CMatrix::identity(2));
    shift.add_kraus(2, 1, CMatrix::identity(2));
    CHECK(validate_endomorphism(shift));
    CHECK_FALSE(validate_endomorphism(heisenberg_damping(0.5)));
    CHECK(is_weak_star_continuous(shift));
}

TEST_CASE("families: commutation and powers") {
    Rng rng(4);
    const auto h = rng.hermitian(2);
    const auto u = single(unitary_exp(h, 0.3));
    const auto v = single(unitary_exp(h, 1.1));
    CHECK(validate_family(std::vector<CPMap>{conjugation(u)}).commuting);
    CHECK(validate_family(std::vector<CPMap>{conjugation(u), conjugation(v)}).commuting);
    const auto w = single(unitary_exp(rng.hermitian(2), 0.8));
    const auto bad = validate_family(std::vector<CPMap>{conjugation(u), conjugation(w)});
    CHECK_FALSE(bad.commuting);
    CHECK_THROWS_AS(SemigroupFamily::create({conjugation(u), conjugation(w)}), Error);
    CHECK_THROWS_AS(SemigroupFamily::create({scaled_identity(kM2, 1.5)}), Error);
    CHECK_THROWS_AS(SemigroupFamily::create({heisenberg_damping(0.3)}, true), Error);

    const auto fam = SemigroupFamily::create({conjugation(u), conjugation(v)});
    const std::size_t zero[] = {0, 0};
    CHECK((to_superoperator(power(fam, zero)).matrix - CMatrix::identity(4)).max_abs() < 1e-15);
    const std::size_t s10[] = {1, 0}, s01[] = {0, 1}, s11[] = {1, 1}, s21[] = {2, 1};
    const auto ab = compose(power(fam, s10), power(fam, s01));
    const auto ba = compose(power(fam, s01), power(fam, s10));
    CHECK((to_superoperator(ab).matrix - to_superoperator(ba).matrix).max_abs() <= 1e-9);
    CHECK((to_superoperator(power(fam, s11)).matrix - to_superoperator(ab).matrix).max_abs() <= 1e-9);
    const auto sum = compose(power(fam, s11), power(fam, s10));
    CHECK((to_superoperator(power(fam, s21)).matrix - to_superoperator(sum).matrix).max_abs() <= 1e-9);

    const auto one = SemigroupFamily::create({heisenberg_damping(0.5)});
    const std::size_t two[] = {2};
    CHECK((to_superoperator(power(one, two)).matrix -
           to_superoperator(compose(heisenberg_damping(0.5), heisenberg_damping(0.5))).matrix)
              .max_abs() < 1e-15);
}

TEST_CASE("Kadison-Schwarz, positivity and norm contractivity for random contractive maps") {
    Rng rng(12);
    BlockStructure s({2, 3});
    for (int k = 0; k < 10; ++k) {
        const auto phi = random_mixture_family(100 + k, s, 1)[0];
        const auto damp = amplitude_damping(s, rng.uniform());
        for (const auto* map : {&phi, &damp}) {
            for (int t = 0; t < 10; ++t) {
                const auto x = rng.unit_element(s);
                const auto fx = apply(*map, x);
                CHECK(min_eigenvalue(apply(*map, x.adjoint() * x) - fx.adjoint() * fx) >= -1e-9);
                CHECK(min_eigenvalue(apply(*map, x * x.adjoint())) >= -1e-9);
                CHECK(fx.norm() <= x.norm() + 1e-9);
            }
        }
    }
}
