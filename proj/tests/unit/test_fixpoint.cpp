#include <doctest.h>

#include "cpfix/error.hpp"
#include "cpfix/fixpoint.hpp"
#include "cpfix/random.hpp"
#include "helpers.hpp"

using namespace cpfix;
using cpfix::test::pauli_x;
using cpfix::test::single;

namespace {

const double kPi3 = std::numbers::pi / 3.0;
const BlockStructure kM2({2});
const BlockStructure kM3({3});

SemigroupFamily one(CPMap m) { return SemigroupFamily::create({std::move(m)}); }

// phi(y) = y00 E00 + y11 E11 + (y00 + y11)/2 E22: unital, fixed space
// {diag(a, b, (a+b)/2)} is not closed under multiplication.
CPMap averaging_leak() {
    CPMap phi(kM3);
    phi.add_kraus(0, 0, CMatrix::unit(3, 0, 0));
    phi.add_kraus(0, 0, CMatrix::unit(3, 1, 1));
    phi.add_kraus(0, 0, CMatrix::unit(3, 2, 0) * std::sqrt(0.5));
    phi.add_kraus(0, 0, CMatrix::unit(3, 2, 1) * std::sqrt(0.5));
    return phi;
}

AlgebraElement stack3(const CMatrix& x) { return AlgebraElement(BlockStructure({2, 2, 2}), {x, x, x}); }

AlgebraElement e2(std::size_t a, std::size_t b) { return AlgebraElement::unit(kM2, 0, a, b); }

void check_fixed_basis(const SemigroupFamily& fam, const FixedSpace& fs) {
    for (std::size_t i = 0; i < fs.basis.size(); ++i) {
        CHECK(hermitian_defect(fs.basis[i]) < 1e-12);
        for (const auto& g : fam.generators()) CHECK((apply(g, fs.basis[i]) - fs.basis[i]).norm() <= 1e-8);
        for (std::size_t j = 0; j < fs.basis.size(); ++j)
            CHECK(std::abs(inner(fs.basis[i], fs.basis[j]) - Complex(i == j ? 1.0 : 0.0)) < 1e-12);
    }
}

}  // namespace

TEST_CASE("fixed spaces of the small models") {
    const auto id = one(identity_map(kM2));
    auto fs = fixed_space(id);
    CHECK(fs.dimension() == 4);
    check_fixed_basis(id, fs);

    const auto rot = one(rotation(kM2, kPi3));
    fs = fixed_space(rot);
    CHECK(fs.dimension() == 2);
    check_fixed_basis(rot, fs);
    CHECK(fs.contains(e2(0, 0)));
    CHECK(fs.contains(e2(1, 1)));
    CHECK_FALSE(fs.contains(e2(0, 1)));

    const auto damp = one(amplitude_damping(kM2, 0.5));
    fs = fixed_space(damp);
    CHECK(fs.dimension() == 1);
    CHECK(fs.contains(AlgebraElement::identity(kM2)));

    const auto leak = one(averaging_leak());
    fs = fixed_space(leak);
    CHECK(fs.dimension() == 2);
    check_fixed_basis(leak, fs);
}

TEST_CASE("C*-closure") {
    const auto damp = fixed_space(one(amplitude_damping(kM2, 0.5)));
    const auto c1 = cstar_closure(damp);
    CHECK(c1.dimension() == 1);
    CHECK(c1.is_unital);

    const auto diag = cstar_closure(fixed_space(one(rotation(kM2, kPi3))));
    CHECK(diag.dimension() == 2);

    FixedSpace x{kM2, {single(pauli_x()) * (1.0 / std::sqrt(2.0))}};
    const auto cx = cstar_closure(x);
    CHECK(cx.dimension() == 2);
    CHECK(cx.contains(AlgebraElement::identity(kM2)));
    CHECK(cx.contains(single(pauli_x())));

    const auto leak = cstar_closure(fixed_space(one(averaging_leak())));
    CHECK(leak.dimension() == 3);
    CHECK(leak.contains(AlgebraElement::unit(kM3, 0, 2, 2)));
    for (const auto& a : leak.basis)
        for (const auto& b : leak.basis) CHECK(leak.distance(a * b) <= 1e-8);
}

TEST_CASE("ergodic projection: exact cases") {
    auto ep = ergodic_projection(one(identity_map(kM2)));
    CHECK((ep.rho.matrix - CMatrix::identity(4)).max_abs() < 1e-15);

    ep = ergodic_projection(one(rotation(kM2, kPi3)));
    CHECK(ep.apply(e2(0, 1)).norm() <= 1e-12);
    CHECK(ep.apply(e2(1, 0)).norm() <= 1e-12);
    CHECK((ep.apply(e2(0, 0)) - e2(0, 0)).norm() <= 1e-12);

    ep = ergodic_projection(one(amplitude_damping(kM2, 0.5)));
    CHECK(ep.apply(e2(1, 1)).norm() <= 1e-9);
    CHECK((ep.apply(e2(0, 0)) - AlgebraElement::identity(kM2)).norm() <= 1e-9);

    CHECK_THROWS_AS(ergodic_projection(SemigroupFamily::unchecked({scaled_identity(kM2, 2.0)})), Error);
}

TEST_CASE("ergodic projection invariants on random families") {
    BlockStructure s({2, 3});
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto fam = SemigroupFamily::create(random_mixture_family(seed, s, 1 + seed % 2));
        const auto ep = ergodic_projection(fam);
        const auto& r = ep.rho.matrix;
        CHECK(op_norm(r * r - r) <= 1e-8);
        CHECK(choi_min_eigenvalue(ep.rho) >= -1e-9);
        for (const auto& op : fam.superoperators()) {
            CHECK(op_norm(op.matrix * r - r) <= 1e-8);
            CHECK(op_norm(r * op.matrix - r) <= 1e-8);
        }
        const auto fs = fixed_space(fam);
        CHECK(std::abs(r.trace().real() - double(fs.dimension())) < 1e-6);
        for (const auto& b : fs.basis) CHECK((ep.apply(b) - b).norm() <= 1e-8);
    }
}

TEST_CASE("strong limits") {
    const auto damp = one(amplitude_damping(kM2, 0.5));
    auto lim = phi_limit(damp, AlgebraElement::identity(kM2));
    CHECK((lim.value - AlgebraElement::identity(kM2)).norm() <= 1e-15);
    CHECK(lim.iterations == 5);
    lim = phi_limit(damp, e2(0, 0));
    CHECK((lim.value - AlgebraElement::identity(kM2)).norm() <= 1e-9);

    const auto rot = one(rotation(kM2, kPi3));
    CHECK_THROWS_AS(phi_limit(rot, e2(0, 1), 1e-10, 5000), Error);
    try {
        phi_limit(rot, e2(0, 1), 1e-10, 5000);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Divergent);
    }
    lim = phi_limit(rot, e2(1, 1));
    CHECK((lim.value - e2(1, 1)).norm() == 0.0);
}

TEST_CASE("pi limits on the tail shift") {
    const auto inst = build_tail_shift(2, 2, pauli_x());
    const auto x = single(pauli_x());
    const auto cs = cstar_closure(fixed_space(inst.phi));
    auto w = pi_limit(inst, cs, x);
    CHECK((w.value - stack3(pauli_x())).norm() == 0.0);
    w = pi_limit(inst, AlgebraElement::identity(kM2));
    CHECK((w.value - AlgebraElement::identity(inst.ambient)).norm() == 0.0);

    const CMatrix z{{1.0, 0.0}, {0.0, -1.0}};
    CHECK_THROWS_AS(pi_limit(inst, cs, single(z)), Error);

    const auto whole = make_dilation({inst.alpha.generators()[0]}, AlgebraElement::identity(inst.ambient));
    Rng rng(3);
    const auto fs = fixed_space(whole.phi);
    for (const auto& b : fs.basis) CHECK((pi_limit(whole, b).value - b).norm() <= 1e-12);

    const auto ctrl = make_dilation({identity_map(kM2)}, e2(0, 0));
    CHECK_THROWS_AS(pi_limit(ctrl, AlgebraElement::identity(BlockStructure({1}))), Error);
}

TEST_CASE("lifting fixed points") {
    const auto inst = build_tail_shift(2, 2, pauli_x());
    auto r = lift_fixed_point(inst, single(pauli_x()));
    CHECK((r.z - stack3(pauli_x())).norm() <= 1e-10);
    CHECK(r.route_gap <= 1e-10);
    r = lift_fixed_point(inst, AlgebraElement::identity(kM2));
    CHECK((r.z - AlgebraElement::identity(inst.ambient)).norm() <= 1e-10);
    CHECK_THROWS_AS(lift_fixed_point(inst, single(CMatrix{{1.0, 0.0}, {0.0, -1.0}})), Error);

    const auto whole = make_dilation({inst.alpha.generators()[0]}, AlgebraElement::identity(inst.ambient));
    const auto y = stack3(pauli_x()) * 0.5;
    CHECK((lift_fixed_point(whole, y).z - y).norm() <= 1e-10);
}

TEST_CASE("complete isometry") {
    const auto inst = build_tail_shift(2, 2, pauli_x());
    const auto rep = check_complete_isometry(inst, 3, 50, 1);
    CHECK(rep.ambient_fixed_dim == 2);
    CHECK(rep.corner_fixed_dim == 2);
    CHECK(rep.bijective);
    CHECK(rep.level_defects.size() == 3);
    CHECK(rep.max_defect <= 1e-8);
    CHECK(rep.pass);
    CHECK(stack3(pauli_x()).norm() == doctest::Approx(1.0));

    const auto ctrl = make_dilation({identity_map(kM2)}, e2(0, 0));
    const auto bad = check_complete_isometry(ctrl, 2, 20, 1);
    CHECK(bad.ambient_fixed_dim == 4);
    CHECK(bad.corner_fixed_dim == 1);
    CHECK_FALSE(bad.pass);
}

TEST_CASE("kernel ideal") {
    for (const auto& fam : {one(rotation(kM2, kPi3)), one(amplitude_damping(kM2, 0.5)), one(identity_map(kM3))}) {
        const auto k = kernel_ideal_check(fam);
        CHECK(k.kernel_dim == 0);
        CHECK(k.ideal_dim == 0);
        CHECK(k.pass);
    }
    const auto k = kernel_ideal_check(one(averaging_leak()));
    CHECK(k.cstar_dim == 3);
    CHECK(k.kernel_dim == 1);
    CHECK(k.ideal_dim == 1);
    CHECK(k.left_ideal_dim == 1);
    CHECK(k.residual <= 1e-8);
    CHECK(k.pass);
}

TEST_CASE("property suite") {
    AnalysisConfig cfg;
    cfg.samples = 20;

    auto rep = property_suite(one(identity_map(BlockStructure({2, 3}))), cfg);
    CHECK(rep.all_pass());
    for (const auto& c : rep.checks) CHECK(c.residual <= 1e-12);

    rep = property_suite(one(averaging_leak()), cfg);
    CHECK(rep.all_pass());
    REQUIRE(rep.find("KERNEL") != nullptr);

    rep = property_suite(one(scaled_identity(kM2, 0.5)), cfg);
    CHECK(rep.fixed_dim == 0);
    CHECK(rep.all_pass());
    CHECK(rep.find("VEC")->note == "trivial fixed space");

    const auto inst = build_tail_shift(2, 2, pauli_x());
    rep = property_suite(inst, cfg);
    for (const auto& c : rep.checks) {
        INFO(c.name << " " << c.note);
        CHECK(c.status == Status::Pass);
    }

    const auto ctrl = make_dilation({identity_map(kM2)}, e2(0, 0));
    rep = property_suite(ctrl, cfg);
    CHECK_FALSE(rep.all_pass());
    CHECK(rep.find("MINIMALITY")->status == Status::Fail);
    CHECK(rep.find("LIFT")->status == Status::Fail);
    CHECK(rep.find("FACT")->status == Status::Skipped);
}
