#include "cpfix/dilation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "cpfix/error.hpp"
#include "cpfix/random.hpp"

namespace cpfix {

const char* to_string(Minimality m) {
    switch (m) {
    case Minimality::Minimal: return "Minimal";
    case Minimality::NonMinimal: return "NonMinimal";
    case Minimality::Undetermined: return "Undetermined";
    }
    return "Undetermined";
}

double coinvariance_margin(const SemigroupFamily& alpha, const ProjectionElement& p) {
    const auto& s = alpha.structure();
    const auto defect = AlgebraElement::identity(s) - p.element();
    double margin = std::numeric_limits<double>::infinity();
    for (const auto& g : alpha.generators())
        margin = std::min(margin, min_eigenvalue(defect - apply(g, defect)));
    return margin;
}

bool check_coinvariance(const SemigroupFamily& alpha, const ProjectionElement& p, double tol) {
    return coinvariance_margin(alpha, p) >= -tol;
}

MinimalityResult check_minimality(const SemigroupFamily& alpha, const ProjectionElement& p,
                                  double tol, std::size_t max_iter) {
    if (!check_coinvariance(alpha, p))
        throw Error(ErrorKind::CoInvarianceViolated,
                    "margin " + std::to_string(coinvariance_margin(alpha, p)));
    MinimalityResult r;
    r.monotone_margin = std::numeric_limits<double>::infinity();
    AlgebraElement level = AlgebraElement::identity(alpha.structure()) - p.element();
    for (std::size_t n = 0;; ++n) {
        if (level.norm() <= 10.0 * tol) {
            r.verdict = Minimality::Minimal;
            r.limit = std::move(level);
            r.steps = n;
            break;
        }
        if (n == max_iter) {
            r.verdict = Minimality::Undetermined;
            r.limit = std::move(level);
            r.steps = n;
            break;
        }
        AlgebraElement next = alpha.diagonal_step(level);
        const auto step = level - next;
        r.monotone_margin = std::min(r.monotone_margin, min_eigenvalue(step));
        if (step.norm() <= tol) {
            r.verdict = next.norm() <= 10.0 * tol ? Minimality::Minimal : Minimality::NonMinimal;
            r.limit = std::move(next);
            r.steps = n + 1;
            break;
        }
        level = std::move(next);
    }
    if (!std::isfinite(r.monotone_margin)) r.monotone_margin = 0.0;
    return r;
}

SemigroupFamily compress_semigroup(const SemigroupFamily& alpha, const ProjectionElement& p,
                                   const CornerEmbedding& emb, std::uint64_t seed) {
    if (!check_coinvariance(alpha, p))
        throw Error(ErrorKind::CoInvarianceViolated,
                    "margin " + std::to_string(coinvariance_margin(alpha, p)));
    const auto& nstruct = emb.corner;
    std::vector<CPMap> gens;
    for (const auto& a : alpha.generators()) {
        CPMap phi(nstruct);
        for (std::size_t k = 0; k < nstruct.num_blocks(); ++k) {
            const auto j = emb.block_map[k];
            for (std::size_t l = 0; l < nstruct.num_blocks(); ++l) {
                const auto i = emb.block_map[l];
                for (const auto& op : a.kraus(j, i)) {
                    CMatrix t = emb.isometries[j].adjoint() * op * emb.isometries[i];
                    if (t.max_abs() > 0.0) phi.add_kraus(k, l, std::move(t));
                }
            }
        }
        gens.push_back(std::move(phi));
    }

    // Semigroup law: compress(alpha_i alpha_j inject y) == phi_i(phi_j(y)).
    std::vector<AlgebraElement> samples;
    for (std::size_t b = 0; b < nstruct.num_blocks(); ++b)
        for (std::size_t r = 0; r < nstruct.dim(b); ++r)
            for (std::size_t c = 0; c < nstruct.dim(b); ++c)
                samples.push_back(AlgebraElement::unit(nstruct, b, r, c));
    Rng rng(seed);
    for (int k = 0; k < 20; ++k) samples.push_back(rng.unit_element(nstruct));
    double worst = 0.0;
    for (std::size_t i = 0; i < gens.size(); ++i)
        for (std::size_t j = 0; j < gens.size(); ++j)
            for (const auto& y : samples) {
                const auto lhs = compress(
                    emb, apply(alpha.generators()[i], apply(alpha.generators()[j], inject(emb, y))));
                const auto rhs = apply(gens[i], apply(gens[j], y));
                worst = std::max(worst, frobenius_norm(lhs - rhs));
            }
    if (worst > 1e-9)
        throw Error(ErrorKind::SemigroupLawViolated, "residual " + std::to_string(worst));
    return SemigroupFamily::create(std::move(gens));
}

DilationInstance make_dilation(std::vector<CPMap> alpha_generators, const AlgebraElement& p_elem,
                               double minimality_tol, std::size_t minimality_max_iter) {
    auto alpha = SemigroupFamily::create(std::move(alpha_generators), true);
    ProjectionElement p(p_elem);
    if (!(p.structure() == alpha.structure()))
        throw Error(ErrorKind::ShapeMismatch, "projection and family live in different algebras");
    if (!check_coinvariance(alpha, p))
        throw Error(ErrorKind::CoInvarianceViolated,
                    "margin " + std::to_string(coinvariance_margin(alpha, p)));
    auto emb = corner(alpha.structure(), p);
    auto phi = compress_semigroup(alpha, p, emb);
    auto minimality = check_minimality(alpha, p, minimality_tol, minimality_max_iter);
    BlockStructure ambient = alpha.structure();
    return DilationInstance{std::move(ambient), std::move(alpha), std::move(p), std::move(emb),
                            std::move(phi), std::move(minimality)};
}

namespace {

void require_unitary(const CMatrix& u, std::size_t n) {
    if (u.rows() != n || u.cols() != n)
        throw Error(ErrorKind::ShapeMismatch, "unitary must be " + std::to_string(n) + "x" +
                                                  std::to_string(n));
    const double d = (u.adjoint() * u - CMatrix::identity(n)).max_abs();
    if (d > 1e-9) throw Error(ErrorKind::NotUnitary, "||u*u - 1|| = " + std::to_string(d));
}

AlgebraElement block_zero_projection(const BlockStructure& s) {
    AlgebraElement p(s);
    p.block(0) = CMatrix::identity(s.dim(0));
    return p;
}

} // namespace

DilationInstance build_tail_shift(std::size_t n, std::size_t m, const CMatrix& u) {
    if (n < 1 || m < 1) throw Error(ErrorKind::InvalidArgument, "tail shift needs n, m >= 1");
    require_unitary(u, n);
    BlockStructure s(std::vector<std::size_t>(m + 1, n));
    CPMap alpha(s);
    alpha.add_kraus(0, 0, u);
    for (std::size_t j = 1; j <= m; ++j) alpha.add_kraus(j, j - 1, CMatrix::identity(n));
    return make_dilation({std::move(alpha)}, block_zero_projection(s));
}

std::vector<CPMap> conjugated_shift_generators(std::size_t n, std::size_t m,
                                               std::span<const CMatrix> unitaries) {
    if (n < 1 || m < 1) throw Error(ErrorKind::InvalidArgument, "shift needs n, m >= 1");
    BlockStructure s(std::vector<std::size_t>(m + 1, n));
    std::vector<CPMap> gens;
    for (const auto& u : unitaries) {
        require_unitary(u, n);
        CPMap a(s);
        a.add_kraus(0, 0, u);
        for (std::size_t j = 1; j <= m; ++j) a.add_kraus(j, j - 1, u);
        gens.push_back(std::move(a));
    }
    return gens;
}

DilationInstance build_random_instance(std::uint64_t seed, const RandomInstanceParams& params) {
    if (params.n_max > 4 || params.m_max > 5 || params.d < 1 || params.d > 2 || params.n_min < 1 ||
        params.n_min > params.n_max || params.m_max < 1)
        throw Error(ErrorKind::InvalidArgument,
                    "random instance bounds: 1 <= n_min <= n_max <= 4, 1 <= m_max <= 5, d in {1,2}");
    Rng rng(seed);
    const std::size_t n = params.n_min + rng.uniform_index(params.n_max - params.n_min + 1);
    const std::size_t m = 1 + rng.uniform_index(params.m_max);
    CMatrix h = rng.hermitian(n);
    h *= 1.0 / std::max(1e-12, op_norm(h));
    if (rng.uniform() < 0.5) {
        // Degenerate integer spectrum in a random basis.
        const CMatrix v = unitary_exp(rng.hermitian(n), 1.0);
        std::vector<double> spec(n);
        for (auto& x : spec) x = double(rng.uniform_index(2));
        h = v * CMatrix::diagonal(std::span<const double>(spec)) * v.adjoint();
    }
    std::vector<CMatrix> us;
    for (std::size_t k = 0; k < params.d; ++k)
        us.push_back(unitary_exp(h, rng.uniform(0.2, std::numbers::pi - 0.2)));
    if (params.d == 1) return build_tail_shift(n, m, us.front());
    BlockStructure s(std::vector<std::size_t>(m + 1, n));
    return make_dilation(conjugated_shift_generators(n, m, us), block_zero_projection(s));
}

} // namespace cpfix
