#include "cpfix/cpsemi.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "cpfix/error.hpp"
#include "cpfix/random.hpp"

namespace cpfix {

// ---- Superoperator ---------------------------------------------------------

AlgebraElement Superoperator::apply(const AlgebraElement& x) const {
    if (!(x.structure() == source)) throw Error(ErrorKind::ShapeMismatch, "superoperator source");
    const auto c = x.coords();
    const CMatrix y = matrix * CMatrix::column(c);
    return AlgebraElement::from_coords(target, y.data());
}

Superoperator Superoperator::identity(const BlockStructure& s) {
    return {s, s, CMatrix::identity(s.coord_dim())};
}

Superoperator operator*(const Superoperator& a, const Superoperator& b) {
    if (!(a.source == b.target)) throw Error(ErrorKind::ShapeMismatch, "superoperator product");
    return {b.source, a.target, a.matrix * b.matrix};
}

double norm(const Superoperator& s) { return op_norm(s.matrix); }

// ---- CPMap -----------------------------------------------------------------

CPMap::CPMap(BlockStructure source, BlockStructure target, KrausTable kraus)
    : source_(std::move(source)), target_(std::move(target)), kraus_(std::move(kraus)) {
    if (kraus_.size() != target_.num_blocks())
        throw Error(ErrorKind::ShapeMismatch, "Kraus table needs one row per target block");
    for (std::size_t j = 0; j < kraus_.size(); ++j) {
        if (kraus_[j].size() != source_.num_blocks())
            throw Error(ErrorKind::ShapeMismatch, "Kraus table row " + std::to_string(j) +
                                                      " needs one entry per source block");
        for (std::size_t i = 0; i < kraus_[j].size(); ++i)
            for (const auto& a : kraus_[j][i])
                if (a.rows() != target_.dim(j) || a.cols() != source_.dim(i))
                    throw Error(ErrorKind::ShapeMismatch,
                                "Kraus operator (" + std::to_string(j) + "," + std::to_string(i) +
                                    ") must be " + std::to_string(target_.dim(j)) + "x" +
                                    std::to_string(source_.dim(i)));
    }
}

CPMap::CPMap(BlockStructure s)
    : source_(s), target_(s),
      kraus_(s.num_blocks(), std::vector<std::vector<CMatrix>>(s.num_blocks())) {}

void CPMap::add_kraus(std::size_t j, std::size_t i, CMatrix a) {
    if (a.rows() != target_.dim(j) || a.cols() != source_.dim(i))
        throw Error(ErrorKind::ShapeMismatch, "Kraus operator shape");
    kraus_.at(j).at(i).push_back(std::move(a));
}

std::size_t CPMap::kraus_count() const {
    std::size_t n = 0;
    for (const auto& row : kraus_)
        for (const auto& list : row) n += list.size();
    return n;
}

AlgebraElement apply(const CPMap& phi, const AlgebraElement& x) {
    if (!(x.structure() == phi.source()))
        throw Error(ErrorKind::ShapeMismatch, "apply: element not in the source algebra");
    AlgebraElement y(phi.target());
    for (std::size_t j = 0; j < phi.target().num_blocks(); ++j) {
        for (std::size_t i = 0; i < phi.source().num_blocks(); ++i) {
            for (const auto& a : phi.kraus(j, i)) y.block(j) += a * x.block(i) * a.adjoint();
        }
    }
    return y;
}

namespace {

// Choi matrix of y -> sum_m A_m y A_m^* with A_m of shape nt x ns, in the
// index convention (source c, target a) -> c * nt + a.
CMatrix choi_from_kraus(std::span<const CMatrix> kraus, std::size_t nt, std::size_t ns) {
    CMatrix c(ns * nt, ns * nt);
    for (const auto& a : kraus) {
        std::vector<Complex> w(ns * nt);
        for (std::size_t s = 0; s < ns; ++s)
            for (std::size_t t = 0; t < nt; ++t) w[s * nt + t] = a(t, s);
        for (std::size_t p = 0; p < w.size(); ++p)
            for (std::size_t q = 0; q < w.size(); ++q) c(p, q) += w[p] * std::conj(w[q]);
    }
    return c;
}

std::vector<CMatrix> kraus_from_choi(const CMatrix& choi, std::size_t nt, std::size_t ns,
                                     double tol, bool strict) {
    const auto e = eig_hermitian(choi, 1e-8 * std::max(1.0, choi.max_abs()));
    const double scale = std::max(1.0, std::abs(e.values.back()));
    if (strict && e.values.front() < -tol * scale)
        throw Error(ErrorKind::NotCP, "Choi eigenvalue " + std::to_string(e.values.front()));
    std::vector<CMatrix> out;
    const double keep = 1e-14 * scale;
    for (std::size_t k = 0; k < e.values.size(); ++k) {
        if (e.values[k] <= keep) continue;
        const double r = std::sqrt(e.values[k]);
        CMatrix a(nt, ns);
        for (std::size_t s = 0; s < ns; ++s)
            for (std::size_t t = 0; t < nt; ++t) a(t, s) = r * e.vectors(s * nt + t, k);
        out.push_back(std::move(a));
    }
    return out;
}

} // namespace

CPMap compose(const CPMap& phi, const CPMap& psi) {
    if (!(phi.source() == psi.target()))
        throw Error(ErrorKind::ShapeMismatch, "compose: structures do not chain");
    const auto& src = psi.source();
    const auto& mid = psi.target();
    const auto& tgt = phi.target();
    CPMap::KrausTable table(tgt.num_blocks(), std::vector<std::vector<CMatrix>>(src.num_blocks()));
    for (std::size_t j = 0; j < tgt.num_blocks(); ++j) {
        for (std::size_t i = 0; i < src.num_blocks(); ++i) {
            auto& list = table[j][i];
            for (std::size_t k = 0; k < mid.num_blocks(); ++k)
                for (const auto& a : phi.kraus(j, k))
                    for (const auto& b : psi.kraus(k, i)) list.push_back(a * b);
            const std::size_t bound = tgt.dim(j) * src.dim(i);
            if (list.size() > bound) {
                const CMatrix c = choi_from_kraus(list, tgt.dim(j), src.dim(i));
                list = kraus_from_choi(c, tgt.dim(j), src.dim(i), 1e-9, false);
            }
        }
    }
    return CPMap(src, tgt, std::move(table));
}

Superoperator to_superoperator(const CPMap& phi) {
    const auto& src = phi.source();
    const auto& tgt = phi.target();
    CMatrix m(tgt.coord_dim(), src.coord_dim());
    for (std::size_t j = 0; j < tgt.num_blocks(); ++j) {
        const auto nj = tgt.dim(j);
        const auto oj = tgt.coord_offset(j);
        for (std::size_t i = 0; i < src.num_blocks(); ++i) {
            const auto ni = src.dim(i);
            const auto oi = src.coord_offset(i);
            // phi(x)_j[a,b] += sum_{c,d} A[a,c] x_i[c,d] conj(A[b,d])
            for (const auto& a : phi.kraus(j, i))
                for (std::size_t r = 0; r < nj; ++r)
                    for (std::size_t b = 0; b < nj; ++b)
                        for (std::size_t c = 0; c < ni; ++c) {
                            const Complex arc = a(r, c);
                            if (arc == Complex{}) continue;
                            for (std::size_t d = 0; d < ni; ++d)
                                m(oj + r * nj + b, oi + c * ni + d) += arc * std::conj(a(b, d));
                        }
        }
    }
    return {src, tgt, std::move(m)};
}

std::vector<std::vector<CMatrix>> choi_blocks(const Superoperator& s) {
    std::vector<std::vector<CMatrix>> out(s.target.num_blocks());
    for (std::size_t j = 0; j < s.target.num_blocks(); ++j) {
        const auto nt = s.target.dim(j);
        const auto ot = s.target.coord_offset(j);
        for (std::size_t i = 0; i < s.source.num_blocks(); ++i) {
            const auto ns = s.source.dim(i);
            const auto os = s.source.coord_offset(i);
            CMatrix c(ns * nt, ns * nt);
            for (std::size_t cc = 0; cc < ns; ++cc)
                for (std::size_t d = 0; d < ns; ++d)
                    for (std::size_t a = 0; a < nt; ++a)
                        for (std::size_t b = 0; b < nt; ++b)
                            c(cc * nt + a, d * nt + b) =
                                s.matrix(ot + a * nt + b, os + cc * ns + d);
            out[j].push_back(std::move(c));
        }
    }
    return out;
}

double choi_min_eigenvalue(const Superoperator& s) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& row : choi_blocks(s))
        for (const auto& c : row) m = std::min(m, eig_hermitian(c, 1e-8 * std::max(1.0, c.max_abs())).values.front());
    return m;
}

CPMap from_superoperator(const Superoperator& s, double tol) {
    const auto blocks = choi_blocks(s);
    CPMap::KrausTable table(s.target.num_blocks(),
                            std::vector<std::vector<CMatrix>>(s.source.num_blocks()));
    for (std::size_t j = 0; j < s.target.num_blocks(); ++j)
        for (std::size_t i = 0; i < s.source.num_blocks(); ++i) {
            if (hermitian_defect(blocks[j][i]) > 1e-8 * std::max(1.0, blocks[j][i].max_abs()))
                throw Error(ErrorKind::NotCP, "Choi block (" + std::to_string(j) + "," +
                                                  std::to_string(i) + ") is not Hermitian");
            table[j][i] = kraus_from_choi(blocks[j][i], s.target.dim(j), s.source.dim(i), tol, true);
        }
    return CPMap(s.source, s.target, std::move(table));
}

CPReport validate_cp(const CPMap& phi, double tol, bool check_choi) {
    CPReport r;
    if (check_choi) {
        r.choi_min_eig = choi_min_eigenvalue(to_superoperator(phi));
        r.is_cp = r.choi_min_eig >= -tol;
    }
    const auto one_src = AlgebraElement::identity(phi.source());
    const auto image = apply(phi, one_src);
    if (phi.is_endomap()) {
        const auto gap = one_src - image;
        r.contraction_margin = min_eigenvalue(gap);
        r.unit_defect = gap.norm();
    } else {
        const auto one_tgt = AlgebraElement::identity(phi.target());
        r.contraction_margin = min_eigenvalue(one_tgt - image);
        r.unit_defect = (one_tgt - image).norm();
    }
    r.is_contractive = r.contraction_margin >= -tol;
    r.is_unital = r.unit_defect <= tol;
    return r;
}

EndomorphismReport check_endomorphism(const CPMap& alpha, double tol) {
    EndomorphismReport r;
    if (!alpha.is_endomap()) return r;
    const auto& s = alpha.source();
    struct Unit {
        std::size_t block, a, b;
        AlgebraElement image;
    };
    std::vector<Unit> units;
    for (std::size_t i = 0; i < s.num_blocks(); ++i)
        for (std::size_t a = 0; a < s.dim(i); ++a)
            for (std::size_t b = 0; b < s.dim(i); ++b)
                units.push_back({i, a, b, apply(alpha, AlgebraElement::unit(s, i, a, b))});
    auto image_of = [&](std::size_t i, std::size_t a, std::size_t b) -> const AlgebraElement& {
        return units[s.coord_offset(i) + a * s.dim(i) + b].image;
    };
    for (const auto& x : units) {
        r.adjoint_defect = std::max(
            r.adjoint_defect, frobenius_norm(image_of(x.block, x.b, x.a) - x.image.adjoint()));
        for (const auto& y : units) {
            // E_ab E_cd = delta_bc E_ad within one block, 0 across blocks
            AlgebraElement lhs(s);
            if (x.block == y.block && x.b == y.a) lhs = image_of(x.block, x.a, y.b);
            const auto rhs = x.image * y.image;
            r.multiplicative_defect = std::max(r.multiplicative_defect, frobenius_norm(lhs - rhs));
        }
    }
    r.is_endomorphism = r.multiplicative_defect <= tol && r.adjoint_defect <= tol;
    return r;
}

bool validate_endomorphism(const CPMap& alpha, double tol) {
    return check_endomorphism(alpha, tol).is_endomorphism;
}

// ---- SemigroupFamily -------------------------------------------------------

FamilyReport validate_family(std::span<const CPMap> generators, double tol) {
    FamilyReport r;
    if (generators.empty()) throw Error(ErrorKind::InvalidArgument, "family needs a generator");
    const auto& s = generators.front().source();
    std::vector<Superoperator> ops;
    r.is_endomorphic = true;
    for (const auto& g : generators) {
        if (!(g.source() == s) || !(g.target() == s))
            throw Error(ErrorKind::ShapeMismatch, "generators must act on one algebra");
        r.generators.push_back(validate_cp(g, tol));
        r.all_cp = r.all_cp && r.generators.back().is_cp;
        r.all_contractive = r.all_contractive && r.generators.back().is_contractive;
        r.is_endomorphic = r.is_endomorphic && validate_endomorphism(g, tol);
        ops.push_back(to_superoperator(g));
    }
    for (std::size_t i = 0; i < ops.size(); ++i)
        for (std::size_t j = i + 1; j < ops.size(); ++j) {
            const double c = op_norm(ops[i].matrix * ops[j].matrix - ops[j].matrix * ops[i].matrix);
            r.commutators.emplace_back(i, j, c);
            r.max_commutator = std::max(r.max_commutator, c);
        }
    r.commuting = r.max_commutator <= tol;
    return r;
}

SemigroupFamily SemigroupFamily::create(std::vector<CPMap> generators, bool require_endomorphic,
                                        double tol) {
    const auto rep = validate_family(generators, tol);
    for (std::size_t k = 0; k < rep.generators.size(); ++k)
        if (!rep.generators[k].is_contractive)
            throw Error(ErrorKind::NotContractive,
                        "generator " + std::to_string(k) + ": min eig of 1 - phi(1) is " +
                            std::to_string(rep.generators[k].contraction_margin));
    if (!rep.commuting)
        throw Error(ErrorKind::NotCommuting,
                    "max commutator norm " + std::to_string(rep.max_commutator));
    if (require_endomorphic && !rep.is_endomorphic)
        throw Error(ErrorKind::NotEndomorphism, "a generator is not a *-endomorphism");
    auto f = unchecked(std::move(generators));
    f.endomorphic_ = rep.is_endomorphic;
    return f;
}

SemigroupFamily SemigroupFamily::unchecked(std::vector<CPMap> generators) {
    if (generators.empty()) throw Error(ErrorKind::InvalidArgument, "family needs a generator");
    SemigroupFamily f;
    for (const auto& g : generators) f.superops_.push_back(to_superoperator(g));
    f.generators_ = std::move(generators);
    return f;
}

AlgebraElement SemigroupFamily::diagonal_step(const AlgebraElement& x) const {
    AlgebraElement y = x;
    for (auto it = generators_.rbegin(); it != generators_.rend(); ++it) y = cpfix::apply(*it, y);
    return y;
}

AlgebraElement SemigroupFamily::apply_power(std::span<const std::size_t> s,
                                            const AlgebraElement& x) const {
    if (s.size() != generators_.size())
        throw Error(ErrorKind::InvalidArgument, "multi-index length must equal family rank");
    AlgebraElement y = x;
    for (std::size_t k = generators_.size(); k-- > 0;)
        for (std::size_t n = 0; n < s[k]; ++n) y = cpfix::apply(generators_[k], y);
    return y;
}

CPMap power(const SemigroupFamily& family, std::span<const std::size_t> s) {
    if (s.size() != family.rank())
        throw Error(ErrorKind::InvalidArgument, "multi-index length must equal family rank");
    CPMap result = identity_map(family.structure());
    for (std::size_t k = 0; k < family.rank(); ++k)
        for (std::size_t n = 0; n < s[k]; ++n) result = compose(result, family.generators()[k]);
    return result;
}

// ---- models ----------------------------------------------------------------

CPMap identity_map(const BlockStructure& s) {
    CPMap m(s);
    for (std::size_t i = 0; i < s.num_blocks(); ++i) m.add_kraus(i, i, CMatrix::identity(s.dim(i)));
    return m;
}

CPMap conjugation(const AlgebraElement& u) {
    const auto& s = u.structure();
    CPMap m(s);
    for (std::size_t i = 0; i < s.num_blocks(); ++i) m.add_kraus(i, i, u.block(i));
    return m;
}

CPMap scaled_identity(const BlockStructure& s, double c) {
    if (c < 0) throw Error(ErrorKind::InvalidArgument, "scale must be nonnegative");
    CPMap m(s);
    for (std::size_t i = 0; i < s.num_blocks(); ++i)
        m.add_kraus(i, i, CMatrix::identity(s.dim(i)) * std::sqrt(c));
    return m;
}

CPMap amplitude_damping(const BlockStructure& s, double gamma) {
    if (!(gamma >= 0.0 && gamma <= 1.0))
        throw Error(ErrorKind::InvalidArgument, "damping rate must lie in [0, 1]");
    CPMap m(s);
    for (std::size_t i = 0; i < s.num_blocks(); ++i) {
        const auto n = s.dim(i);
        CMatrix a0 = CMatrix::identity(n);
        for (std::size_t k = 1; k < n; ++k) a0(k, k) = std::sqrt(1.0 - gamma);
        m.add_kraus(i, i, std::move(a0));
        for (std::size_t k = 1; k < n; ++k) m.add_kraus(i, i, CMatrix::unit(n, k, 0) * std::sqrt(gamma));
    }
    return m;
}

CPMap rotation(const BlockStructure& s, double theta) {
    CPMap m(s);
    for (std::size_t i = 0; i < s.num_blocks(); ++i) {
        const auto n = s.dim(i);
        CMatrix ustar(n, n);
        for (std::size_t k = 0; k < n; ++k) ustar(k, k) = std::polar(1.0, -theta * double(k));
        m.add_kraus(i, i, std::move(ustar));
    }
    return m;
}

std::vector<CPMap> random_mixture_family(std::uint64_t seed, const BlockStructure& s,
                                         std::size_t d, std::size_t terms) {
    if (d == 0 || terms == 0) throw Error(ErrorKind::InvalidArgument, "need d, terms >= 1");
    Rng rng(seed);
    std::vector<CMatrix> hams;
    for (auto n : s.dims()) hams.push_back(rng.hermitian(n));
    std::vector<CPMap> gens;
    for (std::size_t g = 0; g < d; ++g) {
        std::vector<double> w(terms);
        double total = 0.0;
        for (auto& x : w) total += (x = rng.uniform(0.1, 1.0));
        CPMap m(s);
        for (std::size_t t = 0; t < terms; ++t) {
            const double time = rng.uniform(-std::numbers::pi, std::numbers::pi);
            for (std::size_t i = 0; i < s.num_blocks(); ++i)
                m.add_kraus(i, i, unitary_exp(hams[i], time) * std::sqrt(w[t] / total));
        }
        gens.push_back(std::move(m));
    }
    return gens;
}

} // namespace cpfix
