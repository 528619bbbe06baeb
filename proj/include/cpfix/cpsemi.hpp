#pragma once

#include <cstddef>
#include <cstdint>
#include <tuple>
#include <span>
#include <vector>

#include "cpfix/matcore.hpp"
#include "cpfix/vnalg.hpp"

namespace cpfix {

/// Matrix of a linear map on coordinatized algebra elements
/// (row-major block entries concatenated, see AlgebraElement::coords).
struct Superoperator {
    BlockStructure source;
    BlockStructure target;
    CMatrix matrix;  // target.coord_dim() x source.coord_dim()

    AlgebraElement apply(const AlgebraElement& x) const;
    static Superoperator identity(const BlockStructure& s);
};

Superoperator operator*(const Superoperator& a, const Superoperator& b);
/// Operator norm of the matrix (Euclidean on coordinates).
double norm(const Superoperator& s);

/// Completely positive map in block-Kraus form:
///   phi(x)_j = sum_i sum_m A_{j,i,m} x_i A_{j,i,m}^*
/// with A_{j,i,m} of shape n_j x n_i.
class CPMap {
public:
    using KrausTable = std::vector<std::vector<std::vector<CMatrix>>>;  // [j][i][m]

    CPMap() = default;
    CPMap(BlockStructure source, BlockStructure target, KrausTable kraus);
    /// Endomap on s with no Kraus operators (the zero map).
    explicit CPMap(BlockStructure s);

    const BlockStructure& source() const noexcept { return source_; }
    const BlockStructure& target() const noexcept { return target_; }
    std::span<const CMatrix> kraus(std::size_t j, std::size_t i) const { return kraus_.at(j).at(i); }
    const KrausTable& kraus_table() const noexcept { return kraus_; }
    void add_kraus(std::size_t j, std::size_t i, CMatrix a);
    std::size_t kraus_count() const;
    bool is_endomap() const { return source_ == target_; }

private:
    BlockStructure source_;
    BlockStructure target_;
    KrausTable kraus_;
};

AlgebraElement apply(const CPMap& phi, const AlgebraElement& x);

/// phi o psi. Kraus lists longer than the Choi rank bound are re-derived
/// from the Choi matrix, so repeated composition stays small.
CPMap compose(const CPMap& phi, const CPMap& psi);

Superoperator to_superoperator(const CPMap& phi);

/// Blockwise Choi matrices C_{j,i} = sum_{c,d} E_cd (x) phi_{j,i}(E_cd).
std::vector<std::vector<CMatrix>> choi_blocks(const Superoperator& s);
/// Smallest eigenvalue over all blockwise Choi matrices.
double choi_min_eigenvalue(const Superoperator& s);

/// Rebuilds a Kraus form from a raw superoperator; throws NotCP when a
/// Choi block has an eigenvalue below -tol * max(1, ||C||).
CPMap from_superoperator(const Superoperator& s, double tol = 1e-9);

struct CPReport {
    bool is_cp = true;
    bool is_contractive = false;
    bool is_unital = false;
    /// min eigenvalue of 1 - phi(1)
    double contraction_margin = 0.0;
    /// ||phi(1) - 1||
    double unit_defect = 0.0;
    /// only meaningful when check_choi was requested
    double choi_min_eig = 0.0;
};

/// Kraus-form maps are CP by construction; check_choi forces the Choi test
/// (used for maps ingested as raw superoperators).
CPReport validate_cp(const CPMap& phi, double tol = 1e-9, bool check_choi = false);

struct EndomorphismReport {
    bool is_endomorphism = false;
    double multiplicative_defect = 0.0;
    double adjoint_defect = 0.0;
};

EndomorphismReport check_endomorphism(const CPMap& alpha, double tol = 1e-9);
bool validate_endomorphism(const CPMap& alpha, double tol = 1e-9);

/// Weak*-continuity holds automatically in finite dimension: every linear
/// map on a finite-dimensional algebra is normal. Kept as an explicit check.
constexpr bool is_weak_star_continuous(const CPMap&) { return true; }

/// Commuting family {beta_1, ..., beta_d} presenting the semigroup
/// s -> beta_1^{s_1} o ... o beta_d^{s_d} over N^d.
class SemigroupFamily {
public:
    /// Validates CP/contractive/commuting (and endomorphic when requested);
    /// throws NotContractive, NotCommuting or NotEndomorphism.
    static SemigroupFamily create(std::vector<CPMap> generators, bool require_endomorphic = false,
                                  double tol = 1e-9);
    /// No validation; for callers that want a report on a suspect family.
    static SemigroupFamily unchecked(std::vector<CPMap> generators);

    const BlockStructure& structure() const { return generators_.front().source(); }
    std::span<const CPMap> generators() const noexcept { return generators_; }
    std::size_t rank() const noexcept { return generators_.size(); }
    bool is_endomorphic() const noexcept { return endomorphic_; }
    /// Cached superoperators, one per generator.
    std::span<const Superoperator> superoperators() const noexcept { return superops_; }

    /// One diagonal step beta_1 o ... o beta_d applied to x.
    AlgebraElement diagonal_step(const AlgebraElement& x) const;
    /// beta_s(x) by repeated generator application.
    AlgebraElement apply_power(std::span<const std::size_t> s, const AlgebraElement& x) const;

private:
    std::vector<CPMap> generators_;
    std::vector<Superoperator> superops_;
    bool endomorphic_ = false;
};

struct FamilyReport {
    bool commuting = true;
    bool all_cp = true;
    bool all_contractive = true;
    bool is_endomorphic = false;
    double max_commutator = 0.0;
    /// (i, j, norm) for i < j
    std::vector<std::tuple<std::size_t, std::size_t, double>> commutators;
    std::vector<CPReport> generators;
    bool ok() const { return commuting && all_cp && all_contractive; }
};

FamilyReport validate_family(std::span<const CPMap> generators, double tol = 1e-9);
inline FamilyReport validate_family(const SemigroupFamily& f, double tol = 1e-9) {
    return validate_family(f.generators(), tol);
}

/// beta_s as a map; s.size() must equal the family rank.
CPMap power(const SemigroupFamily& family, std::span<const std::size_t> s);

// ---- model builders --------------------------------------------------------

CPMap identity_map(const BlockStructure& s);
/// y -> u y u^*, blockwise.
CPMap conjugation(const AlgebraElement& u);
/// y -> c * y for c >= 0.
CPMap scaled_identity(const BlockStructure& s, double c);
/// Heisenberg amplitude damping on each block: level j > 0 decays to 0 with
/// rate gamma. Kraus: diag(1, sqrt(1-gamma), ...) and sqrt(gamma) E_{j0}.
CPMap amplitude_damping(const BlockStructure& s, double gamma);
/// y -> u^* y u with u = diag(1, e^{i theta}, e^{2 i theta}, ...) per block.
CPMap rotation(const BlockStructure& s, double theta);

/// d commuting generators, each a convex mixture of conjugations by
/// commuting unitaries (functions of one random Hermitian per block).
std::vector<CPMap> random_mixture_family(std::uint64_t seed, const BlockStructure& s,
                                         std::size_t d, std::size_t terms = 3);

} // namespace cpfix
