#pragma once

#include <cstdint>
#include <optional>

#include "cpfix/cpsemi.hpp"
#include "cpfix/vnalg.hpp"

namespace cpfix {

/// alpha_i(1 - p) <= 1 - p for every generator. Generators suffice: composites
/// inherit the bound because endomorphisms preserve order.
bool check_coinvariance(const SemigroupFamily& alpha, const ProjectionElement& p,
                        double tol = 1e-9);
/// Smallest eigenvalue of (1 - p) - alpha_i(1 - p) over generators.
double coinvariance_margin(const SemigroupFamily& alpha, const ProjectionElement& p);

enum class Minimality { Minimal, NonMinimal, Undetermined };
const char* to_string(Minimality m);

struct MinimalityResult {
    Minimality verdict = Minimality::Undetermined;
    /// Last iterate alpha_{(n,...,n)}(1 - p).
    AlgebraElement limit;
    /// Diagonal steps taken.
    std::size_t steps = 0;
    /// min over steps of min-eig(L_n - L_{n+1}); nonnegative up to roundoff.
    double monotone_margin = 0.0;
};

/// Follows L_n = alpha_{(n,...,n)}(1 - p) until it stabilizes. Throws
/// CoInvarianceViolated when p is not co-invariant.
MinimalityResult check_minimality(const SemigroupFamily& alpha, const ProjectionElement& p,
                                  double tol = 1e-10, std::size_t max_iter = 10000);

/// Compression phi_i(y) = p alpha_i(y) p on N = pMp, in Kraus form
/// u_j^* A u_i. Verifies the semigroup law on matrix units and random samples.
SemigroupFamily compress_semigroup(const SemigroupFamily& alpha, const ProjectionElement& p,
                                   const CornerEmbedding& emb, std::uint64_t seed = 0);

/// An endomorphic family, a co-invariant projection and the compressed family.
struct DilationInstance {
    BlockStructure ambient;
    SemigroupFamily alpha;
    ProjectionElement p;
    CornerEmbedding embedding;
    SemigroupFamily phi;
    MinimalityResult minimality;

    bool is_minimal() const { return minimality.verdict == Minimality::Minimal; }
};

/// Validates alpha (endomorphic, commuting), p (co-invariant), compresses and
/// runs the minimality check.
DilationInstance make_dilation(std::vector<CPMap> alpha_generators, const AlgebraElement& p,
                               double minimality_tol = 1e-10,
                               std::size_t minimality_max_iter = 10000);

/// M = M_n^{(+)(m+1)}, alpha(x_0, ..., x_m) = (u x_0 u^*, x_0, ..., x_{m-1}),
/// p = unit of block 0.
DilationInstance build_tail_shift(std::size_t n, std::size_t m, const CMatrix& u);

/// Generators Ad(u_i (+) ... (+) u_i) o shift on M_n^{(+)(m+1)} for commuting
/// unitaries u_i; the conjugated tail keeps distinct generators commuting.
std::vector<CPMap> conjugated_shift_generators(std::size_t n, std::size_t m,
                                               std::span<const CMatrix> unitaries);

struct RandomInstanceParams {
    std::size_t n_min = 2;
    std::size_t n_max = 3;
    std::size_t m_max = 4;
    std::size_t d = 1;
};

/// Seeded tail-shift instance. d = 1 uses build_tail_shift; d = 2 uses the
/// conjugated shift with u_1, u_2 = exp(i t_k H) for one random Hermitian H
/// (whose spectrum is sometimes made degenerate to get non-abelian commutants).
DilationInstance build_random_instance(std::uint64_t seed, const RandomInstanceParams& params);

} // namespace cpfix
