#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cpfix/cpsemi.hpp"
#include "cpfix/dilation.hpp"
#include "cpfix/vnalg.hpp"

namespace cpfix {

/// Tolerances, caps and sampling sizes used by the analyses. Every report
/// echoes the values it ran with.
struct AnalysisConfig {
    double tol_eq = 1e-8;          // membership and equality of fixed points
    double convergence = 1e-10;    // Cauchy increment for strong limits
    double psd = 1e-9;             // order relations: min-eig >= -psd
    std::size_t max_iter = 100000; // strong-limit iterations
    std::size_t cesaro_cap = 1000000;
    std::size_t cauchy_window = 5;
    std::size_t levels = 3;        // matrix levels for the complete isometry test
    std::size_t samples = 100;
    std::uint64_t seed = 0;
    double minimality_tol = 1e-10;
    std::size_t minimality_max_iter = 10000;
};

/// Joint fixed points of a family, as a Hermitian basis orthonormal in the
/// trace inner product.
struct FixedSpace {
    BlockStructure structure;
    std::vector<AlgebraElement> basis;

    std::size_t dimension() const noexcept { return basis.size(); }
    /// Trace-norm distance from y to the span.
    double distance(const AlgebraElement& y) const;
    bool contains(const AlgebraElement& y, double tol = 1e-8) const;
};

FixedSpace fixed_space(const SemigroupFamily& family, double tol = 1e-9);

/// Span of the C*-algebra generated by a fixed space.
struct CStarSpan {
    BlockStructure structure;
    std::vector<AlgebraElement> basis;
    bool is_unital = false;
    std::size_t rounds = 0;

    std::size_t dimension() const noexcept { return basis.size(); }
    double distance(const AlgebraElement& y) const;
    bool contains(const AlgebraElement& y, double tol = 1e-8) const;
};

CStarSpan cstar_closure(const FixedSpace& fs);

struct CesaroDiagnostics {
    std::size_t terms = 0;            // Cesaro terms averaged
    double final_increment = 0.0;     // ||A_{2N} - A_N||_F at acceptance
    int polish_steps = 0;
    double intertwining_defect = 0.0; // ||T P - P||_F
};

/// rho = P_1 ... P_d, with P_i the Cesaro projection of generator i.
struct ErgodicProjection {
    Superoperator rho;
    std::vector<CesaroDiagnostics> diagnostics;

    AlgebraElement apply(const AlgebraElement& y) const { return rho.apply(y); }
};

/// Throws NotContractive for a non-contractive generator and NoConvergence if
/// the Cesaro averages do not settle within cesaro_cap terms.
ErgodicProjection ergodic_projection(const SemigroupFamily& family, std::size_t cesaro_cap = 1000000,
                                     double increment_tol = 1e-11);

struct LimitResult {
    AlgebraElement value;
    std::size_t iterations = 0;
    double last_increment = 0.0;
};

/// Strong limit of the diagonal orbit theta^n(y), theta = beta_1 o ... o beta_d.
/// Succeeds once `window` consecutive increments are <= tol and the iterate is
/// fixed by every generator within 10 tol; throws Divergent at max_iter.
LimitResult family_limit(const SemigroupFamily& family, const AlgebraElement& y, double tol,
                         std::size_t max_iter, std::size_t window = 5);

/// Phi(y) = lim_s phi_s(y).
inline LimitResult phi_limit(const SemigroupFamily& family, const AlgebraElement& y,
                             double tol = 1e-10, std::size_t max_iter = 100000,
                             std::size_t window = 5) {
    return family_limit(family, y, tol, max_iter, window);
}

/// pi(y) = lim_s alpha_s(y) for y in C*(N^phi). Throws NotMinimal when the
/// instance fails the minimality check and NotInCStar for y outside `cstar`.
LimitResult pi_limit(const DilationInstance& inst, const CStarSpan& cstar, const AlgebraElement& y,
                     double tol = 1e-10, std::size_t max_iter = 100000, std::size_t window = 5);
LimitResult pi_limit(const DilationInstance& inst, const AlgebraElement& y, double tol = 1e-10,
                     std::size_t max_iter = 100000);

struct LiftResult {
    AlgebraElement z;          // linear-algebra route
    AlgebraElement z_limit;    // strong-limit route
    double route_gap = 0.0;    // ||z - z_limit||
    double compress_residual = 0.0;  // ||E(z) - y||
};

/// z in M^alpha with E(z) = y, computed through pi and through the linear
/// system E(sum c_k b_k) = y over a basis of M^alpha. Throws NotFixed when y
/// is not in N^phi and Inconsistent when the routes disagree by more than
/// route_tol.
LiftResult lift_fixed_point(const DilationInstance& inst, const AlgebraElement& y,
                            double route_tol = 1e-7);

struct IsometryReport {
    std::size_t ambient_fixed_dim = 0;
    std::size_t corner_fixed_dim = 0;
    bool bijective = false;
    double min_singular = 0.0;  // smallest singular value of E on M^alpha
    std::vector<double> level_defects;  // max relative defect per level k
    double max_defect = 0.0;
    bool pass = false;
};

/// Compares ||X|| and ||E^{(k)}(X)|| on random X in M_k(M^alpha), k = 1..levels.
IsometryReport check_complete_isometry(const DilationInstance& inst, std::size_t levels,
                                       std::size_t samples, std::uint64_t seed = 0);

struct KernelIdealReport {
    std::size_t cstar_dim = 0;
    std::size_t kernel_dim = 0;
    std::size_t ideal_dim = 0;       // two-sided ideal from x*x - Phi(x*x)
    std::size_t left_ideal_dim = 0;  // left ideal from xy - Phi(xy)
    double residual = 0.0;           // worst cross-membership distance
    bool pass = false;
};

KernelIdealReport kernel_ideal_check(const FixedSpace& fs, const CStarSpan& cstar,
                                     const ErgodicProjection& rho, std::uint64_t seed = 0,
                                     std::size_t random_generators = 8);
KernelIdealReport kernel_ideal_check(const SemigroupFamily& family);

// ---- property suite --------------------------------------------------------

enum class Status { Pass, Fail, Error, Skipped };
const char* to_string(Status s);

struct CheckResult {
    std::string name;
    Status status = Status::Pass;
    double residual = 0.0;
    double threshold = 0.0;
    std::size_t count = 0;  // samples or items examined
    std::string note;
};

struct SuiteReport {
    std::uint64_t seed = 0;
    std::size_t samples = 0;
    std::size_t fixed_dim = 0;
    std::size_t cstar_dim = 0;
    std::vector<CheckResult> checks;

    bool all_pass() const;
    const CheckResult* find(const std::string& name) const;
};

/// Bare family: ergodic projection invariants, Kadison-Schwarz, monotone
/// nets, strong limits, Choi-Effros identity, kernel ideal and the vector
/// inequality. Numerical errors become named Error entries.
SuiteReport property_suite(const SemigroupFamily& family, const AnalysisConfig& cfg);

/// Dilation instance: the bare suite on the compressed family plus
/// co-invariance, minimality, dimension match, complete isometry, pi o E = id
/// on M^alpha and E o pi = Phi on C*(N^phi).
SuiteReport property_suite(const DilationInstance& inst, const AnalysisConfig& cfg);

} // namespace cpfix
