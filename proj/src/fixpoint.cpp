#include "cpfix/fixpoint.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "cpfix/error.hpp"
#include "cpfix/random.hpp"

namespace cpfix {

namespace {

const Complex kI{0.0, 1.0};

AlgebraElement hermitian_part(const AlgebraElement& x) { return (x + x.adjoint()) * 0.5; }
AlgebraElement skew_part(const AlgebraElement& x) { return (x - x.adjoint()) * (-0.5 * kI); }

// Grows an orthonormal basis by column-pivoted Gram-Schmidt: repeatedly takes
// the candidate with the largest residual against the current basis while
// that residual exceeds abs_tol (absolute, so roundoff-sized candidates never
// get normalized into spurious directions). Stops after max_count vectors.
std::vector<std::vector<Complex>> pivoted_span(std::vector<std::vector<Complex>> basis,
                                               std::vector<std::vector<Complex>> cand,
                                               double abs_tol, std::size_t max_count) {
    auto project_out = [](std::vector<Complex>& v, const std::vector<Complex>& b) {
        Complex c = 0.0;
        for (std::size_t k = 0; k < v.size(); ++k) c += std::conj(b[k]) * v[k];
        for (std::size_t k = 0; k < v.size(); ++k) v[k] -= c * b[k];
    };
    for (auto& v : cand)
        for (const auto& b : basis) project_out(v, b);
    while (basis.size() < max_count && !cand.empty()) {
        std::size_t best = 0;
        double best_norm = -1.0;
        for (std::size_t k = 0; k < cand.size(); ++k) {
            const double n = vector_norm(cand[k]);
            if (n > best_norm) best_norm = n, best = k;
        }
        if (best_norm <= abs_tol) break;
        std::vector<Complex> b = std::move(cand[best]);
        cand.erase(cand.begin() + std::ptrdiff_t(best));
        for (const auto& q : basis) project_out(b, q);  // second pass
        const double n = vector_norm(b);
        for (auto& x : b) x /= n;
        for (auto& v : cand) project_out(v, b);
        basis.push_back(std::move(b));
    }
    return basis;
}

// Hermitian and skew-Hermitian parts of each vector; they span the same
// self-adjoint space and real combinations of them stay Hermitian.
std::vector<std::vector<Complex>> hermitian_parts(const BlockStructure& s,
                                                  std::span<const std::vector<Complex>> vectors) {
    std::vector<std::vector<Complex>> out;
    out.reserve(2 * vectors.size());
    for (const auto& v : vectors) {
        const auto x = AlgebraElement::from_coords(s, v);
        out.push_back(hermitian_part(x).coords());
        out.push_back(skew_part(x).coords());
    }
    return out;
}

std::vector<AlgebraElement> as_hermitian(const BlockStructure& s,
                                         std::span<const std::vector<Complex>> vectors) {
    std::vector<AlgebraElement> out;
    for (const auto& v : vectors) {
        auto h = hermitian_part(AlgebraElement::from_coords(s, v));
        h *= 1.0 / frobenius_norm(h);
        out.push_back(std::move(h));
    }
    return out;
}

std::vector<std::vector<Complex>> coords_of(std::span<const AlgebraElement> xs) {
    std::vector<std::vector<Complex>> c;
    c.reserve(xs.size());
    for (const auto& x : xs) c.push_back(x.coords());
    return c;
}

double span_distance(std::span<const AlgebraElement> basis, const AlgebraElement& y) {
    const auto c = coords_of(basis);
    return distance_to_span(y.coords(), c);
}

AlgebraElement random_combination(Rng& rng, std::span<const AlgebraElement> basis,
                                  const BlockStructure& s) {
    AlgebraElement x(s);
    for (const auto& b : basis) x += b * rng.cnormal();
    const double n = x.norm();
    if (n > 0) x *= 1.0 / n;
    return x;
}

double fro(const CMatrix& m) { return m.frobenius_norm(); }

} // namespace

// ---- fixed spaces ----------------------------------------------------------

double FixedSpace::distance(const AlgebraElement& y) const { return span_distance(basis, y); }

bool FixedSpace::contains(const AlgebraElement& y, double tol) const {
    return distance(y) <= tol * std::max(1.0, frobenius_norm(y));
}

FixedSpace fixed_space(const SemigroupFamily& family, double tol) {
    const auto& s = family.structure();
    const std::size_t d = s.coord_dim();
    std::vector<CMatrix> parts;
    for (const auto& op : family.superoperators())
        parts.push_back(op.matrix - CMatrix::identity(d));
    const auto null = nullspace(vstack(parts), tol);
    const auto spanned = pivoted_span({}, hermitian_parts(s, null), 1e-6, null.size());
    FixedSpace fs{s, as_hermitian(s, spanned)};
    if (fs.basis.size() != null.size())
        throw Error(ErrorKind::Inconsistent, "fixed space is not self-adjoint: dim " +
                                                 std::to_string(null.size()) + " vs Hermitian " +
                                                 std::to_string(fs.basis.size()));
    return fs;
}

double CStarSpan::distance(const AlgebraElement& y) const { return span_distance(basis, y); }

bool CStarSpan::contains(const AlgebraElement& y, double tol) const {
    return distance(y) <= tol * std::max(1.0, frobenius_norm(y));
}

CStarSpan cstar_closure(const FixedSpace& fs) {
    CStarSpan cs{fs.structure, fs.basis};
    const std::size_t cap = fs.structure.coord_dim();
    for (std::size_t round = 0; round <= cap; ++round) {
        std::vector<std::vector<Complex>> products;
        for (const auto& a : cs.basis)
            for (const auto& b : cs.basis) products.push_back((a * b).coords());
        const std::size_t before = cs.basis.size();
        const auto grown = pivoted_span(coords_of(cs.basis), hermitian_parts(cs.structure, products),
                                        1e-7, cap);
        cs.rounds = round + 1;
        if (grown.size() == before) break;
        cs.basis = as_hermitian(cs.structure, grown);
    }
    if (!cs.basis.empty()) {
        const auto one = AlgebraElement::identity(cs.structure);
        cs.is_unital = cs.distance(one) <= 1e-8 * frobenius_norm(one);
    }
    return cs;
}

// ---- ergodic projection ----------------------------------------------------

namespace {

CesaroDiagnostics cesaro_projection(const CMatrix& t, std::size_t cap, double increment_tol,
                                    CMatrix& out) {
    const std::size_t d = t.rows();
    const CMatrix id = CMatrix::identity(d);
    CMatrix avg = id;  // A_N = (1/N) sum_{n<N} T^n
    CMatrix pw = t;    // T^N
    std::size_t terms = 1;
    CesaroDiagnostics diag;
    while (2 * terms <= cap) {
        CMatrix next = avg * (id + pw) * 0.5;
        pw = pw * pw;
        terms *= 2;
        const double inc = fro(next - avg);
        avg = std::move(next);

        // Newton's idempotent iteration Q -> 3Q^2 - 2Q^3 snaps the average to
        // the spectral projection for eigenvalue 1 once the other modes are
        // small; accepted only if it commutes with T and is fixed by it.
        const double defect = fro(avg * avg - avg);
        if (inc > increment_tol && defect > 0.1) continue;
        CMatrix q = avg;
        int steps = 0;
        for (; steps < 64; ++steps) {
            const CMatrix q2 = q * q;
            const double dq = fro(q2 - q);
            if (dq <= 1e-15 * std::max(1.0, fro(q)) * double(d)) break;
            q = q2 * 3.0 - q2 * q * 2.0;
        }
        const double scale = std::max(1.0, fro(q));
        const double inter = std::max(fro(t * q - q), fro(q * t - q));
        const double idem = fro(q * q - q);
        if (inter <= 1e-10 * scale && idem <= 1e-10 * scale) {
            diag.terms = terms;
            diag.final_increment = inc;
            diag.polish_steps = steps;
            diag.intertwining_defect = inter;
            out = std::move(q);
            return diag;
        }
    }
    throw Error(ErrorKind::NoConvergence,
                "Cesaro averages did not settle within " + std::to_string(cap) + " terms");
}

} // namespace

ErgodicProjection ergodic_projection(const SemigroupFamily& family, std::size_t cesaro_cap,
                                     double increment_tol) {
    const auto& s = family.structure();
    for (std::size_t k = 0; k < family.rank(); ++k) {
        const auto rep = validate_cp(family.generators()[k]);
        if (!rep.is_contractive)
            throw Error(ErrorKind::NotContractive,
                        "generator " + std::to_string(k) + " has min eig(1 - phi(1)) = " +
                            std::to_string(rep.contraction_margin));
    }
    ErgodicProjection ep{Superoperator::identity(s), {}};
    for (const auto& op : family.superoperators()) {
        CMatrix p;
        ep.diagnostics.push_back(cesaro_projection(op.matrix, cesaro_cap, increment_tol, p));
        ep.rho.matrix = ep.rho.matrix * p;
    }
    return ep;
}

// ---- strong limits ---------------------------------------------------------

LimitResult family_limit(const SemigroupFamily& family, const AlgebraElement& y, double tol,
                         std::size_t max_iter, std::size_t window) {
    AlgebraElement cur = y;
    std::size_t quiet = 0;
    double inc = 0.0;
    for (std::size_t it = 1; it <= max_iter; ++it) {
        AlgebraElement next = family.diagonal_step(cur);
        inc = (next - cur).norm();
        cur = std::move(next);
        quiet = inc <= tol ? quiet + 1 : 0;
        if (quiet >= window) {
            double drift = 0.0;
            for (const auto& g : family.generators()) drift = std::max(drift, (apply(g, cur) - cur).norm());
            if (drift <= 10.0 * tol) return {std::move(cur), it, inc};
            quiet = 0;
        }
    }
    throw Error(ErrorKind::Divergent, "no Cauchy stabilization in " + std::to_string(max_iter) +
                                          " steps (last increment " + std::to_string(inc) + ")");
}

LimitResult pi_limit(const DilationInstance& inst, const CStarSpan& cstar, const AlgebraElement& y,
                     double tol, std::size_t max_iter, std::size_t window) {
    if (!inst.is_minimal())
        throw Error(ErrorKind::NotMinimal,
                    std::string("minimality verdict is ") + to_string(inst.minimality.verdict));
    if (!cstar.contains(y))
        throw Error(ErrorKind::NotInCStar, "distance " + std::to_string(cstar.distance(y)));
    return family_limit(inst.alpha, inject(inst.embedding, y), tol, max_iter, window);
}

LimitResult pi_limit(const DilationInstance& inst, const AlgebraElement& y, double tol,
                     std::size_t max_iter) {
    return pi_limit(inst, cstar_closure(fixed_space(inst.phi)), y, tol, max_iter);
}

// ---- lifting ---------------------------------------------------------------

namespace {

// Least-squares coefficients c minimizing ||sum_k c_k E(b_k) - y||, plus the
// smallest singular value of the system.
std::vector<Complex> solve_lift(const CornerEmbedding& emb, std::span<const AlgebraElement> basis,
                                const AlgebraElement& y, double* min_singular = nullptr) {
    const std::size_t k = basis.size();
    std::vector<std::vector<Complex>> cols;
    for (const auto& b : basis) cols.push_back(compress(emb, b).coords());
    if (k == 0) {
        if (min_singular) *min_singular = 0.0;
        return {};
    }
    const CMatrix c = hstack_columns(cols, emb.corner.coord_dim());
    const auto e = eig_hermitian(c.adjoint() * c, std::numeric_limits<double>::infinity());
    if (min_singular) *min_singular = std::sqrt(std::max(0.0, e.values.front()));
    const CMatrix rhs = c.adjoint() * CMatrix::column(y.coords());
    const CMatrix w = e.vectors.adjoint() * rhs;
    CMatrix scaled(k, 1);
    const double cut = 1e-12 * std::max(1.0, e.values.back());
    for (std::size_t i = 0; i < k; ++i)
        if (e.values[i] > cut) scaled(i, 0) = w(i, 0) / e.values[i];
    const CMatrix sol = e.vectors * scaled;
    return sol.col_vector(0);
}

AlgebraElement combine(const BlockStructure& s, std::span<const AlgebraElement> basis,
                       std::span<const Complex> coeff) {
    AlgebraElement z(s);
    for (std::size_t i = 0; i < basis.size(); ++i) z += basis[i] * coeff[i];
    return z;
}

} // namespace

LiftResult lift_fixed_point(const DilationInstance& inst, const AlgebraElement& y, double route_tol) {
    const auto fs_n = fixed_space(inst.phi);
    if (!fs_n.contains(y))
        throw Error(ErrorKind::NotFixed, "distance to N^phi " + std::to_string(fs_n.distance(y)));
    const auto fs_m = fixed_space(inst.alpha);
    LiftResult r;
    r.z = combine(inst.ambient, fs_m.basis, solve_lift(inst.embedding, fs_m.basis, y));
    r.compress_residual = (compress(inst.embedding, r.z) - y).norm();
    if (r.compress_residual > 1e-8 * std::max(1.0, y.norm()))
        throw Error(ErrorKind::Inconsistent,
                    "E(z) misses y by " + std::to_string(r.compress_residual));
    r.z_limit = pi_limit(inst, cstar_closure(fs_n), y).value;
    r.route_gap = (r.z - r.z_limit).norm();
    if (r.route_gap > route_tol)
        throw Error(ErrorKind::Inconsistent, "routes differ by " + std::to_string(r.route_gap));
    return r;
}

// ---- complete isometry -----------------------------------------------------

IsometryReport check_complete_isometry(const DilationInstance& inst, std::size_t levels,
                                       std::size_t samples, std::uint64_t seed) {
    const auto fs_m = fixed_space(inst.alpha);
    const auto fs_n = fixed_space(inst.phi);
    IsometryReport r;
    r.ambient_fixed_dim = fs_m.dimension();
    r.corner_fixed_dim = fs_n.dimension();
    solve_lift(inst.embedding, fs_m.basis, AlgebraElement(inst.embedding.corner), &r.min_singular);
    r.bijective = r.ambient_fixed_dim == r.corner_fixed_dim && (r.ambient_fixed_dim == 0 || r.min_singular > 1e-8);
    Rng rng(seed);
    for (std::size_t k = 1; k <= levels; ++k) {
        double worst = 0.0;
        for (std::size_t n = 0; n < samples && !fs_m.basis.empty(); ++n) {
            std::vector<AlgebraElement> entries(k * k, AlgebraElement(inst.ambient));
            for (const auto& b : fs_m.basis) {
                const CMatrix coeff = rng.gaussian(k, k);
                for (std::size_t e = 0; e < k * k; ++e) entries[e] += b * coeff.data()[e];
            }
            const double nx = amplify_element(entries, k).norm();
            const double ne = amplify_element(compress_entrywise(inst.embedding, entries), k).norm();
            worst = std::max(worst, std::abs(ne - nx) / std::max(1.0, nx));
        }
        r.level_defects.push_back(worst);
        r.max_defect = std::max(r.max_defect, worst);
    }
    r.pass = r.bijective && r.max_defect <= 1e-8;
    return r;
}

// ---- kernel ideal ----------------------------------------------------------

KernelIdealReport kernel_ideal_check(const FixedSpace& fs, const CStarSpan& cstar,
                                     const ErgodicProjection& rho, std::uint64_t seed,
                                     std::size_t random_generators) {
    KernelIdealReport r;
    r.cstar_dim = cstar.dimension();
    if (fs.dimension() == 0) {
        r.pass = true;
        return r;
    }
    const auto& s = cstar.structure;
    const std::size_t d = s.coord_dim();

    std::vector<std::vector<Complex>> images;
    for (const auto& c : cstar.basis) images.push_back(rho.apply(c).coords());
    const auto null = nullspace(hstack_columns(images, d), 1e-9);
    std::vector<std::vector<Complex>> kernel_vecs;
    for (const auto& v : null) kernel_vecs.push_back(combine(s, cstar.basis, v).coords());
    const auto kernel = pivoted_span({}, kernel_vecs, 1e-8, d);
    r.kernel_dim = kernel.size();

    Rng rng(seed);
    std::vector<AlgebraElement> xs(fs.basis.begin(), fs.basis.end());
    for (std::size_t k = 0; k < random_generators; ++k) xs.push_back(random_combination(rng, fs.basis, s));
    std::vector<AlgebraElement> multipliers(cstar.basis.begin(), cstar.basis.end());
    multipliers.push_back(AlgebraElement::identity(s));

    // unit-norm defect q - Phi(q), or nothing when it vanishes
    auto defect_of = [&](const AlgebraElement& q) -> std::optional<AlgebraElement> {
        auto g = q - rho.apply(q);
        const double n = frobenius_norm(g);
        if (n <= 1e-9) return std::nullopt;
        return g * (1.0 / n);
    };
    std::vector<std::vector<Complex>> two_sided, left;
    for (const auto& x : xs) {
        const auto g = defect_of(x.adjoint() * x);
        if (!g) continue;
        for (const auto& a : multipliers)
            for (const auto& b : multipliers) two_sided.push_back((a * *g * b).coords());
    }
    for (const auto& x : xs)
        for (const auto& y : xs) {
            const auto g = defect_of(x * y);
            if (!g) continue;
            for (const auto& a : multipliers) left.push_back((a * *g).coords());
        }
    const auto ideal = pivoted_span({}, std::move(two_sided), 1e-8, d);
    const auto left_ideal = pivoted_span({}, std::move(left), 1e-8, d);
    r.ideal_dim = ideal.size();
    r.left_ideal_dim = left_ideal.size();

    auto cross = [](const auto& from, const auto& to) {
        double worst = 0.0;
        for (const auto& v : from) worst = std::max(worst, distance_to_span(v, to));
        return worst;
    };
    r.residual = std::max({cross(ideal, kernel), cross(kernel, ideal), cross(left_ideal, kernel),
                           cross(kernel, left_ideal)});
    r.pass = r.kernel_dim == r.ideal_dim && r.kernel_dim == r.left_ideal_dim && r.residual <= 1e-8;
    return r;
}

KernelIdealReport kernel_ideal_check(const SemigroupFamily& family) {
    const auto fs = fixed_space(family);
    const auto cs = cstar_closure(fs);
    const auto rho = ergodic_projection(family);
    return kernel_ideal_check(fs, cs, rho);
}

// ---- property suite --------------------------------------------------------

const char* to_string(Status s) {
    switch (s) {
    case Status::Pass: return "PASS";
    case Status::Fail: return "FAIL";
    case Status::Error: return "ERROR";
    case Status::Skipped: return "SKIPPED";
    }
    return "ERROR";
}

bool SuiteReport::all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) {
        return c.status == Status::Pass || c.status == Status::Skipped;
    });
}

const CheckResult* SuiteReport::find(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

namespace {

CheckResult bounded(std::string name, double residual, double threshold, std::size_t count,
                    std::string note = {}) {
    CheckResult c{std::move(name), residual <= threshold ? Status::Pass : Status::Fail, residual,
                  threshold, count, std::move(note)};
    return c;
}

// Runs body, turning toolkit errors into a named entry: non-convergence is a
// FAIL, anything else an ERROR.
void guarded(SuiteReport& rep, const std::string& name, const std::function<CheckResult()>& body) {
    try {
        rep.checks.push_back(body());
    } catch (const Error& e) {
        const bool soft = e.kind() == ErrorKind::Divergent || e.kind() == ErrorKind::NoConvergence;
        rep.checks.push_back({name, soft ? Status::Fail : Status::Error, 0.0, 0.0, 0, e.what()});
    } catch (const std::exception& e) {
        rep.checks.push_back({name, Status::Error, 0.0, 0.0, 0, e.what()});
    }
}

std::vector<std::size_t> random_index(Rng& rng, std::size_t d, std::size_t max_component) {
    std::vector<std::size_t> s(d);
    for (auto& x : s) x = rng.uniform_index(max_component + 1);
    return s;
}

struct FamilyContext {
    FixedSpace fs;
    CStarSpan cstar;
    std::optional<ErgodicProjection> rho;
};

void bare_checks(SuiteReport& rep, const SemigroupFamily& family, const FamilyContext& ctx,
                 const AnalysisConfig& cfg) {
    const auto& s = family.structure();
    const std::size_t dim = s.coord_dim();
    const std::size_t d = family.rank();
    Rng rng(cfg.seed);

    if (ctx.rho) {
        const auto& rho = *ctx.rho;
        const CMatrix& r = rho.rho.matrix;
        rep.checks.push_back(bounded("RHO_IDEMPOTENT", op_norm(r * r - r), 1e-8, 1));
        guarded(rep, "RHO_CP", [&] {
            const double m = choi_min_eigenvalue(rho.rho);
            return CheckResult{"RHO_CP", m >= -cfg.psd ? Status::Pass : Status::Fail,
                               std::max(0.0, -m), cfg.psd, 1, "min Choi eigenvalue " + std::to_string(m)};
        });
        {
            const auto one = AlgebraElement::identity(s);
            const double m = min_eigenvalue(one - rho.apply(one));
            rep.checks.push_back(bounded("RHO_CONTRACTIVE", std::max(0.0, -m), cfg.psd, 1));
        }
        double inter = 0.0;
        for (const auto& op : family.superoperators())
            inter = std::max({inter, op_norm(op.matrix * r - r), op_norm(r * op.matrix - r)});
        rep.checks.push_back(bounded("RHO_INTERTWINING", inter, 1e-8, d));
        double range = 0.0;
        for (const auto& b : ctx.fs.basis) range = std::max(range, (rho.apply(b) - b).norm());
        const double trace = r.trace().real();
        const auto rank = static_cast<std::size_t>(std::llround(trace));
        auto c = bounded("RHO_RANGE", range, 1e-8, ctx.fs.dimension(),
                         "rank " + std::to_string(rank) + ", dim N^phi " +
                             std::to_string(ctx.fs.dimension()));
        if (rank != ctx.fs.dimension() || std::abs(trace - double(rank)) > 1e-6) c.status = Status::Fail;
        rep.checks.push_back(c);
    }

    guarded(rep, "KS", [&] {
        double worst = -std::numeric_limits<double>::infinity();
        for (std::size_t n = 0; n < cfg.samples; ++n) {
            const auto x = rng.unit_element(s);
            const auto xx = x.adjoint() * x;
            auto probe = [&](const AlgebraElement& fx, const AlgebraElement& fxx) {
                worst = std::max(worst, -min_eigenvalue(fxx - fx.adjoint() * fx));
            };
            for (const auto& g : family.generators()) probe(apply(g, x), apply(g, xx));
            const auto idx = random_index(rng, d, 10);
            probe(family.apply_power(idx, x), family.apply_power(idx, xx));
        }
        return bounded("KS", std::max(0.0, worst), cfg.psd, cfg.samples);
    });

    if (ctx.fs.dimension() == 0) {
        for (const char* name : {"MONO", "LIM", "CSTAR_LIMIT", "CE", "VEC", "KERNEL"})
            rep.checks.push_back({name, Status::Pass, 0.0, 0.0, 0, "trivial fixed space"});
        return;
    }
    if (!ctx.rho) return;
    const auto& rho = *ctx.rho;
    const auto& fixed = ctx.fs.basis;
    const auto& cbasis = ctx.cstar.basis;

    guarded(rep, "MONO", [&] {
        double worst = -std::numeric_limits<double>::infinity();
        for (std::size_t n = 0; n < cfg.samples; ++n) {
            const auto x = random_combination(rng, fixed, s);
            AlgebraElement cur = x.adjoint() * x;
            for (int step = 0; step < 10; ++step) {
                for (const auto& g : family.generators())
                    worst = std::max(worst, -min_eigenvalue(apply(g, cur) - cur));
                cur = family.diagonal_step(cur);
            }
        }
        return bounded("MONO", std::max(0.0, worst), cfg.psd, cfg.samples);
    });

    guarded(rep, "LIM", [&] {
        double worst = 0.0;
        for (std::size_t n = 0; n < cfg.samples; ++n) {
            const auto x = random_combination(rng, fixed, s);
            const auto q = x.adjoint() * x;
            const auto lim = phi_limit(family, q, cfg.convergence, cfg.max_iter, cfg.cauchy_window);
            worst = std::max(worst, (lim.value - rho.apply(q)).norm());
        }
        return bounded("LIM", worst, 1e-7, cfg.samples);
    });

    guarded(rep, "CSTAR_LIMIT", [&] {
        double worst = 0.0;
        for (std::size_t n = 0; n < cfg.samples; ++n) {
            const auto y = random_combination(rng, cbasis, s);
            const auto lim = phi_limit(family, y, cfg.convergence, cfg.max_iter, cfg.cauchy_window);
            worst = std::max(worst, (lim.value - rho.apply(y)).norm());
        }
        return bounded("CSTAR_LIMIT", worst, 1e-7, cfg.samples);
    });

    guarded(rep, "CE", [&] {
        double worst = 0.0;
        for (std::size_t n = 0; n < cfg.samples; ++n) {
            const auto x = random_combination(rng, cbasis, s);
            const auto y = random_combination(rng, cbasis, s);
            const auto px = rho.apply(x);
            const auto lhs = rho.apply(px * y);
            const auto rhs = rho.apply(px * rho.apply(y));
            worst = std::max(worst, (lhs - rhs).norm());
        }
        return bounded("CE", worst, 1e-9, cfg.samples);
    });

    guarded(rep, "VEC", [&] {
        double worst = -std::numeric_limits<double>::infinity();
        for (std::size_t n = 0; n < cfg.samples; ++n) {
            const auto x = random_combination(rng, fixed, s);
            const auto q = x.adjoint() * x;
            auto y = rho.apply(q) - q;
            y = hermitian_part(y);
            std::vector<CMatrix> roots;
            for (const auto& b : y.blocks()) roots.push_back(psd_sqrt(b, 1e-9));
            const AlgebraElement ysqrt(s, std::move(roots));
            const auto a = random_combination(rng, cbasis, s);
            const auto h = CMatrix::column(rng.unit_vector(s.hilbert_dim()));
            const auto idx = random_index(rng, d, 10);
            const CMatrix lhs_vec = embed(family.apply_power(idx, a * ysqrt)) * h;
            const double lhs = std::norm(lhs_vec.frobenius_norm());
            const double an = a.norm();
            const double rhs = an * an * (h.adjoint() * embed(family.apply_power(idx, y)) * h)(0, 0).real();
            worst = std::max(worst, lhs - rhs);
        }
        return bounded("VEC", std::max(0.0, worst), 1e-9, cfg.samples);
    });

    guarded(rep, "KERNEL", [&] {
        const auto k = kernel_ideal_check(ctx.fs, ctx.cstar, rho, cfg.seed);
        CheckResult c{"KERNEL", k.pass ? Status::Pass : Status::Fail, k.residual, 1e-8, k.cstar_dim,
                      "dim ker Phi " + std::to_string(k.kernel_dim) + ", ideal " +
                          std::to_string(k.ideal_dim) + ", left ideal " +
                          std::to_string(k.left_ideal_dim)};
        return c;
    });
    (void)dim;
}

FamilyContext analyze_family(SuiteReport& rep, const SemigroupFamily& family,
                             const AnalysisConfig& cfg) {
    FamilyContext ctx{fixed_space(family), {}, std::nullopt};
    ctx.cstar = cstar_closure(ctx.fs);
    rep.fixed_dim = ctx.fs.dimension();
    rep.cstar_dim = ctx.cstar.dimension();
    try {
        ctx.rho = ergodic_projection(family, cfg.cesaro_cap);
    } catch (const Error& e) {
        const bool soft = e.kind() == ErrorKind::NoConvergence;
        rep.checks.push_back({"RHO", soft ? Status::Fail : Status::Error, 0.0, 0.0, 0, e.what()});
    }
    return ctx;
}

} // namespace

SuiteReport property_suite(const SemigroupFamily& family, const AnalysisConfig& cfg) {
    SuiteReport rep;
    rep.seed = cfg.seed;
    rep.samples = cfg.samples;
    try {
        const auto ctx = analyze_family(rep, family, cfg);
        bare_checks(rep, family, ctx, cfg);
    } catch (const std::exception& e) {
        rep.checks.push_back({"ANALYSIS", Status::Error, 0.0, 0.0, 0, e.what()});
    }
    return rep;
}

SuiteReport property_suite(const DilationInstance& inst, const AnalysisConfig& cfg) {
    SuiteReport rep;
    rep.seed = cfg.seed;
    rep.samples = cfg.samples;
    try {
        const double margin = coinvariance_margin(inst.alpha, inst.p);
        rep.checks.push_back(bounded("COINVARIANCE", std::max(0.0, -margin), 1e-9,
                                     inst.alpha.rank()));
        rep.checks.push_back({"SEMIGROUP_LAW", Status::Pass, 0.0, 1e-9, inst.alpha.rank(),
                              "verified when the compression was built"});
        {
            const auto& mres = inst.minimality;
            CheckResult c{"MINIMALITY", inst.is_minimal() ? Status::Pass : Status::Fail,
                          mres.limit.norm(), 10.0 * cfg.minimality_tol, mres.steps,
                          std::string(to_string(mres.verdict)) + " after " +
                              std::to_string(mres.steps) + " diagonal steps"};
            rep.checks.push_back(c);
            rep.checks.push_back(bounded("MINIMALITY_MONOTONE", std::max(0.0, -mres.monotone_margin),
                                         cfg.psd, mres.steps));
        }

        const auto ctx = analyze_family(rep, inst.phi, cfg);
        const auto fs_m = fixed_space(inst.alpha);
        const std::string dims = "dim M^alpha " + std::to_string(fs_m.dimension()) +
                                 ", dim N^phi " + std::to_string(ctx.fs.dimension());
        rep.checks.push_back({"DIM", fs_m.dimension() == ctx.fs.dimension() ? Status::Pass : Status::Fail,
                              std::abs(double(fs_m.dimension()) - double(ctx.fs.dimension())), 0.0, 1,
                              dims});

        guarded(rep, "ISO", [&] {
            const auto iso = check_complete_isometry(inst, cfg.levels, cfg.samples, cfg.seed);
            std::string note = "levels " + std::to_string(cfg.levels) +
                               (iso.bijective ? ", E bijective on M^alpha" : ", E not bijective on M^alpha");
            return CheckResult{"ISO", iso.pass ? Status::Pass : Status::Fail, iso.max_defect, 1e-8,
                               cfg.levels * cfg.samples, note};
        });

        Rng rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
        const auto& emb = inst.embedding;
        guarded(rep, "LIFT", [&] {
            double worst = 0.0;
            for (std::size_t n = 0; n < cfg.samples && fs_m.dimension() > 0; ++n) {
                const auto x = random_combination(rng, fs_m.basis, inst.ambient);
                const auto y = compress(emb, x);
                const auto lim = inst.is_minimal()
                                     ? pi_limit(inst, ctx.cstar, y, cfg.convergence, cfg.max_iter,
                                                cfg.cauchy_window)
                                     : family_limit(inst.alpha, inject(emb, y), cfg.convergence,
                                                    cfg.max_iter, cfg.cauchy_window);
                worst = std::max(worst, (lim.value - x).norm());
            }
            auto c = bounded("LIFT", worst, 1e-8, cfg.samples);
            if (!inst.is_minimal()) {
                c.status = Status::Fail;
                c.note = "minimality fails: pi o E = id not established";
            }
            return c;
        });

        guarded(rep, "FACT", [&] {
            if (!inst.is_minimal())
                return CheckResult{"FACT", Status::Skipped, 0.0, 1e-7, 0,
                                   "minimality fails: pi undefined"};
            double worst = 0.0;
            for (std::size_t n = 0; n < cfg.samples && ctx.cstar.dimension() > 0; ++n) {
                const auto y = random_combination(rng, ctx.cstar.basis, emb.corner);
                const auto pi = pi_limit(inst, ctx.cstar, y, cfg.convergence, cfg.max_iter, cfg.cauchy_window);
                const auto phi = phi_limit(inst.phi, y, cfg.convergence, cfg.max_iter, cfg.cauchy_window);
                worst = std::max(worst, (compress(emb, pi.value) - phi.value).norm());
            }
            return bounded("FACT", worst, 1e-7, cfg.samples);
        });

        bare_checks(rep, inst.phi, ctx, cfg);
    } catch (const std::exception& e) {
        rep.checks.push_back({"ANALYSIS", Status::Error, 0.0, 0.0, 0, e.what()});
    }
    return rep;
}

} // namespace cpfix
