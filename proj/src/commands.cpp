#include "cpfix/commands.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "cpfix/dilation.hpp"
#include "cpfix/error.hpp"

namespace cpfix {

namespace {

using Clock = std::chrono::steady_clock;

Json entry(const std::string& task, Status status, double residual, double threshold,
           std::size_t count, const std::string& note) {
    return Json{{"task", task},
                {"status", to_string(status)},
                {"residual", residual},
                {"threshold", threshold},
                {"count", count},
                {"note", note}};
}

Json entry(const CheckResult& c) {
    return entry(c.name, c.status, c.residual, c.threshold, c.count, c.note);
}

Json error_entry(const std::string& task, const std::exception& e) {
    return entry(task, Status::Error, 0.0, 0.0, 0, e.what());
}

int exit_code_of(const Json& entries) {
    int code = 0;
    for (const auto& e : entries) {
        const auto& s = e["status"];
        if (s == "ERROR") return 2;
        if (s == "FAIL") code = 1;
    }
    return code;
}

CommandOutput finish(const std::string& command, const ProblemFile* problem, Json summary,
                     Json entries, Clock::time_point start) {
    CommandOutput out;
    out.exit_code = exit_code_of(entries);
    Json& r = out.report;
    r["command"] = command;
    r["version"] = kProblemVersion;
    if (problem) {
        r["config"] = config_to_json(problem->config);
        r["seed"] = problem->config.seed;
    }
    r["summary"] = std::move(summary);
    r["entries"] = std::move(entries);
    r["status"] = out.exit_code == 0 ? "PASS" : out.exit_code == 1 ? "FAIL" : "ERROR";
    r["exit_code"] = out.exit_code;
    r["wall_time_ms"] =
        std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    return out;
}

std::vector<CPMap> generators_of(const ProblemFile& p) {
    std::vector<CPMap> gens;
    for (const auto& m : p.maps) {
        if (!m.defect.empty())
            throw Error(ErrorKind::ValidationFailed, "map '" + m.name + "': " + m.defect);
        gens.push_back(m.map);
    }
    return gens;
}

bool all_endomorphisms(const ProblemFile& p) {
    for (const auto& m : p.maps)
        if (m.kind != "endomorphism") return false;
    return true;
}

Json rho_diagnostics(const ErgodicProjection& ep) {
    Json list = Json::array();
    for (const auto& d : ep.diagnostics)
        list.push_back(Json{{"terms", d.terms},
                            {"final_increment", d.final_increment},
                            {"polish_steps", d.polish_steps},
                            {"intertwining_defect", d.intertwining_defect}});
    return list;
}

// phi_limit tasks: a Divergent outcome passes when it was the expected one.
Json limit_task(const TaskSpec& t, const SemigroupFamily& family, const AnalysisConfig& cfg,
                const ErgodicProjection* rho) {
    try {
        const auto lim = family_limit(family, t.input, cfg.convergence, cfg.max_iter, cfg.cauchy_window);
        if (t.expect == "divergent")
            return entry(t.name, Status::Fail, 0.0, 0.0, lim.iterations, "converged; divergence was expected");
        double residual = 0.0;
        std::string note = "converged";
        if (rho) {
            residual = (lim.value - rho->apply(t.input)).norm();
            note = "converged; residual against the ergodic projection";
        }
        Json e = entry(t.name, residual <= 1e-7 ? Status::Pass : Status::Fail, residual, 1e-7,
                       lim.iterations, note);
        e["value"] = element_to_json(lim.value);
        return e;
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::Divergent) throw;
        if (t.expect == "divergent")
            return entry(t.name, Status::Pass, 0.0, 0.0, cfg.max_iter, std::string("expected: ") + e.what());
        return entry(t.name, Status::Fail, 0.0, 0.0, cfg.max_iter, e.what());
    }
}

} // namespace

CommandOutput error_output(const std::string& command, const std::exception& e) {
    Json entries = Json::array({error_entry("load", e)});
    return finish(command, nullptr, Json::object(), std::move(entries), Clock::now());
}

CommandOutput cmd_validate(const ProblemFile& p) {
    const auto start = Clock::now();
    Json entries = Json::array();
    Json summary{{"blocks", entries.array()}, {"maps", p.maps.size()}};
    for (auto n : p.algebra.dims()) summary["blocks"].push_back(n);

    bool maps_ok = true;
    for (const auto& m : p.maps) {
        const std::string tag = "map '" + m.name + "'";
        if (!m.defect.empty()) {
            entries.push_back(entry(tag + " cp", Status::Fail, 0.0, 1e-9, 1, m.defect));
            maps_ok = false;
            continue;
        }
        const auto rep = validate_cp(m.map, 1e-9, m.raw.has_value());
        entries.push_back(entry(tag + " cp", rep.is_cp ? Status::Pass : Status::Fail,
                                std::max(0.0, -rep.choi_min_eig), 1e-9, 1,
                                m.raw ? "Choi test on the raw superoperator" : "Kraus form"));
        entries.push_back(entry(tag + " contractive", rep.is_contractive ? Status::Pass : Status::Fail,
                                std::max(0.0, -rep.contraction_margin), 1e-9, 1,
                                rep.is_contractive ? "" : tag + " is not contractive"));
        maps_ok = maps_ok && rep.is_cp && rep.is_contractive;
        if (m.kind == "endomorphism") {
            const auto er = check_endomorphism(m.map);
            entries.push_back(entry(tag + " endomorphism", er.is_endomorphism ? Status::Pass : Status::Fail,
                                    std::max(er.multiplicative_defect, er.adjoint_defect), 1e-9, 1,
                                    er.is_endomorphism ? "" : tag + " is not multiplicative"));
            maps_ok = maps_ok && er.is_endomorphism;
        }
    }
    if (maps_ok) {
        const auto fr = validate_family(generators_of(p));
        entries.push_back(entry("family commuting", fr.commuting ? Status::Pass : Status::Fail,
                                fr.max_commutator, 1e-9, p.maps.size(), ""));
        if (p.projection) {
            try {
                const ProjectionElement proj(*p.projection);
                entries.push_back(entry("projection", Status::Pass, 0.0, 1e-6, 1, ""));
                if (all_endomorphisms(p) && fr.commuting) {
                    const auto fam = SemigroupFamily::unchecked(generators_of(p));
                    const double margin = coinvariance_margin(fam, proj);
                    entries.push_back(entry("projection co-invariant", margin >= -1e-9 ? Status::Pass : Status::Fail,
                                            std::max(0.0, -margin), 1e-9, p.maps.size(), ""));
                }
            } catch (const Error& e) {
                entries.push_back(entry("projection", Status::Fail, 0.0, 1e-6, 1, e.what()));
            }
        }
    }
    return finish("validate", &p, std::move(summary), std::move(entries), start);
}

CommandOutput cmd_analyze(const ProblemFile& p) {
    const auto start = Clock::now();
    Json entries = Json::array();
    Json summary = Json::object();
    try {
        const auto family = SemigroupFamily::create(generators_of(p));
        const auto fs = fixed_space(family);
        const auto cs = cstar_closure(fs);
        summary["fixed_dim"] = fs.dimension();
        Json basis = Json::array();
        for (const auto& b : fs.basis) basis.push_back(element_to_json(b));
        summary["fixed_basis"] = std::move(basis);
        summary["cstar_dim"] = cs.dimension();
        summary["cstar_unital"] = cs.is_unital;
        std::optional<ErgodicProjection> rho;
        try {
            rho = ergodic_projection(family, p.config.cesaro_cap);
            summary["rho"] = rho_diagnostics(*rho);
        } catch (const Error& e) {
            summary["rho"] = e.what();
        }
        for (const auto& c : property_suite(family, p.config).checks) entries.push_back(entry(c));
        for (const auto& t : p.tasks) {
            if (t.type != "phi_limit") {
                entries.push_back(entry(t.name, Status::Skipped, 0.0, 0.0, 0, "run with the dilation command"));
                continue;
            }
            try {
                entries.push_back(limit_task(t, family, p.config, rho ? &*rho : nullptr));
            } catch (const std::exception& e) {
                entries.push_back(error_entry(t.name, e));
            }
        }
    } catch (const std::exception& e) {
        entries.push_back(error_entry("family", e));
    }
    return finish("analyze", &p, std::move(summary), std::move(entries), start);
}

CommandOutput cmd_dilation(const ProblemFile& p) {
    const auto start = Clock::now();
    Json entries = Json::array();
    Json summary = Json::object();
    try {
        if (!p.projection) throw Error(ErrorKind::InvalidArgument, "the dilation command needs a projection");
        if (!all_endomorphisms(p))
            throw Error(ErrorKind::InvalidArgument, "every map must have kind \"endomorphism\"");
        const auto inst = make_dilation(generators_of(p), *p.projection, p.config.minimality_tol,
                                        p.config.minimality_max_iter);
        const auto cdims = inst.embedding.corner.dims();
        summary["corner_blocks"] = std::vector<std::size_t>(cdims.begin(), cdims.end());
        summary["minimality"] = to_string(inst.minimality.verdict);
        summary["minimality_steps"] = inst.minimality.steps;
        Json phi = Json::array();
        for (const auto& g : inst.phi.generators()) phi.push_back(kraus_to_json(g));
        summary["compressed_kraus"] = std::move(phi);

        const auto suite = property_suite(inst, p.config);
        summary["fixed_dim"] = suite.fixed_dim;
        summary["cstar_dim"] = suite.cstar_dim;
        for (const auto& c : suite.checks) entries.push_back(entry(c));

        for (const auto& t : p.tasks) {
            try {
                if (t.type == "phi_limit") {
                    entries.push_back(limit_task(t, inst.alpha, p.config, nullptr));
                } else if (t.type == "pi_limit") {
                    const auto cs = cstar_closure(fixed_space(inst.phi));
                    const auto w = pi_limit(inst, cs, t.input, p.config.convergence, p.config.max_iter,
                                            p.config.cauchy_window);
                    double drift = 0.0;
                    for (const auto& g : inst.alpha.generators()) drift = std::max(drift, (apply(g, w.value) - w.value).norm());
                    Json e = entry(t.name, drift <= 10 * p.config.convergence ? Status::Pass : Status::Fail, drift,
                                   10 * p.config.convergence, w.iterations, "limit is alpha-fixed");
                    e["value"] = element_to_json(w.value);
                    entries.push_back(std::move(e));
                } else {
                    const auto lift = lift_fixed_point(inst, t.input);
                    Json e = entry(t.name, Status::Pass, lift.route_gap, 1e-7, 2,
                                   "pi route and linear route agree");
                    e["value"] = element_to_json(lift.z);
                    entries.push_back(std::move(e));
                }
            } catch (const Error& e) {
                const bool soft = e.kind() == ErrorKind::NotMinimal || e.kind() == ErrorKind::Divergent ||
                                  e.kind() == ErrorKind::Inconsistent;
                entries.push_back(soft ? entry(t.name, Status::Fail, 0.0, 0.0, 0, e.what()) : error_entry(t.name, e));
            }
        }
    } catch (const std::exception& e) {
        entries.push_back(error_entry("dilation", e));
    }
    return finish("dilation", &p, std::move(summary), std::move(entries), start);
}

// ---- demo problems ---------------------------------------------------------

const std::vector<std::string>& demo_families() {
    static const std::vector<std::string> names = {"tail-shift", "rotation", "damping", "random-mixture",
                                                   "random-dilation"};
    return names;
}

namespace {

MapSpec spec(std::string name, std::string kind, CPMap map) {
    return MapSpec{std::move(name), std::move(kind), std::move(map), std::nullopt, ""};
}

// Cyclic shift e_k -> e_{k+1}; Pauli X for n = 2.
CMatrix cyclic_shift(std::size_t n) {
    CMatrix u(n, n);
    for (std::size_t k = 0; k < n; ++k) u((k + 1) % n, k) = 1.0;
    return u;
}

CMatrix phases(std::size_t n, double theta) {
    std::vector<Complex> d(n);
    for (std::size_t k = 0; k < n; ++k) d[k] = std::polar(1.0, double(k) * theta);
    return CMatrix::diagonal(std::span<const Complex>(d));
}

void add_dilation(ProblemFile& p, const DilationInstance& inst) {
    p.algebra = inst.ambient;
    for (std::size_t k = 0; k < inst.alpha.rank(); ++k)
        p.maps.push_back(spec("alpha_" + std::to_string(k + 1), "endomorphism", inst.alpha.generators()[k]));
    p.projection = inst.p.element();
}

} // namespace

ProblemFile cmd_demo(const std::string& family, const DemoParams& params) {
    ProblemFile p;
    p.config.seed = params.seed;
    auto blocks_or = [&](std::vector<std::size_t> fallback) {
        return BlockStructure(params.blocks.empty() ? std::move(fallback) : params.blocks);
    };
    if (family == "tail-shift") {
        const CMatrix u = params.theta ? phases(params.n, *params.theta) : cyclic_shift(params.n);
        const auto inst = build_tail_shift(params.n, params.m, u);
        add_dilation(p, inst);
        AlgebraElement y(inst.embedding.corner, {u});
        p.tasks.push_back({"pi_limit(u)", "pi_limit", y, "converge"});
        p.tasks.push_back({"lift(u)", "lift", y, "converge"});
    } else if (family == "random-dilation") {
        RandomInstanceParams rp;
        rp.d = params.d;
        add_dilation(p, build_random_instance(params.seed, rp));
    } else if (family == "rotation") {
        const double theta = params.theta.value_or(std::numbers::pi / 3.0);
        p.algebra = blocks_or({2});
        p.maps.push_back(spec("rotation", "cp", rotation(p.algebra, theta)));
        if (p.algebra.dim(0) > 1)
            p.tasks.push_back({"phi_limit(E01)", "phi_limit", AlgebraElement::unit(p.algebra, 0, 0, 1), "divergent"});
        p.tasks.push_back({"phi_limit(E00)", "phi_limit", AlgebraElement::unit(p.algebra, 0, 0, 0), "converge"});
    } else if (family == "damping") {
        if (!(params.gamma >= 0.0 && params.gamma <= 1.0))
            throw Error(ErrorKind::InvalidArgument, "gamma must lie in [0, 1]");
        p.algebra = blocks_or({2});
        p.maps.push_back(spec("damping", "cp", amplitude_damping(p.algebra, params.gamma)));
        p.tasks.push_back({"phi_limit(E00)", "phi_limit", AlgebraElement::unit(p.algebra, 0, 0, 0), "converge"});
    } else if (family == "random-mixture") {
        p.algebra = blocks_or({2, 3});
        auto gens = random_mixture_family(params.seed, p.algebra, params.d, params.terms);
        for (std::size_t k = 0; k < gens.size(); ++k)
            p.maps.push_back(spec("mixture_" + std::to_string(k + 1), "cp", std::move(gens[k])));
    } else {
        throw Error(ErrorKind::UnknownFamily, "unknown demo family '" + family + "'");
    }
    return p;
}

// ---- table rendering -------------------------------------------------------

std::string render_table(const Json& report) {
    std::ostringstream out;
    out << "cpfix " << report.value("command", "?") << "  status " << report.value("status", "?");
    if (report.contains("seed")) out << "  seed " << report["seed"].dump();
    out << '\n';
    if (report.contains("summary")) {
        for (const auto& [key, value] : report["summary"].items()) {
            if (key == "fixed_basis" || key == "compressed_kraus") {
                out << "  " << key << ": " << value.size() << " item(s), see --json\n";
                continue;
            }
            out << "  " << key << ": " << value.dump() << '\n';
        }
    }
    out << std::left << std::setw(8) << "STATUS" << std::setw(34) << "CHECK" << std::setw(13) << "RESIDUAL"
        << std::setw(11) << "THRESHOLD" << "NOTE\n";
    for (const auto& e : report["entries"]) {
        std::ostringstream res, thr;
        res << std::scientific << std::setprecision(3) << e["residual"].get<double>();
        thr << std::scientific << std::setprecision(1) << e["threshold"].get<double>();
        out << std::left << std::setw(8) << e["status"].get<std::string>() << std::setw(34)
            << e["task"].get<std::string>() << std::setw(13) << res.str() << std::setw(11) << thr.str()
            << e["note"].get<std::string>() << '\n';
    }
    if (report.contains("config")) out << "config " << report["config"].dump() << '\n';
    return out.str();
}

} // namespace cpfix
