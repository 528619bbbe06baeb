#include <map>
#include <string>
#include <utility>
#include <vector>

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cpfix/commands.hpp"
#include "cpfix/cpsemi.hpp"
#include "cpfix/dilation.hpp"
#include "cpfix/error.hpp"
#include "cpfix/fixpoint.hpp"
#include "cpfix/problem_io.hpp"
#include "cpfix/vnalg.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace cpfix;

namespace {

using ComplexArray = py::array_t<Complex, py::array::c_style | py::array::forcecast>;

CMatrix to_matrix(const ComplexArray& a) {
    if (a.ndim() != 2)
        throw Error(ErrorKind::ShapeMismatch, "expected a 2-d array, got " + std::to_string(a.ndim()) + "-d");
    auto rows = static_cast<std::size_t>(a.shape(0));
    auto cols = static_cast<std::size_t>(a.shape(1));
    std::vector<Complex> entries(a.data(), a.data() + rows * cols);
    return CMatrix(rows, cols, std::move(entries));
}

ComplexArray to_array(const CMatrix& m) {
    ComplexArray out({m.rows(), m.cols()});
    std::copy(m.data().begin(), m.data().end(), out.mutable_data());
    return out;
}

AlgebraElement make_element(const std::vector<std::size_t>& dims, const std::vector<ComplexArray>& blocks) {
    std::vector<CMatrix> mats;
    mats.reserve(blocks.size());
    for (const auto& b : blocks) mats.push_back(to_matrix(b));
    return AlgebraElement(BlockStructure(dims), std::move(mats));
}

std::vector<std::size_t> dims_of(const BlockStructure& s) {
    return {s.dims().begin(), s.dims().end()};
}

// Kraus operators keyed by (target block, source block).
CPMap make_kraus_map(const std::vector<std::size_t>& source, const std::vector<std::size_t>& target,
                     const std::map<std::pair<std::size_t, std::size_t>, std::vector<ComplexArray>>& kraus) {
    BlockStructure src(source), tgt(target);
    CPMap::KrausTable table(tgt.num_blocks(), std::vector<std::vector<CMatrix>>(src.num_blocks()));
    for (const auto& [key, ops] : kraus) {
        auto [j, i] = key;
        if (j >= tgt.num_blocks() || i >= src.num_blocks())
            throw Error(ErrorKind::ShapeMismatch, "kraus key (" + std::to_string(j) + ", " +
                                                      std::to_string(i) + ") out of range");
        for (const auto& a : ops) table[j][i].push_back(to_matrix(a));
    }
    return CPMap(std::move(src), std::move(tgt), std::move(table));
}

py::dict kraus_dict(const CPMap& m) {
    py::dict out;
    const auto& table = m.kraus_table();
    for (std::size_t j = 0; j < table.size(); ++j)
        for (std::size_t i = 0; i < table[j].size(); ++i) {
            if (table[j][i].empty()) continue;
            py::list ops;
            for (const auto& a : table[j][i]) ops.append(to_array(a));
            out[py::make_tuple(j, i)] = ops;
        }
    return out;
}

AnalysisConfig config_from(const py::dict& kw) {
    AnalysisConfig cfg;
    for (auto item : kw) {
        auto key = item.first.cast<std::string>();
        auto val = item.second;
        if (key == "tol_eq") cfg.tol_eq = val.cast<double>();
        else if (key == "convergence") cfg.convergence = val.cast<double>();
        else if (key == "psd") cfg.psd = val.cast<double>();
        else if (key == "max_iter") cfg.max_iter = val.cast<std::size_t>();
        else if (key == "cesaro_cap") cfg.cesaro_cap = val.cast<std::size_t>();
        else if (key == "cauchy_window") cfg.cauchy_window = val.cast<std::size_t>();
        else if (key == "levels") cfg.levels = val.cast<std::size_t>();
        else if (key == "samples") cfg.samples = val.cast<std::size_t>();
        else if (key == "seed") cfg.seed = val.cast<std::uint64_t>();
        else if (key == "minimality_tol") cfg.minimality_tol = val.cast<double>();
        else if (key == "minimality_max_iter") cfg.minimality_max_iter = val.cast<std::size_t>();
        else throw py::key_error("unknown config key: " + key);
    }
    return cfg;
}

py::tuple command_result(const CommandOutput& out) {
    return py::make_tuple(out.exit_code, out.report.dump());
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Fixed points of commuting CP semigroups on multi-matrix algebras";

    static py::exception<Error> cpfix_error(m, "CpfixError");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object exc = cpfix_error;
            py::object inst = exc(e.what());
            inst.attr("kind") = std::string(to_string(e.kind()));
            PyErr_SetObject(cpfix_error.ptr(), inst.ptr());
        }
    });

    py::class_<AlgebraElement>(m, "Element")
        .def(py::init(&make_element), "dims"_a, "blocks"_a)
        .def_static("identity", [](const std::vector<std::size_t>& dims) {
            return AlgebraElement::identity(BlockStructure(dims));
        }, "dims"_a)
        .def_static("unit", [](const std::vector<std::size_t>& dims, std::size_t block, std::size_t a,
                               std::size_t b) {
            return AlgebraElement::unit(BlockStructure(dims), block, a, b);
        }, "dims"_a, "block"_a, "a"_a, "b"_a)
        .def_static("zeros", [](const std::vector<std::size_t>& dims) {
            return AlgebraElement(BlockStructure(dims));
        }, "dims"_a)
        .def_property_readonly("dims", [](const AlgebraElement& x) { return dims_of(x.structure()); })
        .def_property_readonly("blocks", [](const AlgebraElement& x) {
            std::vector<ComplexArray> out;
            for (const auto& b : x.blocks()) out.push_back(to_array(b));
            return out;
        })
        .def("coords", &AlgebraElement::coords)
        .def("adjoint", &AlgebraElement::adjoint)
        .def("norm", &AlgebraElement::norm)
        .def("trace", &AlgebraElement::trace)
        .def(py::self + py::self)
        .def(py::self - py::self)
        .def(py::self * py::self)
        .def(py::self * Complex())
        .def(Complex() * py::self)
        .def("__repr__", [](const AlgebraElement& x) {
            std::string s = "Element(dims=[";
            for (std::size_t i = 0; i < x.structure().num_blocks(); ++i)
                s += (i ? ", " : "") + std::to_string(x.structure().dim(i));
            return s + "])";
        });

    py::class_<CPMap>(m, "CPMap")
        .def(py::init(&make_kraus_map), "source"_a, "target"_a, "kraus"_a)
        .def_property_readonly("source", [](const CPMap& f) { return dims_of(f.source()); })
        .def_property_readonly("target", [](const CPMap& f) { return dims_of(f.target()); })
        .def_property_readonly("kraus", &kraus_dict)
        .def("kraus_count", &CPMap::kraus_count)
        .def("superoperator", [](const CPMap& f) { return to_array(to_superoperator(f).matrix); })
        .def("__call__", [](const CPMap& f, const AlgebraElement& x) { return apply(f, x); }, "x"_a);

    m.def("compose", &compose, "phi"_a, "psi"_a);
    m.def("identity_map", [](const std::vector<std::size_t>& dims) {
        return identity_map(BlockStructure(dims));
    }, "dims"_a);
    m.def("conjugation", &conjugation, "u"_a, "y -> u y u^*, blockwise");
    m.def("amplitude_damping", [](const std::vector<std::size_t>& dims, double gamma) {
        return amplitude_damping(BlockStructure(dims), gamma);
    }, "dims"_a, "gamma"_a);
    m.def("rotation", [](const std::vector<std::size_t>& dims, double theta) {
        return rotation(BlockStructure(dims), theta);
    }, "dims"_a, "theta"_a, "y -> u^* y u with u = diag(1, e^{i theta}, ...)");
    m.def("random_mixture_family", [](std::uint64_t seed, const std::vector<std::size_t>& dims,
                                      std::size_t d, std::size_t terms) {
        return random_mixture_family(seed, BlockStructure(dims), d, terms);
    }, "seed"_a, "dims"_a, "d"_a = 1, "terms"_a = 3);
    m.def("validate_cp", [](const CPMap& f, double tol) {
        auto r = validate_cp(f, tol, true);
        return r.is_cp && r.is_contractive;
    }, "map"_a, "tol"_a = 1e-9, "True when the map is CP and contractive");

    py::class_<SemigroupFamily>(m, "Family")
        .def(py::init([](std::vector<CPMap> gens, bool endomorphic, double tol) {
            return SemigroupFamily::create(std::move(gens), endomorphic, tol);
        }), "generators"_a, "endomorphic"_a = false, "tol"_a = 1e-9)
        .def_property_readonly("rank", &SemigroupFamily::rank)
        .def_property_readonly("dims", [](const SemigroupFamily& f) { return dims_of(f.structure()); })
        .def_property_readonly("generators", [](const SemigroupFamily& f) {
            return std::vector<CPMap>(f.generators().begin(), f.generators().end());
        })
        .def("apply_power", [](const SemigroupFamily& f, const std::vector<std::size_t>& s,
                               const AlgebraElement& x) { return f.apply_power(s, x); }, "s"_a, "x"_a);

    py::class_<FixedSpace>(m, "FixedSpace")
        .def_property_readonly("dimension", &FixedSpace::dimension)
        .def_readonly("basis", &FixedSpace::basis)
        .def("distance", &FixedSpace::distance, "y"_a)
        .def("contains", &FixedSpace::contains, "y"_a, "tol"_a = 1e-8);
    m.def("fixed_space", &fixed_space, "family"_a, "tol"_a = 1e-9);

    py::class_<CStarSpan>(m, "CStarSpan")
        .def_property_readonly("dimension", &CStarSpan::dimension)
        .def_readonly("basis", &CStarSpan::basis)
        .def_readonly("is_unital", &CStarSpan::is_unital)
        .def("distance", &CStarSpan::distance, "y"_a)
        .def("contains", &CStarSpan::contains, "y"_a, "tol"_a = 1e-8);
    m.def("cstar_closure", &cstar_closure, "fixed"_a);

    py::class_<ErgodicProjection>(m, "ErgodicProjection")
        .def("__call__", &ErgodicProjection::apply, "y"_a)
        .def_property_readonly("matrix", [](const ErgodicProjection& r) { return to_array(r.rho.matrix); })
        .def_property_readonly("terms", [](const ErgodicProjection& r) {
            std::vector<std::size_t> out;
            for (const auto& d : r.diagnostics) out.push_back(d.terms);
            return out;
        });
    m.def("ergodic_projection", &ergodic_projection, "family"_a, "cesaro_cap"_a = 1000000,
          "increment_tol"_a = 1e-11);

    py::class_<LimitResult>(m, "LimitResult")
        .def_readonly("value", &LimitResult::value)
        .def_readonly("iterations", &LimitResult::iterations)
        .def_readonly("last_increment", &LimitResult::last_increment);
    m.def("phi_limit", &phi_limit, "family"_a, "y"_a, "tol"_a = 1e-10, "max_iter"_a = 100000,
          "window"_a = 5);

    py::class_<DilationInstance>(m, "Dilation")
        .def(py::init([](std::vector<CPMap> gens, const AlgebraElement& p) {
            return make_dilation(std::move(gens), p);
        }), "alpha"_a, "p"_a)
        .def_property_readonly("ambient", [](const DilationInstance& d) { return dims_of(d.ambient); })
        .def_property_readonly("corner", [](const DilationInstance& d) { return dims_of(d.embedding.corner); })
        .def_readonly("alpha", &DilationInstance::alpha)
        .def_readonly("phi", &DilationInstance::phi)
        .def_property_readonly("minimality", [](const DilationInstance& d) {
            return std::string(to_string(d.minimality.verdict));
        })
        .def("compress", [](const DilationInstance& d, const AlgebraElement& x) {
            return compress(d.embedding, x);
        }, "x"_a)
        .def("inject", [](const DilationInstance& d, const AlgebraElement& y) {
            return inject(d.embedding, y);
        }, "y"_a);
    m.def("tail_shift", [](std::size_t n, std::size_t mm, const ComplexArray& u) {
        return build_tail_shift(n, mm, to_matrix(u));
    }, "n"_a, "m"_a, "u"_a);
    m.def("random_instance", [](std::uint64_t seed, std::size_t d) {
        RandomInstanceParams params;
        params.d = d;
        return build_random_instance(seed, params);
    }, "seed"_a, "d"_a = 1);
    m.def("pi_limit", [](const DilationInstance& inst, const AlgebraElement& y, double tol,
                         std::size_t max_iter) { return pi_limit(inst, y, tol, max_iter); },
          "inst"_a, "y"_a, "tol"_a = 1e-10, "max_iter"_a = 100000);

    py::class_<LiftResult>(m, "LiftResult")
        .def_readonly("z", &LiftResult::z)
        .def_readonly("z_limit", &LiftResult::z_limit)
        .def_readonly("route_gap", &LiftResult::route_gap)
        .def_readonly("compress_residual", &LiftResult::compress_residual);
    m.def("lift_fixed_point", &lift_fixed_point, "inst"_a, "y"_a, "route_tol"_a = 1e-7);

    py::class_<KernelIdealReport>(m, "KernelIdealReport")
        .def_readonly("cstar_dim", &KernelIdealReport::cstar_dim)
        .def_readonly("kernel_dim", &KernelIdealReport::kernel_dim)
        .def_readonly("ideal_dim", &KernelIdealReport::ideal_dim)
        .def_readonly("left_ideal_dim", &KernelIdealReport::left_ideal_dim)
        .def_readonly("residual", &KernelIdealReport::residual)
        .def_readonly("passed", &KernelIdealReport::pass);
    m.def("kernel_ideal_check", py::overload_cast<const SemigroupFamily&>(&kernel_ideal_check), "family"_a);

    py::class_<CheckResult>(m, "CheckResult")
        .def_readonly("name", &CheckResult::name)
        .def_property_readonly("status", [](const CheckResult& c) { return std::string(to_string(c.status)); })
        .def_readonly("residual", &CheckResult::residual)
        .def_readonly("threshold", &CheckResult::threshold)
        .def_readonly("count", &CheckResult::count)
        .def_readonly("note", &CheckResult::note)
        .def("__repr__", [](const CheckResult& c) {
            return "CheckResult(" + c.name + ", " + to_string(c.status) + ")";
        });

    py::class_<SuiteReport>(m, "SuiteReport")
        .def_readonly("seed", &SuiteReport::seed)
        .def_readonly("samples", &SuiteReport::samples)
        .def_readonly("fixed_dim", &SuiteReport::fixed_dim)
        .def_readonly("cstar_dim", &SuiteReport::cstar_dim)
        .def_readonly("checks", &SuiteReport::checks)
        .def("all_pass", &SuiteReport::all_pass)
        .def("__getitem__", [](const SuiteReport& r, const std::string& name) {
            const auto* c = r.find(name);
            if (!c) throw py::key_error(name);
            return *c;
        });
    m.def("property_suite", [](const SemigroupFamily& f, const py::kwargs& kw) {
        return property_suite(f, config_from(kw));
    }, "family"_a);
    m.def("property_suite", [](const DilationInstance& inst, const py::kwargs& kw) {
        return property_suite(inst, config_from(kw));
    }, "inst"_a);

    // Problem-file commands; documents travel as JSON text.
    m.def("validate", [](const std::string& doc) {
        return command_result(cmd_validate(parse_problem(Json::parse(doc))));
    }, "doc"_a);
    m.def("analyze", [](const std::string& doc) {
        return command_result(cmd_analyze(parse_problem(Json::parse(doc))));
    }, "doc"_a);
    m.def("dilation", [](const std::string& doc) {
        return command_result(cmd_dilation(parse_problem(Json::parse(doc))));
    }, "doc"_a);
    m.def("demo", [](const std::string& family, const py::kwargs& kw) {
        DemoParams params;
        for (auto item : kw) {
            auto key = item.first.cast<std::string>();
            auto val = item.second;
            if (key == "n") params.n = val.cast<std::size_t>();
            else if (key == "m") params.m = val.cast<std::size_t>();
            else if (key == "d") params.d = val.cast<std::size_t>();
            else if (key == "terms") params.terms = val.cast<std::size_t>();
            else if (key == "blocks") params.blocks = val.cast<std::vector<std::size_t>>();
            else if (key == "theta") params.theta = val.cast<double>();
            else if (key == "gamma") params.gamma = val.cast<double>();
            else if (key == "seed") params.seed = val.cast<std::uint64_t>();
            else throw py::key_error("unknown demo parameter: " + key);
        }
        return emit_problem(cmd_demo(family, params)).dump();
    }, "family"_a);
    m.def("demo_families", &demo_families);
    m.def("render_table", [](const std::string& report) { return render_table(Json::parse(report)); },
          "report"_a);
}
