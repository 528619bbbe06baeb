#include "cpfix/problem_io.hpp"

#include <fstream>
#include <sstream>

#include "cpfix/error.hpp"

namespace cpfix {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw Error(ErrorKind::ParseError, path + ": " + what);
}

const Json& require(const Json& obj, const std::string& key, const std::string& path) {
    if (!obj.is_object()) fail(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) fail(path, "missing key \"" + key + "\"");
    return *it;
}

std::size_t as_count(const Json& j, const std::string& path) {
    if (!j.is_number_integer() || j.get<long long>() < 0) fail(path, "expected a nonnegative integer");
    return j.get<std::size_t>();
}

double as_real(const Json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

Complex parse_complex(const Json& j, const std::string& path) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (!j.is_array() || j.size() != 2) fail(path, "expected [re, im]");
    return {as_real(j[0], path + "[0]"), as_real(j[1], path + "[1]")};
}

CMatrix parse_matrix(const Json& j, std::size_t rows, std::size_t cols, const std::string& path) {
    if (!j.is_array() || j.size() != rows)
        fail(path, "expected " + std::to_string(rows) + " rows");
    CMatrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        const std::string rp = path + "[" + std::to_string(r) + "]";
        if (!j[r].is_array() || j[r].size() != cols)
            fail(rp, "expected " + std::to_string(cols) + " columns");
        for (std::size_t c = 0; c < cols; ++c) {
            const Complex z = parse_complex(j[r][c], rp + "[" + std::to_string(c) + "]");
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
                fail(rp + "[" + std::to_string(c) + "]", "non-finite entry");
            m(r, c) = z;
        }
    }
    return m;
}

AlgebraElement parse_element(const Json& j, const BlockStructure& s, const std::string& path) {
    if (!j.is_array() || j.size() != s.num_blocks())
        fail(path, "expected " + std::to_string(s.num_blocks()) + " blocks");
    std::vector<CMatrix> blocks;
    for (std::size_t b = 0; b < s.num_blocks(); ++b)
        blocks.push_back(parse_matrix(j[b], s.dim(b), s.dim(b), path + "[" + std::to_string(b) + "]"));
    return AlgebraElement(s, std::move(blocks));
}

std::pair<std::size_t, std::size_t> parse_key(const std::string& key, const BlockStructure& s,
                                              const std::string& path) {
    const auto comma = key.find(',');
    std::size_t j = 0, i = 0;
    try {
        if (comma == std::string::npos) throw std::invalid_argument(key);
        std::size_t used = 0;
        j = std::stoul(key.substr(0, comma), &used);
        if (used != comma) throw std::invalid_argument(key);
        const std::string tail = key.substr(comma + 1);
        i = std::stoul(tail, &used);
        if (used != tail.size()) throw std::invalid_argument(key);
    } catch (const std::exception&) {
        fail(path, "block key must look like \"j,i\"");
    }
    if (j >= s.num_blocks() || i >= s.num_blocks()) fail(path, "block index out of range");
    return {j, i};
}

void parse_config(const Json& j, AnalysisConfig& cfg, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    for (const auto& [key, value] : j.items()) {
        const std::string p = path + "." + key;
        if (key == "tol_eq") cfg.tol_eq = as_real(value, p);
        else if (key == "convergence") cfg.convergence = as_real(value, p);
        else if (key == "psd") cfg.psd = std::abs(as_real(value, p));
        else if (key == "max_iter") cfg.max_iter = as_count(value, p);
        else if (key == "cesaro_cap") cfg.cesaro_cap = as_count(value, p);
        else if (key == "cauchy_window") cfg.cauchy_window = as_count(value, p);
        else if (key == "levels") cfg.levels = as_count(value, p);
        else if (key == "samples") cfg.samples = as_count(value, p);
        else if (key == "seed") cfg.seed = as_count(value, p);
        else if (key == "minimality_tol") cfg.minimality_tol = as_real(value, p);
        else if (key == "minimality_max_iter") cfg.minimality_max_iter = as_count(value, p);
        else fail(p, "unknown config key");
    }
}

MapSpec parse_map(const Json& j, const BlockStructure& s, const std::string& path) {
    MapSpec m{"", "cp", CPMap(s), std::nullopt, ""};
    const auto& name = require(j, "name", path);
    if (!name.is_string()) fail(path + ".name", "expected a string");
    m.name = name.get<std::string>();
    if (auto it = j.find("kind"); it != j.end()) {
        if (!it->is_string() || (*it != "cp" && *it != "endomorphism"))
            fail(path + ".kind", "expected \"cp\" or \"endomorphism\"");
        m.kind = it->get<std::string>();
    }
    const bool has_kraus = j.contains("kraus");
    const bool has_raw = j.contains("superoperator");
    if (has_kraus == has_raw) fail(path, "give exactly one of \"kraus\" or \"superoperator\"");
    if (has_kraus) {
        const auto& table = j["kraus"];
        if (!table.is_object()) fail(path + ".kraus", "expected an object keyed by \"j,i\"");
        for (const auto& [key, list] : table.items()) {
            const std::string kp = path + ".kraus[\"" + key + "\"]";
            const auto [tj, si] = parse_key(key, s, kp);
            if (!list.is_array()) fail(kp, "expected a list of matrices");
            for (std::size_t k = 0; k < list.size(); ++k)
                m.map.add_kraus(tj, si, parse_matrix(list[k], s.dim(tj), s.dim(si),
                                                     kp + "[" + std::to_string(k) + "]"));
        }
    } else {
        const std::size_t d = s.coord_dim();
        Superoperator raw{s, s, parse_matrix(j["superoperator"], d, d, path + ".superoperator")};
        try {
            m.map = from_superoperator(raw);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::NotCP) throw;
            m.defect = e.what();
        }
        m.raw = std::move(raw);
    }
    return m;
}

} // namespace

ProblemFile parse_problem(const Json& doc) {
    if (!doc.is_object()) fail("$", "expected an object");
    ProblemFile p{kProblemVersion, BlockStructure({1}), {}, std::nullopt, {}, {}};
    const auto& version = require(doc, "version", "$");
    if (!version.is_string() || version.get<std::string>() != kProblemVersion)
        fail("$.version", std::string("expected \"") + kProblemVersion + "\"");
    const auto& blocks = require(require(doc, "algebra", "$"), "blocks", "$.algebra");
    if (!blocks.is_array() || blocks.empty()) fail("$.algebra.blocks", "expected a nonempty list");
    std::vector<std::size_t> dims;
    for (std::size_t k = 0; k < blocks.size(); ++k) {
        const auto n = as_count(blocks[k], "$.algebra.blocks[" + std::to_string(k) + "]");
        if (n == 0) fail("$.algebra.blocks[" + std::to_string(k) + "]", "block size must be >= 1");
        dims.push_back(n);
    }
    p.algebra = BlockStructure(dims);

    const auto& maps = require(doc, "maps", "$");
    if (!maps.is_array() || maps.empty()) fail("$.maps", "expected a nonempty list");
    for (std::size_t k = 0; k < maps.size(); ++k)
        p.maps.push_back(parse_map(maps[k], p.algebra, "$.maps[" + std::to_string(k) + "]"));

    if (auto it = doc.find("projection"); it != doc.end())
        p.projection = parse_element(*it, p.algebra, "$.projection");
    if (auto it = doc.find("config"); it != doc.end()) parse_config(*it, p.config, "$.config");
    if (auto it = doc.find("tasks"); it != doc.end()) {
        if (!it->is_array()) fail("$.tasks", "expected a list");
        for (std::size_t k = 0; k < it->size(); ++k) {
            const std::string tp = "$.tasks[" + std::to_string(k) + "]";
            const auto& t = (*it)[k];
            const auto& type = require(t, "type", tp);
            if (!type.is_string() || (type != "phi_limit" && type != "pi_limit" && type != "lift"))
                fail(tp + ".type", "expected phi_limit, pi_limit or lift");
            TaskSpec task{t.value("name", type.get<std::string>()), type.get<std::string>(),
                          AlgebraElement(p.algebra), t.value("expect", "converge")};
            if (task.expect != "converge" && task.expect != "divergent")
                fail(tp + ".expect", "expected \"converge\" or \"divergent\"");
            // pi_limit and lift take corner inputs; their shape is checked once
            // the corner is known, so keep the raw JSON shape loose here.
            const auto& in = require(t, "input", tp);
            if (task.type == "phi_limit" || !p.projection) {
                task.input = parse_element(in, p.algebra, tp + ".input");
            } else {
                const auto emb = corner(p.algebra, ProjectionElement(*p.projection));
                task.input = parse_element(in, emb.corner, tp + ".input");
            }
            p.tasks.push_back(std::move(task));
        }
    }
    return p;
}

ProblemFile load_problem(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::ParseError, path.string() + ": cannot open file");
    Json doc;
    try {
        doc = Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorKind::ParseError, path.string() + ": malformed JSON: " + e.what());
    }
    return parse_problem(doc);
}

Json matrix_to_json(const CMatrix& m) {
    Json rows = Json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (std::size_t c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
        rows.push_back(std::move(row));
    }
    return rows;
}

Json element_to_json(const AlgebraElement& x) {
    Json blocks = Json::array();
    for (const auto& b : x.blocks()) blocks.push_back(matrix_to_json(b));
    return blocks;
}

Json kraus_to_json(const CPMap& map) {
    Json table = Json::object();
    const auto& t = map.target();
    const auto& s = map.source();
    for (std::size_t j = 0; j < t.num_blocks(); ++j)
        for (std::size_t i = 0; i < s.num_blocks(); ++i) {
            const auto ops = map.kraus(j, i);
            if (ops.empty()) continue;
            Json list = Json::array();
            for (const auto& a : ops) list.push_back(matrix_to_json(a));
            table[std::to_string(j) + "," + std::to_string(i)] = std::move(list);
        }
    return table;
}

Json config_to_json(const AnalysisConfig& cfg) {
    return Json{{"tol_eq", cfg.tol_eq},
                {"convergence", cfg.convergence},
                {"psd", cfg.psd},
                {"max_iter", cfg.max_iter},
                {"cesaro_cap", cfg.cesaro_cap},
                {"cauchy_window", cfg.cauchy_window},
                {"levels", cfg.levels},
                {"samples", cfg.samples},
                {"seed", cfg.seed},
                {"minimality_tol", cfg.minimality_tol},
                {"minimality_max_iter", cfg.minimality_max_iter}};
}

Json emit_problem(const ProblemFile& p) {
    Json doc;
    doc["version"] = p.version;
    const auto dims = p.algebra.dims();
    doc["algebra"] = Json{{"blocks", std::vector<std::size_t>(dims.begin(), dims.end())}};
    Json maps = Json::array();
    for (const auto& m : p.maps) {
        Json entry{{"name", m.name}, {"kind", m.kind}};
        if (m.raw) entry["superoperator"] = matrix_to_json(m.raw->matrix);
        else entry["kraus"] = kraus_to_json(m.map);
        maps.push_back(std::move(entry));
    }
    doc["maps"] = std::move(maps);
    if (p.projection) doc["projection"] = element_to_json(*p.projection);
    if (!p.tasks.empty()) {
        Json tasks = Json::array();
        for (const auto& t : p.tasks)
            tasks.push_back(Json{{"name", t.name},
                                 {"type", t.type},
                                 {"input", element_to_json(t.input)},
                                 {"expect", t.expect}});
        doc["tasks"] = std::move(tasks);
    }
    doc["config"] = config_to_json(p.config);
    return doc;
}

void save_problem(const ProblemFile& problem, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + path.string());
    out << emit_problem(problem).dump(2) << '\n';
}

} // namespace cpfix
