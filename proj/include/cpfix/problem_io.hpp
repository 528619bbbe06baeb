#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cpfix/cpsemi.hpp"
#include "cpfix/fixpoint.hpp"
#include "cpfix/vnalg.hpp"

namespace cpfix {

using Json = nlohmann::ordered_json;

inline constexpr const char* kProblemVersion = "cpfix/1";

struct MapSpec {
    std::string name;
    std::string kind;  // "cp" or "endomorphism"
    CPMap map;
    /// Present when the map was given as a raw superoperator.
    std::optional<Superoperator> raw;
    /// Non-empty when a raw superoperator failed the Choi test.
    std::string defect;
};

struct TaskSpec {
    std::string name;
    std::string type;    // phi_limit | pi_limit | lift
    AlgebraElement input;
    std::string expect;  // "converge" (default) or "divergent"
};

struct ProblemFile {
    std::string version = kProblemVersion;
    BlockStructure algebra{std::vector<std::size_t>{1}};
    std::vector<MapSpec> maps;
    std::optional<AlgebraElement> projection;
    std::vector<TaskSpec> tasks;
    AnalysisConfig config;
};

/// Throws Error(ParseError) whose message starts with the JSON path of the
/// offending entry, e.g. `$.maps[0].kraus["1,0"][0]`.
ProblemFile parse_problem(const Json& doc);
ProblemFile load_problem(const std::filesystem::path& path);

Json emit_problem(const ProblemFile& problem);
void save_problem(const ProblemFile& problem, const std::filesystem::path& path);

Json matrix_to_json(const CMatrix& m);
Json element_to_json(const AlgebraElement& x);
Json config_to_json(const AnalysisConfig& cfg);

/// Kraus form "j,i" -> [matrices].
Json kraus_to_json(const CPMap& map);

} // namespace cpfix
