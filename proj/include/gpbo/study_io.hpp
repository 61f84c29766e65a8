#pragma once

#include <filesystem>
#include <string>

#include "gpbo/designer.hpp"
#include "json.hpp"

namespace gpbo {

/// {"parameters": [...], "objectives": [{"name", "goal"}]}. Throws ValidationError.
ProblemStatement problem_from_json(const nlohmann::json& j);
nlohmann::json problem_to_json(const ProblemStatement& problem);

nlohmann::json parameters_to_json(const ParameterDict& params, const SearchSpace& space);
ParameterDict parameters_from_json(const nlohmann::json& j, const SearchSpace& space);

nlohmann::json trial_to_json(const Trial& trial, const SearchSpace& space);
Trial trial_from_json(const nlohmann::json& j, const SearchSpace& space);

/// Full study state: problem, trials, seed and stream counters.
nlohmann::json study_to_json(const Study& study);
/// Throws StateError for structurally invalid state documents.
Study study_from_json(const nlohmann::json& j);

/// Parses a JSON file; throws ValidationError with the parser diagnostic.
nlohmann::json read_json_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace gpbo
