#include "gpbo/study_io.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "gpbo/errors.hpp"

namespace gpbo {

using nlohmann::json;

namespace {

Goal parse_goal(const std::string& s) {
  if (s == "MAXIMIZE") return Goal::kMaximize;
  if (s == "MINIMIZE") return Goal::kMinimize;
  throw ValidationError("unknown objective goal '" + s + "'");
}

ParameterConfig parameter_from_json(const json& j) {
  ParameterConfig p;
  p.name = j.at("name").get<std::string>();
  p.type = parse_parameter_type(j.at("type").get<std::string>());
  switch (p.type) {
    case ParameterType::kDouble:
    case ParameterType::kInteger: {
      const auto& bounds = j.at("bounds");
      if (!bounds.is_array() || bounds.size() != 2) throw ValidationError("'bounds' must be a [min, max] pair");
      p.min = bounds[0].get<double>();
      p.max = bounds[1].get<double>();
      break;
    }
    case ParameterType::kDiscrete:
      p.feasible_values = j.at("feasible_values").get<std::vector<double>>();
      break;
    case ParameterType::kCategorical:
      p.categories = j.at("feasible_values").get<std::vector<std::string>>();
      break;
  }
  if (!p.is_categorical() && j.contains("scaling")) p.scaling = parse_scale_type(j.at("scaling").get<std::string>());
  p.validate();
  return p;
}

json parameter_to_json(const ParameterConfig& p) {
  json j{{"name", p.name}, {"type", to_string(p.type)}};
  switch (p.type) {
    case ParameterType::kDouble:
      j["bounds"] = {p.min, p.max};
      break;
    case ParameterType::kInteger:
      j["bounds"] = {static_cast<long long>(p.min), static_cast<long long>(p.max)};
      break;
    case ParameterType::kDiscrete:
      j["feasible_values"] = p.feasible_values;
      break;
    case ParameterType::kCategorical:
      j["feasible_values"] = p.categories;
      return j;
  }
  j["scaling"] = to_string(p.scaling);
  return j;
}

template <typename F>
auto wrap_json_errors(F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("invalid document: ") + e.what());
  }
}

}  // namespace

ProblemStatement problem_from_json(const json& j) {
  return wrap_json_errors([&] {
    ProblemStatement problem;
    std::vector<ParameterConfig> params;
    for (const auto& pj : j.at("parameters")) params.push_back(parameter_from_json(pj));
    problem.space = SearchSpace(std::move(params));
    for (const auto& oj : j.at("objectives")) {
      MetricSpec m;
      m.name = oj.at("name").get<std::string>();
      m.goal = parse_goal(oj.value("goal", std::string("MAXIMIZE")));
      problem.metrics.push_back(std::move(m));
    }
    problem.validate();
    return problem;
  });
}

json problem_to_json(const ProblemStatement& problem) {
  json params = json::array();
  for (const auto& p : problem.space.parameters()) params.push_back(parameter_to_json(p));
  json objectives = json::array();
  for (const auto& m : problem.metrics) {
    objectives.push_back({{"name", m.name}, {"goal", m.goal == Goal::kMaximize ? "MAXIMIZE" : "MINIMIZE"}});
  }
  return {{"parameters", params}, {"objectives", objectives}};
}

json parameters_to_json(const ParameterDict& params, const SearchSpace& space) {
  json j = json::object();
  for (const auto& p : space.parameters()) {
    auto it = params.find(p.name);
    if (it == params.end()) continue;
    if (const auto* s = std::get_if<std::string>(&it->second)) {
      j[p.name] = *s;
    } else {
      const double v = std::get<double>(it->second);
      if (p.type == ParameterType::kInteger) {
        j[p.name] = static_cast<long long>(std::llround(v));
      } else {
        j[p.name] = v;
      }
    }
  }
  return j;
}

ParameterDict parameters_from_json(const json& j, const SearchSpace& space) {
  return wrap_json_errors([&] {
    ParameterDict out;
    for (const auto& p : space.parameters()) {
      const auto& v = j.at(p.name);
      if (p.is_categorical()) {
        out[p.name] = v.get<std::string>();
      } else {
        out[p.name] = v.get<double>();
      }
    }
    return out;
  });
}

json trial_to_json(const Trial& trial, const SearchSpace& space) {
  json j{{"id", trial.id},
         {"state", to_string(trial.state)},
         {"parameters", parameters_to_json(trial.parameters, space)},
         {"created_tick", trial.created_tick},
         {"completed_tick", trial.completed_tick},
         {"metadata", trial.metadata}};
  j["measurement"] = trial.measurement ? json(*trial.measurement) : json(nullptr);
  return j;
}

Trial trial_from_json(const json& j, const SearchSpace& space) {
  Trial t;
  t.id = j.at("id").get<int>();
  t.state = parse_trial_state(j.at("state").get<std::string>());
  t.parameters = parameters_from_json(j.at("parameters"), space);
  t.created_tick = j.at("created_tick").get<long>();
  t.completed_tick = j.at("completed_tick").get<long>();
  t.metadata = j.value("metadata", std::map<std::string, std::string>{});
  if (j.contains("measurement") && !j.at("measurement").is_null()) {
    t.measurement = j.at("measurement").get<std::vector<double>>();
  }
  return t;
}

json study_to_json(const Study& study) {
  json trials = json::array();
  for (const auto& t : study.completed()) trials.push_back(trial_to_json(t, study.problem().space));
  for (const auto& t : study.pending()) trials.push_back(trial_to_json(t, study.problem().space));
  return {{"version", 1},
          {"study", problem_to_json(study.problem())},
          {"seed", study.seed()},
          {"suggest_calls", study.suggest_calls()},
          {"clock", study.clock()},
          {"next_id", study.next_id()},
          {"trials", trials}};
}

Study study_from_json(const json& j) {
  try {
    if (j.at("version").get<int>() != 1) throw StateError("unsupported state version");
    Study study(problem_from_json(j.at("study")), j.at("seed").get<std::uint64_t>());
    std::vector<Trial> completed;
    std::vector<Trial> pending;
    std::set<int> ids;
    const int next_id = j.at("next_id").get<int>();
    for (const auto& tj : j.at("trials")) {
      Trial t = trial_from_json(tj, study.problem().space);
      if (!ids.insert(t.id).second || t.id < 1 || t.id >= next_id) throw StateError("invalid trial ids in state");
      if (t.state == TrialState::kCompleted &&
          (!t.measurement || static_cast<int>(t.measurement->size()) != study.problem().num_metrics())) {
        throw StateError("completed trial " + std::to_string(t.id) + " has an invalid measurement");
      }
      (t.state == TrialState::kPending ? pending : completed).push_back(std::move(t));
    }
    study.restore(std::move(completed), std::move(pending), j.at("suggest_calls").get<std::uint64_t>(),
                  j.at("clock").get<long>(), next_id);
    return study;
  } catch (const json::exception& e) {
    throw StateError(std::string("invalid state document: ") + e.what());
  } catch (const ValidationError& e) {
    throw StateError(std::string("invalid state document: ") + e.what());
  }
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) throw std::runtime_error("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace gpbo
