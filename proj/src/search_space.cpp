#include "gpbo/search_space.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "gpbo/errors.hpp"
#include "gpbo/logging.hpp"

namespace gpbo {

namespace {

double log_scale(double value, double lo, double hi) {
  if (value <= 0.0 || lo <= 0.0) {
    throw std::domain_error("log scaling requires positive values");
  }
  return (std::log(value) - std::log(lo)) / (std::log(hi) - std::log(lo));
}

double log_unscale(double u, double lo, double hi) {
  return std::exp(std::log(lo) + u * (std::log(hi) - std::log(lo)));
}

}  // namespace

ParameterConfig ParameterConfig::Double(std::string name, double lo, double hi, ScaleType scale) {
  ParameterConfig c;
  c.name = std::move(name);
  c.type = ParameterType::kDouble;
  c.min = lo;
  c.max = hi;
  c.scaling = scale;
  c.validate();
  return c;
}

ParameterConfig ParameterConfig::Integer(std::string name, int lo, int hi, ScaleType scale) {
  ParameterConfig c;
  c.name = std::move(name);
  c.type = ParameterType::kInteger;
  c.min = lo;
  c.max = hi;
  c.scaling = scale;
  c.validate();
  return c;
}

ParameterConfig ParameterConfig::Discrete(std::string name, std::vector<double> values, ScaleType scale) {
  ParameterConfig c;
  c.name = std::move(name);
  c.type = ParameterType::kDiscrete;
  c.feasible_values = std::move(values);
  c.scaling = scale;
  c.validate();
  return c;
}

ParameterConfig ParameterConfig::Categorical(std::string name, std::vector<std::string> values) {
  ParameterConfig c;
  c.name = std::move(name);
  c.type = ParameterType::kCategorical;
  c.categories = std::move(values);
  c.validate();
  return c;
}

void ParameterConfig::validate() const {
  if (name.empty()) throw ValidationError("parameter name must be non-empty");
  switch (type) {
    case ParameterType::kDouble:
    case ParameterType::kInteger:
      if (!(std::isfinite(min) && std::isfinite(max) && min < max)) {
        throw ValidationError("parameter '" + name + "': bounds must satisfy min < max");
      }
      if (type == ParameterType::kInteger && (std::floor(min) != min || std::floor(max) != max)) {
        throw ValidationError("parameter '" + name + "': integer bounds must be integral");
      }
      break;
    case ParameterType::kDiscrete:
      if (feasible_values.empty()) {
        throw ValidationError("parameter '" + name + "': feasible_values must be non-empty");
      }
      for (std::size_t i = 1; i < feasible_values.size(); ++i) {
        if (!(feasible_values[i - 1] < feasible_values[i])) {
          throw ValidationError("parameter '" + name + "': feasible_values must be strictly increasing");
        }
      }
      break;
    case ParameterType::kCategorical: {
      if (categories.empty()) {
        throw ValidationError("parameter '" + name + "': categories must be non-empty");
      }
      std::set<std::string> seen(categories.begin(), categories.end());
      if (seen.size() != categories.size()) {
        throw ValidationError("parameter '" + name + "': duplicate categories");
      }
      return;
    }
  }
  if (scaling != ScaleType::kLinear && lower() <= 0.0) {
    throw ValidationError("parameter '" + name + "': log scaling requires min > 0");
  }
}

double ParameterConfig::lower() const {
  return type == ParameterType::kDiscrete ? feasible_values.front() : min;
}

double ParameterConfig::upper() const {
  return type == ParameterType::kDiscrete ? feasible_values.back() : max;
}

int ParameterConfig::category_index(const std::string& value) const {
  auto it = std::find(categories.begin(), categories.end(), value);
  return it == categories.end() ? -1 : static_cast<int>(it - categories.begin());
}

double scale_to_unit(double value, const ParameterConfig& config) {
  if (config.is_categorical()) throw std::invalid_argument("cannot scale a categorical parameter");
  const double lo = config.lower();
  const double hi = config.upper();
  if (hi == lo) return 0.5;  // single-valued DISCRETE
  switch (config.scaling) {
    case ScaleType::kLinear:
      return (value - lo) / (hi - lo);
    case ScaleType::kLog:
      return log_scale(value, lo, hi);
    case ScaleType::kReverseLog:
      return 1.0 - log_scale(lo + hi - value, lo, hi);
  }
  return 0.0;
}

double snap_to_feasible(double value, const ParameterConfig& config) {
  switch (config.type) {
    case ParameterType::kDouble:
      return std::clamp(value, config.min, config.max);
    case ParameterType::kInteger:
      return std::clamp(std::round(value), config.min, config.max);
    case ParameterType::kDiscrete: {
      const auto& v = config.feasible_values;
      auto it = std::lower_bound(v.begin(), v.end(), value);
      if (it == v.begin()) return v.front();
      if (it == v.end()) return v.back();
      const double above = *it;
      const double below = *(it - 1);
      return (value - below) <= (above - value) ? below : above;
    }
    case ParameterType::kCategorical:
      break;
  }
  throw std::invalid_argument("cannot snap a categorical parameter");
}

double unscale_from_unit(double u, const ParameterConfig& config) {
  if (config.is_categorical()) throw std::invalid_argument("cannot unscale a categorical parameter");
  u = std::clamp(u, 0.0, 1.0);
  const double lo = config.lower();
  const double hi = config.upper();
  double value = lo;
  switch (config.scaling) {
    case ScaleType::kLinear:
      value = lo + u * (hi - lo);
      break;
    case ScaleType::kLog:
      value = log_unscale(u, lo, hi);
      break;
    case ScaleType::kReverseLog:
      value = lo + hi - log_unscale(1.0 - u, lo, hi);
      break;
  }
  return snap_to_feasible(value, config);
}

SearchSpace::SearchSpace(std::vector<ParameterConfig> parameters) : parameters_(std::move(parameters)) {
  std::set<std::string> names;
  for (int i = 0; i < size(); ++i) {
    const auto& p = parameters_[i];
    p.validate();
    if (!names.insert(p.name).second) throw ValidationError("duplicate parameter name '" + p.name + "'");
    (p.is_categorical() ? categorical_ : continuous_).push_back(i);
  }
}

const ParameterConfig* SearchSpace::find(const std::string& name) const {
  for (const auto& p : parameters_) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

FeatureVector SearchSpace::featurize(const ParameterDict& params) const {
  FeatureVector out;
  out.continuous.resize(num_continuous());
  out.categorical.resize(num_categorical());
  for (int i = 0; i < num_continuous(); ++i) {
    const auto& p = continuous(i);
    auto it = params.find(p.name);
    if (it == params.end()) throw ValidationError("missing parameter '" + p.name + "'");
    const double* value = std::get_if<double>(&it->second);
    if (value == nullptr || !std::isfinite(*value)) {
      throw ValidationError("parameter '" + p.name + "' must be a finite number");
    }
    double u = scale_to_unit(std::clamp(*value, p.lower(), p.upper()), p);
    if (*value < p.lower() || *value > p.upper()) {
      log::warn("parameter '", p.name, "' value ", *value, " outside bounds; clamped");
    }
    out.continuous[i] = std::clamp(u, 0.0, 1.0);
  }
  for (int j = 0; j < num_categorical(); ++j) {
    const auto& p = categorical(j);
    auto it = params.find(p.name);
    if (it == params.end()) throw ValidationError("missing parameter '" + p.name + "'");
    const std::string* value = std::get_if<std::string>(&it->second);
    const int index = value == nullptr ? -1 : p.category_index(*value);
    if (index < 0) throw ValidationError("infeasible category for parameter '" + p.name + "'");
    out.categorical[j] = index;
  }
  return out;
}

ParameterDict SearchSpace::unfeaturize(const FeatureVector& features) const {
  if (features.continuous.size() != num_continuous() ||
      static_cast<int>(features.categorical.size()) != num_categorical()) {
    throw ValidationError("feature vector does not match search space dimensions");
  }
  ParameterDict out;
  for (int i = 0; i < num_continuous(); ++i) {
    out[continuous(i).name] = unscale_from_unit(features.continuous[i], continuous(i));
  }
  for (int j = 0; j < num_categorical(); ++j) {
    const auto& p = categorical(j);
    const int index = features.categorical[j];
    if (index < 0 || index >= p.num_categories()) throw ValidationError("category index out of range");
    out[p.name] = p.categories[index];
  }
  return out;
}

bool SearchSpace::contains(const ParameterDict& params) const {
  if (params.size() != parameters_.size()) return false;
  for (const auto& p : parameters_) {
    auto it = params.find(p.name);
    if (it == params.end()) return false;
    if (p.is_categorical()) {
      const std::string* s = std::get_if<std::string>(&it->second);
      if (s == nullptr || p.category_index(*s) < 0) return false;
      continue;
    }
    const double* v = std::get_if<double>(&it->second);
    if (v == nullptr || !std::isfinite(*v)) return false;
    if (*v < p.lower() || *v > p.upper()) return false;
    if (p.type != ParameterType::kDouble && snap_to_feasible(*v, p) != *v) return false;
  }
  return true;
}

std::string to_string(ParameterType type) {
  switch (type) {
    case ParameterType::kDouble: return "DOUBLE";
    case ParameterType::kInteger: return "INTEGER";
    case ParameterType::kDiscrete: return "DISCRETE";
    case ParameterType::kCategorical: return "CATEGORICAL";
  }
  return "";
}

std::string to_string(ScaleType scale) {
  switch (scale) {
    case ScaleType::kLinear: return "LINEAR";
    case ScaleType::kLog: return "LOG";
    case ScaleType::kReverseLog: return "REVERSE_LOG";
  }
  return "";
}

std::string to_string(TrialState state) {
  switch (state) {
    case TrialState::kPending: return "PENDING";
    case TrialState::kCompleted: return "COMPLETED";
    case TrialState::kInfeasible: return "INFEASIBLE";
  }
  return "";
}

ParameterType parse_parameter_type(const std::string& s) {
  if (s == "DOUBLE") return ParameterType::kDouble;
  if (s == "INTEGER") return ParameterType::kInteger;
  if (s == "DISCRETE") return ParameterType::kDiscrete;
  if (s == "CATEGORICAL") return ParameterType::kCategorical;
  throw ValidationError("unknown parameter type '" + s + "'");
}

ScaleType parse_scale_type(const std::string& s) {
  if (s == "LINEAR") return ScaleType::kLinear;
  if (s == "LOG") return ScaleType::kLog;
  if (s == "REVERSE_LOG") return ScaleType::kReverseLog;
  throw ValidationError("unknown scaling '" + s + "'");
}

TrialState parse_trial_state(const std::string& s) {
  if (s == "PENDING") return TrialState::kPending;
  if (s == "COMPLETED") return TrialState::kCompleted;
  if (s == "INFEASIBLE") return TrialState::kInfeasible;
  throw ValidationError("unknown trial state '" + s + "'");
}

}  // namespace gpbo
