#pragma once

#include <Eigen/Core>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace gpbo {

enum class ParameterType { kDouble, kInteger, kDiscrete, kCategorical };
enum class ScaleType { kLinear, kLog, kReverseLog };

/// One dimension of the search space.
///
/// DOUBLE and INTEGER use [min, max]. DISCRETE uses a strictly increasing list
/// of reals and is scaled over [front, back]. CATEGORICAL uses an ordered list
/// of strings and carries no scaling.
struct ParameterConfig {
  std::string name;
  ParameterType type = ParameterType::kDouble;
  double min = 0.0;
  double max = 1.0;
  std::vector<double> feasible_values;
  std::vector<std::string> categories;
  ScaleType scaling = ScaleType::kLinear;

  static ParameterConfig Double(std::string name, double lo, double hi, ScaleType scale = ScaleType::kLinear);
  static ParameterConfig Integer(std::string name, int lo, int hi, ScaleType scale = ScaleType::kLinear);
  static ParameterConfig Discrete(std::string name, std::vector<double> values, ScaleType scale = ScaleType::kLinear);
  static ParameterConfig Categorical(std::string name, std::vector<std::string> values);

  /// Throws ValidationError when the invariants of the declared kind do not hold.
  void validate() const;

  bool is_categorical() const { return type == ParameterType::kCategorical; }
  /// Scaling bounds; for DISCRETE these are the extreme feasible values.
  double lower() const;
  double upper() const;
  int num_categories() const { return static_cast<int>(categories.size()); }
  /// Index of `value` in `categories`, or -1.
  int category_index(const std::string& value) const;
};

using ParameterValue = std::variant<double, std::string>;
using ParameterDict = std::map<std::string, ParameterValue>;

/// Model-side representation of a parameter assignment.
struct FeatureVector {
  Eigen::VectorXd continuous;    // one entry per non-categorical parameter, in [0, 1]
  std::vector<int> categorical;  // one category index per categorical parameter

  bool operator==(const FeatureVector& other) const {
    return continuous == other.continuous && categorical == other.categorical;
  }
};

/// Maps a value of a non-categorical parameter into [0, 1].
/// Throws std::domain_error for non-positive inputs under LOG/REVERSE_LOG scaling.
double scale_to_unit(double value, const ParameterConfig& config);

/// Inverse of scale_to_unit. INTEGER results are rounded, DISCRETE results snap
/// to the nearest feasible value.
double unscale_from_unit(double u, const ParameterConfig& config);

/// Nearest representable value of a non-categorical parameter (rounding for
/// INTEGER, nearest member for DISCRETE, clamping for all).
double snap_to_feasible(double value, const ParameterConfig& config);

class SearchSpace {
 public:
  SearchSpace() = default;
  explicit SearchSpace(std::vector<ParameterConfig> parameters);

  const std::vector<ParameterConfig>& parameters() const { return parameters_; }
  bool empty() const { return parameters_.empty(); }
  int size() const { return static_cast<int>(parameters_.size()); }
  int num_continuous() const { return static_cast<int>(continuous_.size()); }
  int num_categorical() const { return static_cast<int>(categorical_.size()); }

  /// i-th non-categorical / categorical parameter in canonical order.
  const ParameterConfig& continuous(int i) const { return parameters_[continuous_[i]]; }
  const ParameterConfig& categorical(int j) const { return parameters_[categorical_[j]]; }
  const ParameterConfig* find(const std::string& name) const;

  /// Throws ValidationError for missing parameters or unknown categories.
  /// Out-of-range numeric values are clamped into [0, 1] with a warning.
  FeatureVector featurize(const ParameterDict& params) const;

  /// Unit-cube features back to user values. Continuous entries are clamped to
  /// [0, 1] first; categorical indices must be valid.
  ParameterDict unfeaturize(const FeatureVector& features) const;

  /// True when every parameter is present and holds a feasible value.
  bool contains(const ParameterDict& params) const;

 private:
  std::vector<ParameterConfig> parameters_;
  std::vector<int> continuous_;
  std::vector<int> categorical_;
};

enum class TrialState { kPending, kCompleted, kInfeasible };

struct Trial {
  int id = 0;
  ParameterDict parameters;
  std::optional<std::vector<double>> measurement;
  TrialState state = TrialState::kPending;
  /// Logical clock values: creation and completion order within a study.
  long created_tick = 0;
  long completed_tick = -1;
  std::map<std::string, std::string> metadata;
};

std::string to_string(ParameterType type);
std::string to_string(ScaleType scale);
std::string to_string(TrialState state);
ParameterType parse_parameter_type(const std::string& s);
ScaleType parse_scale_type(const std::string& s);
TrialState parse_trial_state(const std::string& s);

}  // namespace gpbo
