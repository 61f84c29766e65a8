#pragma once

#include <Eigen/Core>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gpbo/designer.hpp"
#include "gpbo/rng.hpp"

namespace gpbo::bench {

/// Negated (maximisation) BBOB-style functions with optimum value 0 at the origin.
enum class BbobFunction {
  kSphere,
  kRastrigin,
  kRosenbrock,
  kDiscus,
  kBentCigar,
  kLinearSlope,
  kAttractiveSector,
  kSharpRidge,
  kDifferentPowers,
  kLunacek,
};

const std::vector<std::string>& bbob_names();
/// Throws ConfigError for unknown names.
BbobFunction parse_bbob(const std::string& name);
double bbob(BbobFunction fn, const Eigen::VectorXd& x);
double bbob(const std::string& name, const Eigen::VectorXd& x);

using Objective = std::function<double(const Eigen::VectorXd&)>;
using VectorObjective = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// x -> f(x - c).
Objective shift_wrapper(Objective f, Eigen::VectorXd shift);

enum class NoiseModel { kGaussian, kUniform, kCauchy };
NoiseModel parse_noise_model(const std::string& name);
std::string to_string(NoiseModel model);

inline constexpr double kNoiseEpsilon = 1e-199;

/// Noise formulas with their random draws supplied explicitly.
double gaussian_noise(double f, double normal_draw);
double uniform_noise(double f, int dim, double uniform_scale, double uniform_exponent);
double cauchy_noise(double f, double uniform_gate, double normal_num, double normal_den);

/// Draws fresh randomness and applies the chosen model to a noiseless value.
double apply_noise(double f, NoiseModel model, int dim, Rng& rng);

/// Equidistant categorisation grid: index k of 10 maps to -5 + k * 10 / 9.
inline constexpr int kCategoryCount = 10;
double category_value(int index);
/// Index of the grid point equal to `value`; throws ValidationError if none.
int category_index_of(double value);

/// Per-parameter category permutations; perm[p][i] is the category index used
/// in place of i.
using CategoryPermutation = std::vector<std::vector<int>>;
/// f_pi(idx) = f(pi_1(idx_1), ..., pi_d(idx_d)).
std::function<double(const std::vector<int>&)> permute_wrapper(std::function<double(const std::vector<int>&)> f,
                                                               CategoryPermutation permutation);
CategoryPermutation invert(const CategoryPermutation& permutation);

/// Two-metric substitutes with known Pareto sets: BiSphere and BiRastrigin.
Eigen::VectorXd mo_benchmark(const std::string& name, const Eigen::VectorXd& x);
bool is_mo_benchmark(const std::string& name);

/// Mean absolute metric value on `grid_size` evenly spaced points of the box
/// diagonal from `lower` to `upper`; zero means become 1.
Eigen::VectorXd metric_divisors(const VectorObjective& f, const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                                int grid_size = 100);
VectorObjective metric_normalize(VectorObjective f, const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                                 int grid_size = 100);

struct BenchmarkSpec {
  std::string function = "Sphere";
  int dimension = 2;
  bool shift = true;
  double categorize_fraction = 0.0;
  std::optional<NoiseModel> noise;
  bool permute_categories = false;
  int objectives = 1;
  bool normalize_metrics = true;  // multi-objective only

  void validate() const;
  int num_categorized() const;
  /// Stable identifier used in result files, e.g. "Sphere_d8_shift".
  std::string id() const;
};

/// One repeat of a benchmark: frozen shift and permutations plus the search
/// space the optimizer sees. Parameters are x0..x{D-1} over [-5, 5]; the first
/// num_categorized() become 10-way categorical.
class BenchmarkInstance {
 public:
  BenchmarkInstance(BenchmarkSpec spec, Rng& rng);

  const BenchmarkSpec& spec() const { return spec_; }
  const ProblemStatement& problem() const { return problem_; }
  const Eigen::VectorXd& shift() const { return shift_; }
  const CategoryPermutation& permutation() const { return permutation_; }

  /// Real-valued point in [-5, 5]^D for a parameter assignment.
  Eigen::VectorXd decode(const ParameterDict& params) const;
  Eigen::VectorXd noiseless(const ParameterDict& params) const;
  /// Noiseless value passed through the noise model, if any.
  Eigen::VectorXd observe(const ParameterDict& params, Rng& rng) const;

 private:
  Eigen::VectorXd evaluate_real(const Eigen::VectorXd& x) const;

  BenchmarkSpec spec_;
  ProblemStatement problem_;
  Eigen::VectorXd shift_;
  CategoryPermutation permutation_;
  Eigen::VectorXd divisors_;
};

}  // namespace gpbo::bench
