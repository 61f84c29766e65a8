#include "gpbo/benchmarks.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "gpbo/errors.hpp"

namespace gpbo::bench {

namespace {

double exponent_ratio(int i, int dim) { return dim > 1 ? static_cast<double>(i) / (dim - 1) : 0.0; }

// Oscillation transform used by the BBOB suite.
double t_osz(double x) {
  if (x == 0.0) return 0.0;
  const double xh = std::log(std::abs(x));
  const double c1 = x > 0 ? 10.0 : 5.5;
  const double c2 = x > 0 ? 7.9 : 3.1;
  return (x > 0 ? 1.0 : -1.0) * std::exp(xh + 0.049 * (std::sin(c1 * xh) + std::sin(c2 * xh)));
}

double rastrigin_raw(const Eigen::VectorXd& z) {
  const double two_pi = 2.0 * std::numbers::pi;
  return 10.0 * (static_cast<double>(z.size()) - (two_pi * z.array()).cos().sum()) + z.squaredNorm();
}

// Standard (minimisation) values; the public entry point negates them.
double evaluate_standard(BbobFunction fn, const Eigen::VectorXd& x) {
  const int d = static_cast<int>(x.size());
  switch (fn) {
    case BbobFunction::kSphere:
      return x.squaredNorm();
    case BbobFunction::kRastrigin:
      return rastrigin_raw(x);
    case BbobFunction::kRosenbrock: {
      const double scale = std::max(1.0, std::sqrt(static_cast<double>(d)) / 8.0);
      const Eigen::VectorXd z = (scale * x).array() + 1.0;
      double s = 0.0;
      for (int i = 0; i + 1 < d; ++i) {
        const double a = z[i] * z[i] - z[i + 1];
        s += 100.0 * a * a + (z[i] - 1.0) * (z[i] - 1.0);
      }
      return s;
    }
    case BbobFunction::kDiscus:
      return 1e6 * x[0] * x[0] + x.tail(d - 1).squaredNorm();
    case BbobFunction::kBentCigar:
      return x[0] * x[0] + 1e6 * x.tail(d - 1).squaredNorm();
    case BbobFunction::kLinearSlope: {
      // Optimum x_opt = +5 moved to the origin.
      double s = 0.0;
      for (int i = 0; i < d; ++i) {
        const double si = std::pow(10.0, exponent_ratio(i, d));
        const double z = std::min(x[i] + 5.0, 5.0);
        s += 5.0 * si - si * z;
      }
      return s;
    }
    case BbobFunction::kAttractiveSector: {
      double s = 0.0;
      for (int i = 0; i < d; ++i) {
        const double w = x[i] > 0 ? 100.0 : 1.0;
        s += (w * x[i]) * (w * x[i]);
      }
      return std::pow(t_osz(s), 0.9);
    }
    case BbobFunction::kSharpRidge:
      return x[0] * x[0] + 100.0 * std::sqrt(x.tail(d - 1).squaredNorm());
    case BbobFunction::kDifferentPowers: {
      double s = 0.0;
      for (int i = 0; i < d; ++i) s += std::pow(std::abs(x[i]), 2.0 + 4.0 * exponent_ratio(i, d));
      return std::sqrt(s);
    }
    case BbobFunction::kLunacek: {
      const double mu0 = 2.5;
      const double s = 1.0 - 1.0 / (2.0 * std::sqrt(d + 20.0) - 8.2);
      const double mu1 = -std::sqrt((mu0 * mu0 - 1.0) / s);
      const Eigen::ArrayXd xh = 2.0 * (x.array() + 1.25);
      const double a = (xh - mu0).square().sum();
      const double b = d + s * (xh - mu1).square().sum();
      const double two_pi = 2.0 * std::numbers::pi;
      return std::min(a, b) + 10.0 * (d - (two_pi * (xh - mu0)).cos().sum());
    }
  }
  throw ConfigError("unhandled BBOB function");
}

}  // namespace

const std::vector<std::string>& bbob_names() {
  static const std::vector<std::string> names = {"Sphere",      "Rastrigin",        "Rosenbrock", "Discus",
                                                 "BentCigar",   "LinearSlope",      "AttractiveSector",
                                                 "SharpRidge",  "DifferentPowers",  "Lunacek"};
  return names;
}

BbobFunction parse_bbob(const std::string& name) {
  const auto& names = bbob_names();
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw ConfigError("unknown benchmark function '" + name + "'");
  return static_cast<BbobFunction>(it - names.begin());
}

double bbob(BbobFunction fn, const Eigen::VectorXd& x) {
  if (x.size() < 1) throw ValidationError("benchmark input must have at least one dimension");
  return -evaluate_standard(fn, x);
}

double bbob(const std::string& name, const Eigen::VectorXd& x) { return bbob(parse_bbob(name), x); }

Objective shift_wrapper(Objective f, Eigen::VectorXd shift) {
  return [f = std::move(f), c = std::move(shift)](const Eigen::VectorXd& x) { return f(x - c); };
}

NoiseModel parse_noise_model(const std::string& name) {
  if (name == "GAUSSIAN") return NoiseModel::kGaussian;
  if (name == "UNIFORM") return NoiseModel::kUniform;
  if (name == "CAUCHY") return NoiseModel::kCauchy;
  throw ConfigError("unknown noise model '" + name + "'");
}

std::string to_string(NoiseModel model) {
  switch (model) {
    case NoiseModel::kGaussian:
      return "GAUSSIAN";
    case NoiseModel::kUniform:
      return "UNIFORM";
    case NoiseModel::kCauchy:
      return "CAUCHY";
  }
  return "?";
}

double gaussian_noise(double f, double normal_draw) { return f * std::exp(normal_draw); }

double uniform_noise(double f, int dim, double uniform_scale, double uniform_exponent) {
  // The optimum itself would otherwise produce 0 * inf.
  if (f == 0.0) return 0.0;
  const double base = std::max(1.0, 1e9 / (-f + kNoiseEpsilon));
  return f * uniform_scale * std::pow(base, (0.49 + 1.0 / dim) * uniform_exponent);
}

double cauchy_noise(double f, double uniform_gate, double normal_num, double normal_den) {
  const double indicator = uniform_gate < 0.2 ? 1.0 : 0.0;
  const double ratio = indicator == 0.0 ? 0.0 : normal_num / (std::abs(normal_den) + kNoiseEpsilon);
  return f - std::max(0.0, 1000.0 + indicator * ratio);
}

double apply_noise(double f, NoiseModel model, int dim, Rng& rng) {
  switch (model) {
    case NoiseModel::kGaussian:
      return gaussian_noise(f, rng.normal());
    case NoiseModel::kUniform: {
      const double a = rng.uniform();
      const double b = rng.uniform();
      return uniform_noise(f, dim, a, b);
    }
    case NoiseModel::kCauchy: {
      const double gate = rng.uniform();
      const double num = rng.normal();
      const double den = rng.normal();
      return cauchy_noise(f, gate, num, den);
    }
  }
  return f;
}

double category_value(int index) {
  if (index < 0 || index >= kCategoryCount) throw ValidationError("category index out of range");
  if (index == kCategoryCount - 1) return 5.0;
  return -5.0 + index * (10.0 / (kCategoryCount - 1));
}

int category_index_of(double value) {
  for (int k = 0; k < kCategoryCount; ++k)
    if (std::abs(category_value(k) - value) <= 1e-9) return k;
  throw ValidationError("value is not on the categorisation grid");
}

std::function<double(const std::vector<int>&)> permute_wrapper(std::function<double(const std::vector<int>&)> f,
                                                               CategoryPermutation permutation) {
  return [f = std::move(f), perm = std::move(permutation)](const std::vector<int>& idx) {
    if (idx.size() != perm.size()) throw ValidationError("category tuple has the wrong length");
    std::vector<int> mapped(idx.size());
    for (std::size_t p = 0; p < idx.size(); ++p) mapped[p] = perm[p].at(idx[p]);
    return f(mapped);
  };
}

CategoryPermutation invert(const CategoryPermutation& permutation) {
  CategoryPermutation inv(permutation.size());
  for (std::size_t p = 0; p < permutation.size(); ++p) {
    inv[p].assign(permutation[p].size(), -1);
    for (std::size_t i = 0; i < permutation[p].size(); ++i) inv[p].at(permutation[p][i]) = static_cast<int>(i);
  }
  return inv;
}

bool is_mo_benchmark(const std::string& name) { return name == "BiSphere" || name == "BiRastrigin"; }

Eigen::VectorXd mo_benchmark(const std::string& name, const Eigen::VectorXd& x) {
  const Eigen::VectorXd shifted = x.array() - 1.0;
  Eigen::VectorXd out(2);
  if (name == "BiSphere") {
    out << -x.squaredNorm(), -shifted.squaredNorm();
  } else if (name == "BiRastrigin") {
    out << -rastrigin_raw(x), -rastrigin_raw(shifted);
  } else {
    throw ConfigError("unknown multi-objective benchmark '" + name + "'");
  }
  return out;
}

Eigen::VectorXd metric_divisors(const VectorObjective& f, const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                                int grid_size) {
  if (grid_size < 2) throw ValidationError("grid_size must be at least 2");
  Eigen::VectorXd sum;
  for (int k = 0; k < grid_size; ++k) {
    const double s = static_cast<double>(k) / (grid_size - 1);
    const Eigen::VectorXd v = f(lower + s * (upper - lower)).cwiseAbs();
    if (k == 0) sum = v;
    else sum += v;
  }
  Eigen::VectorXd div = sum / grid_size;
  for (Eigen::Index i = 0; i < div.size(); ++i)
    if (div[i] == 0.0) div[i] = 1.0;
  return div;
}

VectorObjective metric_normalize(VectorObjective f, const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                                 int grid_size) {
  Eigen::VectorXd div = metric_divisors(f, lower, upper, grid_size);
  return [f = std::move(f), div = std::move(div)](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return f(x).cwiseQuotient(div);
  };
}

void BenchmarkSpec::validate() const {
  if (dimension < 1) throw ConfigError("benchmark dimension must be >= 1");
  if (!(categorize_fraction >= 0.0 && categorize_fraction <= 1.0))
    throw ConfigError("categorize_fraction must lie in [0, 1]");
  if (is_mo_benchmark(function)) {
    if (objectives != 2) throw ConfigError(function + " has exactly 2 objectives");
  } else {
    parse_bbob(function);
    if (objectives != 1) throw ConfigError(function + " has exactly 1 objective");
  }
}

int BenchmarkSpec::num_categorized() const {
  return static_cast<int>(std::lround(categorize_fraction * dimension));
}

std::string BenchmarkSpec::id() const {
  std::ostringstream os;
  os << function << "_d" << dimension;
  if (shift) os << "_shift";
  if (num_categorized() > 0) os << "_cat" << num_categorized();
  if (permute_categories && num_categorized() > 0) os << "_perm";
  if (noise) os << "_" << to_string(*noise);
  return os.str();
}

BenchmarkInstance::BenchmarkInstance(BenchmarkSpec spec, Rng& rng) : spec_(std::move(spec)) {
  spec_.validate();
  const int d = spec_.dimension;
  const int n_cat = spec_.num_categorized();

  std::vector<ParameterConfig> params;
  std::vector<std::string> labels;
  for (int k = 0; k < kCategoryCount; ++k) labels.push_back(std::to_string(k));
  for (int i = 0; i < d; ++i) {
    const std::string name = "x" + std::to_string(i);
    params.push_back(i < n_cat ? ParameterConfig::Categorical(name, labels) : ParameterConfig::Double(name, -5.0, 5.0));
  }
  problem_.space = SearchSpace(std::move(params));
  for (int m = 0; m < spec_.objectives; ++m) problem_.metrics.push_back({"f" + std::to_string(m), Goal::kMaximize});

  shift_ = Eigen::VectorXd::Zero(d);
  if (spec_.shift)
    for (int i = 0; i < d; ++i) shift_[i] = rng.uniform(-5.0, 5.0);

  permutation_.resize(n_cat);
  for (int p = 0; p < n_cat; ++p) {
    permutation_[p].resize(kCategoryCount);
    for (int k = 0; k < kCategoryCount; ++k) permutation_[p][k] = k;
    if (spec_.permute_categories) std::shuffle(permutation_[p].begin(), permutation_[p].end(), rng.engine());
  }

  divisors_ = Eigen::VectorXd::Ones(spec_.objectives);
  if (spec_.objectives > 1 && spec_.normalize_metrics) {
    const std::string fn = spec_.function;
    divisors_ = metric_divisors([fn](const Eigen::VectorXd& x) { return mo_benchmark(fn, x); },
                                Eigen::VectorXd::Constant(d, -5.0), Eigen::VectorXd::Constant(d, 5.0));
  }
}

Eigen::VectorXd BenchmarkInstance::decode(const ParameterDict& params) const {
  const int d = spec_.dimension;
  const int n_cat = spec_.num_categorized();
  Eigen::VectorXd x(d);
  for (int i = 0; i < d; ++i) {
    const std::string name = "x" + std::to_string(i);
    const auto it = params.find(name);
    if (it == params.end()) throw ValidationError("missing benchmark parameter " + name);
    if (i < n_cat) {
      const auto* label = std::get_if<std::string>(&it->second);
      if (!label) throw ValidationError("parameter " + name + " must be categorical");
      const int idx = problem_.space.parameters()[i].category_index(*label);
      x[i] = category_value(permutation_[i][idx]);
    } else {
      const auto* v = std::get_if<double>(&it->second);
      if (!v) throw ValidationError("parameter " + name + " must be numeric");
      x[i] = *v;
    }
  }
  return x;
}

Eigen::VectorXd BenchmarkInstance::evaluate_real(const Eigen::VectorXd& x) const {
  const Eigen::VectorXd z = x - shift_;
  if (spec_.objectives > 1) return mo_benchmark(spec_.function, z).cwiseQuotient(divisors_);
  Eigen::VectorXd out(1);
  out[0] = bbob(spec_.function, z);
  return out;
}

Eigen::VectorXd BenchmarkInstance::noiseless(const ParameterDict& params) const { return evaluate_real(decode(params)); }

Eigen::VectorXd BenchmarkInstance::observe(const ParameterDict& params, Rng& rng) const {
  Eigen::VectorXd y = noiseless(params);
  if (spec_.noise)
    for (Eigen::Index m = 0; m < y.size(); ++m) y[m] = apply_noise(y[m], *spec_.noise, spec_.dimension, rng);
  return y;
}

}  // namespace gpbo::bench
