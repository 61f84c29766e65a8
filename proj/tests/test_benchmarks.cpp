#include <cmath>
#include <set>

#include "doctest.h"
#include "gpbo/benchmarks.hpp"
#include "gpbo/errors.hpp"
#include "oracles.hpp"

using namespace gpbo;
using namespace gpbo::bench;

namespace {

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

TEST_CASE("bbob examples") {
  CHECK(bbob("Sphere", Eigen::Vector2d(0, 0)) == 0.0);
  CHECK(bbob("Sphere", Eigen::Vector2d(1, 1)) == doctest::Approx(-2));
  CHECK(bbob("Rastrigin", Eigen::Vector3d::Zero()) == doctest::Approx(0).epsilon(1e-12));
  CHECK(bbob("Rastrigin", Eigen::Vector3d(1, 0, 0)) == doctest::Approx(-1).epsilon(1e-12));
  for (const auto& name : bbob_names())
    for (int d : {1, 2, 7}) CHECK(std::abs(bbob(name, Eigen::VectorXd::Zero(d))) < 1e-9);
  CHECK_THROWS_AS(parse_bbob("Ackley"), ConfigError);
}

TEST_CASE("bbob agrees with reference definitions") {
  using Ref = double (*)(const std::vector<double>&);
  const std::vector<std::pair<std::string, Ref>> refs = {
      {"Sphere", oracle::bbob::sphere},
      {"Rastrigin", oracle::bbob::rastrigin},
      {"Rosenbrock", oracle::bbob::rosenbrock},
      {"Discus", oracle::bbob::discus},
      {"BentCigar", oracle::bbob::bent_cigar},
      {"LinearSlope", oracle::bbob::linear_slope},
      {"AttractiveSector", oracle::bbob::attractive_sector},
      {"SharpRidge", oracle::bbob::sharp_ridge},
      {"DifferentPowers", oracle::bbob::different_powers},
      {"Lunacek", oracle::bbob::lunacek},
  };
  REQUIRE(refs.size() == bbob_names().size());
  Rng rng(17);
  for (const auto& [name, ref] : refs) {
    for (int i = 0; i < 5; ++i) {
      const int d = 2 + i;
      Eigen::VectorXd x(d);
      for (int k = 0; k < d; ++k) x[k] = rng.uniform(-5, 5);
      CAPTURE(name);
      CHECK(bbob(name, x) == doctest::Approx(-ref(to_std(x))).epsilon(1e-12));
    }
  }
}

TEST_CASE("shift wrapper") {
  const Eigen::Vector3d c(1.5, -2, 0.25);
  Objective sphere = [](const Eigen::VectorXd& x) { return bbob(BbobFunction::kSphere, x); };
  const auto shifted = shift_wrapper(sphere, c);
  CHECK(shifted(c) == 0.0);
  CHECK(shifted(c + Eigen::Vector3d::UnitX()) == doctest::Approx(-1));
  const auto identity = shift_wrapper(sphere, Eigen::Vector3d::Zero());
  const Eigen::Vector3d x(0.3, 2, -1);
  CHECK(identity(x) == sphere(x));
}

TEST_CASE("categorisation grid") {
  CHECK(category_value(0) == -5.0);
  CHECK(category_value(9) == 5.0);
  CHECK(category_value(4) == doctest::Approx(-0.5556).epsilon(1e-4));
  for (int k = 0; k < kCategoryCount; ++k) CHECK(category_index_of(category_value(k)) == k);
  CHECK_THROWS_AS(category_index_of(0.1), ValidationError);
}

TEST_CASE("noise formulas") {
  CHECK(gaussian_noise(-3.0, 0.0) == -3.0);
  CHECK(cauchy_noise(-7.0, 0.5, 1.3, -0.2) == -1007.0);
  CHECK(cauchy_noise(-7.0, 0.1, -2000.0, 1.0) == -7.0);
  CHECK(cauchy_noise(-7.0, 0.1, 3.0, 1.0) == doctest::Approx(-1010.0));
  CHECK(uniform_noise(-1e9, 4, 0.37, 0.9) == doctest::Approx(-1e9 * 0.37));
  const double f = -2.0;
  CHECK(uniform_noise(f, 4, 0.5, 0.5) == doctest::Approx(f * 0.5 * std::pow(1e9 / 2.0, (0.49 + 0.25) * 0.5)));
  CHECK(parse_noise_model("CAUCHY") == NoiseModel::kCauchy);
  CHECK(to_string(NoiseModel::kUniform) == "UNIFORM");
}

TEST_CASE("noise statistics") {
  Rng rng(3);
  const int n = 100000;
  double mult = 0;
  int off_branch = 0;
  for (int i = 0; i < n; ++i) {
    mult += apply_noise(-1.0, NoiseModel::kGaussian, 3, rng) / -1.0;
    off_branch += apply_noise(-5.0, NoiseModel::kCauchy, 3, rng) == -1005.0;
  }
  CHECK(std::abs(mult / n / std::exp(0.5) - 1.0) < 0.02);
  CHECK(off_branch / double(n) > 0.78);
  CHECK(off_branch / double(n) < 0.82);
}

TEST_CASE("permutation wrapper") {
  const std::function<double(const std::vector<int>&)> f = [](const std::vector<int>& idx) {
    double s = 0;
    for (std::size_t i = 0; i < idx.size(); ++i) s += std::pow(7.0, i) * idx[i];
    return s;
  };
  CategoryPermutation id = {{0, 1, 2, 3, 4}, {0, 1, 2, 3, 4}, {0, 1, 2, 3, 4}};
  CategoryPermutation pi = {{3, 0, 4, 1, 2}, {1, 0, 2, 4, 3}, {4, 3, 2, 1, 0}};
  const auto fid = permute_wrapper(f, id);
  const auto round_trip = permute_wrapper(permute_wrapper(f, pi), invert(pi));
  for (int a = 0; a < 5; ++a)
    for (int b = 0; b < 5; ++b)
      for (int c = 0; c < 5; ++c) {
        const std::vector<int> idx = {a, b, c};
        CHECK(fid(idx) == f(idx));
        CHECK(round_trip(idx) == f(idx));
      }
  const auto swapped = permute_wrapper([](const std::vector<int>& i) { return i[0] == 1 ? 10.0 : 20.0; }, {{1, 0}});
  CHECK(swapped({0}) == 10.0);
}

TEST_CASE("multi-objective benchmarks") {
  const int d = 4;
  const auto at = [&](double v) { return mo_benchmark("BiSphere", Eigen::VectorXd::Constant(d, v)); };
  CHECK(at(0)[0] == 0.0);
  CHECK(at(0)[1] == doctest::Approx(-d));
  CHECK(at(1)[0] == doctest::Approx(-d));
  CHECK(at(1)[1] == 0.0);
  CHECK(at(0.5)[0] == doctest::Approx(-d / 4.0));
  CHECK(at(0.5)[1] == doctest::Approx(-d / 4.0));
  CHECK(std::abs(mo_benchmark("BiRastrigin", Eigen::VectorXd::Zero(3))[0]) < 1e-12);
  CHECK(is_mo_benchmark("BiSphere"));
  CHECK(!is_mo_benchmark("Sphere"));
  CHECK_THROWS(mo_benchmark("ZDT1", Eigen::VectorXd::Zero(3)));
}

TEST_CASE("metric normalisation") {
  const int d = 5;
  const Eigen::VectorXd lo = Eigen::VectorXd::Constant(d, -5), hi = Eigen::VectorXd::Constant(d, 5);
  VectorObjective bi = [](const Eigen::VectorXd& x) { return mo_benchmark("BiSphere", x); };
  // Brute-force mean absolute value on the diagonal grid.
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  for (int g = 0; g < 100; ++g) {
    const double s = g / 99.0;
    std::vector<double> x(d, -5 + 10 * s), x1(d, -5 + 10 * s - 1);
    mean[0] += oracle::bbob::sphere(x) / 100;
    mean[1] += oracle::bbob::sphere(x1) / 100;
  }
  const auto norm = metric_normalize(bi, lo, hi);
  const Eigen::VectorXd p = Eigen::VectorXd::Constant(d, 0.7);
  const Eigen::VectorXd raw = bi(p);
  CHECK(norm(p)[0] == doctest::Approx(raw[0] / mean[0]).epsilon(1e-12));
  CHECK(norm(p)[1] == doctest::Approx(raw[1] / mean[1]).epsilon(1e-12));

  VectorObjective constant = [](const Eigen::VectorXd&) { return Eigen::Vector2d(-3.0, 0.0); };
  const auto c = metric_normalize(constant, lo, hi)(p);
  CHECK(c[0] == doctest::Approx(-1));
  CHECK(c[1] == 0.0);
}

TEST_CASE("benchmark spec and instance") {
  BenchmarkSpec spec;
  spec.function = "Sphere";
  spec.dimension = 8;
  CHECK(spec.id() == "Sphere_d8_shift");
  spec.categorize_fraction = 0.25;
  CHECK(spec.num_categorized() == 2);
  spec.dimension = 0;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec.dimension = 8;
  spec.function = "Nope";
  CHECK_THROWS_AS(spec.validate(), ConfigError);

  BenchmarkSpec plain;
  plain.dimension = 3;
  Rng rng(5);
  BenchmarkInstance inst(plain, rng);
  CHECK(inst.problem().space.size() == 3);
  CHECK(inst.shift().cwiseAbs().maxCoeff() <= 5.0);
  ParameterDict at_shift;
  for (int i = 0; i < 3; ++i) at_shift["x" + std::to_string(i)] = inst.shift()[i];
  CHECK(inst.noiseless(at_shift)[0] == 0.0);
  for (const auto& p : inst.problem().space.parameters()) CHECK(p.type == ParameterType::kDouble);
}

TEST_CASE("categorised and permuted instance") {
  BenchmarkSpec spec;
  spec.function = "Sphere";
  spec.dimension = 3;
  spec.shift = false;
  spec.categorize_fraction = 2.0 / 3;
  spec.permute_categories = true;
  Rng rng(11);
  BenchmarkInstance inst(spec, rng);
  const auto& params = inst.problem().space.parameters();
  CHECK(params[0].type == ParameterType::kCategorical);
  CHECK(params[1].type == ParameterType::kCategorical);
  CHECK(params[2].type == ParameterType::kDouble);
  const auto& pi = inst.permutation();
  for (int a = 0; a < kCategoryCount; ++a) {
    ParameterDict p = {{"x0", std::to_string(a)}, {"x1", std::string("4")}, {"x2", 0.5}};
    const Eigen::VectorXd x = inst.decode(p);
    CHECK(x[0] == category_value(pi[0][a]));
    CHECK(x[1] == category_value(pi[1][4]));
    CHECK(x[2] == 0.5);
    CHECK(inst.noiseless(p)[0] == doctest::Approx(bbob(BbobFunction::kSphere, x)));
  }
  std::set<int> seen(pi[0].begin(), pi[0].end());
  CHECK(seen.size() == kCategoryCount);
}

TEST_CASE("noisy instance keeps noiseless values separate") {
  BenchmarkSpec spec;
  spec.dimension = 2;
  spec.noise = NoiseModel::kGaussian;
  Rng rng(1), noise(2);
  BenchmarkInstance inst(spec, rng);
  const ParameterDict p = {{"x0", 1.0}, {"x1", 2.0}};
  const double clean = inst.noiseless(p)[0];
  const double noisy = inst.observe(p, noise)[0];
  CHECK(clean < 0);
  CHECK(noisy < 0);
  CHECK(noisy != clean);
}
