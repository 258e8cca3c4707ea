#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "tamp/error.hpp"
#include "tamp/gaussian.hpp"

using namespace tamp;

namespace {

Eigen::MatrixXd random_cov(int d, std::mt19937& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd b(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) b(i, j) = g(rng);
  return b * b.transpose() / d;
}

// Counts perfect matchings directly: E[X_{a_1} ... X_{a_m}] for a list of
// (possibly repeated) coordinates.
double matching_sum(std::vector<int> idx, const Eigen::MatrixXd& cov) {
  if (idx.empty()) return 1.0;
  if (idx.size() % 2) return 0.0;
  int first = idx[0];
  double total = 0.0;
  for (size_t k = 1; k < idx.size(); ++k) {
    std::vector<int> rest;
    for (size_t j = 1; j < idx.size(); ++j)
      if (j != k) rest.push_back(idx[j]);
    total += cov(first, idx[k]) * matching_sum(rest, cov);
  }
  return total;
}

}  // namespace

TEST_CASE("polynomial basics") {
  CHECK(derivative(Polynomial({0, 0, 0, 1})) == Polynomial({0, 0, 3}));
  CHECK(derivative(Polynomial({4})).is_zero());
  CHECK(derivative(preset_polynomial("square_centered")) == Polynomial({0, 2}));
  CHECK(Polynomial({1, 2, 0, 0}).degree() == 1);
  Polynomial p({1, -1, 2});
  CHECK(p(2.0) == doctest::Approx(7.0));
  Eigen::VectorXd x(3);
  x << -1, 0, 2;
  CHECK(p.apply(x)[0] == doctest::Approx(4.0));
  CHECK((p * Polynomial({0, 1}))(2.0) == doctest::Approx(14.0));
  CHECK((p + Polynomial({0, 1}))(2.0) == doctest::Approx(9.0));
  CHECK_THROWS_AS(preset_polynomial("tanh"), InvalidInput);
  for (const auto& name : polynomial_preset_names()) CHECK_FALSE(preset_polynomial(name).is_zero());
}

TEST_CASE("isserlis moments") {
  GaussianLaw one(Eigen::MatrixXd::Identity(1, 1));
  CHECK(isserlis_moment({4}, one) == doctest::Approx(3.0));
  CHECK(isserlis_moment({6}, one) == doctest::Approx(15.0));
  CHECK(isserlis_moment({3}, one) == 0.0);

  std::mt19937 rng(1);
  Eigen::MatrixXd s = random_cov(4, rng);
  GaussianLaw law(s);
  CHECK(isserlis_moment({1, 1, 1, 1}, law) ==
        doctest::Approx(s(0, 1) * s(2, 3) + s(0, 2) * s(1, 3) + s(0, 3) * s(1, 2)));
  CHECK(isserlis_moment({2, 2, 0, 0}, law) == doctest::Approx(s(0, 0) * s(1, 1) + 2 * s(0, 1) * s(0, 1)));
}

TEST_CASE("isserlis agrees with direct matching sums") {
  std::mt19937 rng(2);
  for (int it = 0; it < 100; ++it) {
    Eigen::MatrixXd s = random_cov(3, rng);
    GaussianLaw law(s);
    std::vector<int> e(3);
    std::vector<int> idx;
    for (int i = 0; i < 3; ++i) {
      e[i] = std::uniform_int_distribution<int>(0, 3)(rng);
      for (int k = 0; k < e[i]; ++k) idx.push_back(i);
    }
    CHECK(isserlis_moment(e, law) == doctest::Approx(matching_sum(idx, s)).epsilon(1e-12));
  }
}

TEST_CASE("deterministic coordinates") {
  Eigen::MatrixXd s = Eigen::MatrixXd::Identity(2, 2);
  GaussianLaw law(s);
  law.fix(0, 2.0);
  // E[c^3 X^2] = 8
  CHECK(isserlis_moment({3, 2}, law) == doctest::Approx(8.0));
  GaussianLaw bad(s);
  bad.mean[1] = 1.0;
  CHECK_THROWS_AS(bad.validate(), InvalidInput);
  Eigen::MatrixXd asym(2, 2);
  asym << 1, 0.5, 0.2, 1;
  CHECK_THROWS_AS(GaussianLaw(asym).validate(), InvalidInput);
  CHECK_THROWS_AS(isserlis_moment({17}, GaussianLaw(Eigen::MatrixXd::Identity(1, 1))), SizeError);
}

TEST_CASE("polynomial expectations") {
  Eigen::MatrixXd v(1, 1);
  v << 2.5;
  CHECK(poly_expectation({{0, Polynomial({0, 0, 1})}}, GaussianLaw(v)) == doctest::Approx(2.5));
  Eigen::MatrixXd s(2, 2);
  s << 1, 0.3, 0.3, 2;
  CHECK(poly_expectation({{0, Polynomial({0, 1})}, {1, Polynomial({0, 1})}}, GaussianLaw(s)) ==
        doctest::Approx(0.3));
  GaussianLaw unit(Eigen::MatrixXd::Identity(1, 1));
  Polynomial h3 = preset_polynomial("cube_hermite");
  CHECK(std::abs(poly_expectation({{0, h3}}, unit)) < 1e-14);
  CHECK(poly_expectation({{0, h3}, {0, h3}}, unit) == doctest::Approx(6.0));
  // Hermite orthogonality across correlated coordinates: E[He3(X) He3(Y)] = 6 rho^3
  Eigen::MatrixXd c(2, 2);
  c << 1, 0.4, 0.4, 1;
  CHECK(poly_expectation({{0, h3}, {1, h3}}, GaussianLaw(c)) == doctest::Approx(6 * 0.064));
}

TEST_CASE("wick products") {
  GaussianLaw unit(Eigen::MatrixXd::Identity(1, 1));
  MultiPoly x = wick_product({0}, unit);
  MultiPoly expect_x;
  expect_x.dim = 1;
  expect_x.add({1}, 1.0);
  CHECK(max_coeff_diff(x, expect_x) == 0.0);
  MultiPoly h2 = wick_product({0, 0}, unit);
  MultiPoly expect_h2;
  expect_h2.dim = 1;
  expect_h2.add({2}, 1.0);
  expect_h2.add({0}, -1.0);
  CHECK(max_coeff_diff(h2, expect_h2) < 1e-15);
}

TEST_CASE("wick products are orthogonal across degrees") {
  std::mt19937 rng(3);
  for (int it = 0; it < 30; ++it) {
    Eigen::MatrixXd s = random_cov(3, rng);
    GaussianLaw law(s);
    MomentOracle oracle(law);
    auto draw = [&](int len) {
      std::vector<int> a;
      for (int k = 0; k < len; ++k) a.push_back(std::uniform_int_distribution<int>(0, 2)(rng));
      return a;
    };
    int la = std::uniform_int_distribution<int>(1, 4)(rng);
    int lb = std::uniform_int_distribution<int>(0, 4)(rng);
    if (la == lb) ++la;
    MultiPoly a = wick_product(draw(la), law);
    MultiPoly b = wick_product(draw(lb), law);
    CHECK(std::abs(expectation(multiply(a, b), oracle)) < 1e-10);
    CHECK(std::abs(expectation(a, oracle)) < 1e-10);
  }
}
