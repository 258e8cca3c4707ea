#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace tamp {

// Univariate polynomial, coeffs[k] multiplies x^k. Trailing zeros are trimmed.
struct Polynomial {
  std::vector<double> coeffs;

  Polynomial() = default;
  explicit Polynomial(std::vector<double> c);

  int degree() const { return static_cast<int>(coeffs.size()) - 1; }  // -1 for zero
  bool is_zero() const { return coeffs.empty(); }
  double operator()(double x) const;
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  bool operator==(const Polynomial&) const = default;
};

Polynomial derivative(const Polynomial& p);
Polynomial operator+(const Polynomial& a, const Polynomial& b);
Polynomial operator*(const Polynomial& a, const Polynomial& b);
Polynomial operator*(double s, const Polynomial& p);
// identity | square_centered | cube_hermite | relu_poly3
Polynomial preset_polynomial(const std::string& name);
std::vector<std::string> polynomial_preset_names();
std::string to_string(const Polynomial& p);

// Jointly Gaussian vector. Deterministic coordinates equal their mean; the
// rest must be centered.
struct GaussianLaw {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  std::vector<char> deterministic;

  GaussianLaw() = default;
  explicit GaussianLaw(Eigen::MatrixXd covariance);

  int dim() const { return static_cast<int>(cov.rows()); }
  // Marks coordinate i as the constant `value`; clears its row and column.
  void fix(int i, double value);
  // Throws InvalidInput on shape/symmetry problems or a non-centered random coordinate.
  void validate() const;
};

constexpr int kMaxGaussianDegree = 16;

// E[prod X_i^{e_i}] by recursive pairing, memoized over exponent vectors.
class MomentOracle {
 public:
  explicit MomentOracle(GaussianLaw law);
  const GaussianLaw& law() const { return law_; }
  double moment(const std::vector<int>& exponents);

 private:
  double centered(std::vector<int>& e);
  GaussianLaw law_;
  std::map<std::vector<int>, double> memo_;
};

double isserlis_moment(const std::vector<int>& exponents, const GaussianLaw& law);

// E[prod_k p_k(X_{i_k})]; coordinates may repeat.
double poly_expectation(const std::vector<std::pair<int, Polynomial>>& factors,
                        const GaussianLaw& law);
double poly_expectation(const std::vector<std::pair<int, Polynomial>>& factors,
                        MomentOracle& oracle);

// Polynomial in dim variables, keyed by exponent vector.
struct MultiPoly {
  int dim = 0;
  std::map<std::vector<int>, double> terms;

  void add(const std::vector<int>& exponents, double c);
  double operator()(const Eigen::VectorXd& x) const;
  int degree() const;
};

MultiPoly multiply(const MultiPoly& a, const MultiPoly& b);
MultiPoly operator+(const MultiPoly& a, const MultiPoly& b);
MultiPoly operator*(double s, const MultiPoly& p);
double expectation(const MultiPoly& p, MomentOracle& oracle);
// Largest absolute coefficient difference.
double max_coeff_diff(const MultiPoly& a, const MultiPoly& b);

// Wick product of X_{alpha[0]} ... X_{alpha[m-1]} under the law's covariance,
// sum over partial matchings M of (-1)^{|M|} prod Sigma * prod unmatched X.
// |alpha| <= 10.
MultiPoly wick_product(const std::vector<int>& alpha, const GaussianLaw& law);

}  // namespace tamp
