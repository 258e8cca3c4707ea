#include "tamp/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include "tamp/error.hpp"

namespace tamp {

Polynomial::Polynomial(std::vector<double> c) : coeffs(std::move(c)) {
  while (!coeffs.empty() && coeffs.back() == 0.0) coeffs.pop_back();
}

double Polynomial::operator()(double x) const {
  double v = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) v = v * x + *it;
  return v;
}

Eigen::VectorXd Polynomial::apply(const Eigen::VectorXd& x) const {
  Eigen::ArrayXd v = Eigen::ArrayXd::Zero(x.size());
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) v = v * x.array() + *it;
  return v.matrix();
}

Polynomial derivative(const Polynomial& p) {
  std::vector<double> c;
  for (size_t k = 1; k < p.coeffs.size(); ++k) c.push_back(static_cast<double>(k) * p.coeffs[k]);
  return Polynomial(std::move(c));
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
  std::vector<double> c(std::max(a.coeffs.size(), b.coeffs.size()), 0.0);
  for (size_t k = 0; k < a.coeffs.size(); ++k) c[k] += a.coeffs[k];
  for (size_t k = 0; k < b.coeffs.size(); ++k) c[k] += b.coeffs[k];
  return Polynomial(std::move(c));
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.is_zero() || b.is_zero()) return Polynomial();
  std::vector<double> c(a.coeffs.size() + b.coeffs.size() - 1, 0.0);
  for (size_t i = 0; i < a.coeffs.size(); ++i) {
    for (size_t j = 0; j < b.coeffs.size(); ++j) c[i + j] += a.coeffs[i] * b.coeffs[j];
  }
  return Polynomial(std::move(c));
}

Polynomial operator*(double s, const Polynomial& p) {
  std::vector<double> c = p.coeffs;
  for (double& x : c) x *= s;
  return Polynomial(std::move(c));
}

Polynomial preset_polynomial(const std::string& name) {
  if (name == "identity") return Polynomial({0.0, 1.0});
  if (name == "square_centered") return Polynomial({-1.0, 0.0, 1.0});
  if (name == "cube_hermite") return Polynomial({0.0, -3.0, 0.0, 1.0});
  if (name == "relu_poly3") {
    // Hermite projection of max(x, 0) onto degree <= 3 under N(0,1); the
    // cubic coefficient vanishes.
    double c = 1.0 / (2.0 * std::sqrt(2.0 * std::numbers::pi));
    return Polynomial({c, 0.5, c});
  }
  throw InvalidInput("unknown polynomial preset: " + name);
}

std::vector<std::string> polynomial_preset_names() {
  return {"identity", "square_centered", "cube_hermite", "relu_poly3"};
}

std::string to_string(const Polynomial& p) {
  if (p.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (int k = p.degree(); k >= 0; --k) {
    double c = p.coeffs[k];
    if (c == 0.0) continue;
    os << (first ? (c < 0 ? "-" : "") : (c < 0 ? " - " : " + "));
    double a = std::abs(c);
    if (a != 1.0 || k == 0) os << a;
    if (k >= 1) os << "x";
    if (k >= 2) os << "^" << k;
    first = false;
  }
  return os.str();
}

GaussianLaw::GaussianLaw(Eigen::MatrixXd covariance)
    : mean(Eigen::VectorXd::Zero(covariance.rows())),
      cov(std::move(covariance)),
      deterministic(cov.rows(), 0) {}

void GaussianLaw::fix(int i, double value) {
  if (i < 0 || i >= dim()) throw InvalidInput("GaussianLaw::fix: index out of range");
  deterministic[i] = 1;
  mean[i] = value;
  cov.row(i).setZero();
  cov.col(i).setZero();
}

void GaussianLaw::validate() const {
  if (cov.rows() != cov.cols()) throw InvalidInput("GaussianLaw: covariance not square");
  if (mean.size() != cov.rows() || static_cast<Eigen::Index>(deterministic.size()) != cov.rows())
    throw InvalidInput("GaussianLaw: mean/mask size mismatch");
  if (dim() > 0 && (cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw InvalidInput("GaussianLaw: covariance not symmetric");
  for (int i = 0; i < dim(); ++i) {
    if (deterministic[i]) {
      if (cov.row(i).cwiseAbs().maxCoeff() > 0.0)
        throw InvalidInput("GaussianLaw: deterministic coordinate with variance");
    } else if (mean[i] != 0.0) {
      throw InvalidInput("GaussianLaw: random coordinates must be centered");
    }
  }
}

MomentOracle::MomentOracle(GaussianLaw law) : law_(std::move(law)) { law_.validate(); }

double MomentOracle::moment(const std::vector<int>& exponents) {
  if (static_cast<int>(exponents.size()) != law_.dim())
    throw InvalidInput("isserlis_moment: exponent vector has wrong length");
  int total = 0;
  double constant = 1.0;
  std::vector<int> e(exponents.size(), 0);
  for (size_t i = 0; i < exponents.size(); ++i) {
    if (exponents[i] < 0) throw InvalidInput("isserlis_moment: negative exponent");
    if (law_.deterministic[i]) {
      constant *= std::pow(law_.mean[i], exponents[i]);
    } else {
      e[i] = exponents[i];
      total += exponents[i];
    }
  }
  if (total > kMaxGaussianDegree) throw SizeError("isserlis_moment: degree above 16");
  if (total % 2) return 0.0;
  if (constant == 0.0) return 0.0;
  return constant * centered(e);
}

// Pair one copy of the first present variable with every other copy.
double MomentOracle::centered(std::vector<int>& e) {
  auto first = std::find_if(e.begin(), e.end(), [](int x) { return x > 0; });
  if (first == e.end()) return 1.0;
  auto it = memo_.find(e);
  if (it != memo_.end()) return it->second;
  int i = static_cast<int>(first - e.begin());
  double v = 0.0;
  --e[i];
  for (int j = i; j < static_cast<int>(e.size()); ++j) {
    if (e[j] == 0 || law_.cov(i, j) == 0.0) continue;
    double ways = e[j];
    --e[j];
    v += ways * law_.cov(i, j) * centered(e);
    ++e[j];
  }
  ++e[i];
  memo_.emplace(e, v);
  return v;
}

double isserlis_moment(const std::vector<int>& exponents, const GaussianLaw& law) {
  MomentOracle oracle(law);
  return oracle.moment(exponents);
}

double poly_expectation(const std::vector<std::pair<int, Polynomial>>& factors,
                        MomentOracle& oracle) {
  const int dim = oracle.law().dim();
  int degree = 0;
  for (const auto& [i, p] : factors) {
    if (i < 0 || i >= dim) throw InvalidInput("poly_expectation: coordinate out of range");
    if (p.is_zero()) return 0.0;
    if (!oracle.law().deterministic[i]) degree += p.degree();
  }
  if (degree > kMaxGaussianDegree) throw SizeError("poly_expectation: degree above 16");
  std::vector<int> e(dim, 0);
  std::function<double(size_t)> rec = [&](size_t k) -> double {
    if (k == factors.size()) return oracle.moment(e);
    const auto& [i, p] = factors[k];
    double s = 0.0;
    for (int a = 0; a <= p.degree(); ++a) {
      if (p.coeffs[a] == 0.0) continue;
      e[i] += a;
      s += p.coeffs[a] * rec(k + 1);
      e[i] -= a;
    }
    return s;
  };
  return rec(0);
}

double poly_expectation(const std::vector<std::pair<int, Polynomial>>& factors,
                        const GaussianLaw& law) {
  MomentOracle oracle(law);
  return poly_expectation(factors, oracle);
}

void MultiPoly::add(const std::vector<int>& exponents, double c) {
  if (static_cast<int>(exponents.size()) != dim) throw InvalidInput("MultiPoly: wrong exponent length");
  if (c == 0.0) return;
  auto [it, inserted] = terms.emplace(exponents, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0.0) terms.erase(it);
  }
}

double MultiPoly::operator()(const Eigen::VectorXd& x) const {
  double s = 0.0;
  for (const auto& [e, c] : terms) {
    double t = c;
    for (int i = 0; i < dim; ++i) t *= std::pow(x[i], e[i]);
    s += t;
  }
  return s;
}

int MultiPoly::degree() const {
  int d = -1;
  for (const auto& [e, c] : terms) {
    int s = 0;
    for (int x : e) s += x;
    d = std::max(d, s);
  }
  return d;
}

MultiPoly multiply(const MultiPoly& a, const MultiPoly& b) {
  if (a.dim != b.dim) throw InvalidInput("MultiPoly: dimension mismatch");
  MultiPoly out{a.dim, {}};
  for (const auto& [ea, ca] : a.terms) {
    for (const auto& [eb, cb] : b.terms) {
      std::vector<int> e(ea);
      for (int i = 0; i < a.dim; ++i) e[i] += eb[i];
      out.add(e, ca * cb);
    }
  }
  return out;
}

MultiPoly operator+(const MultiPoly& a, const MultiPoly& b) {
  if (a.dim != b.dim) throw InvalidInput("MultiPoly: dimension mismatch");
  MultiPoly out = a;
  for (const auto& [e, c] : b.terms) out.add(e, c);
  return out;
}

MultiPoly operator*(double s, const MultiPoly& p) {
  MultiPoly out{p.dim, {}};
  for (const auto& [e, c] : p.terms) out.add(e, s * c);
  return out;
}

double expectation(const MultiPoly& p, MomentOracle& oracle) {
  double s = 0.0;
  for (const auto& [e, c] : p.terms) s += c * oracle.moment(e);
  return s;
}

double max_coeff_diff(const MultiPoly& a, const MultiPoly& b) {
  double m = 0.0;
  for (const auto& [e, c] : (a + (-1.0) * b).terms) m = std::max(m, std::abs(c));
  return m;
}

MultiPoly wick_product(const std::vector<int>& alpha, const GaussianLaw& law) {
  if (alpha.size() > 10) throw SizeError("wick_product: more than 10 factors");
  const int dim = law.dim();
  for (int i : alpha) {
    if (i < 0 || i >= dim) throw InvalidInput("wick_product: index out of range");
  }
  MultiPoly out{dim, {}};
  const int m = static_cast<int>(alpha.size());
  std::vector<char> used(m, 0);
  std::vector<int> free_exp(dim, 0);
  // Position k is either left free or matched with a later position.
  std::function<void(int, double)> rec = [&](int k, double w) {
    while (k < m && used[k]) ++k;
    if (k == m) {
      out.add(free_exp, w);
      return;
    }
    used[k] = 1;
    ++free_exp[alpha[k]];
    rec(k + 1, w);
    --free_exp[alpha[k]];
    for (int j = k + 1; j < m; ++j) {
      if (used[j]) continue;
      double s = law.cov(alpha[k], alpha[j]);
      if (s == 0.0) continue;
      used[j] = 1;
      rec(k + 1, -w * s);
      used[j] = 0;
    }
    used[k] = 0;
  };
  rec(0, 1.0);
  return out;
}

}  // namespace tamp
