#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace tamp {

// Neumaier-compensated sum.
class CompensatedSum {
 public:
  void add(double x);
  double total() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double compensated_mean(const Eigen::VectorXd& v);

struct MeanSE {
  double mean = 0.0;
  double se = 0.0;  // NaN with fewer than 2 samples
  int count = 0;
};
MeanSE mean_se(const std::vector<double>& xs);

// Least-squares slope of log|y| against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

// FNV-1a, printed as 16 hex digits.
std::uint64_t fnv1a(const std::string& s);
std::string hash_hex(std::uint64_t h);

}  // namespace tamp
