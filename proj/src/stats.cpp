#include "tamp/stats.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "tamp/error.hpp"

namespace tamp {

void CompensatedSum::add(double x) {
  double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    comp_ += (sum_ - t) + x;
  } else {
    comp_ += (x - t) + sum_;
  }
  sum_ = t;
}

double compensated_mean(const Eigen::VectorXd& v) {
  if (v.size() == 0) return 0.0;
  CompensatedSum s;
  for (Eigen::Index i = 0; i < v.size(); ++i) s.add(v[i]);
  return s.total() / static_cast<double>(v.size());
}

MeanSE mean_se(const std::vector<double>& xs) {
  MeanSE r;
  r.count = static_cast<int>(xs.size());
  if (xs.empty()) {
    r.mean = r.se = std::numeric_limits<double>::quiet_NaN();
    return r;
  }
  CompensatedSum s;
  for (double x : xs) s.add(x);
  r.mean = s.total() / r.count;
  if (r.count < 2) {
    r.se = std::numeric_limits<double>::quiet_NaN();
    return r;
  }
  CompensatedSum ss;
  for (double x : xs) ss.add((x - r.mean) * (x - r.mean));
  r.se = std::sqrt(ss.total() / (r.count - 1) / r.count);
  return r;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidInput("loglog_slope: need >= 2 points");
  const double m = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    double lx = std::log(x[i]);
    double ly = std::log(std::abs(y[i]));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace tamp
