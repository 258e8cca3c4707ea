#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tamp/amp.hpp"
#include "tamp/freeprob.hpp"
#include "tamp/gaussian.hpp"
#include "tamp/rng.hpp"

namespace tamp {

// Covariance kernels indexed 1..T (entry [s-1][t-1]). Mixtures carry one
// kernel per component; block_kernel[b] names the component describing block b.
struct SEKernel {
  std::string variant;
  int T = 0;
  std::vector<Matrix> gammas;
  std::vector<double> weights;
  std::vector<int> block_kernel;

  Matrix mixture() const;
};

// f_0, f_1, ... with the last entry reused, as in AMPConfig.
SEKernel se_orthogonal(const std::vector<Polynomial>& fs, const CumulantTable& kappa, int T);
SEKernel se_punctured(const std::vector<Polynomial>& fs, const CumulantTable& kappa, int T);

// per_block: K = Sigma / q, the block-scale variance of BlockGOE(n, Sigma)
// summed over n/q coordinates; literal: K = Sigma.
enum class BlockScale { per_block, literal };
SEKernel se_block_goe(const std::vector<Polynomial>& fs, const Matrix& sigma, int T,
                      BlockScale scale = BlockScale::per_block);

// Kernels (Gamma_0 outside the community, Gamma_1 inside), weights (1-1/q, 1/q).
// The inner table must have kappa_2 = 1/q.
SEKernel se_community(const std::vector<Polynomial>& fs, const CumulantTable& kappa_inner, int q,
                      int T);

// Across-trial statistics of empirical moments, one row per
// (group, stat, s, t). group is "all" or "block<b>"; stat is "xx" for
// <x_s x_t> (s <= t) or "m<k>" for <x_t^k> (s = t). Indices are 1-based.
struct MomentStat {
  std::string group;
  std::string stat;
  int s = 0;
  int t = 0;
  double mean = 0.0;
  double se = 0.0;
  int trials = 0;
};
std::vector<MomentStat> aggregate_moments(const std::vector<MomentReport>& reports);

struct VerdictRow {
  std::string group;
  std::string stat;
  int s = 0;
  int t = 0;
  double empirical = 0.0;
  double predicted = 0.0;
  double se = 0.0;
  double z = 0.0;
  bool pass = false;
};
struct Verdict {
  std::vector<VerdictRow> rows;
  bool pass = false;
  double max_abs_z = 0.0;
};

// z-scores of <x_s x_t> against Gamma[s,t] and of <x_t^4> against
// 3 Gamma[t,t]^2, per group (mixture kernel for "all").
Verdict compare_empirical(const SEKernel& kernel, const std::vector<MomentStat>& moments,
                          double threshold = 4.0);

// n iid draws of a centered Gaussian vector with covariance gamma, as a T x n trace.
Matrix sample_from_kernel(const Matrix& gamma, int n, CounterRng& rng);

}  // namespace tamp
