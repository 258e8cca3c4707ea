#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "tamp/freeprob.hpp"
#include "tamp/gaussian.hpp"

namespace tamp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class OnsagerMode {
  exact_treelike,   // distinct-index walk sums b_{s,t}
  scalar_kappa,     // orthogonally invariant: kappa_{t-s} prod <f'_r>
  punctured_kappa,  // as scalar_kappa with centered f_s and Gaussian x_0
  block_goe,        // (A.^2 f'_{t-1}) . f_{t-2}
  community,        // GOE term plus kappa terms restricted to block 0
  none,             // no correction (ablation)
};

std::string mode_name(OnsagerMode m);
OnsagerMode parse_mode(const std::string& s);

struct AMPConfig {
  // f_0, f_1, ...; the last entry is reused for later iterations.
  std::vector<Polynomial> nonlinearities;
  int T = 1;
  OnsagerMode mode = OnsagerMode::scalar_kappa;
  CumulantTable kappa;  // scalar_kappa, punctured_kappa, community
  int q = 1;            // community
  std::string init = "ones";  // ones | gaussian
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  int exact_max_n = 256;
  int exact_max_T = 5;

  const Polynomial& f(int t) const;
  // Throws InvalidInput on inconsistent settings.
  void validate() const;
};

struct AMPTrace {
  Matrix iterates;  // row t-1 holds x_t, t = 1..T
  Vector x0;
  std::map<std::pair<int, int>, Vector> onsager_vectors;  // exact mode
  std::map<std::pair<int, int>, double> onsager_scalars;  // scalar modes
  std::vector<double> mean_f;       // <f_t(x_t)>, t = 0..T-1
  std::vector<double> mean_fprime;  // <f'_t(x_t)>, t = 0..T-1
};

// Distinct-index closed walk sum
//   b[i] = sum over distinct i_s = i, ..., i_{t-1} of
//          prod_{r=s+1}^{t-1} A[i_{r-1}, i_r] f'_r[i_r] * A[i_{t-1}, i_s],
// with fprime[r] the vector f'_r (entries r <= s unused). 1 <= t-s <= 5.
Vector onsager_b(const Matrix& a, const std::vector<Vector>& fprime, int s, int t);
// Direct enumeration over distinct tuples; small n only.
Vector onsager_b_brute(const Matrix& a, const std::vector<Vector>& fprime, int s, int t);

AMPTrace run_treelike(const Matrix& a, const AMPConfig& cfg);
AMPTrace run_oamp(const Matrix& a, const AMPConfig& cfg);
AMPTrace run_punctured(const Matrix& a, const AMPConfig& cfg);
AMPTrace run_block_goe(const Matrix& a, const AMPConfig& cfg);
AMPTrace run_community(const Matrix& a, const AMPConfig& cfg);
AMPTrace run_uncorrected(const Matrix& a, const AMPConfig& cfg);
// Dispatches on cfg.mode.
AMPTrace run_amp(const Matrix& a, const AMPConfig& cfg);

constexpr int kMaxPower = 6;

struct MomentSet {
  Matrix gram;    // T x T, <x_s x_t>
  Matrix powers;  // T x 6, <x_t^k>
  int count = 0;  // coordinates averaged over
};

struct MomentReport {
  MomentSet overall;
  std::vector<MomentSet> per_block;  // empty without labels
};

MomentReport empirical_state(const AMPTrace& trace,
                             const std::optional<std::vector<int>>& block_labels = std::nullopt);

}  // namespace tamp
