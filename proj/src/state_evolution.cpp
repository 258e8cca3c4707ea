#include "tamp/state_evolution.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "tamp/error.hpp"
#include "tamp/stats.hpp"

namespace tamp {

Matrix SEKernel::mixture() const {
  Matrix m = Matrix::Zero(T, T);
  for (size_t k = 0; k < gammas.size(); ++k) m += weights[k] * gammas[k];
  return m;
}

namespace {

const Polynomial& nonlinearity(const std::vector<Polynomial>& fs, int t) {
  return fs[std::min<size_t>(t, fs.size() - 1)];
}

// One Gaussian process X_0 = 1, X_1, ..., X_T whose covariance is filled in
// as the recursion advances. Expectations only touch completed entries.
class Chain {
 public:
  Chain(const std::vector<Polynomial>& fs, int T) : fs_(fs), T_(T), gamma_(Matrix::Zero(T, T)) {
    law_ = GaussianLaw(Matrix::Zero(T + 1, T + 1));
    law_.fix(0, 1.0);
  }

  double ef(int r) { return poly_expectation({{r, nonlinearity(fs_, r)}}, oracle()); }
  double efp(int r) { return poly_expectation({{r, derivative(nonlinearity(fs_, r))}}, oracle()); }
  double eff(int a, int b) {
    return poly_expectation({{a, nonlinearity(fs_, a)}, {b, nonlinearity(fs_, b)}}, oracle());
  }
  // prod_{r=a+1}^{b-1} E f'_r(X_r)
  double efp_product(int a, int b) {
    double p = 1.0;
    for (int r = a + 1; r < b; ++r) p *= efp(r);
    return p;
  }

  // Stage row t (s <= t); committed together so that the row never reads itself.
  void stage(int s, int t, double v) { pending_.push_back({s, t, v}); }
  void commit() {
    for (const auto& [s, t, v] : pending_) {
      gamma_(s - 1, t - 1) = gamma_(t - 1, s - 1) = v;
      law_.cov(s, t) = law_.cov(t, s) = v;
    }
    pending_.clear();
    oracle_.reset();
  }
  const Matrix& gamma() const { return gamma_; }

 private:
  MomentOracle& oracle() {
    if (!oracle_) oracle_.emplace(law_);
    return *oracle_;
  }
  struct Entry {
    int s, t;
    double v;
  };
  const std::vector<Polynomial>& fs_;
  int T_;
  Matrix gamma_;
  GaussianLaw law_;
  std::optional<MomentOracle> oracle_;
  std::vector<Entry> pending_;
};

void check_inputs(const std::vector<Polynomial>& fs, int T) {
  if (T < 1) throw InvalidInput("state evolution: T must be >= 1");
  if (fs.empty()) throw InvalidInput("state evolution: no nonlinearities");
}

void check_psd(const Matrix& g, const std::string& what) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(g, Eigen::EigenvaluesOnly);
  double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
  double lo = es.eigenvalues().minCoeff();
  if (lo < -1e-9 * scale) {
    std::ostringstream os;
    os << what << ": kernel is not positive semidefinite (min eigenvalue " << lo << ")\n" << g;
    throw std::runtime_error(os.str());
  }
}

// Shared double sum over (s', t') for the orthogonal and punctured kernels.
SEKernel kappa_recursion(const std::vector<Polynomial>& fs, const CumulantTable& kappa, int T,
                         bool centered, const std::string& variant) {
  check_inputs(fs, T);
  CumulantTable k = as_cumulants(kappa);
  if (k.size() < 2 * T) throw InvalidInput(variant + ": cumulant table needs order >= 2T");
  Chain ch(fs, T);
  auto pair = [&](int a, int b) {
    if (!centered) return ch.eff(a, b);
    if (a == 0 && b == 0) return 1.0;
    if (a == 0 || b == 0) return 0.0;
    return ch.eff(a, b) - ch.ef(a) * ch.ef(b);
  };
  for (int t = 1; t <= T; ++t) {
    for (int s = 1; s <= t; ++s) {
      double g = 0.0;
      for (int sp = 0; sp < s; ++sp) {
        for (int tp = 0; tp < t; ++tp) {
          double kap = k.at(s - sp + t - tp);
          if (kap == 0.0) continue;
          g += kap * ch.efp_product(sp, s) * ch.efp_product(tp, t) * pair(sp, tp);
        }
      }
      ch.stage(s, t, g);
    }
    ch.commit();
  }
  check_psd(ch.gamma(), variant);
  SEKernel out;
  out.variant = variant;
  out.T = T;
  out.gammas = {ch.gamma()};
  out.weights = {1.0};
  return out;
}

}  // namespace

SEKernel se_orthogonal(const std::vector<Polynomial>& fs, const CumulantTable& kappa, int T) {
  return kappa_recursion(fs, kappa, T, false, "orthogonal");
}

SEKernel se_punctured(const std::vector<Polynomial>& fs, const CumulantTable& kappa, int T) {
  if (!(nonlinearity(fs, 0) == preset_polynomial("identity")))
    throw InvalidInput("se_punctured: needs f_0(x) = x");
  return kappa_recursion(fs, kappa, T, true, "punctured");
}

SEKernel se_block_goe(const std::vector<Polynomial>& fs, const Matrix& sigma, int T, BlockScale scale) {
  check_inputs(fs, T);
  const int q = static_cast<int>(sigma.rows());
  if (q < 1 || sigma.cols() != q) throw InvalidInput("se_block_goe: sigma must be square");
  if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 0.0 || sigma.minCoeff() < 0.0)
    throw InvalidInput("se_block_goe: sigma must be symmetric and nonnegative");
  Matrix kmat = scale == BlockScale::per_block ? Matrix(sigma / q) : sigma;
  std::vector<Chain> chains;
  chains.reserve(q);
  for (int c = 0; c < q; ++c) chains.emplace_back(fs, T);
  for (int t = 1; t <= T; ++t) {
    for (int s = 1; s <= t; ++s) {
      std::vector<double> e(q);
      for (int c = 0; c < q; ++c) e[c] = chains[c].eff(s - 1, t - 1);
      for (int r = 0; r < q; ++r) {
        double g = 0.0;
        for (int c = 0; c < q; ++c) g += kmat(r, c) * e[c];
        chains[r].stage(s, t, g);
      }
    }
    for (auto& ch : chains) ch.commit();
  }
  SEKernel out;
  out.variant = "block_goe";
  out.T = T;
  for (int r = 0; r < q; ++r) {
    check_psd(chains[r].gamma(), "se_block_goe");
    out.gammas.push_back(chains[r].gamma());
    out.weights.push_back(1.0 / q);
    out.block_kernel.push_back(r);
  }
  return out;
}

SEKernel se_community(const std::vector<Polynomial>& fs, const CumulantTable& kappa_inner, int q,
                      int T) {
  check_inputs(fs, T);
  if (q < 1) throw InvalidInput("se_community: q must be >= 1");
  CumulantTable k = as_cumulants(kappa_inner);
  if (k.size() < 2 * T) throw InvalidInput("se_community: cumulant table needs order >= 2T");
  if (std::abs(k.at(2) - 1.0 / q) > 1e-12)
    throw InvalidInput("se_community: inner table must have kappa_2 = 1/q");
  const double w1 = 1.0 / q, w0 = 1.0 - w1;
  Chain outside(fs, T), inside(fs, T);
  for (int t = 1; t <= T; ++t) {
    for (int s = 1; s <= t; ++s) {
      double mix = w0 * outside.eff(s - 1, t - 1) + w1 * inside.eff(s - 1, t - 1);
      double extra = 0.0;
      for (int sp = 0; sp < s; ++sp) {
        for (int tp = 0; tp < t; ++tp) {
          if (sp == s - 1 && tp == t - 1) continue;
          double kap = k.at(s - sp + t - tp);
          if (kap == 0.0) continue;
          extra += kap * inside.efp_product(sp, s) * inside.efp_product(tp, t) * inside.eff(sp, tp);
        }
      }
      outside.stage(s, t, mix);
      inside.stage(s, t, mix + extra);
    }
    outside.commit();
    inside.commit();
  }
  check_psd(outside.gamma(), "se_community");
  check_psd(inside.gamma(), "se_community");
  SEKernel out;
  out.variant = "community";
  out.T = T;
  out.gammas = {outside.gamma(), inside.gamma()};
  out.weights = {w0, w1};
  out.block_kernel.assign(q, 0);
  out.block_kernel[0] = 1;
  return out;
}

std::vector<MomentStat> aggregate_moments(const std::vector<MomentReport>& reports) {
  if (reports.empty()) throw InvalidInput("aggregate_moments: no reports");
  const int T = static_cast<int>(reports.front().overall.gram.rows());
  const size_t blocks = reports.front().per_block.size();
  for (const auto& r : reports) {
    if (r.overall.gram.rows() != T || r.per_block.size() != blocks)
      throw InvalidInput("aggregate_moments: reports have different shapes");
  }
  std::vector<MomentStat> out;
  auto emit = [&](const std::string& group, auto get) {
    for (int s = 1; s <= T; ++s) {
      for (int t = s; t <= T; ++t) {
        std::vector<double> xs;
        for (const auto& r : reports) xs.push_back(get(r).gram(s - 1, t - 1));
        MeanSE m = mean_se(xs);
        out.push_back({group, "xx", s, t, m.mean, m.se, m.count});
      }
    }
    for (int t = 1; t <= T; ++t) {
      for (int k = 1; k <= kMaxPower; ++k) {
        std::vector<double> xs;
        for (const auto& r : reports) xs.push_back(get(r).powers(t - 1, k - 1));
        MeanSE m = mean_se(xs);
        out.push_back({group, "m" + std::to_string(k), t, t, m.mean, m.se, m.count});
      }
    }
  };
  emit("all", [](const MomentReport& r) -> const MomentSet& { return r.overall; });
  for (size_t b = 0; b < blocks; ++b) {
    emit("block" + std::to_string(b),
         [b](const MomentReport& r) -> const MomentSet& { return r.per_block[b]; });
  }
  return out;
}

Verdict compare_empirical(const SEKernel& kernel, const std::vector<MomentStat>& moments,
                          double threshold) {
  Verdict v;
  v.pass = true;
  for (const auto& m : moments) {
    if (m.stat != "xx" && m.stat != "m4") continue;
    if (m.s < 1 || m.t < 1 || m.s > kernel.T || m.t > kernel.T)
      throw InvalidInput("compare_empirical: moment index beyond kernel horizon");
    std::vector<std::pair<double, const Matrix*>> parts;  // (weight, kernel)
    if (m.group == "all") {
      for (size_t k = 0; k < kernel.gammas.size(); ++k) parts.push_back({kernel.weights[k], &kernel.gammas[k]});
    } else if (m.group.rfind("block", 0) == 0) {
      size_t b = std::stoul(m.group.substr(5));
      if (b >= kernel.block_kernel.size()) continue;
      parts.push_back({1.0, &kernel.gammas[kernel.block_kernel[b]]});
    } else {
      throw InvalidInput("compare_empirical: unknown group " + m.group);
    }
    double pred = 0.0;
    for (const auto& [w, g] : parts) {
      double gt = (*g)(m.t - 1, m.t - 1);
      pred += w * (m.stat == "xx" ? (*g)(m.s - 1, m.t - 1) : 3.0 * gt * gt);
    }
    VerdictRow row{m.group, m.stat, m.s, m.t, m.mean, pred, m.se, 0.0, false};
    double diff = m.mean - pred;
    if (std::isnan(m.se)) {
      row.z = std::numeric_limits<double>::quiet_NaN();
    } else if (m.se == 0.0) {
      row.z = std::abs(diff) <= 1e-9 * std::max(1.0, std::abs(pred))
                  ? 0.0
                  : std::copysign(std::numeric_limits<double>::infinity(), diff);
    } else {
      row.z = diff / m.se;
    }
    row.pass = std::abs(row.z) <= threshold;  // NaN fails
    v.pass = v.pass && row.pass;
    if (!std::isnan(row.z)) v.max_abs_z = std::max(v.max_abs_z, std::abs(row.z));
    v.rows.push_back(row);
  }
  return v;
}

Matrix sample_from_kernel(const Matrix& gamma, int n, CounterRng& rng) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(gamma);
  Vector root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  Matrix factor = es.eigenvectors() * root.asDiagonal();
  const int T = static_cast<int>(gamma.rows());
  Matrix z(T, n);
  for (int i = 0; i < n; ++i) {
    for (int t = 0; t < T; ++t) z(t, i) = rng.normal();
  }
  return factor * z;
}

}  // namespace tamp
