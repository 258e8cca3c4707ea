#include "tamp/amp.hpp"

#include <cmath>
#include <functional>

#include "tamp/error.hpp"
#include "tamp/graphpoly.hpp"
#include "tamp/rng.hpp"
#include "tamp/stats.hpp"

namespace tamp {

std::string mode_name(OnsagerMode m) {
  switch (m) {
    case OnsagerMode::exact_treelike:
      return "exact_treelike";
    case OnsagerMode::scalar_kappa:
      return "scalar_kappa";
    case OnsagerMode::punctured_kappa:
      return "punctured_kappa";
    case OnsagerMode::block_goe:
      return "block_goe";
    case OnsagerMode::community:
      return "community";
    case OnsagerMode::none:
      return "none";
  }
  return "?";
}

OnsagerMode parse_mode(const std::string& s) {
  for (auto m : {OnsagerMode::exact_treelike, OnsagerMode::scalar_kappa,
                 OnsagerMode::punctured_kappa, OnsagerMode::block_goe, OnsagerMode::community,
                 OnsagerMode::none}) {
    if (mode_name(m) == s) return m;
  }
  throw InvalidInput("unknown onsager mode: " + s);
}

const Polynomial& AMPConfig::f(int t) const {
  return nonlinearities[std::min<size_t>(t, nonlinearities.size() - 1)];
}

void AMPConfig::validate() const {
  if (T < 1) throw InvalidInput("AMPConfig: T must be >= 1");
  if (nonlinearities.empty()) throw InvalidInput("AMPConfig: no nonlinearities");
  if (init != "ones" && init != "gaussian") throw InvalidInput("AMPConfig: init must be ones or gaussian");
  bool needs_kappa = mode == OnsagerMode::scalar_kappa || mode == OnsagerMode::punctured_kappa ||
                     mode == OnsagerMode::community;
  if (needs_kappa && as_cumulants(kappa).size() < T)
    throw InvalidInput("AMPConfig: cumulant table shorter than T");
  if (mode == OnsagerMode::punctured_kappa && !(f(0) == preset_polynomial("identity")))
    throw InvalidInput("AMPConfig: punctured iteration needs f_0(x) = x");
  if (mode == OnsagerMode::community && q < 1) throw InvalidInput("AMPConfig: q must be >= 1");
}

namespace {

Diagram onsager_cycle(int len) {
  Diagram d = cycle_diagram(len);
  d.roots = {0};
  return d;
}

EdgeLabeling onsager_labels(const Matrix& a, const std::vector<Vector>& fprime, int s, int t) {
  const int len = t - s;
  if (len < 1 || len > 5) throw SizeError("onsager_b: window t-s must be in [1, 5]");
  if (static_cast<int>(fprime.size()) < t) throw InvalidInput("onsager_b: missing f' vectors");
  EdgeLabeling l;
  l.n = static_cast<int>(a.rows());
  l.edge_matrices.assign(len, &a);
  l.vertex_weights.resize(len);
  for (int k = 1; k < len; ++k) {
    if (fprime[s + k].size() != a.rows()) throw InvalidInput("onsager_b: f' vector has wrong size");
    l.vertex_weights[k] = fprime[s + k];
  }
  return l;
}

void check_finite(const Vector& x, int t) {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i])) throw DivergenceError(t, static_cast<long>(i));
  }
}

void check_square(const Matrix& a) {
  if (a.rows() != a.cols() || a.rows() == 0) throw InvalidInput("AMP: matrix must be square and nonempty");
}

// Shared driver: `correction(t, state)` returns the vector subtracted from
// A f_{t-1}(x_{t-1}).
struct Run {
  const Matrix& a;
  const AMPConfig& cfg;
  AMPTrace trace;
  std::vector<Vector> x;       // x_0 .. x_t
  std::vector<Vector> fx;      // f_t(x_t) as fed to A (f_0 may be overridden)
  std::vector<Vector> fprime;  // f'_t(x_t)

  Run(const Matrix& m, const AMPConfig& c) : a(m), cfg(c) {
    check_square(a);
    cfg.validate();
    const int n = static_cast<int>(a.rows());
    trace.iterates.resize(cfg.T, n);
    Vector x0;
    if (cfg.init == "gaussian") {
      CounterRng rng(cfg.seed, cfg.stream);
      x0.resize(n);
      for (int i = 0; i < n; ++i) x0[i] = rng.normal();
    } else {
      x0 = Vector::Ones(n);
    }
    trace.x0 = x0;
    push(x0, 0);
  }

  void push(const Vector& v, int t) {
    x.push_back(v);
    fx.push_back(cfg.f(t).apply(v));
    fprime.push_back(derivative(cfg.f(t)).apply(v));
    if (t < cfg.T) {
      trace.mean_f.push_back(compensated_mean(fx.back()));
      trace.mean_fprime.push_back(compensated_mean(fprime.back()));
    }
  }

  AMPTrace go(const std::function<Vector(int)>& correction) {
    for (int t = 1; t <= cfg.T; ++t) {
      Vector next = a * fx[t - 1] - correction(t);
      check_finite(next, t);
      trace.iterates.row(t - 1) = next.transpose();
      push(next, t);
    }
    return std::move(trace);
  }

  // prod_{r=s+1}^{t-1} <f'_r>
  double fprime_product(int s, int t) const {
    double p = 1.0;
    for (int r = s + 1; r < t; ++r) p *= trace.mean_fprime[r];
    return p;
  }
};

}  // namespace

Vector onsager_b(const Matrix& a, const std::vector<Vector>& fprime, int s, int t) {
  EdgeLabeling l = onsager_labels(a, fprime, s, t);
  return eval_z(onsager_cycle(t - s), l).vector;
}

Vector onsager_b_brute(const Matrix& a, const std::vector<Vector>& fprime, int s, int t) {
  EdgeLabeling l = onsager_labels(a, fprime, s, t);
  return eval_z_brute(onsager_cycle(t - s), l).vector;
}

AMPTrace run_treelike(const Matrix& a, const AMPConfig& cfg) {
  if (a.rows() > cfg.exact_max_n || cfg.T > cfg.exact_max_T) {
    throw BudgetError("run_treelike: exact Onsager terms limited to n <= " +
                      std::to_string(cfg.exact_max_n) + ", T <= " + std::to_string(cfg.exact_max_T));
  }
  Run run(a, cfg);
  run.fx[0] = Vector::Ones(a.rows());  // f_0 = 1 in the treelike iteration
  run.trace.mean_f[0] = 1.0;
  return run.go([&](int t) {
    Vector c = Vector::Zero(a.rows());
    for (int s = 0; s < t; ++s) {
      Vector b = onsager_b(a, run.fprime, s, t);
      c += b.cwiseProduct(run.fx[s]);
      run.trace.onsager_vectors[{s, t}] = std::move(b);
    }
    return c;
  });
}

AMPTrace run_oamp(const Matrix& a, const AMPConfig& cfg) {
  Run run(a, cfg);
  CumulantTable k = as_cumulants(cfg.kappa);
  return run.go([&](int t) {
    Vector c = Vector::Zero(a.rows());
    for (int s = 0; s < t; ++s) {
      double coef = k.at(t - s) * run.fprime_product(s, t);
      run.trace.onsager_scalars[{s, t}] = coef;
      if (coef != 0.0) c += coef * run.fx[s];
    }
    return c;
  });
}

AMPTrace run_punctured(const Matrix& a, const AMPConfig& cfg) {
  AMPConfig c = cfg;
  c.init = "gaussian";
  Run run(a, c);
  CumulantTable k = as_cumulants(c.kappa);
  return run.go([&](int t) {
    Vector corr = Vector::Zero(a.rows());
    for (int s = 0; s < t; ++s) {
      double coef = k.at(t - s) * run.fprime_product(s, t);
      run.trace.onsager_scalars[{s, t}] = coef;
      if (coef != 0.0) corr += coef * (run.fx[s].array() - run.trace.mean_f[s]).matrix();
    }
    return corr;
  });
}

AMPTrace run_block_goe(const Matrix& a, const AMPConfig& cfg) {
  Run run(a, cfg);
  Matrix sq = a.cwiseAbs2();
  return run.go([&](int t) -> Vector {
    if (t < 2) return Vector::Zero(a.rows());
    Vector b = sq * run.fprime[t - 1];
    Vector c = b.cwiseProduct(run.fx[t - 2]);
    run.trace.onsager_vectors[{t - 2, t}] = std::move(b);
    return c;
  });
}

AMPTrace run_community(const Matrix& a, const AMPConfig& cfg) {
  Run run(a, cfg);
  const int n = static_cast<int>(a.rows());
  if (n % cfg.q != 0) throw InvalidInput("run_community: q must divide n");
  const int m = n / cfg.q;  // block 0 holds coordinates [0, m)
  CumulantTable k = as_cumulants(cfg.kappa);
  auto block_mean = [&](const Vector& v) { return compensated_mean(v.head(m)); };
  return run.go([&](int t) {
    Vector c = Vector::Zero(n);
    if (t >= 2) {
      double coef = run.trace.mean_fprime[t - 1];
      run.trace.onsager_scalars[{t - 2, t}] = coef;
      c += coef * run.fx[t - 2];
    }
    for (int s = 0; s < t; ++s) {
      if (s == t - 2) continue;
      double coef = k.at(t - s);
      for (int r = s + 1; r < t; ++r) coef *= block_mean(run.fprime[r]);
      if (coef != 0.0) c.head(m) += coef * run.fx[s].head(m);
    }
    return c;
  });
}

AMPTrace run_uncorrected(const Matrix& a, const AMPConfig& cfg) {
  Run run(a, cfg);
  return run.go([&](int) { return Vector::Zero(a.rows()); });
}

AMPTrace run_amp(const Matrix& a, const AMPConfig& cfg) {
  switch (cfg.mode) {
    case OnsagerMode::exact_treelike:
      return run_treelike(a, cfg);
    case OnsagerMode::scalar_kappa:
      return run_oamp(a, cfg);
    case OnsagerMode::punctured_kappa:
      return run_punctured(a, cfg);
    case OnsagerMode::block_goe:
      return run_block_goe(a, cfg);
    case OnsagerMode::community:
      return run_community(a, cfg);
    case OnsagerMode::none:
      return run_uncorrected(a, cfg);
  }
  throw InvalidInput("run_amp: bad mode");
}

namespace {

MomentSet moments_over(const Matrix& it, const std::vector<int>& rows) {
  const int T = static_cast<int>(it.rows());
  MomentSet m;
  m.gram = Matrix::Zero(T, T);
  m.powers = Matrix::Zero(T, kMaxPower);
  m.count = static_cast<int>(rows.size());
  if (rows.empty()) return m;
  for (int s = 0; s < T; ++s) {
    for (int t = s; t < T; ++t) {
      CompensatedSum acc;
      for (int i : rows) acc.add(it(s, i) * it(t, i));
      m.gram(s, t) = m.gram(t, s) = acc.total() / m.count;
    }
    for (int k = 1; k <= kMaxPower; ++k) {
      CompensatedSum acc;
      for (int i : rows) acc.add(std::pow(it(s, i), k));
      m.powers(s, k - 1) = acc.total() / m.count;
    }
  }
  return m;
}

}  // namespace

MomentReport empirical_state(const AMPTrace& trace, const std::optional<std::vector<int>>& block_labels) {
  const int n = static_cast<int>(trace.iterates.cols());
  MomentReport r;
  std::vector<int> all(n);
  for (int i = 0; i < n; ++i) all[i] = i;
  r.overall = moments_over(trace.iterates, all);
  if (block_labels) {
    if (static_cast<int>(block_labels->size()) != n)
      throw InvalidInput("empirical_state: label count differs from n");
    int q = 0;
    for (int b : *block_labels) {
      if (b < 0) throw InvalidInput("empirical_state: negative block label");
      q = std::max(q, b + 1);
    }
    std::vector<std::vector<int>> rows(q);
    for (int i = 0; i < n; ++i) rows[(*block_labels)[i]].push_back(i);
    for (const auto& rr : rows) r.per_block.push_back(moments_over(trace.iterates, rr));
  }
  return r;
}

}  // namespace tamp
