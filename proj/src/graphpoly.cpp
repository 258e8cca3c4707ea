#include "tamp/graphpoly.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "tamp/basis.hpp"
#include "tamp/error.hpp"
#include "tamp/structure.hpp"

namespace tamp {

void PairwiseSum::add(double x) {
  block_ += x;
  if (++in_block_ < kBlock) return;
  std::pair<int, double> item{0, block_};
  block_ = 0.0;
  in_block_ = 0;
  while (!stack_.empty() && stack_.back().first == item.first) {
    item = {item.first + 1, stack_.back().second + item.second};
    stack_.pop_back();
  }
  stack_.push_back(item);
}

double PairwiseSum::total() const {
  double s = block_;
  for (auto it = stack_.rbegin(); it != stack_.rend(); ++it) s = it->second + s;
  return s;
}

EdgeLabeling EdgeLabeling::uniform(const Diagram& d, const Matrix& a) {
  EdgeLabeling l;
  l.n = static_cast<int>(a.rows());
  l.edge_matrices.assign(d.edges.size(), &a);
  return l;
}

bool EdgeLabeling::is_uniform() const {
  return std::all_of(edge_matrices.begin(), edge_matrices.end(),
                     [&](const Matrix* m) { return m == edge_matrices.front(); });
}

bool EdgeLabeling::has_vertex_weights() const {
  return std::any_of(vertex_weights.begin(), vertex_weights.end(),
                     [](const auto& w) { return w.has_value(); });
}

EdgeLabeling EdgeLabeling::quotient(const std::vector<int>& labels, int new_vertex_count) const {
  EdgeLabeling q;
  q.n = n;
  q.edge_matrices = edge_matrices;
  if (!has_vertex_weights()) return q;
  // same renumbering as quotient_by_labels: blocks ordered by smallest member
  std::map<int, int> rename;
  for (int lab : labels) rename.emplace(lab, static_cast<int>(rename.size()));
  q.vertex_weights.assign(new_vertex_count, std::nullopt);
  for (int v = 0; v < static_cast<int>(labels.size()); ++v) {
    if (!vertex_weights[v]) continue;
    auto& slot = q.vertex_weights[rename.at(labels[v])];
    if (slot) {
      *slot = slot->cwiseProduct(*vertex_weights[v]);
    } else {
      slot = *vertex_weights[v];
    }
  }
  return q;
}

namespace {

constexpr double kMaxTensorEntries = 33554432.0;  // 2^25

double default_budget(int n) {
  double n3 = std::pow(static_cast<double>(n), 3);
  return std::max(8.0 * n3, 1048576.0);
}

void check_labels(const Diagram& d, const EdgeLabeling& labels) {
  d.validate();
  if (labels.n < 1) throw InvalidInput("edge labeling: dimension must be positive");
  if (static_cast<int>(labels.edge_matrices.size()) != d.edge_count())
    throw InvalidInput("edge labeling: one matrix per edge required");
  const Matrix* last = nullptr;
  for (const Matrix* m : labels.edge_matrices) {
    if (!m || m->rows() != labels.n || m->cols() != labels.n)
      throw InvalidInput("edge labeling: matrix dimension mismatch");
    if (m == last) continue;
    last = m;
    // edges are unordered, so only symmetric matrices have a well-defined value
    const double scale = std::max(1.0, m->cwiseAbs().maxCoeff());
    if ((*m - m->transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
      throw InvalidInput("edge labeling: matrices must be symmetric");
  }
  if (!labels.vertex_weights.empty()) {
    if (static_cast<int>(labels.vertex_weights.size()) != d.vertex_count)
      throw InvalidInput("edge labeling: one weight slot per vertex required");
    for (const auto& w : labels.vertex_weights) {
      if (w && w->size() != labels.n) throw InvalidInput("edge labeling: weight dimension mismatch");
    }
  }
}

struct Factor {
  std::vector<int> vars;  // ascending
  double s = 1.0;
  Vector v;
  const Matrix* mref = nullptr;
  Matrix m;
  std::vector<double> t;  // row-major over vars

  const Matrix& mat() const { return mref ? *mref : m; }
};

// Effective root list: coinciding roots collapse to one.
std::vector<int> free_roots(const Diagram& d) {
  std::vector<int> r = d.roots;
  if (r.size() == 2 && r[0] == r[1]) r.pop_back();
  return r;
}

std::vector<std::vector<int>> factor_scopes(const Diagram& d, bool weights,
                                            const EdgeLabeling* labels) {
  std::vector<std::vector<int>> scopes;
  for (auto [a, b] : d.edges) {
    if (a == b) {
      scopes.push_back({a});
    } else {
      scopes.push_back({a, b});
    }
  }
  if (weights) {
    for (int v = 0; v < d.vertex_count; ++v) {
      if (labels->vertex_weights[v]) scopes.push_back({v});
    }
  }
  std::sort(scopes.begin(), scopes.end());
  scopes.erase(std::unique(scopes.begin(), scopes.end()), scopes.end());
  return scopes;
}

struct Plan {
  std::vector<int> order;
  double cost = 0.0;
  double largest = 0.0;  // largest intermediate entry count
};

Plan plan_elimination(int vertex_count, std::vector<std::vector<int>> scopes,
                      const std::vector<int>& roots, int n) {
  Plan plan;
  std::vector<char> done(vertex_count, 0);
  for (int r : roots) done[r] = 1;
  const double dn = n;
  while (true) {
    int best = -1;
    size_t best_size = 0;
    std::vector<int> best_union;
    for (int v = 0; v < vertex_count; ++v) {
      if (done[v]) continue;
      std::vector<int> u{v};
      for (const auto& s : scopes) {
        if (std::find(s.begin(), s.end(), v) != s.end()) u.insert(u.end(), s.begin(), s.end());
      }
      std::sort(u.begin(), u.end());
      u.erase(std::unique(u.begin(), u.end()), u.end());
      if (best < 0 || u.size() < best_size) {
        best = v;
        best_size = u.size();
        best_union = u;
      }
    }
    if (best < 0) break;
    done[best] = 1;
    plan.order.push_back(best);
    plan.cost += std::pow(dn, static_cast<double>(best_union.size()));
    std::vector<std::vector<int>> next;
    for (auto& s : scopes) {
      if (std::find(s.begin(), s.end(), best) == s.end()) next.push_back(std::move(s));
    }
    std::vector<int> r;
    for (int x : best_union) {
      if (x != best) r.push_back(x);
    }
    plan.largest = std::max(plan.largest, std::pow(dn, static_cast<double>(r.size())));
    next.push_back(r);
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    scopes = std::move(next);
  }
  return plan;
}

// Entry of a factor given the index of each of its vars.
double factor_at(const Factor& f, const int* idx, int n) {
  switch (f.vars.size()) {
    case 0:
      return f.s;
    case 1:
      return f.v[idx[0]];
    case 2:
      return f.mat()(idx[0], idx[1]);
    default: {
      size_t flat = 0;
      for (size_t k = 0; k < f.vars.size(); ++k) flat = flat * n + idx[k];
      return f.t[flat];
    }
  }
}

void multiply_into(Factor& dst, const Factor& src) {
  switch (dst.vars.size()) {
    case 0:
      dst.s *= src.s;
      break;
    case 1:
      dst.v = dst.v.cwiseProduct(src.v);
      break;
    case 2:
      dst.m = dst.mat().cwiseProduct(src.mat());
      dst.mref = nullptr;
      break;
    default:
      for (size_t i = 0; i < dst.t.size(); ++i) dst.t[i] *= src.t[i];
  }
}

void add_factor(std::vector<Factor>& fs, Factor f) {
  for (auto& g : fs) {
    if (g.vars == f.vars) {
      multiply_into(g, f);
      return;
    }
  }
  fs.push_back(std::move(f));
}

Factor eliminate_generic(const std::vector<const Factor*>& involved, int v, int n) {
  std::vector<int> u{v};
  for (const Factor* f : involved) u.insert(u.end(), f->vars.begin(), f->vars.end());
  std::sort(u.begin(), u.end());
  u.erase(std::unique(u.begin(), u.end()), u.end());
  Factor out;
  for (int x : u) {
    if (x != v) out.vars.push_back(x);
  }
  const int k = static_cast<int>(out.vars.size());
  size_t entries = 1;
  for (int i = 0; i < k; ++i) entries *= static_cast<size_t>(n);
  std::vector<double> data(entries, 0.0);

  // positions of each factor's vars within u
  std::vector<std::vector<int>> pos;
  for (const Factor* f : involved) {
    std::vector<int> p;
    for (int x : f->vars) p.push_back(static_cast<int>(std::find(u.begin(), u.end(), x) - u.begin()));
    pos.push_back(std::move(p));
  }
  const int vpos = static_cast<int>(std::find(u.begin(), u.end(), v) - u.begin());
  std::vector<int> idx(u.size(), 0), fidx(8);
  for (size_t flat = 0; flat < entries; ++flat) {
    // decode flat into the non-v coordinates, row-major over out.vars
    size_t rem = flat;
    for (int i = k - 1, slot = static_cast<int>(u.size()) - 1; i >= 0; --i, --slot) {
      if (slot == vpos) --slot;
      idx[slot] = static_cast<int>(rem % n);
      rem /= n;
    }
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
      idx[vpos] = j;
      double prod = 1.0;
      for (size_t fi = 0; fi < involved.size(); ++fi) {
        fidx.resize(pos[fi].size());
        for (size_t q = 0; q < pos[fi].size(); ++q) fidx[q] = idx[pos[fi][q]];
        prod *= factor_at(*involved[fi], fidx.data(), n);
      }
      acc += prod;
    }
    data[flat] = acc;
  }
  switch (k) {
    case 0:
      out.s = data[0];
      break;
    case 1:
      out.v = Eigen::Map<Vector>(data.data(), n);
      break;
    case 2:
      // data is row-major (first var slow)
      out.m = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
          data.data(), n, n);
      break;
    default:
      out.t = std::move(data);
  }
  return out;
}

EvalResult contract(const Diagram& d, const EdgeLabeling& labels, const EvalOptions& opt) {
  check_labels(d, labels);
  const int n = labels.n;
  const bool weights = labels.has_vertex_weights();
  std::vector<int> roots = free_roots(d);
  Plan plan = plan_elimination(d.vertex_count, factor_scopes(d, weights, &labels), roots, n);
  double budget = opt.budget > 0 ? opt.budget : default_budget(n);
  if (plan.cost > budget)
    throw BudgetError("contraction cost " + std::to_string(plan.cost) + " exceeds budget " +
                      std::to_string(budget));
  if (plan.largest > kMaxTensorEntries) throw BudgetError("contraction intermediate too large");

  std::vector<Factor> fs;
  for (int e = 0; e < d.edge_count(); ++e) {
    auto [a, b] = d.edges[e];
    Factor f;
    if (a == b) {
      f.vars = {a};
      f.v = labels.edge_matrices[e]->diagonal();
    } else {
      f.vars = {a, b};
      f.mref = labels.edge_matrices[e];
    }
    add_factor(fs, std::move(f));
  }
  if (weights) {
    for (int v = 0; v < d.vertex_count; ++v) {
      if (!labels.vertex_weights[v]) continue;
      Factor f;
      f.vars = {v};
      f.v = *labels.vertex_weights[v];
      add_factor(fs, std::move(f));
    }
  }

  for (int v : plan.order) {
    std::vector<Factor> keep;
    std::vector<Factor> inv;
    for (auto& f : fs) {
      if (std::find(f.vars.begin(), f.vars.end(), v) != f.vars.end()) {
        inv.push_back(std::move(f));
      } else {
        keep.push_back(std::move(f));
      }
    }
    Vector g = Vector::Ones(n);
    std::vector<const Factor*> mats, higher;
    for (const auto& f : inv) {
      if (f.vars.size() == 1) {
        g = g.cwiseProduct(f.v);
      } else if (f.vars.size() == 2) {
        mats.push_back(&f);
      } else {
        higher.push_back(&f);
      }
    }
    Factor out;
    if (higher.empty() && mats.size() <= 2) {
      // orient each matrix with rows indexed by v
      auto other = [&](const Factor* f) { return f->vars[0] == v ? f->vars[1] : f->vars[0]; };
      auto rows_v = [&](const Factor* f) -> Matrix {
        return f->vars[0] == v ? Matrix(f->mat()) : Matrix(f->mat().transpose());
      };
      if (mats.empty()) {
        out.s = g.sum();
      } else if (mats.size() == 1) {
        out.vars = {other(mats[0])};
        const Matrix& m = mats[0]->mat();
        out.v = (mats[0]->vars[0] == v) ? Vector(m.transpose() * g) : Vector(m * g);
      } else {
        const Factor* f1 = mats[0];
        const Factor* f2 = mats[1];
        if (other(f1) > other(f2)) std::swap(f1, f2);
        out.vars = {other(f1), other(f2)};
        Matrix left = rows_v(f1);
        Matrix right = rows_v(f2);
        out.m.noalias() = left.transpose() * (g.asDiagonal() * right);
      }
    } else {
      Factor gf;
      gf.vars = {v};
      gf.v = g;
      std::vector<const Factor*> all{&gf};
      all.insert(all.end(), mats.begin(), mats.end());
      all.insert(all.end(), higher.begin(), higher.end());
      out = eliminate_generic(all, v, n);
    }
    fs = std::move(keep);
    add_factor(fs, std::move(out));
  }

  double c = 1.0;
  EvalResult res;
  res.arity = d.root_count();
  if (roots.empty()) {
    for (const auto& f : fs) c *= f.s;
    res.scalar = c;
    return res;
  }
  if (roots.size() == 1) {
    Vector h = Vector::Ones(n);
    for (const auto& f : fs) {
      if (f.vars.empty()) {
        c *= f.s;
      } else {
        h = h.cwiseProduct(f.v);
      }
    }
    h *= c;
    if (res.arity == 1) {
      res.vector = std::move(h);
    } else {
      res.matrix = h.asDiagonal();
    }
    return res;
  }
  int lo = std::min(roots[0], roots[1]);
  Vector rlo = Vector::Ones(n), rhi = Vector::Ones(n);
  Matrix m = Matrix::Ones(n, n);
  for (const auto& f : fs) {
    if (f.vars.empty()) {
      c *= f.s;
    } else if (f.vars.size() == 1) {
      (f.vars[0] == lo ? rlo : rhi) = (f.vars[0] == lo ? rlo : rhi).cwiseProduct(f.v);
    } else {
      m = m.cwiseProduct(f.mat());
    }
  }
  m = c * (rlo.asDiagonal() * m * rhi.asDiagonal());
  if (roots[0] != lo) m.transposeInPlace();
  res.matrix = std::move(m);
  return res;
}

void axpy(EvalResult& acc, double coef, const EvalResult& x) {
  acc.scalar += coef * x.scalar;
  if (x.vector.size()) {
    if (!acc.vector.size()) acc.vector = Vector::Zero(x.vector.size());
    acc.vector += coef * x.vector;
  }
  if (x.matrix.size()) {
    if (!acc.matrix.size()) acc.matrix = Matrix::Zero(x.matrix.rows(), x.matrix.cols());
    acc.matrix += coef * x.matrix;
  }
}

EvalResult zero_like(const Diagram& d, int n) {
  EvalResult r;
  r.arity = d.root_count();
  if (r.arity == 1) r.vector = Vector::Zero(n);
  if (r.arity == 2) r.matrix = Matrix::Zero(n, n);
  return r;
}

EvalResult brute(const Diagram& d, const EdgeLabeling& labels, const EvalOptions& opt,
                 bool injective) {
  check_labels(d, labels);
  const int n = labels.n;
  const int nv = d.vertex_count;
  double terms = std::pow(static_cast<double>(n), nv);
  if (terms > opt.brute_budget)
    throw BudgetError("brute-force term count " + std::to_string(terms) + " exceeds budget");
  std::vector<int> roots = free_roots(d);
  std::vector<char> is_root(nv, 0);
  for (int r : roots) is_root[r] = 1;
  std::vector<int> free_vs;
  for (int v = 0; v < nv; ++v) {
    if (!is_root[v]) free_vs.push_back(v);
  }
  const bool weights = labels.has_vertex_weights();
  std::vector<int> phi(nv, 0);

  auto entry = [&](const std::vector<int>& root_vals) {
    for (size_t i = 0; i < roots.size(); ++i) phi[roots[i]] = root_vals[i];
    for (int v : free_vs) phi[v] = 0;
    PairwiseSum acc;
    while (true) {
      bool ok = true;
      if (injective) {
        std::vector<char> used(n, 0);
        for (int v = 0; v < nv && ok; ++v) {
          if (used[phi[v]]) ok = false;
          used[phi[v]] = 1;
        }
      }
      if (ok) {
        double prod = 1.0;
        for (int e = 0; e < d.edge_count(); ++e) {
          prod *= (*labels.edge_matrices[e])(phi[d.edges[e].first], phi[d.edges[e].second]);
        }
        if (weights) {
          for (int v = 0; v < nv; ++v) {
            if (labels.vertex_weights[v]) prod *= (*labels.vertex_weights[v])[phi[v]];
          }
        }
        acc.add(prod);
      }
      size_t k = 0;
      while (k < free_vs.size()) {
        if (++phi[free_vs[k]] < n) break;
        phi[free_vs[k]] = 0;
        ++k;
      }
      if (k == free_vs.size()) break;
    }
    return acc.total();
  };

  EvalResult res = zero_like(d, n);
  if (roots.empty()) {
    res.scalar = entry({});
  } else if (roots.size() == 1) {
    Vector h(n);
    for (int i = 0; i < n; ++i) h[i] = entry({i});
    if (res.arity == 1) {
      res.vector = h;
    } else {
      res.matrix = h.asDiagonal();
    }
  } else {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (injective && i == j) continue;
        res.matrix(i, j) = entry({i, j});
      }
    }
  }
  return res;
}

}  // namespace

double contraction_cost(const Diagram& d, int n) {
  return plan_elimination(d.vertex_count, factor_scopes(d, false, nullptr), free_roots(d), n).cost;
}

EvalResult eval_w(const Diagram& d, const EdgeLabeling& labels, const EvalOptions& opt) {
  return contract(d, labels, opt);
}

EvalResult eval_w(const Diagram& d, const Matrix& a, const EvalOptions& opt) {
  return contract(d, EdgeLabeling::uniform(d, a), opt);
}

EvalResult eval_w_brute(const Diagram& d, const EdgeLabeling& labels, const EvalOptions& opt) {
  return brute(d, labels, opt, false);
}

EvalResult eval_w_brute(const Diagram& d, const Matrix& a, const EvalOptions& opt) {
  return brute(d, EdgeLabeling::uniform(d, a), opt, false);
}

EvalResult eval_z_brute(const Diagram& d, const EdgeLabeling& labels, const EvalOptions& opt) {
  return brute(d, labels, opt, true);
}

EvalResult eval_z_brute(const Diagram& d, const Matrix& a, const EvalOptions& opt) {
  return brute(d, EdgeLabeling::uniform(d, a), opt, true);
}

EvalResult eval_z(const Diagram& d, const EdgeLabeling& labels, const EvalOptions& opt) {
  check_labels(d, labels);
  const int n = labels.n;
  try {
    EvalResult acc = zero_like(d, n);
    if (labels.is_uniform() && !labels.has_vertex_weights() && d.edge_count() > 0) {
      const Matrix& a = *labels.edge_matrices.front();
      for (const auto& [key, term] : z_to_w_coefficients(d)) {
        axpy(acc, static_cast<double>(term.coefficient), eval_w(term.diagram, a, opt));
      }
      return acc;
    }
    if (d.vertex_count > kDefaultVertexCap) throw SizeError("eval_z: too many vertices");
    for_each_set_partition(d.vertex_count, [&](const std::vector<int>& lab, int blocks) {
      std::vector<int> sizes(blocks, 0);
      for (int b : lab) ++sizes[b];
      double mu = 1.0;
      for (int s : sizes) {
        for (int k = 2; k < s; ++k) mu *= k;
        if (s % 2 == 0) mu = -mu;
      }
      Diagram q = quotient_by_labels(d, lab);
      axpy(acc, mu, eval_w(q, labels.quotient(lab, q.vertex_count), opt));
    });
    return acc;
  } catch (const BudgetError&) {
    return eval_z_brute(d, labels, opt);
  }
}

EvalResult eval_z(const Diagram& d, const Matrix& a, const EvalOptions& opt) {
  return eval_z(d, EdgeLabeling::uniform(d, a), opt);
}

EvalResult eval_w_neq(const Diagram& d, const EdgeLabeling& labels, int s, int t,
                      const EvalOptions& opt) {
  if (s < 0 || t < 0 || s >= d.vertex_count || t >= d.vertex_count)
    throw InvalidInput("eval_w_neq: vertex out of range");
  if (s == t) throw PreconditionError("eval_w_neq: s and t must be distinct vertices");
  std::vector<int> lab(d.vertex_count);
  std::iota(lab.begin(), lab.end(), 0);
  lab[t] = lab[s];
  Diagram merged = quotient_by_labels(d, lab);
  EvalResult acc = eval_w(d, labels, opt);
  axpy(acc, -1.0, eval_w(merged, labels.quotient(lab, merged.vertex_count), opt));
  return acc;
}

Matrix eval_open_cactus_matrix(const Diagram& d, const Matrix& a) {
  if (!is_open_cactus(d)) throw PreconditionError("eval_open_cactus_matrix: not an open cactus");
  OpenCactusShape shape = open_cactus_shape(d);
  std::vector<Vector> h;
  for (const auto& piece : shape.hanging) h.push_back(eval_w(piece, a).vector);
  Matrix r = h.front().asDiagonal() * a;
  for (size_t i = 1; i + 1 < h.size(); ++i) {
    Matrix scaled = r * h[i].asDiagonal();
    r.noalias() = scaled * a;
  }
  return r * h.back().asDiagonal();
}

double symmetric_operator_norm(const Matrix& a) {
  if (a.rows() <= 2048) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }
  // power iteration on a^2 for very large inputs
  Vector x = Vector::Ones(a.rows()).normalized();
  double lambda = 0.0;
  for (int it = 0; it < 500; ++it) {
    Vector y = a * (a * x);
    double ny = y.norm();
    if (ny == 0.0) return 0.0;
    double next = std::sqrt(ny);
    x = y / ny;
    if (std::abs(next - lambda) <= 1e-12 * next) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  return lambda;
}

BoundReport fundamental_bound_audit(const Diagram& d, const EdgeLabeling& labels) {
  if (!classify(d).two_edge_connected)
    throw PreconditionError("fundamental_bound_audit: diagram is not 2-edge-connected");
  if (labels.has_vertex_weights())
    throw InvalidInput("fundamental_bound_audit: vertex weights are not supported");
  BoundReport rep;
  std::map<const Matrix*, double> norms;
  rep.rhs = 1.0;
  for (const Matrix* m : labels.edge_matrices) {
    auto it = norms.find(m);
    if (it == norms.end()) it = norms.emplace(m, symmetric_operator_norm(*m)).first;
    rep.rhs *= it->second;
  }
  EvalResult r = eval_w(d, labels);
  switch (r.arity) {
    case 0:
      rep.lhs = std::abs(r.scalar) / labels.n;
      break;
    case 1:
      rep.lhs = r.vector.cwiseAbs().maxCoeff();
      break;
    default: {
      Eigen::BDCSVD<Matrix> svd(r.matrix);
      rep.lhs = svd.singularValues()(0);
    }
  }
  rep.holds = rep.lhs <= rep.rhs * (1.0 + 1e-9) + 1e-12;
  return rep;
}

}  // namespace tamp
