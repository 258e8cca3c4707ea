#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "tamp/diagram.hpp"

namespace tamp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Per-edge symmetric matrices (not owned) plus optional per-vertex diagonal
// weights.
// A vertex weight g multiplies every term by g[phi(v)].
struct EdgeLabeling {
  int n = 0;
  std::vector<const Matrix*> edge_matrices;
  std::vector<std::optional<Vector>> vertex_weights;  // empty or one per vertex

  static EdgeLabeling uniform(const Diagram& d, const Matrix& a);
  bool is_uniform() const;
  bool has_vertex_weights() const;
  // Labels of the quotient by `labels` (edges keep their matrices, merged
  // vertices multiply their weights).
  EdgeLabeling quotient(const std::vector<int>& labels, int new_vertex_count) const;
};

struct EvalResult {
  int arity = 0;  // number of roots
  double scalar = 0.0;
  Vector vector;
  Matrix matrix;
};

struct EvalOptions {
  // Contraction budget in multiply-adds; <= 0 selects max(8 n^3, 2^20).
  double budget = 0.0;
  double brute_budget = 1e8;
};

// Multiply-adds of the greedy min-degree contraction of d at dimension n.
double contraction_cost(const Diagram& d, int n);

EvalResult eval_w(const Diagram& d, const EdgeLabeling& labels, const EvalOptions& opt = {});
EvalResult eval_w(const Diagram& d, const Matrix& a, const EvalOptions& opt = {});
EvalResult eval_w_brute(const Diagram& d, const EdgeLabeling& labels, const EvalOptions& opt = {});
EvalResult eval_w_brute(const Diagram& d, const Matrix& a, const EvalOptions& opt = {});

// Injective labelings only. Uses the z->w expansion for uniform labels, the
// partition-lattice Moebius sum otherwise, and falls back to injective brute
// force if contraction is over budget.
EvalResult eval_z(const Diagram& d, const EdgeLabeling& labels, const EvalOptions& opt = {});
EvalResult eval_z(const Diagram& d, const Matrix& a, const EvalOptions& opt = {});
EvalResult eval_z_brute(const Diagram& d, const EdgeLabeling& labels, const EvalOptions& opt = {});
EvalResult eval_z_brute(const Diagram& d, const Matrix& a, const EvalOptions& opt = {});

// Sum restricted to phi(s) != phi(t).
EvalResult eval_w_neq(const Diagram& d, const EdgeLabeling& labels, int s, int t,
                      const EvalOptions& opt = {});

// Matrix W_d(A) of an open cactus as diag(h_1) A diag(h_2) ... A diag(h_k),
// h_i the w-vector of the cactus hanging at the i-th base vertex.
Matrix eval_open_cactus_matrix(const Diagram& d, const Matrix& a);

struct BoundReport {
  double lhs = 0.0;  // |w|/n, max|w_i| or ||W||
  double rhs = 0.0;  // product of edge operator norms
  bool holds = false;
};
// Requires a 2-edge-connected diagram and no vertex weights.
BoundReport fundamental_bound_audit(const Diagram& d, const EdgeLabeling& labels);

// Largest |eigenvalue| of a symmetric matrix.
double symmetric_operator_norm(const Matrix& a);

// Pairwise (cascade) summation, deterministic for a fixed input order.
class PairwiseSum {
 public:
  void add(double x);
  double total() const;

 private:
  static constexpr int kBlock = 64;
  double block_ = 0.0;
  int in_block_ = 0;
  std::vector<std::pair<int, double>> stack_;  // (level, partial)
};

}  // namespace tamp
