#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "tamp/basis.hpp"
#include "tamp/diagram.hpp"
#include "tamp/ensembles.hpp"
#include "tamp/error.hpp"
#include "tamp/graphpoly.hpp"
#include "tamp/structure.hpp"

using namespace tamp;

namespace {

Matrix random_symmetric(int n, std::mt19937& rng) {
  std::normal_distribution<double> g;
  Matrix a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) a(i, j) = a(j, i) = g(rng);
  }
  return a;
}

Diagram random_diagram(std::mt19937& rng, int max_vertices, int max_edges, int roots) {
  int v = std::uniform_int_distribution<int>(std::max(1, roots), max_vertices)(rng);
  int e = std::uniform_int_distribution<int>(0, max_edges)(rng);
  std::uniform_int_distribution<int> pick(0, v - 1);
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < e; ++i) {
    int a = pick(rng), b = pick(rng);
    edges.push_back({std::min(a, b), std::max(a, b)});
  }
  std::vector<int> rs;
  for (int r = 0; r < roots; ++r) rs.push_back(pick(rng));
  return Diagram(v, edges, rs);
}

double max_diff(const EvalResult& a, const EvalResult& b) {
  REQUIRE(a.arity == b.arity);
  if (a.arity == 0) return std::abs(a.scalar - b.scalar) / std::max(1.0, std::abs(b.scalar));
  if (a.arity == 1) return (a.vector - b.vector).cwiseAbs().maxCoeff() / std::max(1.0, b.vector.cwiseAbs().maxCoeff());
  return (a.matrix - b.matrix).cwiseAbs().maxCoeff() / std::max(1.0, b.matrix.cwiseAbs().maxCoeff());
}

Diagram rooted(Diagram d, std::vector<int> roots) {
  d.roots = std::move(roots);
  return d;
}

}  // namespace

TEST_CASE("eval_w examples") {
  CHECK(eval_w(catalog_diagram("cycle2"), Matrix::Identity(3, 3)).scalar == doctest::Approx(3.0));
  CHECK(eval_w(catalog_diagram("cycle3"), Matrix::Ones(2, 2)).scalar == doctest::Approx(8.0));
  std::mt19937 rng(1);
  Matrix a = random_symmetric(6, rng);
  Matrix p = Matrix::Identity(6, 6);
  for (int q = 1; q <= 8; ++q) {
    p = p * a;
    CHECK(eval_w(catalog_diagram("cycle" + std::to_string(q)), a).scalar ==
          doctest::Approx(p.trace()).epsilon(1e-10));
  }
}

TEST_CASE("eval_w_brute small cases") {
  Matrix a(3, 3);
  a << 1, 2, 3, 2, 5, 6, 3, 6, 9;
  EvalResult r = eval_w_brute(rooted(catalog_diagram("edge"), {0}), a);
  CHECK(r.arity == 1);
  CHECK(r.vector[0] == doctest::Approx(6));
  CHECK(r.vector[2] == doctest::Approx(18));
  CHECK(eval_w_brute(Diagram{}, a).scalar == doctest::Approx(3));
  EvalResult v = eval_w_brute(rooted(Diagram{}, {0}), a);
  CHECK(v.vector.isApprox(Vector::Ones(3)));
}

TEST_CASE("eval_w agrees with brute force on random instances") {
  std::mt19937 rng(2);
  for (int it = 0; it < 200; ++it) {
    int n = std::uniform_int_distribution<int>(1, 6)(rng);
    Matrix a = random_symmetric(n, rng);
    Diagram d = random_diagram(rng, 5, 6, it % 3);
    CHECK(max_diff(eval_w(d, a), eval_w_brute(d, a)) < 1e-10);
  }
}

TEST_CASE("eval_w with mixed edge matrices and vertex weights") {
  std::mt19937 rng(3);
  std::normal_distribution<double> g;
  for (int it = 0; it < 60; ++it) {
    int n = std::uniform_int_distribution<int>(2, 5)(rng);
    Diagram d = random_diagram(rng, 4, 5, it % 3);
    std::vector<Matrix> mats = {random_symmetric(n, rng), random_symmetric(n, rng)};
    EdgeLabeling l;
    l.n = n;
    for (int e = 0; e < d.edge_count(); ++e) l.edge_matrices.push_back(&mats[e % 2]);
    l.vertex_weights.resize(d.vertex_count);
    for (int v = 0; v < d.vertex_count; v += 2) {
      Vector w(n);
      for (int i = 0; i < n; ++i) w[i] = g(rng);
      l.vertex_weights[v] = w;
    }
    CHECK(max_diff(eval_w(d, l), eval_w_brute(d, l)) < 1e-10);
    CHECK(max_diff(eval_z(d, l), eval_z_brute(d, l)) < 1e-10);
  }
}

TEST_CASE("eval_z examples") {
  CHECK(eval_z(catalog_diagram("cycle3"), Matrix::Ones(2, 2)).scalar == 0.0);
  std::mt19937 rng(4);
  Matrix a = random_symmetric(5, rng);
  a.diagonal().setZero();
  CHECK(eval_z(catalog_diagram("cycle2"), a).scalar == doctest::Approx(a.squaredNorm()));
  for (int it = 0; it < 100; ++it) {
    Matrix b = random_symmetric(5, rng);
    Diagram d = random_diagram(rng, 5, 6, it % 3);
    CHECK(max_diff(eval_z(d, b), eval_z_brute(d, b)) < 1e-10);
  }
}

TEST_CASE("w equals the sum of z over quotients") {
  std::mt19937 rng(6);
  for (int it = 0; it < 40; ++it) {
    Matrix a = random_symmetric(5, rng);
    Diagram d = random_diagram(rng, 5, 6, 0);
    double total = 0.0;
    for (const auto& [k, t] : w_to_z_coefficients(d)) total += t.coefficient * eval_z_brute(t.diagram, a).scalar;
    CHECK(total == doctest::Approx(eval_w(d, a).scalar).epsilon(1e-10));
  }
}

TEST_CASE("eval_w_neq") {
  std::mt19937 rng(7);
  Matrix a = random_symmetric(5, rng);
  double expect = 0.0;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j)
      for (int k = 0; k < 5; ++k)
        if (i != k) expect += a(i, j) * a(j, k);
  Diagram p2 = catalog_diagram("path2");
  CHECK(eval_w_neq(p2, EdgeLabeling::uniform(p2, a), 0, 2).scalar == doctest::Approx(expect));

  Matrix z = a;
  z.diagonal().setZero();
  Diagram tri = catalog_diagram("cycle3");
  CHECK(eval_w_neq(tri, EdgeLabeling::uniform(tri, z), 0, 1).scalar ==
        doctest::Approx(eval_w(tri, z).scalar));

  Diagram two(2, {});
  Matrix one = Matrix::Ones(1, 1);
  CHECK(eval_w_neq(two, EdgeLabeling::uniform(two, one), 0, 1).scalar == 0.0);
}

TEST_CASE("open cactus matrices") {
  Matrix h = hadamard(16);
  Matrix w = eval_open_cactus_matrix(rooted(catalog_diagram("path2"), {0, 2}), h);
  CHECK((w - Matrix::Identity(16, 16)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(eval_open_cactus_matrix(rooted(catalog_diagram("edge"), {0, 1}), h).isApprox(h));

  std::mt19937 rng(8);
  Matrix a = random_symmetric(8, rng);
  std::vector<Diagram> shapes = {
      Diagram(4, {{0, 1}, {1, 2}, {1, 3}, {2, 3}}, {0, 1}),
      Diagram(5, {{0, 1}, {0, 2}, {0, 2}, {1, 3}, {3, 4}, {3, 4}}, {0, 3}),
      Diagram(5, {{0, 1}, {1, 2}, {1, 3}, {1, 4}, {3, 4}, {2, 2}}, {0, 2}),
  };
  for (const auto& d : shapes) {
    REQUIRE(is_open_cactus(d));
    CHECK((eval_open_cactus_matrix(d, a) - eval_w(d, a).matrix).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("fundamental bound audit") {
  std::mt19937 rng(9);
  Matrix a = random_symmetric(20, rng);
  a /= symmetric_operator_norm(a);
  Diagram c2 = catalog_diagram("cycle2");
  CHECK(fundamental_bound_audit(c2, EdgeLabeling::uniform(c2, a)).holds);

  CounterRng r(1, 2);
  Matrix o = rom(64, r);
  Diagram th = catalog_diagram("theta");
  CHECK(fundamental_bound_audit(th, EdgeLabeling::uniform(th, o)).holds);

  Matrix id = Matrix::Identity(7, 7);
  for (int q = 1; q <= 5; ++q) {
    Diagram c = catalog_diagram("cycle" + std::to_string(q));
    BoundReport b = fundamental_bound_audit(c, EdgeLabeling::uniform(c, id));
    CHECK(b.lhs == doctest::Approx(1.0));
    CHECK(b.rhs == doctest::Approx(1.0));
  }
  CHECK_THROWS_AS(fundamental_bound_audit(catalog_diagram("path2"), EdgeLabeling::uniform(catalog_diagram("path2"), id)),
                  PreconditionError);
}

TEST_CASE("labelings must be symmetric") {
  Matrix a = Matrix::Zero(3, 3);
  a(0, 1) = 1.0;
  CHECK_THROWS_AS(eval_w(catalog_diagram("edge"), a), InvalidInput);
  Matrix b = Matrix::Ones(4, 4);
  Diagram e = catalog_diagram("edge");
  EdgeLabeling l = EdgeLabeling::uniform(e, b);
  l.n = 3;
  CHECK_THROWS_AS(eval_w(e, l), InvalidInput);
}

TEST_CASE("budget errors") {
  Matrix a = Matrix::Ones(4, 4);
  EvalOptions tight;
  tight.budget = 1.0;
  CHECK_THROWS_AS(eval_w(catalog_diagram("k4"), a, tight), BudgetError);
  CHECK(contraction_cost(catalog_diagram("cycle3"), 10) > 0);
}

TEST_CASE("pairwise summation is order-deterministic and accurate") {
  PairwiseSum s;
  for (int i = 0; i < 100000; ++i) s.add(0.1);
  CHECK(s.total() == doctest::Approx(10000.0).epsilon(1e-12));
}
