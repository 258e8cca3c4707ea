#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "tamp/basis.hpp"
#include "tamp/diagram.hpp"
#include "tamp/error.hpp"
#include "tamp/structure.hpp"

using namespace tamp;

namespace {

Diagram rooted(Diagram d, std::vector<int> roots) {
  d.roots = std::move(roots);
  return d;
}

const Diagram kVertex{};
const Diagram kLoop(1, {{0, 0}});
const Diagram kDoubleLoop(1, {{0, 0}, {0, 0}});
const Diagram kTwoCycle(2, {{0, 1}, {0, 1}});
const Diagram kLoopEdge(2, {{0, 0}, {0, 1}});

std::int64_t coeff(const Expansion& e, const Diagram& d) {
  auto it = e.find(canonical_key(d));
  return it == e.end() ? 0 : it->second.coefficient;
}

Diagram random_diagram(std::mt19937& rng, int max_vertices, int max_edges) {
  int v = std::uniform_int_distribution<int>(1, max_vertices)(rng);
  int e = std::uniform_int_distribution<int>(0, max_edges)(rng);
  std::uniform_int_distribution<int> pick(0, v - 1);
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < e; ++i) {
    int a = pick(rng), b = pick(rng);
    edges.push_back({std::min(a, b), std::max(a, b)});
  }
  return Diagram(v, edges);
}

}  // namespace

TEST_CASE("classify examples") {
  auto tri = classify(rooted(catalog_diagram("cycle3"), {0}));
  CHECK(tri.cactus);
  CHECK(tri.treelike);
  auto theta = classify(catalog_diagram("theta"));
  CHECK(theta.two_edge_connected);
  CHECK_FALSE(theta.cactus);
  auto edge = classify(rooted(catalog_diagram("edge"), {0}));
  CHECK(edge.gaussian_tree);
  CHECK_FALSE(classify(rooted(catalog_diagram("cycle3"), {0})).gaussian_tree);
  CHECK(classify(catalog_diagram("bowtie")).cactus);
  CHECK_FALSE(classify(catalog_diagram("k4")).cactus);
  CHECK_FALSE(classify(catalog_diagram("star3")).two_edge_connected);
  CHECK(classify(catalog_diagram("cycle4")).eulerian);
  CHECK_FALSE(classify(catalog_diagram("star3")).eulerian);
}

TEST_CASE("quotient examples") {
  Diagram p2 = catalog_diagram("path2");
  CHECK(isomorphic(quotient(p2, VertexPartition{{{0, 2}, {1}}}), kTwoCycle));
  CHECK(quotient(p2, VertexPartition::discrete(3)) == p2);
  CHECK(isomorphic(quotient(p2, VertexPartition{{{0, 1, 2}}}), kDoubleLoop));
  CHECK_THROWS_AS(quotient(p2, VertexPartition{{{0, 1}}}), InvalidInput);
}

TEST_CASE("canonical keys") {
  Diagram tri = catalog_diagram("cycle3");
  CHECK(canonical_key(tri) == canonical_key(relabel(tri, {2, 0, 1})));
  CHECK(canonical_key(tri) != canonical_key(catalog_diagram("path3")));
  Diagram p2 = catalog_diagram("path2");
  CHECK(canonical_key(rooted(p2, {0})) != canonical_key(rooted(p2, {1})));
  CHECK(canonical_key(rooted(p2, {0, 2})) == canonical_key(rooted(p2, {2, 0})));
  CHECK(canonical_key(rooted(p2, {0, 1})) != canonical_key(rooted(p2, {1, 0})));
  CHECK(canonical_key(rooted(p2, {0, 0})) != canonical_key(rooted(p2, {0})));
}

TEST_CASE("canonical keys are invariant under random relabeling") {
  std::mt19937 rng(11);
  for (int it = 0; it < 200; ++it) {
    Diagram d = random_diagram(rng, 6, 8);
    if (d.vertex_count > 1 && it % 2) d.roots = {0};
    std::vector<int> perm(d.vertex_count);
    for (int i = 0; i < d.vertex_count; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    Diagram e = relabel(d, perm);
    CHECK(canonical_key(d) == canonical_key(e));
    CHECK(canonical_key(canonical_diagram(d)) == canonical_key(d));
  }
}

TEST_CASE("w_to_z and z_to_w tables") {
  Expansion p2 = w_to_z_coefficients(catalog_diagram("path2"));
  CHECK(coeff(p2, catalog_diagram("path2")) == 1);
  CHECK(coeff(p2, kTwoCycle) == 1);
  CHECK(coeff(p2, kLoopEdge) == 2);
  CHECK(coeff(p2, kDoubleLoop) == 1);
  std::int64_t total = 0;
  for (const auto& [k, t] : p2) total += t.coefficient;
  CHECK(total == 5);

  Expansion e = w_to_z_coefficients(catalog_diagram("edge"));
  CHECK(e.size() == 2);
  CHECK(coeff(e, catalog_diagram("edge")) == 1);
  CHECK(coeff(e, kLoop) == 1);

  Expansion zi = z_to_w_coefficients(catalog_diagram("edge"));
  CHECK(coeff(zi, catalog_diagram("edge")) == 1);
  CHECK(coeff(zi, kLoop) == -1);

  CHECK(w_to_z_coefficients(kVertex).size() == 1);
  CHECK(coeff(z_to_w_coefficients(kVertex), kVertex) == 1);
}

TEST_CASE("w_to_z coefficients sum to the Bell number") {
  for (const auto& name : catalog_names()) {
    Diagram d = catalog_diagram(name);
    if (d.vertex_count > 6) continue;
    std::int64_t total = 0;
    for (const auto& [k, t] : w_to_z_coefficients(d)) {
      CHECK(t.coefficient > 0);
      total += t.coefficient;
    }
    CHECK(total == bell_number(d.vertex_count));
  }
}

TEST_CASE("basis round trip on random multigraphs") {
  std::mt19937 rng(5);
  for (int it = 0; it < 40; ++it) {
    Diagram d = random_diagram(rng, 5, 6);
    if (it % 3 == 0 && d.vertex_count >= 2) d.roots = {0, 1};
    Expansion e = compose(z_to_w_coefficients(d), w_to_z_coefficients);
    REQUIRE(e.size() == 1);
    CHECK(e.begin()->first == canonical_key(d));
    CHECK(e.begin()->second.coefficient == 1);
  }
}

TEST_CASE("open cactus decomposition") {
  SUBCASE("theta rooted at a junction") {
    Diagram d = rooted(catalog_diagram("theta"), {0});
    OpenCactusSplit s = open_cactus_decomposition(d);
    std::string why;
    CHECK_MESSAGE(check_open_cactus_split(d, s, &why), why);
    Diagram rest = split_remainder(d, s);
    CHECK(classify(rest).cactus);
    CHECK(cycles_of_cactus(rest) == std::vector<int>{2});
  }
  SUBCASE("k4 rooted anywhere") {
    for (int r = 0; r < 4; ++r) {
      Diagram d = rooted(catalog_diagram("k4"), {r});
      std::string why;
      CHECK_MESSAGE(check_open_cactus_split(d, open_cactus_decomposition(d), &why), why);
    }
  }
  SUBCASE("4-cycle with a chord") {
    Diagram d(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}, {0, 2}}, {1});
    OpenCactusSplit s = open_cactus_decomposition(d);
    std::string why;
    CHECK_MESSAGE(check_open_cactus_split(d, s, &why), why);
    CHECK(classify(split_remainder(d, s)).two_edge_connected);
  }
  SUBCASE("cactus input is rejected") {
    CHECK_THROWS_AS(open_cactus_decomposition(rooted(catalog_diagram("cycle3"), {0})), PreconditionError);
  }
}

TEST_CASE("open cactus decomposition on random 2-edge-connected non-cactuses") {
  std::mt19937 rng(17);
  int checked = 0;
  for (int it = 0; it < 400 && checked < 60; ++it) {
    Diagram d = random_diagram(rng, 6, 9);
    if (!is_connected(d)) continue;
    DiagramClass k = classify(d);
    if (!k.two_edge_connected || k.cactus) continue;
    d.roots = {std::uniform_int_distribution<int>(0, d.vertex_count - 1)(rng)};
    std::string why;
    CHECK_MESSAGE(check_open_cactus_split(d, open_cactus_decomposition(d), &why), (why + " on " + to_string(d)));
    ++checked;
  }
  CHECK(checked >= 20);
}

TEST_CASE("cycles of a cactus") {
  CHECK(cycles_of_cactus(catalog_diagram("bowtie")) == std::vector<int>{3, 3});
  CHECK(cycles_of_cactus(catalog_diagram("cycle4")) == std::vector<int>{4});
  CHECK(cycles_of_cactus(kVertex).empty());
  CHECK_THROWS_AS(cycles_of_cactus(catalog_diagram("theta")), PreconditionError);
}

TEST_CASE("homeomorphic matchings") {
  Diagram e = rooted(catalog_diagram("edge"), {0});
  auto m = homeomorphic_matchings(e, e);
  REQUIRE(m.size() == 1);
  CHECK(m[0].pairs.size() == 2);
  CHECK(isomorphic(matching_quotient(e, e, m[0].pairs), rooted(kTwoCycle, {0})));

  Diagram tri = rooted(catalog_diagram("cycle3"), {0});
  auto mt = homeomorphic_matchings(tri, tri);
  REQUIRE(mt.size() == 1);
  CHECK(mt[0].pairs.size() == 1);

  CHECK(homeomorphic_matchings(e, rooted(kVertex, {0})).empty());

  // a rooted 2-path matched with itself: the endpoints line up in one way
  Diagram p2 = rooted(catalog_diagram("path2"), {0});
  for (const auto& h : homeomorphic_matchings(p2, p2)) {
    CHECK(classify(matching_quotient(p2, p2, h.pairs)).cactus);
  }
}

TEST_CASE("graft") {
  Diagram tri = rooted(catalog_diagram("cycle3"), {0});
  CHECK(isomorphic(graft({tri, tri}), rooted(catalog_diagram("bowtie"), {0})));
  Diagram d = rooted(catalog_diagram("path2"), {1});
  CHECK(isomorphic(graft({rooted(kVertex, {0}), d}), d));
  Diagram e = rooted(catalog_diagram("edge"), {0});
  CHECK(isomorphic(graft({e, e}), rooted(catalog_diagram("path2"), {1})));
}

TEST_CASE("text form round trip") {
  for (const auto& name : catalog_names()) {
    Diagram d = catalog_diagram(name);
    CHECK(parse_diagram(to_string(d)) == d);
  }
  Diagram r = parse_diagram("path2@0,2");
  CHECK(r.roots == std::vector<int>{0, 2});
  CHECK(parse_diagram("diagram{v=2; roots=[1]; edges=[(0,1),(1,1)]}") == Diagram(2, {{0, 1}, {1, 1}}, {1}));
  CHECK_THROWS_AS(parse_diagram("nonsense"), InvalidInput);
  CHECK_THROWS_AS(parse_diagram("diagram{v=2; roots=[]; edges=[(0,5)]}"), InvalidInput);
}

TEST_CASE("quotient preserves edge count and set partitions are enumerated once") {
  for (int n = 1; n <= 7; ++n) {
    long long count = 0;
    for_each_set_partition(n, [&](const std::vector<int>&, int) { ++count; });
    CHECK(count == bell_number(n));
  }
  std::mt19937 rng(3);
  for (int it = 0; it < 50; ++it) {
    Diagram d = random_diagram(rng, 5, 6);
    for_each_set_partition(d.vertex_count, [&](const std::vector<int>& labels, int blocks) {
      Diagram q = quotient_by_labels(d, labels);
      CHECK(q.edge_count() == d.edge_count());
      CHECK(q.vertex_count == blocks);
    });
  }
}
