#pragma once

#include <string>
#include <utility>
#include <vector>

#include "tamp/diagram.hpp"

namespace tamp {

struct DiagramClass {
  bool connected = false;
  bool two_edge_connected = false;
  bool cactus = false;
  bool eulerian = false;
  // Only defined for one-root diagrams; false otherwise.
  bool treelike = false;
  bool gaussian_tree = false;
};

DiagramClass classify(const Diagram& d);

bool is_connected(const Diagram& d);
// Edge ids of the bridges (loops are never bridges).
std::vector<int> bridges(const Diagram& d);
// Biconnected blocks as lists of edge ids; every loop is its own block.
std::vector<std::vector<int>> biconnected_blocks(const Diagram& d);
// Number of edge-disjoint u-v paths, saturating at `cap`.
int local_edge_connectivity(const Diagram& d, int u, int v, int cap = 3);
// True if some pair of distinct vertices has >= 3 edge-disjoint paths.
bool has_triple_connected_pair(const Diagram& d);

// Cycle lengths of a cactus, one per block. Throws PreconditionError otherwise.
std::vector<int> cycles_of_cactus(const Diagram& d);

// Component of v once the flagged edges are removed, re-rooted at v (which
// becomes vertex 0). Optionally reports the parent vertex and edge ids.
Diagram component_without(const Diagram& d, int v, const std::vector<char>& excluded_edges,
                          std::vector<int>* vertices = nullptr,
                          std::vector<int>* edge_ids = nullptr);

// Two distinct roots joined by a base path of bridges, with a cactus hanging
// at every base vertex and no other edges.
bool is_open_cactus(const Diagram& d);

struct OpenCactusShape {
  std::vector<int> base_path;           // vertices root0 .. root1
  std::vector<int> base_edges;          // edge ids along the path
  std::vector<Diagram> hanging;         // rooted cactus at each base vertex
};
// Throws PreconditionError unless is_open_cactus(d).
OpenCactusShape open_cactus_shape(const Diagram& d);

struct OpenCactusSplit {
  int s = -1;
  int t = -1;
  // The open cactus itself, rooted at (s, t) in its own numbering.
  Diagram sub;
  // vertex_map[i] = vertex of the parent diagram for sub-vertex i.
  std::vector<int> vertex_map;
  // Parent edge ids making up `sub`, in sub's edge order.
  std::vector<int> edge_ids;
};

// Finds an open cactus whose removal (its edges and internal vertices) keeps
// the diagram 2-edge-connected and whose interior avoids the root.
// Requires a rooted, 2-edge-connected non-cactus.
OpenCactusSplit open_cactus_decomposition(const Diagram& d);

// What is left of `d` after deleting the split's edges and internal vertices.
Diagram split_remainder(const Diagram& d, const OpenCactusSplit& split);

// Checks the three defining conditions; on failure writes a reason.
bool check_open_cactus_split(const Diagram& d, const OpenCactusSplit& split,
                             std::string* reason = nullptr);

struct HomeomorphicMatching {
  // (vertex of t1, vertex of t2); the root pair comes first.
  std::vector<std::pair<int, int>> pairs;
};

// Disjoint union of t1 and t2 with each matched pair identified. Vertices of
// t1 keep their ids, unmatched t2 vertices follow. Rooted at the merged root.
Diagram matching_quotient(const Diagram& t1, const Diagram& t2,
                          const std::vector<std::pair<int, int>>& pairs);

// All root-containing partial matchings whose quotient is a cactus. These are
// exactly the homeomorphic matchings of two treelike diagrams.
std::vector<HomeomorphicMatching> homeomorphic_matchings(const Diagram& t1, const Diagram& t2);

}  // namespace tamp
