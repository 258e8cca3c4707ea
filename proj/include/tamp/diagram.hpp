#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace tamp {

// A finite multigraph with loops and multi-edges, plus 0, 1 or 2 roots.
// Zero roots index a scalar polynomial, one a vector, two a matrix.
// Edge identifiers are positions in `edges`; each pair is stored with
// first <= second.
struct Diagram {
  int vertex_count = 1;
  std::vector<std::pair<int, int>> edges;
  std::vector<int> roots;

  Diagram() = default;
  Diagram(int vertices, std::vector<std::pair<int, int>> edge_list,
          std::vector<int> root_list = {});

  int edge_count() const { return static_cast<int>(edges.size()); }
  int root_count() const { return static_cast<int>(roots.size()); }
  // Loops contribute 2.
  std::vector<int> degrees() const;
  int degree(int v) const;

  // Throws InvalidInput if an endpoint or root is out of range.
  void validate() const;

  bool operator==(const Diagram&) const = default;
};

// Partition of {0, ..., n-1}. Block order is irrelevant to every consumer.
struct VertexPartition {
  std::vector<std::vector<int>> blocks;

  static VertexPartition discrete(int n);
  static VertexPartition from_labels(const std::vector<int>& labels);
  // block index of each vertex; throws InvalidInput unless the blocks
  // partition {0, ..., n-1}
  std::vector<int> labels(int n) const;
};

// Visits every set partition of {0..n-1} as a restricted growth string:
// labels[i] is the block of i, blocks numbered by first occurrence.
void for_each_set_partition(int n,
                            const std::function<void(const std::vector<int>& labels,
                                                     int block_count)>& visit);

long long bell_number(int n);

// Identifies the vertices of each block. Every edge is kept (possibly as a
// loop or an extra parallel edge) and edge order is preserved. New vertex
// ids follow the order of the blocks' smallest members.
Diagram quotient(const Diagram& d, const VertexPartition& p);
Diagram quotient_by_labels(const Diagram& d, const std::vector<int>& labels);

// Merges the two vertices s and t.
Diagram merge_vertices(const Diagram& d, int s, int t);

// Disjoint union of rooted parts with all roots identified (new root 0).
Diagram graft(const std::vector<Diagram>& parts);

// Relabels vertices: new id of v is perm[v].
Diagram relabel(const Diagram& d, const std::vector<int>& perm);

// Text form: diagram{v=3; roots=[0]; edges=[(0,1),(1,2)]}
std::string to_string(const Diagram& d);

// Accepts the text form or a catalog name, optionally suffixed with roots:
// "cycle3", "path2@0", "path2@0,2".
Diagram parse_diagram(const std::string& text);

// Catalog: edge, path1..path4, star3, cycle1..cycle8, theta, bowtie, k4.
// All entries are unrooted.
Diagram catalog_diagram(const std::string& name);
std::vector<std::string> catalog_names();

Diagram cycle_diagram(int length);
Diagram path_diagram(int edges);

}  // namespace tamp
