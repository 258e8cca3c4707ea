#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "tamp/diagram.hpp"

namespace tamp {

// Partition of {0..k-1} with no crossing blocks. Blocks are sorted and listed
// by smallest element.
struct NCPartition {
  int k = 0;
  std::vector<std::vector<int>> blocks;

  bool operator==(const NCPartition& o) const { return k == o.k && blocks == o.blocks; }
  bool operator<(const NCPartition& o) const {
    return k != o.k ? k < o.k : blocks < o.blocks;
  }
};

std::int64_t catalan(int k);

bool is_noncrossing(const NCPartition& p);
// Normalizes block order; throws InvalidInput on a crossing or non-partition.
NCPartition make_nc(int k, std::vector<std::vector<int>> blocks);
// 1 <= k <= 12.
std::vector<NCPartition> enumerate_nc(int k);
NCPartition kreweras(const NCPartition& p);
// Refinement order: every block of a lies inside a block of b.
bool refines(const NCPartition& a, const NCPartition& b);
// mu(0, p) = prod over blocks of (-1)^{|B|-1} Cat(|B|-1).
std::int64_t mobius_from_bottom(const NCPartition& p);
std::string to_string(const NCPartition& p);

struct CumulantTable {
  enum class Tag { cumulants, moments };
  Tag tag = Tag::cumulants;
  std::vector<double> values;  // values[0] is order 1

  int size() const { return static_cast<int>(values.size()); }
  // 1-based; throws SizeError past the end.
  double at(int q) const;
};

std::string tag_name(CumulantTable::Tag t);
CumulantTable::Tag parse_tag(const std::string& s);

// goe | rom | semicircle | rademacher, filled up to order Q.
CumulantTable preset_table(const std::string& name, int order = 12);

CumulantTable cumulants_to_moments(const CumulantTable& t);
CumulantTable moments_to_cumulants(const CumulantTable& t);
// Converts if needed.
CumulantTable as_cumulants(const CumulantTable& t);
CumulantTable as_moments(const CumulantTable& t);

struct TrafficValue {
  double value = 0.0;
  bool cactus = false;
};
// Limit of (1/n) E z_d for a connected diagram: product of cycle cumulants on
// a cactus, zero otherwise.
TrafficValue cactus_traffic_value(const Diagram& d, const CumulantTable& t);

// Limit of (1/n) w_d for a cactus: product of cycle moments. Also recomputed
// by summing z-limits over non-crossing contractions of every cycle; the two
// must agree (logic_error otherwise).
double diagonal_from_spectral(const Diagram& d, const CumulantTable& moments);

// Leading-order Haar-orthogonal Weingarten computation of lim (1/n) E z_d for
// an orthogonally invariant matrix with the given spectral moments.
// Connected d, at most 8 edges.
double weingarten_limit(const Diagram& d, const CumulantTable& moments);

// kappa^{rc} tables at block scale, keyed by block pair. (r,c) falls back to (c,r).
using BlockCumulants = std::map<std::pair<int, int>, CumulantTable>;
// Limit value at a root in block r of a rooted cactus.
double block_cactus_limit(const Diagram& d, int r, const BlockCumulants& kappas, int q);

}  // namespace tamp
