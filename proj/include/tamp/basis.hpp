#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "tamp/diagram.hpp"

namespace tamp {

// Opaque, totally ordered isomorphism-class key for rooted multigraphs.
// Root order matters; two coinciding roots differ from one root.
using CanonicalKey = std::vector<int>;

inline constexpr int kDefaultVertexCap = 12;

// Throws SizeError above `cap` vertices.
CanonicalKey canonical_key(const Diagram& d, int cap = kDefaultVertexCap);
// Representative with the canonical vertex numbering (roots first).
Diagram canonical_diagram(const Diagram& d, int cap = kDefaultVertexCap);
bool isomorphic(const Diagram& a, const Diagram& b);

struct ExpansionTerm {
  Diagram diagram;  // canonical representative
  std::int64_t coefficient = 0;
};
using Expansion = std::map<CanonicalKey, ExpansionTerm>;

// w_d = sum_alpha c[alpha] z_alpha, grouping all quotients of d by class.
Expansion w_to_z_coefficients(const Diagram& d, int cap = kDefaultVertexCap);
// z_d = sum_alpha c[alpha] w_alpha, by recursive elimination of coarser quotients.
Expansion z_to_w_coefficients(const Diagram& d, int cap = kDefaultVertexCap);

// Substitutes `inner` into every term of `outer` and collects like terms.
// compose(z_to_w_coefficients(d), w_to_z_coefficients) is {d: 1}.
Expansion compose(const Expansion& outer, Expansion (*inner)(const Diagram&, int),
                  int cap = kDefaultVertexCap);

}  // namespace tamp
