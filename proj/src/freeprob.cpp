#include "tamp/freeprob.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "tamp/error.hpp"
#include "tamp/structure.hpp"

namespace tamp {

std::int64_t catalan(int k) {
  if (k < 0 || k > 30) throw InvalidInput("catalan: order out of range");
  std::int64_t c = 1;
  for (int i = 0; i < k; ++i) c = c * 2 * (2 * i + 1) / (i + 2);
  return c;
}

namespace {

void normalize(NCPartition& p) {
  for (auto& b : p.blocks) std::sort(b.begin(), b.end());
  std::sort(p.blocks.begin(), p.blocks.end());
}

std::vector<int> block_of(const NCPartition& p) {
  std::vector<int> of(p.k, -1);
  for (int b = 0; b < static_cast<int>(p.blocks.size()); ++b) {
    for (int x : p.blocks[b]) of[x] = b;
  }
  return of;
}

}  // namespace

bool is_noncrossing(const NCPartition& p) {
  auto of = block_of(p);
  // a < b < c < d with a,c in one block and b,d in another
  for (int a = 0; a < p.k; ++a) {
    for (int b = a + 1; b < p.k; ++b) {
      if (of[b] == of[a]) continue;
      for (int c = b + 1; c < p.k; ++c) {
        if (of[c] != of[a]) continue;
        for (int d = c + 1; d < p.k; ++d) {
          if (of[d] == of[b]) return false;
        }
      }
    }
  }
  return true;
}

NCPartition make_nc(int k, std::vector<std::vector<int>> blocks) {
  NCPartition p{k, std::move(blocks)};
  std::vector<int> seen(k, 0);
  for (const auto& b : p.blocks) {
    if (b.empty()) throw InvalidInput("make_nc: empty block");
    for (int x : b) {
      if (x < 0 || x >= k || seen[x]++) throw InvalidInput("make_nc: not a partition");
    }
  }
  if (std::count(seen.begin(), seen.end(), 1) != k) throw InvalidInput("make_nc: not a partition");
  normalize(p);
  if (!is_noncrossing(p)) throw InvalidInput("make_nc: crossing blocks");
  return p;
}

std::vector<NCPartition> enumerate_nc(int k) {
  if (k < 1 || k > 12) throw InvalidInput("enumerate_nc: k must be in [1, 12]");
  std::vector<NCPartition> out;
  // Element i either opens a block or joins a block on the stack; joining
  // closes everything opened above it, which is exactly non-crossingness.
  std::vector<std::vector<int>> blocks;
  std::vector<int> stack;
  std::function<void(int)> rec = [&](int i) {
    if (i == k) {
      NCPartition p{k, blocks};
      normalize(p);
      out.push_back(std::move(p));
      return;
    }
    blocks.push_back({i});
    stack.push_back(static_cast<int>(blocks.size()) - 1);
    rec(i + 1);
    stack.pop_back();
    blocks.pop_back();
    for (int s = static_cast<int>(stack.size()) - 1; s >= 0; --s) {
      std::vector<int> saved(stack.begin() + s + 1, stack.end());
      int b = stack[s];
      stack.resize(s + 1);
      blocks[b].push_back(i);
      rec(i + 1);
      blocks[b].pop_back();
      stack.insert(stack.end(), saved.begin(), saved.end());
    }
  };
  rec(0);
  std::sort(out.begin(), out.end());
  return out;
}

NCPartition kreweras(const NCPartition& p) {
  if (!is_noncrossing(p)) throw InvalidInput("kreweras: crossing input");
  int k = p.k;
  // pi as a permutation cycling each block upward; K = pi^{-1} o gamma with
  // gamma(i) = i+1, then reflected i -> -i so that K is an involution.
  std::vector<int> pinv(k);
  for (const auto& b : p.blocks) {
    for (size_t j = 0; j < b.size(); ++j) pinv[b[(j + 1) % b.size()]] = b[j];
  }
  std::vector<int> perm(k);
  for (int i = 0; i < k; ++i) perm[i] = pinv[(i + 1) % k];
  std::vector<char> seen(k, 0);
  NCPartition out{k, {}};
  for (int s = 0; s < k; ++s) {
    if (seen[s]) continue;
    std::vector<int> block;
    for (int x = s; !seen[x]; x = perm[x]) {
      seen[x] = 1;
      block.push_back((k - x) % k);
    }
    out.blocks.push_back(std::move(block));
  }
  normalize(out);
  return out;
}

bool refines(const NCPartition& a, const NCPartition& b) {
  if (a.k != b.k) return false;
  auto of = block_of(b);
  for (const auto& blk : a.blocks) {
    for (int x : blk) {
      if (of[x] != of[blk.front()]) return false;
    }
  }
  return true;
}

std::int64_t mobius_from_bottom(const NCPartition& p) {
  std::int64_t m = 1;
  for (const auto& b : p.blocks) {
    int s = static_cast<int>(b.size());
    m *= ((s - 1) % 2 ? -1 : 1) * catalan(s - 1);
  }
  return m;
}

std::string to_string(const NCPartition& p) {
  std::ostringstream os;
  os << "{";
  for (size_t b = 0; b < p.blocks.size(); ++b) {
    os << (b ? "," : "") << "{";
    for (size_t j = 0; j < p.blocks[b].size(); ++j) os << (j ? "," : "") << p.blocks[b][j] + 1;
    os << "}";
  }
  os << "}";
  return os.str();
}

double CumulantTable::at(int q) const {
  if (q < 1 || q > size()) {
    throw SizeError("cumulant table has order " + std::to_string(size()) + ", need " +
                    std::to_string(q));
  }
  return values[q - 1];
}

std::string tag_name(CumulantTable::Tag t) {
  return t == CumulantTable::Tag::cumulants ? "cumulants" : "moments";
}

CumulantTable::Tag parse_tag(const std::string& s) {
  if (s == "cumulants") return CumulantTable::Tag::cumulants;
  if (s == "moments") return CumulantTable::Tag::moments;
  throw InvalidInput("unknown table tag: " + s);
}

CumulantTable preset_table(const std::string& name, int order) {
  if (order < 1) throw InvalidInput("preset_table: order must be positive");
  CumulantTable t;
  t.values.assign(order, 0.0);
  if (name == "goe") {
    t.tag = CumulantTable::Tag::cumulants;
    if (order >= 2) t.values[1] = 1.0;
  } else if (name == "rom") {
    t.tag = CumulantTable::Tag::cumulants;
    for (int q = 2; q <= order; q += 2) {
      int h = q / 2 - 1;
      t.values[q - 1] = static_cast<double>((h % 2 ? -1 : 1) * catalan(h));
    }
  } else if (name == "semicircle") {
    t.tag = CumulantTable::Tag::moments;
    for (int q = 2; q <= order; q += 2) t.values[q - 1] = static_cast<double>(catalan(q / 2));
  } else if (name == "rademacher") {
    t.tag = CumulantTable::Tag::moments;
    for (int q = 2; q <= order; q += 2) t.values[q - 1] = 1.0;
  } else {
    throw InvalidInput("unknown cumulant preset: " + name);
  }
  return t;
}

namespace {

// Both directions use m_q = sum_s kappa_s P(s, q - s), where P(s, r) sums
// m_{i_1} ... m_{i_s} over compositions i_1 + ... + i_s = r (m_0 = 1). This
// groups the noncrossing partitions of [q] by the block containing 1.
// P(s, .) only needs m_0 .. m_{q-s}, so the moments can be filled in order.
// Extended precision: the inverse direction cancels terms far larger than its result.
void fill_transform(std::vector<long double>& m, std::vector<long double>& k, bool to_moments) {
  const int N = static_cast<int>(m.size()) - 1;
  // p[s][r]
  std::vector<std::vector<long double>> p(N + 1, std::vector<long double>(N + 1, 0.0L));
  p[0][0] = 1.0L;
  for (int q = 1; q <= N; ++q) {
    // extend P(s, r) to r + s = q using moments up to q - 1
    for (int s = 1; s <= q; ++s) {
      const int r = q - s;
      long double acc = 0.0L;
      for (int i = 0; i <= r; ++i) acc += m[i] * p[s - 1][r - i];
      p[s][r] = acc;
    }
    long double rest = 0.0L;
    for (int s = 1; s < q; ++s) rest += k[s] * p[s][q - s];
    if (to_moments) {
      m[q] = rest + k[q];
    } else {
      k[q] = m[q] - rest;
    }
  }
}

CumulantTable transform(const CumulantTable& t, bool to_moments) {
  const int N = t.size();
  std::vector<long double> m(N + 1, 0.0L), k(N + 1, 0.0L);
  m[0] = 1.0L;
  for (int q = 1; q <= N; ++q) (to_moments ? k : m)[q] = t.values[q - 1];
  fill_transform(m, k, to_moments);
  CumulantTable out{to_moments ? CumulantTable::Tag::moments : CumulantTable::Tag::cumulants,
                    std::vector<double>(N, 0.0)};
  for (int q = 1; q <= N; ++q) out.values[q - 1] = static_cast<double>((to_moments ? m : k)[q]);
  return out;
}

}  // namespace

CumulantTable cumulants_to_moments(const CumulantTable& t) {
  if (t.tag != CumulantTable::Tag::cumulants)
    throw PreconditionError("cumulants_to_moments: table is tagged moments");
  return transform(t, true);
}

CumulantTable moments_to_cumulants(const CumulantTable& t) {
  if (t.tag != CumulantTable::Tag::moments)
    throw PreconditionError("moments_to_cumulants: table is tagged cumulants");
  return transform(t, false);
}

CumulantTable as_cumulants(const CumulantTable& t) {
  return t.tag == CumulantTable::Tag::cumulants ? t : moments_to_cumulants(t);
}

CumulantTable as_moments(const CumulantTable& t) {
  return t.tag == CumulantTable::Tag::moments ? t : cumulants_to_moments(t);
}

TrafficValue cactus_traffic_value(const Diagram& d, const CumulantTable& t) {
  DiagramClass cls = classify(d);
  if (!cls.connected) throw PreconditionError("cactus_traffic_value: diagram is disconnected");
  if (!cls.cactus) return {0.0, false};
  CumulantTable k = as_cumulants(t);
  double v = 1.0;
  for (int len : cycles_of_cactus(d)) v *= k.at(len);
  return {v, true};
}

double diagonal_from_spectral(const Diagram& d, const CumulantTable& moments) {
  if (!classify(d).cactus) throw PreconditionError("diagonal_from_spectral: diagram is not a cactus");
  CumulantTable m = as_moments(moments);
  CumulantTable k = as_cumulants(moments);
  auto lengths = cycles_of_cactus(d);
  double direct = 1.0;
  for (int len : lengths) direct *= m.at(len);

  double via_z = 1.0;
  for (int len : lengths) {
    if (len > 12) throw SizeError("diagonal_from_spectral: cycle longer than 12");
    Diagram c = cycle_diagram(len);
    double s = 0.0;
    for (const auto& p : enumerate_nc(len)) {
      s += cactus_traffic_value(quotient(c, VertexPartition{p.blocks}), k).value;
    }
    via_z *= s;
  }
  double scale = std::max({1.0, std::abs(direct), std::abs(via_z)});
  if (std::abs(direct - via_z) > 1e-9 * scale) {
    throw std::logic_error("diagonal_from_spectral: w and z routes disagree");
  }
  return direct;
}

namespace {

// Cycle structure of the union of a fixed matching with a growing one.
// Every half-edge not yet touched by the growing matching is a path end.
struct PathTracker {
  std::vector<int> end;  // other end of the path through x
  std::vector<int> len;  // matching edges on that path, valid at ends

  explicit PathTracker(const std::vector<int>& fixed) : end(fixed), len(fixed.size(), 1) {}

  struct Undo {
    int ea, eb;
    int end_ea, end_eb, len_ea, len_eb;
  };

  // Adds the pair (a, b). Returns the closed cycle's edge count, or 0 for a join.
  int add(int a, int b, Undo& u) {
    int ea = end[a], eb = end[b];
    u = {ea, eb, end[ea], end[eb], len[ea], len[eb]};
    if (ea == b) return len[a] + 1;
    int l = len[a] + len[b] + 1;
    end[ea] = eb;
    end[eb] = ea;
    len[ea] = len[eb] = l;
    return 0;
  }

  void undo(const Undo& u) {
    end[u.ea] = u.end_ea;
    end[u.eb] = u.end_eb;
    len[u.ea] = u.len_ea;
    len[u.eb] = u.len_eb;
  }
};

int count_cycles(const std::vector<int>& m1, const std::vector<int>& m2) {
  std::vector<char> seen(m1.size(), 0);
  int c = 0;
  for (size_t s = 0; s < m1.size(); ++s) {
    if (seen[s]) continue;
    ++c;
    int x = static_cast<int>(s);
    while (!seen[x]) {
      seen[x] = 1;
      int y = m1[x];
      seen[y] = 1;
      x = m2[y];
    }
  }
  return c;
}

// All perfect matchings of `items`, written into `match`.
void for_each_matching(std::vector<int>& items, std::vector<int>& match,
                       const std::function<void()>& visit) {
  if (items.empty()) {
    visit();
    return;
  }
  int a = items.front();
  for (size_t j = 1; j < items.size(); ++j) {
    int b = items[j];
    std::vector<int> rest;
    for (size_t i = 1; i < items.size(); ++i) {
      if (i != j) rest.push_back(items[i]);
    }
    match[a] = b;
    match[b] = a;
    for_each_matching(rest, match, visit);
  }
}

}  // namespace

double weingarten_limit(const Diagram& d, const CumulantTable& moments) {
  if (d.edge_count() > 8) throw SizeError("weingarten_limit: more than 8 edges");
  if (!is_connected(d)) throw PreconditionError("weingarten_limit: diagram is disconnected");
  CumulantTable m = as_moments(moments);
  const int E = d.edge_count();
  const int V = d.vertex_count;
  const int H = 2 * E;
  if (E == 0) return 1.0;
  auto deg = d.degrees();
  if (std::any_of(deg.begin(), deg.end(), [](int x) { return x % 2; })) return 0.0;

  std::vector<int> alpha(H);
  std::vector<std::vector<int>> at(V);
  for (int e = 0; e < E; ++e) {
    alpha[2 * e] = 2 * e + 1;
    alpha[2 * e + 1] = 2 * e;
    at[d.edges[e].first].push_back(2 * e);
    at[d.edges[e].second].push_back(2 * e + 1);
  }

  // Local matchings at distance |V|-1 from alpha; empty unless d is a cactus.
  const int want_cycles = E - V + 1;
  std::vector<std::vector<int>> betas;
  std::vector<int> beta(H, -1);
  std::function<void(int)> per_vertex = [&](int v) {
    if (v == V) {
      if (count_cycles(alpha, beta) == want_cycles) betas.push_back(beta);
      return;
    }
    std::vector<int> items = at[v];
    for_each_matching(items, beta, [&] { per_vertex(v + 1); });
  };
  per_vertex(0);

  const int max_joins = V - 1;
  double total = 0.0;
  for (const auto& b : betas) {
    PathTracker with_beta(b), with_alpha(alpha);
    std::vector<char> used(H, 0);
    std::function<void(int, double)> rec = [&](int joins, double weight) {
      int a = 0;
      while (a < H && used[a]) ++a;
      if (a == H) {
        if (joins == max_joins) total += weight;
        return;
      }
      used[a] = 1;
      for (int c = a + 1; c < H; ++c) {
        if (used[c]) continue;
        PathTracker::Undo u1, u2;
        int c1 = with_beta.add(a, c, u1);
        int c2 = with_alpha.add(a, c, u2);
        int j = joins + (c1 == 0) + (c2 == 0);
        double w = weight;
        if (c1) {
          int h = c1 / 2 - 1;
          w *= ((h % 2) ? -1.0 : 1.0) * static_cast<double>(catalan(h));
        }
        if (c2) w *= m.at(c2 / 2);
        if (j <= max_joins && w != 0.0) {
          used[c] = 1;
          rec(j, w);
          used[c] = 0;
        }
        with_alpha.undo(u2);
        with_beta.undo(u1);
      }
      used[a] = 0;
    };
    rec(0, 1.0);
  }
  return total;
}

namespace {

const CumulantTable& block_table(const BlockCumulants& kappas, int r, int c) {
  auto it = kappas.find({r, c});
  if (it == kappas.end()) it = kappas.find({c, r});
  if (it == kappas.end()) {
    throw InvalidInput("block_cactus_limit: missing cumulants for blocks (" + std::to_string(r) +
                       "," + std::to_string(c) + ")");
  }
  return it->second;
}

double block_limit_rec(const Diagram& d, int r, const BlockCumulants& kappas, int q) {
  const int root = d.roots[0];
  if (d.edge_count() == 0) return 1.0;
  auto blocks = biconnected_blocks(d);
  double value = 1.0;
  for (const auto& blk : blocks) {
    bool at_root = false;
    for (int e : blk) at_root |= d.edges[e].first == root || d.edges[e].second == root;
    if (!at_root) continue;

    // walk the cycle from the root
    std::vector<char> in_block(d.edges.size(), 0), used(d.edges.size(), 0);
    for (int e : blk) in_block[e] = 1;
    std::vector<int> cyc{root};
    int cur = root;
    for (size_t step = 0; step + 1 < blk.size(); ++step) {
      for (int e : blk) {
        if (used[e]) continue;
        auto [a, b] = d.edges[e];
        if (a != cur && b != cur) continue;
        used[e] = 1;
        cur = (a == cur) ? b : a;
        cyc.push_back(cur);
        break;
      }
    }
    const int len = static_cast<int>(blk.size());
    auto hanging = [&](int k, int block) {
      // cyc[k-1] is u_k
      Diagram sub = component_without(d, cyc[k - 1], in_block);
      return block_limit_rec(sub, block, kappas, q);
    };
    if (len % 2 == 0) {
      double s = 0.0;
      for (int c = 0; c < q; ++c) {
        double term = as_cumulants(block_table(kappas, r, c)).at(len);
        for (int k = 2; k <= len && term != 0.0; ++k) term *= hanging(k, k % 2 ? r : c);
        s += term;
      }
      value *= s;
    } else {
      double term = as_cumulants(block_table(kappas, r, r)).at(len);
      for (int k = 2; k <= len && term != 0.0; ++k) term *= hanging(k, r);
      value *= term;
    }
    if (value == 0.0) break;
  }
  return value;
}

}  // namespace

double block_cactus_limit(const Diagram& d, int r, const BlockCumulants& kappas, int q) {
  if (d.root_count() != 1) throw PreconditionError("block_cactus_limit: needs exactly one root");
  if (!classify(d).cactus) throw PreconditionError("block_cactus_limit: diagram is not a cactus");
  if (q < 1 || r < 0 || r >= q) throw InvalidInput("block_cactus_limit: block index out of range");
  return block_limit_rec(d, r, kappas, q);
}

}  // namespace tamp
