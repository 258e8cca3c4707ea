#include "tamp/structure.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <limits>
#include <set>
#include <stdexcept>

#include "tamp/error.hpp"

namespace tamp {

namespace {

using EdgeList = std::vector<std::pair<int, int>>;

// Adjacency restricted to an active subset of edges.
struct View {
  int n = 0;
  const EdgeList* edges = nullptr;
  std::vector<std::vector<std::pair<int, int>>> adj;  // (neighbour, edge id)

  View(int vertices, const EdgeList& e, const std::vector<char>* active = nullptr)
      : n(vertices), edges(&e), adj(vertices) {
    for (int id = 0; id < static_cast<int>(e.size()); ++id) {
      if (active && !(*active)[id]) continue;
      auto [a, b] = e[id];
      adj[a].emplace_back(b, id);
      if (a != b) adj[b].emplace_back(a, id);
    }
  }
};

std::vector<int> component_labels(const View& g) {
  std::vector<int> comp(g.n, -1);
  int c = 0;
  for (int s = 0; s < g.n; ++s) {
    if (comp[s] != -1) continue;
    std::deque<int> q{s};
    comp[s] = c;
    while (!q.empty()) {
      int u = q.front();
      q.pop_front();
      for (auto [w, e] : g.adj[u]) {
        if (comp[w] == -1) {
          comp[w] = c;
          q.push_back(w);
        }
      }
    }
    ++c;
  }
  return comp;
}

struct Tarjan {
  const View& g;
  std::vector<int> disc, low;
  std::vector<char> is_bridge;
  std::vector<int> stack;
  std::vector<std::vector<int>> blocks;
  int timer = 0;

  explicit Tarjan(const View& view)
      : g(view), disc(view.n, -1), low(view.n, 0), is_bridge(view.edges->size(), 0) {
    for (int id = 0; id < static_cast<int>(view.edges->size()); ++id) {
      auto [a, b] = (*view.edges)[id];
      // loops only count if active, i.e. present in the adjacency
      if (a == b) {
        for (auto [w, e] : view.adj[a]) {
          if (e == id) {
            blocks.push_back({id});
            break;
          }
        }
      }
    }
    for (int v = 0; v < g.n; ++v) {
      if (disc[v] == -1) dfs(v, -1);
    }
  }

  void dfs(int u, int parent_edge) {
    disc[u] = low[u] = timer++;
    for (auto [w, e] : g.adj[u]) {
      if (e == parent_edge || w == u) continue;
      if (disc[w] == -1) {
        stack.push_back(e);
        dfs(w, e);
        low[u] = std::min(low[u], low[w]);
        if (low[w] > disc[u]) is_bridge[e] = 1;
        if (low[w] >= disc[u]) {
          std::vector<int> block;
          while (true) {
            int top = stack.back();
            stack.pop_back();
            block.push_back(top);
            if (top == e) break;
          }
          std::sort(block.begin(), block.end());
          blocks.push_back(std::move(block));
        }
      } else if (disc[w] < disc[u]) {
        stack.push_back(e);
        low[u] = std::min(low[u], disc[w]);
      }
    }
  }
};

int max_flow_capped(const View& g, int s, int t, int cap) {
  if (s == t) return cap;
  std::vector<int> flow(g.edges->size(), 0);  // +1 means a -> b for edge (a, b)
  int total = 0;
  while (total < cap) {
    std::vector<int> via(g.n, -2);
    via[s] = -1;
    std::deque<int> q{s};
    while (!q.empty() && via[t] == -2) {
      int u = q.front();
      q.pop_front();
      for (auto [w, e] : g.adj[u]) {
        if (w == u || via[w] != -2) continue;
        int dir = ((*g.edges)[e].first == u) ? 1 : -1;
        if (flow[e] * dir >= 1) continue;
        via[w] = e;
        q.push_back(w);
      }
    }
    if (via[t] == -2) break;
    for (int v = t; v != s;) {
      int e = via[v];
      auto [a, b] = (*g.edges)[e];
      int u = (a == v) ? b : a;
      flow[e] += (a == u) ? 1 : -1;
      v = u;
    }
    ++total;
  }
  return total;
}

bool connected_view(const View& g) {
  auto comp = component_labels(g);
  return std::all_of(comp.begin(), comp.end(), [](int c) { return c == 0; });
}

bool is_cactus_view(const View& g) {
  if (!connected_view(g)) return false;
  Tarjan tj(g);
  if (std::any_of(tj.is_bridge.begin(), tj.is_bridge.end(), [](char b) { return b != 0; }))
    return false;
  for (const auto& block : tj.blocks) {
    std::set<int> verts;
    for (int e : block) {
      verts.insert((*g.edges)[e].first);
      verts.insert((*g.edges)[e].second);
    }
    if (block.size() != verts.size()) return false;
  }
  return true;
}

}  // namespace

bool is_connected(const Diagram& d) { return connected_view(View(d.vertex_count, d.edges)); }

std::vector<int> bridges(const Diagram& d) {
  View g(d.vertex_count, d.edges);
  Tarjan tj(g);
  std::vector<int> out;
  for (int e = 0; e < d.edge_count(); ++e) {
    if (tj.is_bridge[e]) out.push_back(e);
  }
  return out;
}

std::vector<std::vector<int>> biconnected_blocks(const Diagram& d) {
  View g(d.vertex_count, d.edges);
  Tarjan tj(g);
  auto blocks = tj.blocks;
  std::sort(blocks.begin(), blocks.end());
  return blocks;
}

int local_edge_connectivity(const Diagram& d, int u, int v, int cap) {
  View g(d.vertex_count, d.edges);
  return max_flow_capped(g, u, v, cap);
}

bool has_triple_connected_pair(const Diagram& d) {
  View g(d.vertex_count, d.edges);
  for (int u = 0; u < d.vertex_count; ++u) {
    for (int v = u + 1; v < d.vertex_count; ++v) {
      if (max_flow_capped(g, u, v, 3) >= 3) return true;
    }
  }
  return false;
}

DiagramClass classify(const Diagram& d) {
  DiagramClass c;
  View g(d.vertex_count, d.edges);
  c.connected = connected_view(g);
  Tarjan tj(g);
  bool bridgeless = std::none_of(tj.is_bridge.begin(), tj.is_bridge.end(),
                                 [](char b) { return b != 0; });
  c.two_edge_connected = c.connected && bridgeless;
  c.cactus = c.two_edge_connected && is_cactus_view(g);
  auto deg = d.degrees();
  c.eulerian = std::all_of(deg.begin(), deg.end(), [](int x) { return x % 2 == 0; });

  if (d.root_count() == 1 && c.connected && !has_triple_connected_pair(d)) {
    int root = d.roots[0];
    // every bridge must hang off the root through bridges only
    std::vector<char> seen(d.vertex_count, 0);
    std::vector<char> bridge_seen(d.edges.size(), 0);
    std::deque<int> q{root};
    seen[root] = 1;
    while (!q.empty()) {
      int u = q.front();
      q.pop_front();
      for (auto [w, e] : g.adj[u]) {
        if (!tj.is_bridge[e]) continue;
        bridge_seen[e] = 1;
        if (!seen[w]) {
          seen[w] = 1;
          q.push_back(w);
        }
      }
    }
    bool ok = true;
    for (int e = 0; e < d.edge_count(); ++e) {
      if (tj.is_bridge[e] && !bridge_seen[e]) ok = false;
    }
    c.treelike = ok;
    if (ok) {
      int root_bridges = 0;
      for (auto [w, e] : g.adj[root]) root_bridges += tj.is_bridge[e] ? 1 : 0;
      c.gaussian_tree = root_bridges == 1;
    }
  }
  return c;
}

std::vector<int> cycles_of_cactus(const Diagram& d) {
  if (!classify(d).cactus) throw PreconditionError("cycles_of_cactus: diagram is not a cactus");
  std::vector<int> lengths;
  for (const auto& block : biconnected_blocks(d)) lengths.push_back(static_cast<int>(block.size()));
  std::sort(lengths.begin(), lengths.end());
  return lengths;
}

namespace {

// Bridges of `d` must form exactly a simple root0-root1 path. Returns the
// path (vertices, edges) or false.
bool base_path_of(const Diagram& d, std::vector<int>& path, std::vector<int>& path_edges) {
  if (d.root_count() != 2 || d.roots[0] == d.roots[1]) return false;
  View g(d.vertex_count, d.edges);
  if (!connected_view(g)) return false;
  Tarjan tj(g);
  std::vector<int> via(d.vertex_count, -2);
  int s = d.roots[0], t = d.roots[1];
  via[s] = -1;
  std::deque<int> q{s};
  while (!q.empty()) {
    int u = q.front();
    q.pop_front();
    for (auto [w, e] : g.adj[u]) {
      if (!tj.is_bridge[e] || via[w] != -2) continue;
      via[w] = e;
      q.push_back(w);
    }
  }
  if (via[t] == -2) return false;
  path.clear();
  path_edges.clear();
  for (int v = t; v != s;) {
    path.push_back(v);
    int e = via[v];
    path_edges.push_back(e);
    v = (d.edges[e].first == v) ? d.edges[e].second : d.edges[e].first;
  }
  path.push_back(s);
  std::reverse(path.begin(), path.end());
  std::reverse(path_edges.begin(), path_edges.end());
  int bridge_total = static_cast<int>(std::count(tj.is_bridge.begin(), tj.is_bridge.end(), 1));
  return bridge_total == static_cast<int>(path_edges.size());
}

}  // namespace

bool is_open_cactus(const Diagram& d) {
  std::vector<int> path, path_edges;
  if (!base_path_of(d, path, path_edges)) return false;
  std::vector<char> active(d.edges.size(), 1);
  for (int e : path_edges) active[e] = 0;
  View g(d.vertex_count, d.edges, &active);
  // With the bridges gone, every piece must be a cactus. The pieces are the
  // components; check each one separately.
  auto comp = component_labels(g);
  int pieces = *std::max_element(comp.begin(), comp.end()) + 1;
  for (int c = 0; c < pieces; ++c) {
    std::vector<int> verts;
    for (int v = 0; v < d.vertex_count; ++v) {
      if (comp[v] == c) verts.push_back(v);
    }
    std::vector<int> local(d.vertex_count, -1);
    for (int i = 0; i < static_cast<int>(verts.size()); ++i) local[verts[i]] = i;
    EdgeList sub;
    for (int e = 0; e < d.edge_count(); ++e) {
      if (!active[e] || comp[d.edges[e].first] != c) continue;
      sub.emplace_back(local[d.edges[e].first], local[d.edges[e].second]);
    }
    if (!is_cactus_view(View(static_cast<int>(verts.size()), sub))) return false;
  }
  return true;
}

Diagram component_without(const Diagram& d, int start, const std::vector<char>& excluded,
                          std::vector<int>* verts_out, std::vector<int>* edges_out) {
  std::vector<char> active(d.edges.size());
  for (size_t e = 0; e < d.edges.size(); ++e) active[e] = !excluded[e];
  View g(d.vertex_count, d.edges, &active);
  std::vector<int> verts{start};
  std::vector<int> local(d.vertex_count, -1);
  local[start] = 0;
  for (size_t i = 0; i < verts.size(); ++i) {
    for (auto [w, e] : g.adj[verts[i]]) {
      if (local[w] == -1) {
        local[w] = static_cast<int>(verts.size());
        verts.push_back(w);
      }
    }
  }
  Diagram piece;
  piece.vertex_count = static_cast<int>(verts.size());
  piece.roots = {0};
  std::vector<int> used;
  for (int e = 0; e < d.edge_count(); ++e) {
    if (!active[e] || local[d.edges[e].first] == -1) continue;
    int a = local[d.edges[e].first], b = local[d.edges[e].second];
    piece.edges.emplace_back(std::min(a, b), std::max(a, b));
    used.push_back(e);
  }
  if (verts_out) *verts_out = verts;
  if (edges_out) *edges_out = used;
  return piece;
}

OpenCactusShape open_cactus_shape(const Diagram& d) {
  if (!is_open_cactus(d)) throw PreconditionError("open_cactus_shape: not an open cactus");
  OpenCactusShape shape;
  base_path_of(d, shape.base_path, shape.base_edges);
  std::vector<char> excluded(d.edges.size(), 0);
  for (int e : shape.base_edges) excluded[e] = 1;
  for (int v : shape.base_path) shape.hanging.push_back(component_without(d, v, excluded));
  return shape;
}

OpenCactusSplit open_cactus_decomposition(const Diagram& d) {
  if (d.root_count() != 1) throw PreconditionError("open_cactus_decomposition: needs one root");
  DiagramClass cls = classify(d);
  if (!cls.two_edge_connected)
    throw PreconditionError("open_cactus_decomposition: diagram is not 2-edge-connected");
  if (cls.cactus) throw PreconditionError("open_cactus_decomposition: diagram is a cactus");

  const int n = d.vertex_count;
  const int m = d.edge_count();
  std::vector<char> active(m, 1);
  for (int e = 0; e < m; ++e) {
    if (d.edges[e].first == d.edges[e].second) active[e] = 0;
  }
  int root = d.roots[0];

  // Prune leaf blocks that are single cycles, moving the root inward.
  while (true) {
    View g(n, d.edges, &active);
    Tarjan tj(g);
    std::vector<int> block_count(n, 0);
    std::vector<std::set<int>> block_verts;
    for (const auto& block : tj.blocks) {
      std::set<int> vs;
      for (int e : block) {
        vs.insert(d.edges[e].first);
        vs.insert(d.edges[e].second);
      }
      for (int v : vs) ++block_count[v];
      block_verts.push_back(std::move(vs));
    }
    int chosen = -1, chosen_key = std::numeric_limits<int>::max(), art = -1;
    for (size_t b = 0; b < tj.blocks.size(); ++b) {
      const auto& block = tj.blocks[b];
      if (block.size() != block_verts[b].size()) continue;
      int articulations = 0, which = -1;
      for (int v : block_verts[b]) {
        if (block_count[v] >= 2) {
          ++articulations;
          which = v;
        }
      }
      if (articulations != 1) continue;
      int key = *std::min_element(block.begin(), block.end());
      if (key < chosen_key) {
        chosen_key = key;
        chosen = static_cast<int>(b);
        art = which;
      }
    }
    if (chosen < 0) break;
    for (int e : tj.blocks[chosen]) active[e] = 0;
    if (root != art && block_verts[chosen].count(root)) root = art;
  }

  View g(n, d.edges, &active);
  std::vector<char> in_v(n, 0), used(m, 0);
  std::vector<int> live;
  for (int v = 0; v < n; ++v) {
    if (!g.adj[v].empty()) live.push_back(v);
  }

  // Shortest path from `from` through vertices outside the current subgraph
  // to any vertex inside it, never using edge `skip`.
  auto find_return = [&](int from, int skip, std::vector<int>& path_v, std::vector<int>& path_e) {
    std::vector<int> via(n, -2);
    via[from] = -1;
    std::deque<int> q{from};
    int end = -1, end_edge = -1, end_prev = -1;
    while (!q.empty() && end < 0) {
      int u = q.front();
      q.pop_front();
      for (auto [w, e] : g.adj[u]) {
        if (e == skip) continue;
        if (in_v[w]) {
          end = w;
          end_edge = e;
          end_prev = u;
          break;
        }
        if (via[w] == -2) {
          via[w] = e;
          q.push_back(w);
        }
      }
    }
    if (end < 0) throw std::logic_error("open_cactus_decomposition: no return path");
    path_v = {end};
    path_e = {end_edge};
    for (int v = end_prev; v != from;) {
      path_v.push_back(v);
      int e = via[v];
      path_e.push_back(e);
      v = (d.edges[e].first == v) ? d.edges[e].second : d.edges[e].first;
    }
    path_v.push_back(from);
    std::reverse(path_v.begin(), path_v.end());
    std::reverse(path_e.begin(), path_e.end());
  };

  // Initial cycle through the root.
  int first = -1;
  for (auto [w, e] : g.adj[root]) {
    if (first < 0 || e < first) first = e;
  }
  in_v[root] = 1;
  std::vector<int> ear_v, ear_e;
  {
    int x = (d.edges[first].first == root) ? d.edges[first].second : d.edges[first].first;
    find_return(x, first, ear_v, ear_e);
    ear_v.insert(ear_v.begin(), root);
    ear_e.insert(ear_e.begin(), first);
    for (int v : ear_v) in_v[v] = 1;
    for (int e : ear_e) used[e] = 1;
  }

  auto spanned = [&]() {
    return std::all_of(live.begin(), live.end(), [&](int v) { return in_v[v] != 0; });
  };
  while (!spanned()) {
    int best_e = -1, best_out = -1, best_in = -1;
    for (int e = 0; e < m; ++e) {
      if (!active[e]) continue;
      auto [a, b] = d.edges[e];
      if (in_v[a] == in_v[b]) continue;
      int out = in_v[a] ? b : a;
      if (best_e < 0 || out < best_out) {
        best_e = e;
        best_out = out;
        best_in = in_v[a] ? a : b;
      }
    }
    std::vector<int> rest_v, rest_e;
    find_return(best_out, best_e, rest_v, rest_e);
    ear_v = {best_in};
    ear_e = {best_e};
    ear_v.insert(ear_v.end(), rest_v.begin(), rest_v.end());
    ear_e.insert(ear_e.end(), rest_e.begin(), rest_e.end());
    for (int v : ear_v) in_v[v] = 1;
    for (int e : ear_e) used[e] = 1;
  }
  for (int e = 0; e < m; ++e) {
    if (active[e] && !used[e]) {
      ear_v = {d.edges[e].first, d.edges[e].second};
      ear_e = {e};
      break;
    }
  }
  if (ear_v.front() == ear_v.back())
    throw std::logic_error("open_cactus_decomposition: last ear is closed");

  // Reattach everything hanging at the internal ear vertices.
  std::vector<char> excluded(m, 0);
  for (int e : ear_e) excluded[e] = 1;
  std::vector<int> order(ear_v.begin(), ear_v.end());
  std::set<int> edge_set(ear_e.begin(), ear_e.end());
  std::vector<int> extra;
  for (size_t i = 1; i + 1 < ear_v.size(); ++i) {
    std::vector<int> verts, edges;
    component_without(d, ear_v[i], excluded, &verts, &edges);
    for (size_t j = 1; j < verts.size(); ++j) extra.push_back(verts[j]);
    edge_set.insert(edges.begin(), edges.end());
  }
  std::sort(extra.begin(), extra.end());
  order.insert(order.end(), extra.begin(), extra.end());

  OpenCactusSplit split;
  split.s = ear_v.front();
  split.t = ear_v.back();
  split.vertex_map = order;
  split.edge_ids.assign(edge_set.begin(), edge_set.end());
  std::vector<int> local(n, -1);
  for (int i = 0; i < static_cast<int>(order.size()); ++i) local[order[i]] = i;
  split.sub.vertex_count = static_cast<int>(order.size());
  for (int e : split.edge_ids) {
    int a = local[d.edges[e].first], b = local[d.edges[e].second];
    split.sub.edges.emplace_back(std::min(a, b), std::max(a, b));
  }
  split.sub.roots = {0, static_cast<int>(ear_v.size()) - 1};
  return split;
}

Diagram split_remainder(const Diagram& d, const OpenCactusSplit& split) {
  std::vector<char> drop_v(d.vertex_count, 0), drop_e(d.edges.size(), 0);
  for (int v : split.vertex_map) drop_v[v] = 1;
  drop_v[split.s] = drop_v[split.t] = 0;
  for (int e : split.edge_ids) drop_e[e] = 1;
  std::vector<int> local(d.vertex_count, -1);
  Diagram r;
  r.vertex_count = 0;
  for (int v = 0; v < d.vertex_count; ++v) {
    if (!drop_v[v]) local[v] = r.vertex_count++;
  }
  for (int e = 0; e < d.edge_count(); ++e) {
    if (drop_e[e]) continue;
    int a = local[d.edges[e].first], b = local[d.edges[e].second];
    if (a < 0 || b < 0) continue;
    r.edges.emplace_back(std::min(a, b), std::max(a, b));
  }
  for (int v : d.roots) {
    if (local[v] >= 0) r.roots.push_back(local[v]);
  }
  return r;
}

bool check_open_cactus_split(const Diagram& d, const OpenCactusSplit& split, std::string* reason) {
  auto fail = [&](const char* why) {
    if (reason) *reason = why;
    return false;
  };
  if (split.s == split.t) return fail("endpoints coincide");
  if (split.sub.root_count() != 2 || split.vertex_map.at(split.sub.roots[0]) != split.s ||
      split.vertex_map.at(split.sub.roots[1]) != split.t)
    return fail("sub is not rooted at its endpoints");
  for (int i = 0; i < split.sub.edge_count(); ++i) {
    auto [a, b] = d.edges.at(split.edge_ids[i]);
    int x = split.vertex_map[split.sub.edges[i].first], y = split.vertex_map[split.sub.edges[i].second];
    if (std::minmax(x, y) != std::minmax(a, b)) return fail("sub edges do not match the parent");
  }
  if (!is_open_cactus(split.sub)) return fail("sub is not an open cactus");
  for (int r : d.roots) {
    bool internal = std::find(split.vertex_map.begin(), split.vertex_map.end(), r) !=
                        split.vertex_map.end() &&
                    r != split.s && r != split.t;
    if (internal) return fail("root is internal to the open cactus");
  }
  // Internal vertices may only touch edges of the sub.
  std::vector<char> internal(d.vertex_count, 0), in_sub(d.edges.size(), 0);
  for (int v : split.vertex_map) internal[v] = 1;
  internal[split.s] = internal[split.t] = 0;
  for (int e : split.edge_ids) in_sub[e] = 1;
  for (int e = 0; e < d.edge_count(); ++e) {
    if (!in_sub[e] && (internal[d.edges[e].first] || internal[d.edges[e].second]))
      return fail("an internal vertex has an edge outside the open cactus");
  }
  if (!classify(split_remainder(d, split)).two_edge_connected)
    return fail("remainder is not 2-edge-connected");
  return true;
}

Diagram matching_quotient(const Diagram& t1, const Diagram& t2,
                          const std::vector<std::pair<int, int>>& pairs) {
  const int n1 = t1.vertex_count, n2 = t2.vertex_count;
  Diagram u;
  u.vertex_count = n1 + n2;
  u.edges = t1.edges;
  for (auto [a, b] : t2.edges) u.edges.emplace_back(a + n1, b + n1);
  u.roots = t1.roots;
  std::vector<int> labels(n1 + n2);
  for (int v = 0; v < n1 + n2; ++v) labels[v] = v;
  std::vector<char> seen1(n1, 0), seen2(n2, 0);
  for (auto [a, b] : pairs) {
    if (a < 0 || a >= n1 || b < 0 || b >= n2 || seen1[a] || seen2[b])
      throw InvalidInput("matching_quotient: not a partial matching");
    seen1[a] = seen2[b] = 1;
    labels[n1 + b] = a;
  }
  return quotient_by_labels(u, labels);
}

std::vector<HomeomorphicMatching> homeomorphic_matchings(const Diagram& t1, const Diagram& t2) {
  if (!classify(t1).treelike || !classify(t2).treelike)
    throw PreconditionError("homeomorphic_matchings: inputs must be treelike");
  if (t1.vertex_count + t2.vertex_count - 1 > 16)
    throw SizeError("homeomorphic_matchings: diagrams too large");
  const int n1 = t1.vertex_count, n2 = t2.vertex_count;
  const int r1 = t1.roots[0], r2 = t2.roots[0];

  // t1 vertices in BFS order from the root.
  std::vector<int> order;
  {
    View g(n1, t1.edges);
    std::vector<char> seen(n1, 0);
    std::deque<int> q{r1};
    seen[r1] = 1;
    while (!q.empty()) {
      int u = q.front();
      q.pop_front();
      if (u != r1) order.push_back(u);
      for (auto [w, e] : g.adj[u]) {
        if (!seen[w]) {
          seen[w] = 1;
          q.push_back(w);
        }
      }
    }
  }

  std::vector<HomeomorphicMatching> out;
  std::vector<std::pair<int, int>> pairs{{r1, r2}};
  std::vector<char> used2(n2, 0);
  used2[r2] = 1;
  std::vector<char> decided1(n1, 0);
  decided1[r1] = 1;

  // A pair of classes joined by >= 3 edge-disjoint paths stays that way under
  // further merging, unless the two are merged with each other. Only an
  // undecided t1 vertex and an unused t2 vertex can still be merged.
  auto hopeless = [&]() {
    Diagram q = matching_quotient(t1, t2, pairs);
    // class ids of quotient: t1 vertices keep ids; unmatched t2 vertices follow
    std::vector<int> kind(q.vertex_count, 0);  // 1 = open t1, 2 = open t2
    for (int v = 0; v < n1; ++v) {
      if (!decided1[v]) kind[v] = 1;
    }
    int next = n1;
    for (int w = 0; w < n2; ++w) {
      bool matched = false;
      for (auto [a, b] : pairs) matched |= (b == w);
      if (!matched) kind[next++] = used2[w] ? 0 : 2;
    }
    View g(q.vertex_count, q.edges);
    for (int a = 0; a < q.vertex_count; ++a) {
      for (int b = a + 1; b < q.vertex_count; ++b) {
        if (kind[a] + kind[b] == 3) continue;
        if (max_flow_capped(g, a, b, 3) >= 3) return true;
      }
    }
    return false;
  };

  std::function<void(size_t)> rec = [&](size_t i) {
    if (hopeless()) return;
    if (i == order.size()) {
      if (classify(matching_quotient(t1, t2, pairs)).cactus) out.push_back({pairs});
      return;
    }
    int v = order[i];
    decided1[v] = 1;
    rec(i + 1);
    for (int w = 0; w < n2; ++w) {
      if (used2[w]) continue;
      used2[w] = 1;
      pairs.emplace_back(v, w);
      rec(i + 1);
      pairs.pop_back();
      used2[w] = 0;
    }
    decided1[v] = 0;
  };
  rec(0);
  return out;
}

}  // namespace tamp
