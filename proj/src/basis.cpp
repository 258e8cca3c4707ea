#include "tamp/basis.hpp"

#include <algorithm>
#include <numeric>
#include <optional>

#include "tamp/error.hpp"

namespace tamp {

namespace {

using Cells = std::vector<std::vector<int>>;

struct Searcher {
  int n;
  std::vector<std::vector<int>> mult;  // symmetric; diagonal = loop count
  std::vector<int> header;
  std::optional<CanonicalKey> best;
  std::vector<int> best_position;

  explicit Searcher(const Diagram& d) : n(d.vertex_count), mult(n, std::vector<int>(n, 0)) {
    for (auto [a, b] : d.edges) {
      ++mult[a][b];
      if (a != b) ++mult[b][a];
    }
    bool coincide = d.root_count() == 2 && d.roots[0] == d.roots[1];
    header = {n, d.root_count(), coincide ? 1 : 0};
  }

  void refine(Cells& cells) const {
    while (true) {
      std::vector<int> cell_of(n);
      for (int c = 0; c < static_cast<int>(cells.size()); ++c) {
        for (int v : cells[c]) cell_of[v] = c;
      }
      auto signature = [&](int v) {
        std::vector<int> sig(cells.size(), 0);
        for (int w = 0; w < n; ++w) sig[cell_of[w]] += mult[v][w];
        return sig;
      };
      Cells next;
      for (const auto& cell : cells) {
        if (cell.size() == 1) {
          next.push_back(cell);
          continue;
        }
        std::vector<std::pair<std::vector<int>, int>> tagged;
        for (int v : cell) tagged.emplace_back(signature(v), v);
        std::sort(tagged.begin(), tagged.end());
        for (size_t i = 0; i < tagged.size(); ++i) {
          if (i == 0 || tagged[i].first != tagged[i - 1].first) next.emplace_back();
          next.back().push_back(tagged[i].second);
        }
      }
      bool stable = next.size() == cells.size();
      cells = std::move(next);
      if (stable) return;
    }
  }

  void search(Cells cells) {
    refine(cells);
    auto open = std::find_if(cells.begin(), cells.end(), [](const auto& c) { return c.size() > 1; });
    if (open == cells.end()) {
      std::vector<int> position(n), vertex_at(n);
      for (int c = 0; c < n; ++c) {
        position[cells[c][0]] = c;
        vertex_at[c] = cells[c][0];
      }
      CanonicalKey key = header;
      for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) key.push_back(mult[vertex_at[i]][vertex_at[j]]);
      }
      if (!best || key < *best) {
        best = std::move(key);
        best_position = position;
      }
      return;
    }
    size_t at = static_cast<size_t>(open - cells.begin());
    std::vector<int> members = cells[at];
    for (int v : members) {
      Cells branch(cells.begin(), cells.begin() + static_cast<long>(at));
      branch.push_back({v});
      std::vector<int> rest;
      for (int w : members) {
        if (w != v) rest.push_back(w);
      }
      branch.push_back(rest);
      branch.insert(branch.end(), cells.begin() + static_cast<long>(at) + 1, cells.end());
      search(std::move(branch));
    }
  }
};

Searcher run_search(const Diagram& d, int cap) {
  if (d.vertex_count > cap)
    throw SizeError("canonical form: " + std::to_string(d.vertex_count) +
                    " vertices exceeds the cap of " + std::to_string(cap));
  Searcher s(d);
  const int n = d.vertex_count;
  std::vector<char> is_root(n, 0);
  Cells cells;
  for (int r : d.roots) {
    if (!is_root[r]) cells.push_back({r});
    is_root[r] = 1;
  }
  auto deg = d.degrees();
  std::vector<std::pair<std::pair<int, int>, int>> rest;
  for (int v = 0; v < n; ++v) {
    if (!is_root[v]) rest.push_back({{s.mult[v][v], deg[v]}, v});
  }
  std::sort(rest.begin(), rest.end());
  for (size_t i = 0; i < rest.size(); ++i) {
    if (i == 0 || rest[i].first != rest[i - 1].first) cells.emplace_back();
    cells.back().push_back(rest[i].second);
  }
  s.search(std::move(cells));
  return s;
}

}  // namespace

CanonicalKey canonical_key(const Diagram& d, int cap) { return *run_search(d, cap).best; }

Diagram canonical_diagram(const Diagram& d, int cap) {
  Searcher s = run_search(d, cap);
  Diagram c = relabel(d, s.best_position);
  std::sort(c.edges.begin(), c.edges.end());
  return c;
}

bool isomorphic(const Diagram& a, const Diagram& b) {
  return a.vertex_count == b.vertex_count && a.edge_count() == b.edge_count() &&
         canonical_key(a) == canonical_key(b);
}

Expansion w_to_z_coefficients(const Diagram& d, int cap) {
  if (d.vertex_count > cap) throw SizeError("w_to_z_coefficients: too many vertices");
  Expansion out;
  for_each_set_partition(d.vertex_count, [&](const std::vector<int>& labels, int) {
    Diagram q = quotient_by_labels(d, labels);
    CanonicalKey key = canonical_key(q, cap);
    auto it = out.find(key);
    if (it == out.end()) it = out.emplace(key, ExpansionTerm{canonical_diagram(q, cap), 0}).first;
    it->second.coefficient += 1;
  });
  return out;
}

namespace {

const Expansion& z_to_w_memo(const Diagram& canon, const CanonicalKey& key,
                             std::map<CanonicalKey, Expansion>& memo, int cap) {
  auto found = memo.find(key);
  if (found != memo.end()) return found->second;
  // z_d = w_d - sum over non-discrete partitions P of z_{d_P}
  Expansion result;
  result.emplace(key, ExpansionTerm{canon, 1});
  Expansion coarser = w_to_z_coefficients(canon, cap);
  for (const auto& [k, term] : coarser) {
    if (k == key) continue;  // the discrete partition is the only self-quotient
    const Expansion& sub = z_to_w_memo(term.diagram, k, memo, cap);
    for (const auto& [k2, t2] : sub) {
      auto it = result.find(k2);
      if (it == result.end()) it = result.emplace(k2, ExpansionTerm{t2.diagram, 0}).first;
      it->second.coefficient -= term.coefficient * t2.coefficient;
    }
  }
  for (auto it = result.begin(); it != result.end();) {
    it = (it->second.coefficient == 0) ? result.erase(it) : std::next(it);
  }
  return memo.emplace(key, std::move(result)).first->second;
}

}  // namespace

Expansion z_to_w_coefficients(const Diagram& d, int cap) {
  if (d.vertex_count > cap) throw SizeError("z_to_w_coefficients: too many vertices");
  std::map<CanonicalKey, Expansion> memo;
  Diagram canon = canonical_diagram(d, cap);
  return z_to_w_memo(canon, canonical_key(canon, cap), memo, cap);
}

Expansion compose(const Expansion& outer, Expansion (*inner)(const Diagram&, int), int cap) {
  Expansion out;
  for (const auto& [k, term] : outer) {
    for (const auto& [k2, t2] : inner(term.diagram, cap)) {
      auto it = out.find(k2);
      if (it == out.end()) it = out.emplace(k2, ExpansionTerm{t2.diagram, 0}).first;
      it->second.coefficient += term.coefficient * t2.coefficient;
    }
  }
  for (auto it = out.begin(); it != out.end();) {
    it = (it->second.coefficient == 0) ? out.erase(it) : std::next(it);
  }
  return out;
}

}  // namespace tamp
