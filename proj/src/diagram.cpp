#include "tamp/diagram.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <regex>
#include <sstream>

#include "tamp/error.hpp"

namespace tamp {

Diagram::Diagram(int vertices, std::vector<std::pair<int, int>> edge_list,
                 std::vector<int> root_list)
    : vertex_count(vertices), edges(std::move(edge_list)), roots(std::move(root_list)) {
  for (auto& e : edges) {
    if (e.first > e.second) std::swap(e.first, e.second);
  }
  validate();
}

std::vector<int> Diagram::degrees() const {
  std::vector<int> deg(vertex_count, 0);
  for (const auto& [a, b] : edges) {
    ++deg[a];
    ++deg[b];
  }
  return deg;
}

int Diagram::degree(int v) const { return degrees().at(v); }

void Diagram::validate() const {
  if (vertex_count < 1) throw InvalidInput("diagram: vertex_count must be positive");
  for (const auto& [a, b] : edges) {
    if (a < 0 || b < 0 || a >= vertex_count || b >= vertex_count)
      throw InvalidInput("diagram: edge endpoint out of range");
  }
  if (roots.size() > 2) throw InvalidInput("diagram: at most two roots");
  for (int r : roots) {
    if (r < 0 || r >= vertex_count) throw InvalidInput("diagram: root out of range");
  }
}

VertexPartition VertexPartition::discrete(int n) {
  VertexPartition p;
  for (int i = 0; i < n; ++i) p.blocks.push_back({i});
  return p;
}

VertexPartition VertexPartition::from_labels(const std::vector<int>& labels) {
  VertexPartition p;
  std::map<int, int> index;
  for (int v = 0; v < static_cast<int>(labels.size()); ++v) {
    auto [it, fresh] = index.emplace(labels[v], static_cast<int>(p.blocks.size()));
    if (fresh) p.blocks.emplace_back();
    p.blocks[it->second].push_back(v);
  }
  return p;
}

std::vector<int> VertexPartition::labels(int n) const {
  std::vector<int> lab(n, -1);
  for (int b = 0; b < static_cast<int>(blocks.size()); ++b) {
    if (blocks[b].empty()) throw InvalidInput("partition: empty block");
    for (int v : blocks[b]) {
      if (v < 0 || v >= n) throw InvalidInput("partition: vertex out of range");
      if (lab[v] != -1) throw InvalidInput("partition: blocks overlap");
      lab[v] = b;
    }
  }
  if (std::find(lab.begin(), lab.end(), -1) != lab.end())
    throw InvalidInput("partition: blocks do not cover the vertex set");
  return lab;
}

void for_each_set_partition(
    int n, const std::function<void(const std::vector<int>&, int)>& visit) {
  if (n == 0) {
    visit({}, 0);
    return;
  }
  std::vector<int> labels(n, 0);
  // max_prefix[i] = 1 + max(labels[0..i-1])
  std::vector<int> max_prefix(n + 1, 0);
  std::function<void(int)> rec = [&](int i) {
    if (i == n) {
      visit(labels, max_prefix[n]);
      return;
    }
    for (int b = 0; b <= max_prefix[i]; ++b) {
      labels[i] = b;
      max_prefix[i + 1] = std::max(max_prefix[i], b + 1);
      rec(i + 1);
    }
  };
  rec(0);
}

long long bell_number(int n) {
  // Bell triangle.
  std::vector<long long> row{1};
  for (int i = 0; i < n; ++i) {
    std::vector<long long> next{row.back()};
    for (long long x : row) next.push_back(next.back() + x);
    row = std::move(next);
  }
  return row.front();
}

Diagram quotient_by_labels(const Diagram& d, const std::vector<int>& labels) {
  if (static_cast<int>(labels.size()) != d.vertex_count)
    throw InvalidInput("quotient: partition does not cover the vertex set");
  // Renumber blocks by their smallest member.
  std::map<int, int> rename;
  for (int v = 0; v < d.vertex_count; ++v) {
    rename.emplace(labels[v], static_cast<int>(rename.size()));
  }
  std::vector<int> image(d.vertex_count);
  for (int v = 0; v < d.vertex_count; ++v) image[v] = rename.at(labels[v]);
  Diagram q;
  q.vertex_count = static_cast<int>(rename.size());
  for (const auto& [a, b] : d.edges) {
    int x = image[a], y = image[b];
    q.edges.emplace_back(std::min(x, y), std::max(x, y));
  }
  for (int r : d.roots) q.roots.push_back(image[r]);
  return q;
}

Diagram quotient(const Diagram& d, const VertexPartition& p) {
  return quotient_by_labels(d, p.labels(d.vertex_count));
}

Diagram merge_vertices(const Diagram& d, int s, int t) {
  if (s < 0 || t < 0 || s >= d.vertex_count || t >= d.vertex_count)
    throw InvalidInput("merge_vertices: vertex out of range");
  std::vector<int> labels(d.vertex_count);
  std::iota(labels.begin(), labels.end(), 0);
  labels[t] = labels[s];
  return quotient_by_labels(d, labels);
}

Diagram graft(const std::vector<Diagram>& parts) {
  Diagram g;
  g.vertex_count = 1;
  g.roots = {0};
  for (const auto& part : parts) {
    if (part.root_count() != 1) throw PreconditionError("graft: every part needs exactly one root");
    std::vector<int> image(part.vertex_count);
    for (int v = 0; v < part.vertex_count; ++v) {
      image[v] = (v == part.roots[0]) ? 0 : g.vertex_count++;
    }
    for (const auto& [a, b] : part.edges) {
      int x = image[a], y = image[b];
      g.edges.emplace_back(std::min(x, y), std::max(x, y));
    }
  }
  return g;
}

Diagram relabel(const Diagram& d, const std::vector<int>& perm) {
  Diagram r;
  r.vertex_count = d.vertex_count;
  for (const auto& [a, b] : d.edges) {
    int x = perm[a], y = perm[b];
    r.edges.emplace_back(std::min(x, y), std::max(x, y));
  }
  for (int v : d.roots) r.roots.push_back(perm[v]);
  return r;
}

std::string to_string(const Diagram& d) {
  std::ostringstream os;
  os << "diagram{v=" << d.vertex_count << "; roots=[";
  for (size_t i = 0; i < d.roots.size(); ++i) os << (i ? "," : "") << d.roots[i];
  os << "]; edges=[";
  for (size_t i = 0; i < d.edges.size(); ++i) {
    os << (i ? "," : "") << "(" << d.edges[i].first << "," << d.edges[i].second << ")";
  }
  os << "]}";
  return os.str();
}

Diagram cycle_diagram(int length) {
  if (length < 1) throw InvalidInput("cycle_diagram: length must be positive");
  Diagram d;
  d.vertex_count = length;
  for (int i = 0; i < length; ++i) {
    int a = i, b = (i + 1) % length;
    d.edges.emplace_back(std::min(a, b), std::max(a, b));
  }
  return d;
}

Diagram path_diagram(int edges) {
  if (edges < 0) throw InvalidInput("path_diagram: negative length");
  Diagram d;
  d.vertex_count = edges + 1;
  for (int i = 0; i < edges; ++i) d.edges.emplace_back(i, i + 1);
  return d;
}

Diagram catalog_diagram(const std::string& name) {
  if (name == "vertex") return Diagram{};
  if (name == "edge") return path_diagram(1);
  if (name.rfind("path", 0) == 0 && name.size() == 5 && name[4] >= '1' && name[4] <= '4')
    return path_diagram(name[4] - '0');
  if (name.rfind("cycle", 0) == 0 && name.size() == 6 && name[5] >= '1' && name[5] <= '8')
    return cycle_diagram(name[5] - '0');
  if (name == "theta") return Diagram(2, {{0, 1}, {0, 1}, {0, 1}});
  if (name == "bowtie") return Diagram(5, {{0, 1}, {1, 2}, {0, 2}, {0, 3}, {3, 4}, {0, 4}});
  if (name == "star3") return Diagram(4, {{0, 1}, {0, 2}, {0, 3}});
  if (name == "k4") return Diagram(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
  throw InvalidInput("unknown catalog diagram '" + name + "'");
}

std::vector<std::string> catalog_names() {
  std::vector<std::string> names{"vertex", "edge"};
  for (int i = 1; i <= 4; ++i) names.push_back("path" + std::to_string(i));
  for (int i = 1; i <= 8; ++i) names.push_back("cycle" + std::to_string(i));
  for (const char* n : {"theta", "bowtie", "star3", "k4"}) names.emplace_back(n);
  return names;
}

namespace {

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  static const std::regex num(R"(-?\d+)");
  for (auto it = std::sregex_iterator(s.begin(), s.end(), num); it != std::sregex_iterator(); ++it)
    out.push_back(std::stoi(it->str()));
  return out;
}

}  // namespace

Diagram parse_diagram(const std::string& text) {
  static const std::regex full(
      R"(^\s*diagram\s*\{\s*v\s*=\s*(\d+)\s*;\s*roots\s*=\s*\[([^\]]*)\]\s*;\s*edges\s*=\s*\[(.*)\]\s*\}\s*$)");
  std::smatch m;
  if (std::regex_match(text, m, full)) {
    Diagram d;
    d.vertex_count = std::stoi(m[1].str());
    d.roots = parse_int_list(m[2].str());
    static const std::regex pair(R"(\(\s*(\d+)\s*,\s*(\d+)\s*\))");
    std::string body = m[3].str();
    for (auto it = std::sregex_iterator(body.begin(), body.end(), pair);
         it != std::sregex_iterator(); ++it) {
      int a = std::stoi((*it)[1].str()), b = std::stoi((*it)[2].str());
      d.edges.emplace_back(std::min(a, b), std::max(a, b));
    }
    d.validate();
    return d;
  }
  auto at = text.find('@');
  std::string name = text.substr(0, at);
  name.erase(std::remove_if(name.begin(), name.end(), ::isspace), name.end());
  Diagram d = catalog_diagram(name);
  if (at != std::string::npos) {
    d.roots = parse_int_list(text.substr(at + 1));
    d.validate();
  }
  return d;
}

}  // namespace tamp
