#include "deltainv/graph.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "deltainv/arith.hpp"

namespace deltainv {

namespace {

Integer bareiss_det(std::vector<std::vector<Integer>> a) {
  const std::size_t n = a.size();
  if (n == 0) return 1;
  Integer sign = 1;
  Integer prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a[k][k] == 0) {
      std::size_t p = k + 1;
      while (p < n && a[p][k] == 0) ++p;
      if (p == n) return 0;
      std::swap(a[k], a[p]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j)
        a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
    }
    prev = a[k][k];
  }
  return sign * a[n - 1][n - 1];
}

}  // namespace

std::vector<std::int64_t> leading_minors(const IntMatrix& m) {
  std::vector<std::int64_t> out;
  for (std::size_t k = 1; k <= m.size(); ++k) {
    std::vector<std::vector<Integer>> a(k, std::vector<Integer>(k));
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) a[i][j] = m[i][j];
    Integer det = bareiss_det(std::move(a));
    if (det > std::numeric_limits<std::int64_t>::max() ||
        det < std::numeric_limits<std::int64_t>::min())
      throw std::overflow_error("determinant exceeds 64 bits");
    out.push_back(static_cast<std::int64_t>(det));
  }
  return out;
}

ResolutionGraph::ResolutionGraph(std::vector<std::pair<int, int>> vertices,
                                 std::vector<std::pair<int, int>> edges,
                                 std::vector<Arrow> arrows) {
  using K = GraphError::Kind;
  if (vertices.empty()) throw GraphError(K::kInvalid, "graph has no vertices");
  std::sort(vertices.begin(), vertices.end());
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    const auto [id, e] = vertices[i];
    if (id <= 0)
      throw GraphError(K::kInvalid, "vertex id " + std::to_string(id) +
                                        " is not positive");
    if (i > 0 && vertices[i - 1].first == id)
      throw GraphError(K::kInvalid, "duplicate vertex " + std::to_string(id));
    if (e > -1)
      throw GraphError(K::kInvalid, "vertex " + std::to_string(id) +
                                        " has euler number " +
                                        std::to_string(e) + " > -1");
    ids_.push_back(id);
    euler_.push_back(e);
  }
  adj_.assign(ids_.size(), {});
  arrow_.assign(ids_.size(), 0);
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (const auto& [a, b] : edges) {
    std::size_t i = index_of(a), j = index_of(b);
    if (i == j)
      throw GraphError(K::kNotATree, "loop at vertex " + std::to_string(a));
    auto key = std::minmax(i, j);
    if (!seen.insert(key).second)
      throw GraphError(K::kNotATree, "multiple edge between " +
                                         std::to_string(a) + " and " +
                                         std::to_string(b));
    adj_[i].push_back(j);
    adj_[j].push_back(i);
  }
  for (auto& nb : adj_) std::sort(nb.begin(), nb.end());
  if (edges.size() + 1 != ids_.size())
    throw GraphError(K::kNotATree,
                     "not a tree: " + std::to_string(edges.size()) +
                         " edges on " + std::to_string(ids_.size()) +
                         " vertices");
  std::vector<bool> reached(ids_.size(), false);
  std::vector<std::size_t> stack{0};
  reached[0] = true;
  std::size_t count = 1;
  while (!stack.empty()) {
    std::size_t v = stack.back();
    stack.pop_back();
    for (auto w : adj_[v])
      if (!reached[w]) {
        reached[w] = true;
        ++count;
        stack.push_back(w);
      }
  }
  if (count != ids_.size())
    throw GraphError(K::kNotATree, "not a tree: graph is disconnected");
  for (const auto& ar : arrows) {
    std::size_t i = index_of(ar.vertex);
    if (ar.multiplicity < 0)
      throw GraphError(K::kInvalid, "negative arrow multiplicity at vertex " +
                                        std::to_string(ar.vertex));
    arrow_[i] += ar.multiplicity;
  }
  auto minors = leading_minors(intersection_matrix());
  for (std::size_t k = 0; k < minors.size(); ++k) {
    bool want_negative = (k % 2 == 0);
    bool ok = want_negative ? minors[k] < 0 : minors[k] > 0;
    if (!ok)
      throw GraphError(
          K::kNotNegativeDefinite,
          "not negative definite: leading principal minor of order " +
              std::to_string(k + 1) + " is " + std::to_string(minors[k]) +
              " (expected " + (want_negative ? "< 0" : "> 0") +
              "); determinant " + std::to_string(minors.back()));
  }
}

std::size_t ResolutionGraph::index_of(int id) const {
  auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
  if (it == ids_.end() || *it != id)
    throw GraphError(GraphError::Kind::kInvalid,
                     "unknown vertex " + std::to_string(id));
  return static_cast<std::size_t>(it - ids_.begin());
}

bool ResolutionGraph::has_arrows() const {
  return std::any_of(arrow_.begin(), arrow_.end(), [](int a) { return a > 0; });
}

std::vector<std::pair<std::size_t, std::size_t>> ResolutionGraph::edges() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < adj_.size(); ++i)
    for (auto j : adj_[i])
      if (i < j) out.emplace_back(i, j);
  return out;
}

IntMatrix ResolutionGraph::intersection_matrix() const {
  IntMatrix m(size(), std::vector<std::int64_t>(size(), 0));
  for (std::size_t i = 0; i < size(); ++i) {
    m[i][i] = euler_[i];
    for (auto j : adj_[i]) m[i][j] = 1;
  }
  return m;
}

ResolutionGraph ResolutionGraph::induced(
    const std::vector<std::size_t>& indices) const {
  std::vector<std::pair<int, int>> vs;
  std::vector<std::pair<int, int>> es;
  std::vector<bool> in(size(), false);
  for (auto i : indices) in.at(i) = true;
  for (auto i : indices) vs.emplace_back(ids_[i], euler_[i]);
  for (const auto& [i, j] : edges())
    if (in[i] && in[j]) es.emplace_back(ids_[i], ids_[j]);
  return ResolutionGraph(std::move(vs), std::move(es));
}

ResolutionGraph ResolutionGraph::with_arrows(
    const std::vector<Arrow>& arrows) const {
  std::vector<std::pair<int, int>> vs;
  for (std::size_t i = 0; i < size(); ++i) vs.emplace_back(ids_[i], euler_[i]);
  std::vector<std::pair<int, int>> es;
  for (const auto& [i, j] : edges()) es.emplace_back(ids_[i], ids_[j]);
  return ResolutionGraph(std::move(vs), std::move(es), arrows);
}

std::string ResolutionGraph::to_text() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < size(); ++i)
    os << "v " << ids_[i] << ' ' << euler_[i] << '\n';
  for (const auto& [i, j] : edges())
    os << "e " << ids_[i] << ' ' << ids_[j] << '\n';
  for (std::size_t i = 0; i < size(); ++i)
    if (arrow_[i] > 0) os << "a " << ids_[i] << ' ' << arrow_[i] << '\n';
  return os.str();
}

namespace {

int parse_int(const std::string& tok, int line, const char* what) {
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(tok, &pos);
  } catch (const std::exception&) {
    throw ParseError(line, std::string("expected integer ") + what + ", got '" +
                               tok + "'");
  }
  if (pos != tok.size() || v < std::numeric_limits<int>::min() ||
      v > std::numeric_limits<int>::max())
    throw ParseError(line, std::string("bad integer ") + what + " '" + tok + "'");
  return static_cast<int>(v);
}

}  // namespace

ResolutionGraph parse_graph(std::string_view text) {
  std::vector<std::pair<int, int>> vertices;
  std::vector<std::pair<int, int>> edges;
  std::vector<ResolutionGraph::Arrow> arrows;
  std::map<int, int> vertex_line;
  std::map<std::pair<int, int>, int> edge_line;
  std::map<int, int> arrow_line;
  std::vector<std::pair<int, int>> edge_refs;  // (id, line)
  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
    std::istringstream ls(raw);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    const std::string& kw = tok[0];
    if (kw == "v") {
      if (tok.size() != 3) throw ParseError(line, "expected 'v <id> <euler>'");
      int id = parse_int(tok[1], line, "vertex id");
      int e = parse_int(tok[2], line, "euler number");
      if (id <= 0) throw ParseError(line, "vertex id must be positive");
      if (e > -1) throw ParseError(line, "euler number must be <= -1");
      if (auto [it, ok] = vertex_line.emplace(id, line); !ok)
        throw ParseError(line, "duplicate vertex " + std::to_string(id) +
                                   " (first declared on line " +
                                   std::to_string(it->second) + ")");
      vertices.emplace_back(id, e);
    } else if (kw == "e") {
      if (tok.size() != 3) throw ParseError(line, "expected 'e <id> <id>'");
      int a = parse_int(tok[1], line, "vertex id");
      int b = parse_int(tok[2], line, "vertex id");
      if (a == b) throw ParseError(line, "loop edge at vertex " + tok[1]);
      auto key = std::minmax(a, b);
      if (auto [it, ok] = edge_line.emplace(key, line); !ok)
        throw ParseError(line, "duplicate edge " + tok[1] + " " + tok[2] +
                                   " (first declared on line " +
                                   std::to_string(it->second) + ")");
      edges.emplace_back(a, b);
      edge_refs.emplace_back(a, line);
      edge_refs.emplace_back(b, line);
    } else if (kw == "a") {
      if (tok.size() != 2 && tok.size() != 3)
        throw ParseError(line, "expected 'a <id> [mult]'");
      int id = parse_int(tok[1], line, "vertex id");
      int mult = tok.size() == 3 ? parse_int(tok[2], line, "multiplicity") : 1;
      if (mult < 0) throw ParseError(line, "arrow multiplicity must be >= 0");
      if (auto [it, ok] = arrow_line.emplace(id, line); !ok)
        throw ParseError(line, "duplicate arrow at vertex " + tok[1] +
                                   " (first declared on line " +
                                   std::to_string(it->second) + ")");
      arrows.push_back({id, mult});
      edge_refs.emplace_back(id, line);
    } else {
      throw ParseError(line, "unknown directive '" + kw + "'");
    }
  }
  for (const auto& [id, l] : edge_refs)
    if (!vertex_line.count(id))
      throw ParseError(l, "reference to undeclared vertex " + std::to_string(id));
  if (vertices.empty()) throw ParseError(line, "no vertices declared");
  return ResolutionGraph(std::move(vertices), std::move(edges), std::move(arrows));
}

ResolutionGraph load_graph(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_graph(ss.str());
}

}  // namespace deltainv
