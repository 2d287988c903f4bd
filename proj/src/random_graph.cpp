#include "deltainv/random_graph.hpp"

namespace deltainv {

std::int64_t Rng::uniform(std::int64_t lo, std::int64_t hi) {
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<std::int64_t>(eng_());
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % span;
  std::uint64_t x;
  do {
    x = eng_();
  } while (x >= limit);
  return lo + static_cast<std::int64_t>(x % span);
}

namespace {

std::vector<std::pair<int, int>> pruefer_tree(Rng& rng, int n) {
  std::vector<std::pair<int, int>> edges;
  if (n < 2) return edges;
  std::vector<int> code(static_cast<std::size_t>(n - 2));
  for (auto& c : code) c = static_cast<int>(rng.uniform(1, n));
  std::vector<int> degree(static_cast<std::size_t>(n + 1), 1);
  for (int c : code) ++degree[static_cast<std::size_t>(c)];
  for (int c : code) {
    for (int leaf = 1; leaf <= n; ++leaf)
      if (degree[static_cast<std::size_t>(leaf)] == 1) {
        edges.emplace_back(leaf, c);
        --degree[static_cast<std::size_t>(leaf)];
        --degree[static_cast<std::size_t>(c)];
        break;
      }
  }
  int u = 0, w = 0;
  for (int v = 1; v <= n; ++v)
    if (degree[static_cast<std::size_t>(v)] == 1) (u == 0 ? u : w) = v;
  edges.emplace_back(u, w);
  return edges;
}

}  // namespace

ResolutionGraph random_tree(Rng& rng, const RandomTreeOptions& opt) {
  for (int attempt = 0; attempt < 1000000; ++attempt) {
    int n = static_cast<int>(rng.uniform(opt.min_vertices, opt.max_vertices));
    std::vector<std::pair<int, int>> vs;
    for (int v = 1; v <= n; ++v)
      vs.emplace_back(v, static_cast<int>(rng.uniform(opt.min_euler, opt.max_euler)));
    auto es = pruefer_tree(rng, n);
    try {
      ResolutionGraph g(vs, es);
      if (opt.max_det > 0 || opt.require_rational) {
        Lattice lat(g);
        if (opt.max_det > 0 && lat.det() > opt.max_det) continue;
        if (opt.require_rational && !artin_rationality(lat).rational) continue;
      }
      return g;
    } catch (const GraphError&) {
      continue;
    }
  }
  throw std::runtime_error("random tree rejection sampling did not converge");
}

std::vector<std::size_t> random_subset(Rng& rng, std::size_t n, bool allow_empty) {
  while (true) {
    std::vector<std::size_t> s;
    for (std::size_t v = 0; v < n; ++v)
      if (rng.coin()) s.push_back(v);
    if (allow_empty || !s.empty()) return s;
  }
}

Cycle random_lipman_element(Rng& rng, const Lattice& lat, int max_coeff) {
  std::vector<std::int64_t> a(lat.rank());
  for (auto& x : a) x = rng.uniform(0, max_coeff);
  return lat.from_dual_coordinates(a);
}

}  // namespace deltainv
