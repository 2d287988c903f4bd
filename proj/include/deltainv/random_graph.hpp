#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "deltainv/graph.hpp"
#include "deltainv/lattice.hpp"

namespace deltainv {

/// Deterministic across platforms: the engine is fully specified and the
/// range reduction below does not use the library distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  /// Uniform integer in [lo, hi].
  std::int64_t uniform(std::int64_t lo, std::int64_t hi);
  bool coin() { return uniform(0, 1) == 1; }
  template <class T>
  const T& pick(const std::vector<T>& v) {
    return v[static_cast<std::size_t>(uniform(0, static_cast<std::int64_t>(v.size()) - 1))];
  }

 private:
  std::mt19937_64 eng_;
};

struct RandomTreeOptions {
  int min_vertices = 1;
  int max_vertices = 7;
  int min_euler = -7;
  int max_euler = -1;
  /// Reject trees whose |det| exceeds this (0 = no limit).
  std::int64_t max_det = 0;
  bool require_rational = true;
};

/// Rejection sampling: random labelled tree (Pruefer code) with random
/// euler numbers, kept once negative definite (and rational if asked).
ResolutionGraph random_tree(Rng& rng, const RandomTreeOptions& opt);

/// Random vertex subset; nonempty unless allow_empty.
std::vector<std::size_t> random_subset(Rng& rng, std::size_t n, bool allow_empty = false);

/// Random element sum c_v E*_v of the Lipman cone with c_v in [0, max_coeff].
Cycle random_lipman_element(Rng& rng, const Lattice& lat, int max_coeff = 1);

}  // namespace deltainv
