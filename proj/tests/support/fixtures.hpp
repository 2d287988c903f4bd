#pragma once

#include <initializer_list>
#include <string>
#include <vector>

#include "deltainv/graph.hpp"
#include "deltainv/lattice.hpp"
#include "deltainv/random_graph.hpp"
#include "support/lattice_oracles.hpp"

namespace fixtures {

inline constexpr const char* kA3 =
    "v 1 -2\nv 2 -2\nv 3 -2\ne 1 2\ne 2 3\n";

// Center E2 (euler -3) with legs E1, E3, E4 (euler -2).
inline constexpr const char* kDihedral =
    "v 1 -2\nv 2 -3\nv 3 -2\nv 4 -2\ne 1 2\ne 2 3\ne 2 4\n";

// Center E1 (euler -1) with legs -2, -3, -7.
inline constexpr const char* kBrieskorn237 =
    "v 1 -1\nv 2 -2\nv 3 -3\nv 4 -7\ne 1 2\ne 1 3\ne 1 4\n";

// Blow-up of a generic point of E4: E4 becomes -8, new -1 vertex E5.
inline constexpr const char* kBrieskorn237Blown =
    "v 1 -1\nv 2 -2\nv 3 -3\nv 4 -8\nv 5 -1\ne 1 2\ne 1 3\ne 1 4\ne 4 5\n";

inline constexpr const char* kAffineD4 =
    "v 1 -2\nv 2 -2\nv 3 -2\nv 4 -2\nv 5 -2\ne 1 2\ne 1 3\ne 1 4\ne 1 5\n";

inline deltainv::Lattice lattice(const char* text) {
  return deltainv::Lattice(deltainv::parse_graph(text));
}

/// Cycle from (numerator, denominator) pairs.
inline deltainv::Cycle cycle(const deltainv::Lattice& lat,
                             std::initializer_list<std::pair<long, long>> q) {
  std::vector<deltainv::Rational> v;
  for (auto [p, d] : q) v.emplace_back(p, d);
  return lat.from_rationals(v);
}

inline deltainv::Cycle integral(const deltainv::Lattice& lat,
                                std::initializer_list<long> q) {
  std::vector<deltainv::Rational> v;
  for (auto p : q) v.emplace_back(p);
  return lat.from_rationals(v);
}

inline oracle::QVec to_q(const deltainv::Cycle& c) {
  oracle::QVec v;
  for (std::size_t i = 0; i < c.size(); ++i)
    v.emplace_back(oracle::BigQ(c.scaled(i)) / c.denom());
  return v;
}

inline std::vector<deltainv::ResolutionGraph> random_population(
    std::uint64_t seed, int count, deltainv::RandomTreeOptions opt = {}) {
  deltainv::Rng rng(seed);
  if (opt.max_det == 0) opt.max_det = 200;
  std::vector<deltainv::ResolutionGraph> out;
  for (int i = 0; i < count; ++i) out.push_back(deltainv::random_tree(rng, opt));
  return out;
}

}  // namespace fixtures
