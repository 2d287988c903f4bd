#include <map>

#include "doctest.h"
#include "deltainv/lattice.hpp"
#include "deltainv/random_graph.hpp"
#include "support/fixtures.hpp"
#include "support/lattice_oracles.hpp"

using namespace deltainv;
using fixtures::cycle;
using fixtures::integral;

using fixtures::random_population;
using fixtures::to_q;

TEST_CASE("graph parser accepts the documented grammar") {
  auto g = parse_graph("# comment\nv 3 -2\nv 1 -2  # trailing\n\nv 2 -2\ne 2 1\ne 3 2\na 3\n");
  CHECK(g.size() == 3);
  CHECK(g.ids() == std::vector<int>{1, 2, 3});
  CHECK(g.valence(1) == 2);
  CHECK(g.arrow(2) == 1);
  auto one = parse_graph("v 7 -1\n");
  CHECK(one.size() == 1);
  CHECK(one.valence(0) == 0);
}

TEST_CASE("graph parser reports line-located syntax errors") {
  auto line_of = [](const char* text) {
    try {
      parse_graph(text);
    } catch (const ParseError& e) {
      return e.line();
    }
    return -1;
  };
  CHECK(line_of("v 1 -2\nv 1 -3\n") == 2);
  CHECK(line_of("v 1 -2\nx 1\n") == 2);
  CHECK(line_of("v 1 -2\nv 2 -2\ne 1 2\ne 2 1\n") == 4);
  CHECK(line_of("v 1 -2\ne 1 5\n") == 2);
  CHECK(line_of("v 1 two\n") == 1);
  CHECK(line_of("v 1 0\n") == 1);
  CHECK(line_of("v 1 -2\na 1\na 1 2\n") == 3);
  CHECK(line_of("v 0 -2\n") == 1);
}

TEST_CASE("structural errors are distinct from definiteness errors") {
  auto kind_of = [](const char* text) {
    try {
      parse_graph(text);
    } catch (const GraphError& e) {
      return static_cast<int>(e.kind());
    }
    return -1;
  };
  using K = GraphError::Kind;
  CHECK(kind_of("v 1 -2\nv 2 -2\n") == static_cast<int>(K::kNotATree));
  CHECK(kind_of("v 1 -2\nv 2 -2\nv 3 -2\ne 1 2\ne 2 3\ne 1 3\n") ==
        static_cast<int>(K::kNotATree));
  CHECK(kind_of("v 1 -1\nv 2 -1\ne 1 2\n") ==
        static_cast<int>(K::kNotNegativeDefinite));
}

TEST_CASE("affine D4 star is rejected with a vanishing minor") {
  // Leading minors in id order, by hand: -2, 3, -4, 4, 0.
  IntMatrix m = {{-2, 1, 1, 1, 1}, {1, -2, 0, 0, 0}, {1, 0, -2, 0, 0},
                 {1, 0, 0, -2, 0}, {1, 0, 0, 0, -2}};
  CHECK(leading_minors(m) == std::vector<std::int64_t>{-2, 3, -4, 4, 0});
  try {
    parse_graph(fixtures::kAffineD4);
    FAIL("affine D4 accepted");
  } catch (const GraphError& e) {
    CHECK(e.kind() == GraphError::Kind::kNotNegativeDefinite);
    std::string msg = e.what();
    CHECK(msg.find("not negative definite") != std::string::npos);
    CHECK(msg.find("order 5 is 0") != std::string::npos);
  }
}

TEST_CASE("A3 lattice data") {
  auto lat = fixtures::lattice(fixtures::kA3);
  CHECK(lat.det() == 4);
  CHECK(lat.dual(0) == cycle(lat, {{3, 4}, {1, 2}, {1, 4}}));
  CHECK(lat.dual(1) == cycle(lat, {{1, 2}, {1, 1}, {1, 2}}));
  CHECK(lat.dual(2) == cycle(lat, {{1, 4}, {1, 2}, {3, 4}}));
  CHECK(lat.canonical().is_zero());
  CHECK(lat.group().invariant_factors() == std::vector<std::int64_t>{4});
  auto art = artin_rationality(lat);
  CHECK(art.z_min == integral(lat, {1, 1, 1}));
  CHECK(art.rational);
}

TEST_CASE("single -1 vertex") {
  auto lat = fixtures::lattice("v 1 -1\n");
  CHECK(lat.det() == 1);
  CHECK(lat.dual(0) == integral(lat, {1}));
  CHECK(lat.group().order() == 1);
  // Z_K = E - 2 E* = -E.
  CHECK(lat.canonical() == integral(lat, {-1}));
  CHECK(artin_rationality(lat).rational);
}

TEST_CASE("dihedral lattice data") {
  auto lat = fixtures::lattice(fixtures::kDihedral);
  CHECK(lat.det() == 12);
  CHECK(lat.dual(0) == cycle(lat, {{2, 3}, {1, 3}, {1, 6}, {1, 6}}));
  CHECK(lat.dual(1) == cycle(lat, {{1, 3}, {2, 3}, {1, 3}, {1, 3}}));
  CHECK(lat.dual(2) == cycle(lat, {{1, 6}, {1, 3}, {2, 3}, {1, 6}}));
  CHECK(lat.dual(3) == cycle(lat, {{1, 6}, {1, 3}, {1, 6}, {2, 3}}));
  CHECK(lat.canonical() == lat.dual(1));
  CHECK(lat.group().invariant_factors() == std::vector<std::int64_t>{2, 6});
  CHECK(artin_rationality(lat).rational);

  // Rows of the dihedral table, classes named through representatives.
  const Cycle& e1 = lat.dual(0);
  const Cycle& e2 = lat.dual(1);
  struct Row {
    Cycle gen, r, s;
  };
  std::vector<Row> rows = {
      {e2, cycle(lat, {{1, 3}, {2, 3}, {1, 3}, {1, 3}}), e2},
      {2 * e2, cycle(lat, {{2, 3}, {1, 3}, {2, 3}, {2, 3}}),
       cycle(lat, {{2, 3}, {4, 3}, {2, 3}, {2, 3}})},
      {e1, e1, e1},
      {e1 + e2, cycle(lat, {{0, 1}, {0, 1}, {1, 2}, {1, 2}}),
       cycle(lat, {{1, 1}, {1, 1}, {1, 2}, {1, 2}})},
      {e1 + 2 * e2, cycle(lat, {{1, 3}, {2, 3}, {5, 6}, {5, 6}}),
       cycle(lat, {{1, 3}, {2, 3}, {5, 6}, {5, 6}})},
  };
  for (const auto& row : rows) {
    auto h = lat.class_of(row.gen);
    CHECK(lat.representative(h) == row.r);
    CHECK(lat.minimal_in_class(h) == row.s);
    CHECK(lat.laufer(row.r) == row.s);
  }
  // chi(-s_h) for h = [E2*].
  CHECK(lat.chi(-e2) == Rational(2, 3));
}

TEST_CASE("(2,3,7) lattice data") {
  auto lat = fixtures::lattice(fixtures::kBrieskorn237);
  CHECK(lat.det() == 1);
  CHECK(lat.group().order() == 1);
  CHECK(lat.canonical() == integral(lat, {2, 1, 1, 1}));
  CHECK(lat.dual(3) == integral(lat, {6, 3, 2, 1}));
  auto art = artin_rationality(lat);
  CHECK(art.z_min == integral(lat, {6, 3, 2, 1}));
  CHECK(art.chi_z_min == 0);
  CHECK_FALSE(art.rational);
}

TEST_CASE("chi basics") {
  for (const char* g : {fixtures::kA3, fixtures::kDihedral, fixtures::kBrieskorn237}) {
    auto lat = fixtures::lattice(g);
    CHECK(lat.chi(lat.zero()) == 0);
    CHECK(lat.chi(lat.canonical()) == 0);
    // chi(Z_K + x) = chi(-x)
    for (std::size_t v = 0; v < lat.rank(); ++v)
      CHECK(lat.chi(lat.canonical() + lat.dual(v)) == lat.chi(-lat.dual(v)));
  }
}

TEST_CASE("subgraph components") {
  auto lat = fixtures::lattice(fixtures::kBrieskorn237);
  CHECK(subgraph_components(lat, {0, 1, 2, 3}).empty());
  auto comps = subgraph_components(lat, {3});
  REQUIRE(comps.size() == 1);
  CHECK(comps[0].vertices == std::vector<std::size_t>{0, 1, 2});
  CHECK(comps[0].lattice->det() == 1);
  auto whole = subgraph_components(lat, {});
  REQUIRE(whole.size() == 1);
  CHECK(whole[0].lattice->canonical() == lat.canonical());
  auto legs = subgraph_components(lat, {0});
  CHECK(legs.size() == 3);
  // j* kills the removed coordinates: E1* maps to 0 on every leg.
  for (const auto& c : legs) CHECK(c.project(lat, lat.dual(0)).is_zero());
}

TEST_CASE("oracle agreement on random definite trees") {
  RandomTreeOptions opt;
  opt.require_rational = false;
  opt.max_vertices = 6;
  for (const auto& g : random_population(11, 60, opt)) {
    Lattice lat(g);
    const auto& m = lat.form();
    for (std::size_t v = 0; v < lat.rank(); ++v) {
      CHECK(to_q(lat.dual(v)) == oracle::dual_by_cramer(m, v));
      for (std::size_t w = 0; w < lat.rank(); ++w)
        CHECK(lat.scaled_pairing(lat.dual(v), w) == (v == w ? -lat.det() : 0));
      for (std::size_t u = 0; u < lat.rank(); ++u) CHECK(lat.dual(v).scaled(u) > 0);
    }
    // Adjunction: (-Z_K + E_v, E_v) + 2 = 0.
    for (std::size_t v = 0; v < lat.rank(); ++v) {
      Cycle k = lat.base(v) - lat.canonical();
      CHECK(lat.pairing(k, lat.base(v)) + 2 == 0);
    }
    // Group structure: closure of fractional duals has the same element
    // orders as the invariant factors predict.
    auto closure = oracle::group_by_closure(m);
    CHECK(static_cast<std::int64_t>(closure.size()) == lat.det());
    std::map<long, long> by_order_oracle, by_order_lib;
    for (const auto& [x, o] : closure) ++by_order_oracle[o];
    const auto& grp = lat.group();
    for (const auto& h : grp.elements()) {
      long k = 1;
      while (!grp.is_zero(grp.scale(h, k))) ++k;
      ++by_order_lib[k];
      auto r = lat.representative(h);
      for (std::size_t i = 0; i < r.size(); ++i) {
        CHECK(r.scaled(i) >= 0);
        CHECK(r.scaled(i) < r.denom());
      }
      CHECK(closure.count(to_q(r)) == 1);
    }
    CHECK(by_order_lib == by_order_oracle);
    // Integral cycles are in the trivial class.
    for (std::size_t v = 0; v < lat.rank(); ++v)
      CHECK(grp.is_zero(lat.class_of(lat.base(v))));
  }
}

TEST_CASE("Laufer saturation properties on random rational trees") {
  Rng rng(2024);
  int graphs = 0;
  for (const auto& g : random_population(7, 110)) {
    Lattice lat(g);
    ++graphs;
    const auto& grp = lat.group();
    for (int t = 0; t < 3; ++t) {
      // Random x0 in L' with small coefficients.
      std::vector<std::int64_t> a(lat.rank());
      for (auto& x : a) x = rng.uniform(-2, 2);
      Cycle x0 = lat.from_dual_coordinates(a);
      for (std::size_t v = 0; v < lat.rank(); ++v) x0.add_base(v, rng.uniform(-1, 1));
      Cycle s = lat.laufer(x0);
      Lattice::ViolatorChoice random_choice = [&](std::span<const std::size_t> viol) {
        return viol[static_cast<std::size_t>(
            rng.uniform(0, static_cast<std::int64_t>(viol.size()) - 1))];
      };
      CHECK(lat.laufer(x0, random_choice) == s);
      CHECK(lat.in_lipman_cone(s));
      CHECK(lat.class_of(s) == lat.class_of(x0));
      Cycle diff = s - x0;
      CHECK(diff.is_integral());
      CHECK(diff.dominates(lat.zero()));
    }
    for (const auto& h : grp.elements()) {
      Cycle r = lat.representative(h);
      Cycle s = lat.minimal_in_class(h);
      CHECK(s.dominates(r));
      CHECK(lat.laufer(s) == s);
      for (std::size_t v = 0; v < lat.rank(); ++v) {
        Cycle t = s;
        t.add_base(v, -1);
        if (t.dominates(lat.zero())) CHECK_FALSE(lat.in_lipman_cone(t));
      }
    }
  }
  CHECK(graphs >= 100);
}

TEST_CASE("Laufer output matches exhaustive minimal anti-nef search") {
  for (const auto& g : random_population(99, 25, {1, 4, -4, -1, 60, true})) {
    Lattice lat(g);
    for (const auto& h : lat.group().elements()) {
      Cycle r = lat.representative(h);
      Cycle s = lat.minimal_in_class(h);
      std::int64_t top = 0;
      for (std::size_t i = 0; i < s.size(); ++i)
        top = std::max(top, ceil_div(s.scaled(i) - r.scaled(i), s.denom()));
      auto brute = oracle::minimal_anti_nef(lat.form(), to_q(r), static_cast<int>(top) + 1);
      REQUIRE(brute.has_value());
      CHECK(*brute == to_q(s));
    }
  }
}

TEST_CASE("projection of minimal cycles to subgraphs stays minimal") {
  Rng rng(5);
  for (const auto& g : random_population(13, 40)) {
    Lattice lat(g);
    auto removed = random_subset(rng, lat.rank(), true);
    for (const auto& comp : subgraph_components(lat, removed)) {
      for (const auto& h : lat.group().elements()) {
        Cycle p = comp.project(lat, lat.minimal_in_class(h));
        CHECK(comp.lattice->minimal_in_class(comp.lattice->class_of(p)) == p);
      }
    }
  }
}
