#include <chrono>

#include "doctest.h"
#include "deltainv/random_graph.hpp"
#include "deltainv/series.hpp"
#include "support/fixtures.hpp"
#include "support/series_oracles.hpp"

using namespace deltainv;
using fixtures::cycle;
using fixtures::integral;
using fixtures::random_population;
using fixtures::to_q;

namespace {

Integer oracle_count(const Lattice& lat, const HClass& h, const std::vector<std::size_t>& I,
                     const Cycle& x, CountMode mode, const Cycle& twist,
                     const std::vector<std::size_t>& relative = {}) {
  std::vector<bool> rel(lat.rank(), false);
  for (auto v : relative) rel[v] = true;
  return oracle::count_brute(lat.form(), to_q(lat.representative(h)), I, to_q(x),
                             mode == CountMode::kStrictlyBelow, to_q(twist), rel);
}

/// Random point of L' near the origin: sum of duals with small
/// coefficients plus a small integral shift, possibly negative.
Cycle random_point(Rng& rng, const Lattice& lat, int spread) {
  Cycle x = random_lipman_element(rng, lat, 1);
  for (std::size_t v = 0; v < lat.rank(); ++v) x.add_base(v, rng.uniform(-1, spread));
  return x;
}

}  // namespace

TEST_CASE("zeta numerators and denominators") {
  auto b = fixtures::lattice(fixtures::kBrieskorn237);
  auto z = build_zeta(b);
  REQUIRE(z.numerator.size() == 2);
  CHECK(z.numerator[0].coeff == 1);
  CHECK(z.numerator[0].exponent.is_zero());
  CHECK(z.numerator[1].coeff == -1);
  CHECK(z.numerator[1].exponent == b.dual(0));
  CHECK(z.denominator_vertices == std::vector<std::size_t>{1, 2, 3});
  CHECK(z.denominators[2] == b.dual(3));

  auto a3 = fixtures::lattice(fixtures::kA3);
  auto za = build_zeta(a3);
  REQUIRE(za.numerator.size() == 1);
  CHECK(za.numerator[0].exponent.is_zero());
  CHECK(za.denominators.size() == 2);
  CHECK(za.denominators[0] == cycle(a3, {{3, 4}, {1, 2}, {1, 4}}));
  CHECK(za.denominators[1] == cycle(a3, {{1, 4}, {1, 2}, {3, 4}}));

  auto zt = build_zeta(a3, a3.zero());
  CHECK(zt.numerator.size() == za.numerator.size());
  CHECK(zt.numerator[0].exponent == za.numerator[0].exponent);
  CHECK(zt.denominators == za.denominators);

  CHECK_THROWS_AS(build_zeta(a3, a3.base(0)), std::invalid_argument);
  CHECK_THROWS_AS(build_zeta(a3, cycle(a3, {{1, 3}, {0, 1}, {0, 1}})), std::invalid_argument);
}

TEST_CASE("relative factors cancel end denominators") {
  auto a3 = fixtures::lattice(fixtures::kA3);
  auto z = build_zeta(a3, {}, {0});
  CHECK(z.denominators.size() == 1);
  CHECK(z.denominator_vertices == std::vector<std::size_t>{2});
  auto z2 = build_zeta(a3, {}, {1});
  CHECK(z2.numerator.size() == 2);
  CHECK(z2.denominators.size() == 2);
  auto one = Lattice(parse_graph("v 1 -1\n"));
  CHECK(build_zeta(one).denominators.size() == 2);
  CHECK(build_zeta(one, {}, {0}).denominators.size() == 1);
}

TEST_CASE("A3 class-0 expansion starts with the six listed monomials") {
  auto a3 = fixtures::lattice(fixtures::kA3);
  auto s = h_part(a3, expand(a3, build_zeta(a3), Rational(3)), a3.group().zero());
  Cycle lc = integral(a3, {3, 2, 1});
  std::vector<Cycle> below;
  for (const auto& [p, c] : s.terms()) {
    CHECK(c == 1);
    if (!p.dominates(lc)) below.push_back(p);
  }
  std::vector<Cycle> want{integral(a3, {0, 0, 0}), integral(a3, {1, 1, 1}),
                          integral(a3, {1, 2, 3}), integral(a3, {2, 2, 2}),
                          integral(a3, {2, 3, 4}), integral(a3, {2, 4, 6})};
  std::sort(want.begin(), want.end());
  CHECK(below == want);
}

TEST_CASE("(2,3,7) expansion below Z_K + l'_C") {
  auto b = fixtures::lattice(fixtures::kBrieskorn237);
  auto s = expand(b, build_zeta(b), Rational(8));
  Cycle bound = integral(b, {8, 4, 3, 2});
  std::map<Cycle, Integer> below;
  for (const auto& [p, c] : s.terms())
    if (!p.dominates(bound)) below[p] = c;
  REQUIRE(below.size() == 2);
  CHECK(below.at(b.zero()) == 1);
  CHECK(below.at(integral(b, {6, 3, 2, 1})) == 1);

  auto r = reduce(h_part(b, s, b.group().zero()), {3});
  CHECK(r.coefficient(Cycle({0}, 1).rescaled(b.det())) == 1);
  CHECK(r.coefficient(Cycle({1}, 1).rescaled(b.det())) == 1);
}

TEST_CASE("constant spec expands to the single term 1") {
  auto a3 = fixtures::lattice(fixtures::kA3);
  ZetaSpec one;
  one.numerator.push_back({1, a3.zero()});
  one.twist = a3.zero();
  auto s = expand(a3, one, Rational(5));
  REQUIRE(s.terms().size() == 1);
  CHECK(s.terms().begin()->second == 1);
  CHECK(s.dump() == "1 0/4 0/4 0/4\n");
}

TEST_CASE("series region guarantees") {
  auto a3 = fixtures::lattice(fixtures::kA3);
  auto s = expand(a3, build_zeta(a3), Rational(2));
  CHECK_THROWS_AS(s.coefficient(integral(a3, {5, 5, 5})), std::out_of_range);
  CHECK(s.coefficient(integral(a3, {1, 1, 1})) == 1);
  CHECK(s.coefficient(integral(a3, {1, 5, 5})) == 0);
  auto id = reduce(s, {0, 1, 2});
  CHECK(id.terms() == s.terms());
  auto narrow = expand(a3, build_zeta(a3), Rational(2), {0});
  CHECK_THROWS_AS(reduce(narrow, {1, 2}), std::invalid_argument);
  CHECK_NOTHROW(reduce(narrow, {0, 2}));
}

TEST_CASE("expansion agrees with a factor-by-factor product") {
  auto check = [](const Lattice& lat, const Rational& bound, const ZetaSpec& spec,
                  const std::vector<std::size_t>& relative) {
    auto s = expand(lat, spec, bound);
    oracle::BigQ qb = oracle::BigQ(bound.numerator()) / bound.denominator();
    // Box large enough to hold every term with some coordinate below the bound.
    oracle::BigQ box = 0;
    for (const auto& [p, c] : s.terms())
      for (std::size_t i = 0; i < p.size(); ++i)
        box = std::max(box, oracle::BigQ(p.scaled(i)) / p.denom());
    box += 6;
    std::vector<bool> rel(lat.rank(), false);
    for (auto v : relative) rel[v] = true;
    auto ref = oracle::zeta_in_box(lat.form(), box, to_q(spec.twist), rel);
    std::size_t matched = 0;
    for (const auto& [q, c] : ref) {
      bool inside = std::any_of(q.begin(), q.end(), [&](const auto& e) { return e < qb; });
      if (!inside) continue;
      ++matched;
      std::vector<Rational> r;
      for (const auto& e : q)
        r.emplace_back(static_cast<long>(boost::multiprecision::numerator(e)),
                       static_cast<long>(boost::multiprecision::denominator(e)));
      CHECK(Integer(c) == s.coefficient(lat.from_rationals(r)));
    }
    CHECK(matched == s.terms().size());
  };
  auto a3 = fixtures::lattice(fixtures::kA3);
  check(a3, Rational(3), build_zeta(a3), {});
  check(a3, Rational(2), build_zeta(a3, a3.dual(1), {1}), {1});
  auto dih = fixtures::lattice(fixtures::kDihedral);
  check(dih, Rational(2), build_zeta(dih), {});
  check(dih, Rational(3, 2), build_zeta(dih, dih.dual(0), {0, 2}), {0, 2});
}

TEST_CASE("counting function examples") {
  auto a3 = fixtures::lattice(fixtures::kA3);
  auto all3 = all_vertices(a3);
  Cycle lc = integral(a3, {3, 2, 1});
  CHECK(counting_Q(a3, build_zeta(a3), a3.class_of(lc), all3, lc) == 6);
  CHECK(counting_Q(a3, build_zeta(a3), a3.group().zero(), all3, a3.zero()) == 0);
  CHECK(counting_Q(a3, build_zeta(a3), a3.group().zero(), all3, integral(a3, {-1, 0, -3})) == 0);
  CHECK_THROWS_AS(counting_Q(a3, build_zeta(a3), a3.group().zero(), {}, lc),
                  std::invalid_argument);

  auto b = fixtures::lattice(fixtures::kBrieskorn237);
  CHECK(counting_Q(b, build_zeta(b), b.group().zero(), all_vertices(b),
                   integral(b, {8, 4, 3, 2})) == 2);
}

TEST_CASE("counting functions agree with brute force") {
  Rng rng(5);
  for (const char* text : {fixtures::kA3, fixtures::kDihedral}) {
    auto lat = fixtures::lattice(text);
    const auto classes = lat.group().elements();
    for (int trial = 0; trial < 60; ++trial) {
      auto I = random_subset(rng, lat.rank());
      auto h = rng.pick(classes);
      Cycle x = random_point(rng, lat, 2);
      CountMode mode = rng.coin() ? CountMode::kNotDominating : CountMode::kStrictlyBelow;
      Cycle twist = rng.coin() ? lat.zero() : random_lipman_element(rng, lat, 1);
      std::vector<std::size_t> rel;
      if (rng.uniform(0, 3) == 0) rel = random_subset(rng, lat.rank());
      auto spec = build_zeta(lat, twist, rel);
      CAPTURE(trial);
      CHECK(count_coefficients(lat, spec, h, I, x, mode) ==
            oracle_count(lat, h, I, x, mode, twist, rel));
    }
  }
}

TEST_CASE("counting on random trees agrees with brute force") {
  Rng rng(17);
  RandomTreeOptions opt;
  opt.max_vertices = 6;
  opt.max_det = 40;
  int compared = 0;
  for (const auto& g : random_population(101, 60, opt)) {
    Lattice lat(g);
    auto spec0 = build_zeta(lat);
    // Keep the brute-force box small: prod over denominators of x/(E*)_w.
    Cycle x = random_point(rng, lat, 2);
    auto I = random_subset(rng, lat.rank());
    double box = 1;
    for (const auto& a : spec0.denominators) {
      double e = 0;
      for (auto w : I)
        e = std::max(e, std::max<double>(0.0, static_cast<double>(x.scaled(w)) / static_cast<double>(x.denom())) /
                                (static_cast<double>(a.scaled(w)) / static_cast<double>(a.denom())));
      box *= e + 2;
    }
    if (box > 2e5) continue;
    auto h = rng.pick(lat.group().elements());
    CountMode mode = rng.coin() ? CountMode::kNotDominating : CountMode::kStrictlyBelow;
    Cycle twist = rng.coin() ? lat.zero() : random_lipman_element(rng, lat, 1);
    auto spec = build_zeta(lat, twist);
    CAPTURE(g.to_text());
    CHECK(count_coefficients(lat, spec, h, I, x, mode) == oracle_count(lat, h, I, x, mode, twist));
    ++compared;
  }
  CHECK(compared >= 30);
}

TEST_CASE("counting with all classes sums the classwise counts") {
  auto dih = fixtures::lattice(fixtures::kDihedral);
  auto z = build_zeta(dih);
  Cycle x = cycle(dih, {{4, 3}, {5, 3}, {5, 6}, {5, 6}});
  Integer total = 0;
  for (const auto& h : dih.group().elements())
    total += counting_Q(dih, z, h, {0, 1}, x);
  CHECK(count_coefficients(dih, z, std::nullopt, {0, 1}, x, CountMode::kNotDominating) ==
        total);
}

TEST_CASE("inclusion-exclusion between the two counting functions") {
  Rng rng(21);
  for (const auto& g : random_population(3, 30, {1, 5, -5, -1, 60, false})) {
    Lattice lat(g);
    auto z = build_zeta(lat);
    auto classes = lat.group().elements();
    for (int t = 0; t < 3; ++t) {
      auto I = random_subset(rng, lat.rank());
      auto h = rng.pick(classes);
      Cycle x = random_point(rng, lat, 2);
      Integer rhs = 0;
      for (std::uint64_t mask = 1; mask < (1ull << I.size()); ++mask) {
        std::vector<std::size_t> J;
        for (std::size_t i = 0; i < I.size(); ++i)
          if (mask >> i & 1) J.push_back(I[i]);
        Integer q = counting_q(lat, z, h, J, x);
        rhs += (J.size() % 2 == 1) ? q : Integer(-q);
      }
      CHECK(counting_Q(lat, z, h, I, x) == rhs);
    }
  }
}

TEST_CASE("twisting shifts support and counting functions") {
  Rng rng(8);
  for (const auto& g : random_population(4, 30, {1, 5, -5, -1, 60, false})) {
    Lattice lat(g);
    Cycle l0 = random_lipman_element(rng, lat, 1);
    auto z = build_zeta(lat);
    auto zt = build_zeta(lat, l0);
    REQUIRE(z.numerator.size() == zt.numerator.size());
    for (std::size_t i = 0; i < z.numerator.size(); ++i) {
      CHECK(zt.numerator[i].exponent == z.numerator[i].exponent + l0);
      CHECK(zt.numerator[i].coeff == z.numerator[i].coeff);
    }
    const auto& grp = lat.group();
    HClass h0 = lat.class_of(l0);
    for (int t = 0; t < 3; ++t) {
      auto I = random_subset(rng, lat.rank());
      auto h = rng.pick(grp.elements());
      Cycle x = random_point(rng, lat, 3) + l0;
      CHECK(counting_Q(lat, zt, grp.add(h, h0), I, x) == counting_Q(lat, z, h, I, x - l0));
      CHECK(counting_q(lat, zt, grp.add(h, h0), I, x) == counting_q(lat, z, h, I, x - l0));
    }
  }
}

TEST_CASE("untwisted support lies in the Lipman cone with constant term 1") {
  for (const auto& g : random_population(6, 20, {1, 5, -5, -1, 40, false})) {
    Lattice lat(g);
    auto s = expand(lat, build_zeta(lat), Rational(2));
    CHECK(s.coefficient(lat.zero()) == 1);
    for (const auto& [p, c] : s.terms()) CHECK(lat.in_lipman_cone(p));
  }
}

TEST_CASE("symmetry of the zeta numerator") {
  auto a3 = fixtures::lattice(fixtures::kA3);
  CHECK(verify_symmetry(a3, build_zeta(a3)));
  auto b = fixtures::lattice(fixtures::kBrieskorn237);
  CHECK(verify_symmetry(b, build_zeta(b)));
  CHECK(b.canonical() - b.reduced_sum() == integral(b, {1, 0, 0, 0}));
  for (const auto& g : random_population(9, 40)) {
    Lattice lat(g);
    CHECK(verify_symmetry(lat, build_zeta(lat)));
  }
  auto broken = build_zeta(b);
  broken.numerator.pop_back();
  CHECK_FALSE(verify_symmetry(b, broken));
  CHECK_THROWS_AS(verify_symmetry(a3, build_zeta(a3, a3.dual(0))), std::invalid_argument);
}

TEST_CASE("normalized SW invariant of the (2,3,7) graph") {
  auto b = fixtures::lattice(fixtures::kBrieskorn237);
  // Regression constant from the two-depth probe. It matches the geometric
  // genus 1 of x^2+y^3+z^7.
  CHECK(sw_norm(b, b.group().zero()) == 1);
}

TEST_CASE("SW invariant on rational graphs equals chi(r_h) - chi(s_h)") {
  for (const char* text : {fixtures::kA3, fixtures::kDihedral}) {
    auto lat = fixtures::lattice(text);
    for (const auto& h : lat.group().elements()) {
      Rational want = lat.chi(lat.representative(h)) - lat.chi(lat.minimal_in_class(h));
      CHECK(Rational(static_cast<std::int64_t>(sw_norm(lat, h))) == want);
    }
  }
}

TEST_CASE("rational quasi-polynomial extension of the counting function") {
  Rng rng(31);
  for (const auto& g : random_population(12, 25, {1, 5, -5, -1, 60, true})) {
    Lattice lat(g);
    auto z = build_zeta(lat);
    for (int t = 0; t < 2; ++t) {
      Cycle lp = lat.canonical() + random_lipman_element(rng, lat, 1);
      HClass h = lat.class_of(lp);
      Rational want = lat.chi(lp) - lat.chi(lat.minimal_in_class(h));
      CHECK(Rational(static_cast<std::int64_t>(counting_Q(lat, z, h, all_vertices(lat), lp))) ==
            want);
    }
  }
}

TEST_CASE("periodic constants of twisted zeta functions") {
  auto dih = fixtures::lattice(fixtures::kDihedral);
  auto all = all_vertices(dih);
  const auto& grp = dih.group();
  for (const auto& h : grp.elements())
    CHECK(periodic_constant_full(dih, build_zeta(dih, dih.zero()), h) == sw_norm(dih, h));
  for (std::size_t v = 0; v < dih.rank(); ++v) {
    Cycle l0 = dih.dual(v);
    HClass h0 = dih.class_of(l0);
    Integer lhs = periodic_constant_full(dih, build_zeta(dih, l0), grp.zero());
    Cycle x = dih.canonical() + l0;
    CHECK(lhs == counting_Q(dih, build_zeta(dih), grp.add(dih.class_of(dih.canonical()), h0),
                            all, x));
  }
}

TEST_CASE("one-variable periodic constants") {
  auto one = Lattice(parse_graph("v 1 -1\n"));
  ZetaSpec full;
  full.twist = one.zero();
  full.numerator.push_back({1, one.zero()});
  full.denominators.push_back(one.dual(0));
  auto r = periodic_constant_reduced(one, full, one.group().zero(), {0});
  REQUIRE(r.ok());
  CHECK(r.value == 0);

  // <2,3>: (1 - t^6) / ((1 - t^2)(1 - t^3)) has the single gap 1.
  ZetaSpec cusp;
  cusp.twist = one.zero();
  cusp.numerator = {{1, one.zero()}, {-1, 6 * one.dual(0)}};
  cusp.denominators = {2 * one.dual(0), 3 * one.dual(0)};
  auto c = periodic_constant_reduced(one, cusp, one.group().zero(), {0});
  REQUIRE(c.ok());
  CHECK(c.value == -1);

  // A polynomial has periodic constant equal to its coefficient sum.
  ZetaSpec poly;
  poly.twist = one.zero();
  poly.numerator = {{3, one.zero()}, {-1, one.dual(0)}, {2, 4 * one.dual(0)}};
  auto p = periodic_constant_reduced(one, poly, one.group().zero(), {0});
  REQUIRE(p.ok());
  CHECK(p.degree == 0);
  CHECK(p.value == 4);
}

TEST_CASE("fitted periodic constant in all variables matches the closed form") {
  auto check = [](const Lattice& lat) {
    auto z = build_zeta(lat);
    for (const auto& h : lat.group().elements()) {
      auto f = periodic_constant_reduced(lat, z, h, all_vertices(lat));
      REQUIRE_MESSAGE(f.ok(), f.diagnostic);
      CHECK(f.value == periodic_constant_full(lat, z, h));
    }
  };
  check(fixtures::lattice(fixtures::kA3));
  check(fixtures::lattice(fixtures::kDihedral));
  for (const auto& g : random_population(17, 10, {1, 5, -4, -1, 30, true})) check(Lattice(g));
}

TEST_CASE("surgery formula") {
  auto dih = fixtures::lattice(fixtures::kDihedral);
  Cycle x = dih.canonical();
  for (std::size_t v = 0; v < dih.rank(); ++v) x += 3 * dih.dual(v);
  auto all = surgery_check(dih, all_vertices(dih), x);
  CHECK(all.components.empty());
  CHECK(all.residual == 0);
  auto center = surgery_check(dih, {1}, x);
  CHECK(center.components.size() == 3);
  CHECK(center.residual == 0);

  // On rational graphs with x = Z_K + l', l' in S', and I = Supp*(l') every
  // correction term vanishes.
  Rng rng(41);
  for (const auto& g : random_population(19, 20, {1, 6, -5, -1, 80, true})) {
    Lattice lat(g);
    Cycle lp = random_lipman_element(rng, lat, 1);
    if (lp.is_zero()) lp = lat.dual(0);
    auto supp = lat.dual_support(lp);
    auto rep = surgery_check(lat, supp, lat.canonical() + lp);
    CHECK(rep.residual == 0);
    for (const auto& t : rep.components) CHECK(t.value == 0);
    CHECK(rep.full == rep.reduced);
  }
}
