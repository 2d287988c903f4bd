#include "deltainv/invariants.hpp"

#include <stdexcept>

namespace deltainv {

namespace {

void require_rational(const Lattice& lat, const char* what) {
  if (artin_rationality(lat).rational) return;
  throw RationalityRequired(
      std::string(what) +
      " is only determined by the embedded topology on rational graphs, and this graph fails "
      "the Artin test. On the (2,3,7) graph the curves (z, x^2+y^3) and "
      "(y+z^2, x-z^3 sqrt(1-z)) share l'_C = E4* and kappa = 2, yet have delta 1 and 0.");
}

std::vector<std::vector<std::size_t>> nonempty_subsets(const std::vector<std::size_t>& I) {
  std::vector<std::vector<std::size_t>> out;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << I.size()); ++mask) {
    std::vector<std::size_t> J;
    for (std::size_t k = 0; k < I.size(); ++k)
      if (mask >> k & 1) J.push_back(I[k]);
    out.push_back(std::move(J));
  }
  return out;
}

Integer to_integer(const Rational& q) {
  if (!q.is_integer()) throw std::logic_error("expected an integer, got " + to_string(q));
  return Integer(q.numerator());
}

Verdict compare(const FitResult& fit, const Integer& want) {
  if (!fit.ok()) return Verdict::kInconclusive;
  return fit.value == want ? Verdict::kPass : Verdict::kFail;
}

}  // namespace

bool EmbeddedCurveData::unit_arrows() const {
  for (auto a : multiplicities)
    if (a > 1) return false;
  return true;
}

EmbeddedCurveData curve_from_multiplicities(const Lattice& lat, std::vector<std::int64_t> a) {
  if (a.size() != lat.rank()) throw std::invalid_argument("one arrow multiplicity per vertex expected");
  EmbeddedCurveData c;
  for (std::size_t v = 0; v < a.size(); ++v) {
    if (a[v] < 0) throw std::invalid_argument("arrow multiplicities must be non-negative");
    if (a[v] > 0) c.support.push_back(v);
  }
  c.multiplicities = std::move(a);
  c.cycle = lat.from_dual_coordinates(c.multiplicities);
  c.cls = lat.class_of(c.cycle);
  return c;
}

EmbeddedCurveData curve_from_arrows(const Lattice& lat) {
  if (!lat.graph().has_arrows()) throw std::invalid_argument("the graph carries no arrows");
  std::vector<std::int64_t> a(lat.rank());
  for (std::size_t v = 0; v < lat.rank(); ++v) a[v] = lat.graph().arrow(v);
  return curve_from_multiplicities(lat, std::move(a));
}

EmbeddedCurveData curve_from_cycle(const Lattice& lat, const Cycle& lp) {
  if (!lat.in_lipman_cone(lp)) throw std::invalid_argument("cycle " + lp.str() + " is not in the Lipman cone");
  return curve_from_multiplicities(lat, lat.dual_coordinates(lp));
}

Integer kappa_topological(const Lattice& lat, const Cycle& lp,
                          const std::optional<std::vector<std::size_t>>& I) {
  if (!lat.in_dual_lattice(lp)) throw std::invalid_argument("cycle " + lp.str() + " is not in L'");
  const Cycle x = lat.canonical() + lp;
  return counting_Q(lat, build_zeta(lat), lat.class_of(x), I ? *I : all_vertices(lat), x);
}

Integer delta_embedded(const Lattice& lat, const EmbeddedCurveData& curve) {
  require_rational(lat, "delta");
  const Cycle x = lat.canonical() + curve.cycle;
  const Integer delta = to_integer(lat.chi(x) - lat.chi(lat.minimal_in_class(lat.class_of(x))));
  const Integer full = kappa_topological(lat, curve.cycle);
  const Integer reduced = kappa_topological(lat, curve.cycle, curve.support);
  if (full != delta || reduced != delta)
    throw std::logic_error("delta " + to_string(delta) + " disagrees with kappa " + to_string(full) +
                           " (reduced " + to_string(reduced) + ")");
  return delta;
}

Rational blache_A(const Lattice& lat, const EmbeddedCurveData& curve) {
  require_rational(lat, "A");
  const Rational a = lat.chi(lat.minimal_in_class(lat.class_of(-curve.cycle)));
  const Rational other = lat.chi(lat.minimal_in_class(lat.class_of(lat.canonical() + curve.cycle)));
  if (a != other)
    throw std::logic_error("chi(s) differs between the classes of -l'_C and Z_K + l'_C: " +
                           to_string(a) + " vs " + to_string(other));
  const Integer delta = delta_embedded(lat, curve);
  const Rational via_delta = lat.chi(-curve.cycle) - Rational(static_cast<std::int64_t>(delta));
  if (a != via_delta)
    throw std::logic_error("A = " + to_string(a) + " but chi(-l'_C) - delta = " + to_string(via_delta));
  return a;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::kPass: return "pass";
    case Verdict::kFail: return "fail";
    case Verdict::kInconclusive: return "inconclusive";
  }
  return "?";
}

DualityReport verify_twisted_duality(const Lattice& lat, const Cycle& l0, const HClass& h,
                                     const std::vector<std::size_t>& I, const FitParams& params) {
  const auto& grp = lat.group();
  const HClass h0 = lat.class_of(l0);
  DualityReport rep;
  rep.dual_shift = l0 + lat.representative(grp.sub(h, h0));
  rep.point = lat.canonical() - lat.representative(h) + l0;
  rep.point_class = grp.add(grp.sub(lat.class_of(lat.canonical()), h), h0);
  const ZetaSpec twisted = build_zeta(lat, l0);
  const ZetaSpec plain = build_zeta(lat);
  rep.counting = counting_Q(lat, plain, rep.point_class, I, rep.point);
  rep.pc = periodic_constant_reduced(lat, twisted, h, I, params);
  rep.verdict = compare(rep.pc, rep.counting);
  rep.modified_counting = counting_q(lat, plain, rep.point_class, I, rep.point);
  rep.mpc = periodic_constant_reduced(lat, twisted, h, I, params, CountMode::kStrictlyBelow);
  rep.modified_verdict = compare(rep.mpc, rep.modified_counting);
  return rep;
}

DeltaCrossCheck delta_cross_check(const Lattice& lat, const EmbeddedCurveData& curve,
                                  const FitParams& params) {
  if (!curve.unit_arrows())
    throw std::invalid_argument("the relative series route needs every arrow multiplicity in {0, 1}");
  if (curve.support.empty()) throw std::invalid_argument("the curve has no branches");
  DeltaCrossCheck rep;
  rep.chi_delta = delta_embedded(lat, curve);
  const HClass zero = lat.group().zero();
  Integer total = 0;
  bool complete = true;
  for (auto& J : nonempty_subsets(curve.support)) {
    SubcurveTerm term{J, periodic_constant_reduced(lat, build_zeta(lat, std::nullopt, J), zero, J, params)};
    if (!term.fit.ok()) {
      complete = false;
      rep.diagnostic += "J of size " + std::to_string(J.size()) + ": " + term.fit.diagnostic + "; ";
    } else if (J.size() > 1 && term.fit.degree != 0) {
      throw std::logic_error("class-0 relative series on " + std::to_string(J.size()) +
                             " branches is not a polynomial; the expansion region is wrong");
    } else if (J.size() == 1) {
      total -= term.fit.value;
    } else {
      total += J.size() % 2 == 0 ? term.fit.value : Integer(-term.fit.value);
    }
    rep.terms.push_back(std::move(term));
  }
  if (!complete) return rep;
  rep.assembled = total;
  rep.verdict = total == rep.chi_delta ? Verdict::kPass : Verdict::kFail;
  return rep;
}

}  // namespace deltainv
