#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "deltainv/arith.hpp"
#include "deltainv/lattice.hpp"
#include "deltainv/series.hpp"

namespace deltainv {

/// Curve given by arrows: a_v transversal cuts of E_v.
struct EmbeddedCurveData {
  std::vector<std::int64_t> multiplicities;
  /// l'_C = sum_v a_v E*_v.
  Cycle cycle;
  /// I_C = {v : a_v > 0} = Supp*(l'_C).
  std::vector<std::size_t> support;
  HClass cls;

  bool unit_arrows() const;
};

EmbeddedCurveData curve_from_multiplicities(const Lattice& lat, std::vector<std::int64_t> a);
/// Uses the arrows of the lattice's graph; throws std::invalid_argument
/// when there are none.
EmbeddedCurveData curve_from_arrows(const Lattice& lat);
/// Arrows realizing a Lipman cone element: a_v = -(E_v, l').
EmbeddedCurveData curve_from_cycle(const Lattice& lat, const Cycle& lp);

/// Q_{[Z_K + l']}(Z_K + l') over I, all vertices when I is omitted.
Integer kappa_topological(const Lattice& lat, const Cycle& lp,
                          const std::optional<std::vector<std::size_t>>& I = {});

class RationalityRequired : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// chi(Z_K + l'_C) - chi(s_[Z_K + l'_C]), asserted equal to the full and
/// the reduced topological kappa. Rational graphs only.
Integer delta_embedded(const Lattice& lat, const EmbeddedCurveData& curve);

/// chi(s_[-l'_C]), asserted equal to chi(s_[Z_K + l'_C]) and to
/// chi(-l'_C) - delta. Rational graphs only.
Rational blache_A(const Lattice& lat, const EmbeddedCurveData& curve);

enum class Verdict { kPass, kFail, kInconclusive };
std::string to_string(Verdict v);

struct DualityReport {
  Verdict verdict = Verdict::kInconclusive;
  /// pc of the h-part of the twist by l'_0, reduced to I, against Q.
  FitResult pc;
  Integer counting;
  Verdict modified_verdict = Verdict::kInconclusive;
  FitResult mpc;
  Integer modified_counting;
  /// l'_0 + r_{h - h_0}.
  Cycle dual_shift;
  /// Z_K - r_h + l'_0 and its class [Z_K] - h + h_0.
  Cycle point;
  HClass point_class;
};

DualityReport verify_twisted_duality(const Lattice& lat, const Cycle& l0, const HClass& h,
                                     const std::vector<std::size_t>& I,
                                     const FitParams& params = {});

struct SubcurveTerm {
  std::vector<std::size_t> branches;
  /// pc of the class-0 part of the relative series reduced to J; this is
  /// -delta for one branch and P(1) for several.
  FitResult fit;
};

struct DeltaCrossCheck {
  Verdict verdict = Verdict::kInconclusive;
  Integer chi_delta;
  Integer assembled;
  std::vector<SubcurveTerm> terms;
  std::string diagnostic;
};

/// Assembles delta from the relative series of every sub-curve on I_C and
/// compares with the chi formula. Needs unit arrows on a rational graph.
DeltaCrossCheck delta_cross_check(const Lattice& lat, const EmbeddedCurveData& curve,
                                  const FitParams& params = {});

}  // namespace deltainv
