#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace deltainv {

using IntVec = std::vector<std::int64_t>;

class CurveError : public std::runtime_error {
 public:
  enum class Kind { kMissingZero, kNotClosed, kBadConductor, kBadInput, kInconsistent };
  CurveError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Value semigroup S of a reduced curve germ with r branches, stored as
/// S ∩ [0, c]. Membership outside the box uses s ∈ S iff min(s, c) ∈ S.
class MultibranchCurve {
 public:
  /// Validates 0 ∈ S, closure inside the box, c ∈ S and minimality of c.
  MultibranchCurve(IntVec conductor, std::set<IntVec> values_in_box);

  /// Single branch with the numerical semigroup generated by gens (gcd 1).
  static MultibranchCurve from_generators(const std::vector<std::int64_t>& gens);
  /// r smooth pairwise transversal branches: S = {0} ∪ {s : s_i >= 1}.
  static MultibranchCurve ordinary(std::size_t r);

  std::size_t branches() const { return c_.size(); }
  const IntVec& conductor() const { return c_; }
  const std::set<IntVec>& values_in_box() const { return values_; }
  bool contains(const IntVec& s) const;

  /// Subcurve on the branches J (ascending): coordinate projection of S,
  /// with its own least conductor.
  MultibranchCurve restrict(const std::vector<std::size_t>& J) const;

  /// Z_{>=0} minus S for a single branch.
  std::vector<std::int64_t> gaps() const;

  /// Curve-file serialization.
  std::string to_text() const;

 private:
  IntVec c_;
  std::set<IntVec> values_;
};

/// Grammar: `branches r`, `conductor c_1 ... c_r`, then `s v_1 ... v_r` per
/// element of S in the box; `#` comments.
MultibranchCurve parse_curve(std::string_view text);
MultibranchCurve load_curve(const std::string& path);

/// h(l) = dim O / F(l) on the box [0, c + 1], extended beyond it by
/// h(l) = h(min(l, c + 1)) + sum_i max(l_i - c_i - 1, 0).
class HilbertTable {
 public:
  HilbertTable(IntVec box, std::map<IntVec, std::int64_t> values);

  const IntVec& box() const { return box_; }
  std::int64_t operator()(const IntVec& l) const;
  const std::map<IntVec, std::int64_t>& values() const { return values_; }

 private:
  IntVec box_;
  std::map<IntVec, std::int64_t> values_;
};

/// Fills the box from h(0) = 0 with the jump rule: h(l + e_i) = h(l) + 1 iff
/// some s ∈ S has s_i = l_i and s_j >= l_j. Recomputed along a second
/// coordinate order; throws CurveError on disagreement.
HilbertTable hilbert(const MultibranchCurve& curve);

/// Coefficients p(l) = sum_{K ⊆ J} (-1)^{|K|+1} h_J(l + 1_K) of the subcurve
/// on J, stored on [0, c_J + 1].
struct CurvePoincare {
  std::vector<std::size_t> branches;
  IntVec box;
  std::map<IntVec, std::int64_t> terms;
  /// More than one branch: the series is a polynomial.
  bool finite = false;

  /// Beyond the box a single-branch series has coefficient 1, a polynomial 0.
  std::int64_t coefficient(const IntVec& l) const;
  /// P(1); throws std::logic_error for a single branch.
  std::int64_t value_at_one() const;
};

/// J ascending, non-empty. For |J| >= 2 asserts the support stays in the box.
CurvePoincare poincare(const MultibranchCurve& curve, const std::vector<std::size_t>& J);

/// Gap count of a single branch, checked against -pc of its Poincare series.
std::int64_t delta_branch(const MultibranchCurve& branch);

/// sum_i delta(C_i) + sum_{|J| >= 2} (-1)^{|J|} P_{C_J}(1), checked against
/// h(c) = |c| - delta.
std::int64_t delta_total(const MultibranchCurve& curve);

struct InversionResult {
  bool ok = true;
  std::optional<IntVec> witness;
  std::int64_t hilbert_value = 0;
  std::int64_t reconstructed = 0;
};

/// Rebuilds h on the box from the Poincare data of all subcurves C_J, taken
/// as coordinate projections of S, and reports the first mismatch.
InversionResult verify_inversion(const MultibranchCurve& curve);

/// Value data for some subcurves C_J, keyed by ascending J; the others are
/// projected from the curve. Lets callers test externally supplied data.
using SubcurveData = std::map<std::vector<std::size_t>, MultibranchCurve>;
InversionResult verify_inversion(const MultibranchCurve& curve, const SubcurveData& subcurves);

}  // namespace deltainv
