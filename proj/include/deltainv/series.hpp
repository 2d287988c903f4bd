#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "deltainv/arith.hpp"
#include "deltainv/lattice.hpp"

namespace deltainv {

struct SignedMonomial {
  std::int64_t coeff = 0;
  Cycle exponent;
};

/// Rational function N(t) / prod_i (1 - t^{a_i}) with N a finite signed sum
/// of monomials. Numerator terms with equal exponents are merged.
struct ZetaSpec {
  std::vector<SignedMonomial> numerator;
  std::vector<Cycle> denominators;
  /// Vertex whose dual cycle gives each denominator.
  std::vector<std::size_t> denominator_vertices;
  Cycle twist;
  /// Vertices v whose factor (1 - t^{E*_v}) multiplies the zeta function.
  std::vector<std::size_t> relative_set;

  bool is_plain() const { return twist.is_zero() && relative_set.empty(); }
};

/// t^{twist} * prod_v (1 - t^{E*_v})^{val(v) - 2 + [v in relative]}.
/// The twist must lie in the Lipman cone.
ZetaSpec build_zeta(const Lattice& lat, const std::optional<Cycle>& twist = {},
                    const std::vector<std::size_t>& relative = {});

/// Truncated expansion. Every support point with some coordinate in
/// region_vars below bound() is present with its exact coefficient.
class SparseSeries {
 public:
  SparseSeries(std::vector<std::size_t> vars, std::int64_t denom, Rational bound,
               std::vector<std::size_t> region_vars);

  /// Vertex indices of the coordinates, ascending.
  const std::vector<std::size_t>& variables() const { return vars_; }
  const std::map<Cycle, Integer>& terms() const { return terms_; }
  std::int64_t denom() const { return denom_; }
  const Rational& bound() const { return bound_; }
  const std::vector<std::size_t>& region_vars() const { return region_; }

  /// Whether the point lies where the expansion is complete.
  bool guaranteed(const Cycle& point) const;
  /// Throws std::out_of_range outside the guaranteed region.
  Integer coefficient(const Cycle& point) const;
  Integer coefficient_sum() const;

  void add(const Cycle& point, const Integer& c);

  /// One term per line: `coeff n_1/d ... n_k/d`, lexicographic in the
  /// scaled exponents.
  std::string dump() const;

 private:
  std::vector<std::size_t> vars_;
  std::int64_t denom_;
  Rational bound_;
  std::vector<std::size_t> region_;
  std::map<Cycle, Integer> terms_;
};

/// All support points with some coordinate in region (default: every
/// vertex) below bound.
SparseSeries expand(const Lattice& lat, const ZetaSpec& spec, const Rational& bound,
                    std::vector<std::size_t> region = {});

SparseSeries h_part(const Lattice& lat, const SparseSeries& s, const HClass& h);

/// Sets t_v = 1 for v outside I. Needs region_vars to meet I, otherwise
/// fibers over the kept coordinates are not known to be complete.
SparseSeries reduce(const SparseSeries& s, const std::vector<std::size_t>& I);

enum class CountMode {
  kNotDominating,  // some w in I with l'_w < x_w
  kStrictlyBelow,  // every w in I with l'_w < x_w
};

/// Sum of the coefficients of spec over the points l' of class h (all
/// classes when h is empty) that satisfy the mode condition against x on I.
Integer count_coefficients(const Lattice& lat, const ZetaSpec& spec,
                           const std::optional<HClass>& h,
                           const std::vector<std::size_t>& I, const Cycle& x,
                           CountMode mode);

inline Integer counting_Q(const Lattice& lat, const ZetaSpec& spec, const HClass& h,
                          const std::vector<std::size_t>& I, const Cycle& x) {
  return count_coefficients(lat, spec, h, I, x, CountMode::kNotDominating);
}

inline Integer counting_q(const Lattice& lat, const ZetaSpec& spec, const HClass& h,
                          const std::vector<std::size_t>& I, const Cycle& x) {
  return count_coefficients(lat, spec, h, I, x, CountMode::kStrictlyBelow);
}

/// Rough number of enumeration nodes a count would visit.
double count_cost_estimate(const Lattice& lat, const ZetaSpec& spec,
                           const std::vector<std::size_t>& I, const Cycle& x,
                           CountMode mode);

std::vector<std::size_t> all_vertices(const Lattice& lat);

class StabilizationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Point r_h + l in class h with l' - Z_K having every E*-coordinate >= margin.
Cycle deep_probe(const Lattice& lat, const HClass& h, int margin);

/// Q_h(l') - chi(l') + chi(r_h) at the probes of margin 1 and 2; throws
/// StabilizationError if they differ.
Integer sw_norm(const Lattice& lat, const HClass& h);

/// pc of the h-part in all variables, for the zeta function or a twist of it.
Integer periodic_constant_full(const Lattice& lat, const ZetaSpec& spec, const HClass& h);

struct FitParams {
  int window = 4;
  /// Largest degree tried; negative means number of denominators + 2.
  int max_degree = -1;
  /// Fixed stride; 0 searches the candidates.
  std::int64_t stride = 0;
  int max_strides = 12;
  int max_samples = 40;
  /// Give up on a stride once a single count would exceed this many nodes.
  double max_cost = 3e8;
};

struct FitResult {
  enum class Status { kOk, kInconclusive };
  Status status = Status::kInconclusive;
  Integer value;
  std::int64_t stride = 0;
  int degree = -1;
  /// First sample index of the polynomial regime.
  int regime_start = 0;
  /// Integral ray direction on I.
  std::vector<std::int64_t> direction;
  std::string diagnostic;

  bool ok() const { return status == Status::kOk; }
};

/// Constant term of the quasi-polynomial of the counting function of
/// spec_h(t_I), found along the ray r_h + k*s*y. Q-counting gives pc,
/// kStrictlyBelow gives the modified constant.
FitResult periodic_constant_reduced(const Lattice& lat, const ZetaSpec& spec,
                                    const HClass& h, const std::vector<std::size_t>& I,
                                    const FitParams& params = {},
                                    CountMode mode = CountMode::kNotDominating);

/// Checks N(t) = (-1)^k t^{Z_K - E + sum a_i} N(t^{-1}) together with
/// sum_v (val(v) - 2) E*_v = Z_K - E.
bool verify_symmetry(const Lattice& lat, const ZetaSpec& spec);

struct SurgeryTerm {
  std::vector<std::size_t> vertices;
  Cycle projected;
  Integer value;
};

struct SurgeryReport {
  Integer full;     // Q_h(x) over all vertices
  Integer reduced;  // Q_{h,I}(x)
  std::vector<SurgeryTerm> components;
  Integer residual;  // full - reduced - sum of components
};

SurgeryReport surgery_check(const Lattice& lat, const std::vector<std::size_t>& I,
                            const Cycle& x);

}  // namespace deltainv
