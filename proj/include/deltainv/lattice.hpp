#pragma once

#include <compare>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "deltainv/arith.hpp"
#include "deltainv/graph.hpp"

namespace deltainv {

/// Element of H = L'/L in invariant-factor coordinates.
struct HClass {
  std::vector<std::int64_t> c;
  friend auto operator<=>(const HClass&, const HClass&) = default;
};

/// H = L'/L computed through the Smith normal form of the intersection
/// matrix. Coordinates refer to the nontrivial invariant factors only.
class DiscriminantGroup {
 public:
  explicit DiscriminantGroup(const IntMatrix& form);

  const std::vector<std::int64_t>& invariant_factors() const { return factors_; }
  std::int64_t order() const { return order_; }

  /// Class of the cycle sum_v a_v E*_v.
  HClass class_of_dual_coords(std::span<const std::int64_t> a) const;
  /// Class of E*_v, i.e. column v of the class map.
  const HClass& class_of_dual(std::size_t v) const { return dual_class_[v]; }
  /// E*-coordinates of a preimage of the i-th generator.
  const std::vector<std::int64_t>& generator_dual_coords(std::size_t i) const {
    return gen_coords_[i];
  }

  HClass zero() const { return HClass{std::vector<std::int64_t>(factors_.size(), 0)}; }
  HClass add(const HClass& a, const HClass& b) const;
  HClass sub(const HClass& a, const HClass& b) const;
  HClass neg(const HClass& a) const;
  HClass scale(const HClass& a, std::int64_t k) const;
  bool is_zero(const HClass& a) const;

  /// Mixed-radix encoding in [0, order).
  std::size_t index(const HClass& a) const;
  HClass element(std::size_t index) const;
  std::vector<HClass> elements() const;

  std::string str(const HClass& a) const;
  std::string structure() const;

 private:
  std::vector<std::int64_t> factors_;
  std::int64_t order_ = 1;
  std::vector<std::vector<std::int64_t>> class_rows_;
  std::vector<HClass> dual_class_;
  std::vector<std::vector<std::int64_t>> gen_coords_;
};

/// Lattice data of a negative definite plumbing tree. Every cycle handed out
/// is stored over the common denominator d = |det|.
class Lattice {
 public:
  explicit Lattice(ResolutionGraph graph);

  const ResolutionGraph& graph() const { return graph_; }
  std::size_t rank() const { return graph_.size(); }
  std::int64_t det() const { return d_; }
  const IntMatrix& form() const { return form_; }

  Cycle zero() const { return Cycle::zero(rank(), d_); }
  Cycle base(std::size_t v) const;
  /// E = sum of all base vectors.
  Cycle reduced_sum() const;
  const Cycle& dual(std::size_t v) const { return duals_[v]; }
  const Cycle& canonical() const { return zk_; }

  Cycle from_rationals(const std::vector<Rational>& q) const {
    return Cycle::from_rationals(q, d_);
  }
  Cycle from_dual_coordinates(std::span<const std::int64_t> a) const;
  /// a_v = -(x, E_v); throws if x is not in L'.
  std::vector<std::int64_t> dual_coordinates(const Cycle& x) const;

  /// d * (x, E_v), an integer for every cycle over d.
  std::int64_t scaled_pairing(const Cycle& x, std::size_t v) const;
  Rational pairing(const Cycle& x, const Cycle& y) const;
  Rational chi(const Cycle& x) const;

  bool in_dual_lattice(const Cycle& x) const;
  bool in_lipman_cone(const Cycle& x) const;
  /// Supp*(x) = {v : (E_v, x) != 0}.
  std::vector<std::size_t> dual_support(const Cycle& x) const;

  const DiscriminantGroup& group() const { return group_; }
  HClass class_of(const Cycle& x) const;
  /// r_h: the class representative with every coefficient in [0,1).
  Cycle representative(const HClass& h) const;
  /// s_h: minimal element of the Lipman cone in class h.
  Cycle minimal_in_class(const HClass& h) const;

  /// Chooses a vertex among the current violators (sorted ascending).
  using ViolatorChoice = std::function<std::size_t(std::span<const std::size_t>)>;
  /// Generalized Laufer saturation s(x0); with no choice function the
  /// smallest violating vertex is used.
  Cycle laufer(const Cycle& x0, const ViolatorChoice& choose = {}) const;

  std::string vertex_label(std::size_t v) const;

 private:
  ResolutionGraph graph_;
  IntMatrix form_;
  std::int64_t d_ = 1;
  std::vector<Cycle> duals_;
  Cycle zk_;
  DiscriminantGroup group_;
};

struct Rationality {
  Cycle z_min;
  Rational chi_z_min;
  bool rational = false;
};

/// Artin's criterion on the fundamental cycle Z_min = s(E).
Rationality artin_rationality(const Lattice& lat);

/// Connected full subgraph on a part of V \ I with the projection j*.
struct SubgraphComponent {
  std::vector<std::size_t> vertices;  // indices into the parent graph
  std::shared_ptr<const Lattice> lattice;
  /// j*(x): keep the E*-coordinates on this component, rebuild there.
  Cycle project(const Lattice& parent, const Cycle& x) const;
};

std::vector<SubgraphComponent> subgraph_components(
    const Lattice& lat, const std::vector<std::size_t>& removed);

}  // namespace deltainv
