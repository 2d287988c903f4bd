#include "deltainv/lattice.hpp"

#include <algorithm>
#include <cassert>
#include <numeric>
#include <sstream>

#include <boost/multiprecision/cpp_int.hpp>

namespace deltainv {

namespace {

using BigRational = boost::multiprecision::cpp_rational;

std::int64_t to_i64(const Integer& z) {
  if (z > std::numeric_limits<std::int64_t>::max() ||
      z < std::numeric_limits<std::int64_t>::min())
    throw std::overflow_error("value exceeds 64 bits");
  return static_cast<std::int64_t>(z);
}

/// Inverse of an integer matrix over Q.
std::vector<std::vector<BigRational>> rational_inverse(const IntMatrix& m) {
  const std::size_t n = m.size();
  std::vector<std::vector<BigRational>> a(n, std::vector<BigRational>(2 * n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a[i][j] = m[i][j];
    a[i][n + i] = 1;
  }
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && a[p][c] == 0) ++p;
    if (p == n) throw std::domain_error("singular matrix");
    std::swap(a[p], a[c]);
    BigRational piv = a[c][c];
    for (auto& x : a[c]) x /= piv;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || a[r][c] == 0) continue;
      BigRational f = a[r][c];
      for (std::size_t j = 0; j < 2 * n; ++j) a[r][j] -= f * a[c][j];
    }
  }
  std::vector<std::vector<BigRational>> inv(n, std::vector<BigRational>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) inv[i][j] = a[i][n + j];
  return inv;
}

struct Smith {
  std::vector<std::int64_t> diag;
  IntMatrix u;      // left transform, U A V = D
  IntMatrix u_inv;  // inverse of U
};

Smith smith_normal_form(IntMatrix a) {
  const std::size_t n = a.size();
  IntMatrix u(n, std::vector<std::int64_t>(n, 0));
  IntMatrix ui = u;
  for (std::size_t i = 0; i < n; ++i) u[i][i] = ui[i][i] = 1;

  auto row_add = [&](std::size_t dst, std::size_t src, std::int64_t k) {
    // row_dst += k row_src
    for (std::size_t j = 0; j < n; ++j) {
      a[dst][j] = checked_add(a[dst][j], checked_mul(k, a[src][j]));
      u[dst][j] = checked_add(u[dst][j], checked_mul(k, u[src][j]));
      ui[j][src] = checked_add(ui[j][src], -checked_mul(k, ui[j][dst]));
    }
  };
  auto row_swap = [&](std::size_t i, std::size_t j) {
    std::swap(a[i], a[j]);
    std::swap(u[i], u[j]);
    for (std::size_t r = 0; r < n; ++r) std::swap(ui[r][i], ui[r][j]);
  };
  auto row_neg = [&](std::size_t i) {
    for (std::size_t j = 0; j < n; ++j) {
      a[i][j] = -a[i][j];
      u[i][j] = -u[i][j];
      ui[j][i] = -ui[j][i];
    }
  };
  auto col_add = [&](std::size_t dst, std::size_t src, std::int64_t k) {
    for (std::size_t i = 0; i < n; ++i)
      a[i][dst] = checked_add(a[i][dst], checked_mul(k, a[i][src]));
  };
  auto col_swap = [&](std::size_t i, std::size_t j) {
    for (std::size_t r = 0; r < n; ++r) std::swap(a[r][i], a[r][j]);
  };

  for (std::size_t t = 0; t < n; ++t) {
    while (true) {
      // Smallest nonzero entry of the trailing block goes to (t,t).
      std::size_t pi = n, pj = n;
      for (std::size_t i = t; i < n; ++i)
        for (std::size_t j = t; j < n; ++j)
          if (a[i][j] != 0 &&
              (pi == n || std::llabs(a[i][j]) < std::llabs(a[pi][pj])))
            pi = i, pj = j;
      if (pi == n) break;
      if (pi != t) row_swap(pi, t);
      if (pj != t) col_swap(pj, t);
      bool clean = true;
      for (std::size_t i = t + 1; i < n; ++i) {
        std::int64_t q = floor_div(a[i][t], a[t][t]);
        if (q != 0) row_add(i, t, -q);
        if (a[i][t] != 0) clean = false;
      }
      for (std::size_t j = t + 1; j < n; ++j) {
        std::int64_t q = floor_div(a[t][j], a[t][t]);
        if (q != 0) col_add(j, t, -q);
        if (a[t][j] != 0) clean = false;
      }
      if (!clean) continue;
      // Divisibility of the remaining block by the pivot.
      std::size_t bad = n;
      for (std::size_t i = t + 1; i < n && bad == n; ++i)
        for (std::size_t j = t + 1; j < n; ++j)
          if (a[i][j] % a[t][t] != 0) {
            bad = i;
            break;
          }
      if (bad == n) break;
      row_add(t, bad, 1);
    }
    if (a[t][t] < 0) row_neg(t);
  }
  Smith s;
  for (std::size_t i = 0; i < n; ++i) s.diag.push_back(a[i][i]);
  s.u = std::move(u);
  s.u_inv = std::move(ui);
  return s;
}

}  // namespace

DiscriminantGroup::DiscriminantGroup(const IntMatrix& form) {
  const std::size_t n = form.size();
  Smith s = smith_normal_form(form);
  for (std::size_t i = 0; i < n; ++i) {
    if (s.diag[i] == 0) throw std::domain_error("degenerate intersection form");
    if (s.diag[i] == 1) continue;
    factors_.push_back(s.diag[i]);
    class_rows_.push_back(s.u[i]);
    std::vector<std::int64_t> g(n);
    for (std::size_t v = 0; v < n; ++v) g[v] = s.u_inv[v][i];
    gen_coords_.push_back(std::move(g));
    order_ = checked_mul(order_, s.diag[i]);
  }
  for (std::size_t i = 1; i < factors_.size(); ++i)
    assert(factors_[i] % factors_[i - 1] == 0);
  for (std::size_t v = 0; v < n; ++v) {
    std::vector<std::int64_t> e(n, 0);
    e[v] = 1;
    dual_class_.push_back(class_of_dual_coords(e));
  }
}

HClass DiscriminantGroup::class_of_dual_coords(std::span<const std::int64_t> a) const {
  HClass h{std::vector<std::int64_t>(factors_.size(), 0)};
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    __int128 acc = 0;
    for (std::size_t v = 0; v < a.size(); ++v)
      acc += static_cast<__int128>(class_rows_[i][v]) * a[v];
    __int128 r = acc % factors_[i];
    if (r < 0) r += factors_[i];
    h.c[i] = static_cast<std::int64_t>(r);
  }
  return h;
}

HClass DiscriminantGroup::add(const HClass& a, const HClass& b) const {
  HClass r = a;
  for (std::size_t i = 0; i < factors_.size(); ++i)
    r.c[i] = floor_mod(a.c[i] + b.c[i], factors_[i]);
  return r;
}

HClass DiscriminantGroup::sub(const HClass& a, const HClass& b) const {
  return add(a, neg(b));
}

HClass DiscriminantGroup::neg(const HClass& a) const {
  HClass r = a;
  for (std::size_t i = 0; i < factors_.size(); ++i)
    r.c[i] = floor_mod(-a.c[i], factors_[i]);
  return r;
}

HClass DiscriminantGroup::scale(const HClass& a, std::int64_t k) const {
  HClass r = a;
  for (std::size_t i = 0; i < factors_.size(); ++i)
    r.c[i] = floor_mod(static_cast<std::int64_t>(
                           (static_cast<__int128>(a.c[i]) * k) % factors_[i]),
                       factors_[i]);
  return r;
}

bool DiscriminantGroup::is_zero(const HClass& a) const {
  return std::all_of(a.c.begin(), a.c.end(), [](auto x) { return x == 0; });
}

std::size_t DiscriminantGroup::index(const HClass& a) const {
  std::size_t idx = 0;
  for (std::size_t i = 0; i < factors_.size(); ++i)
    idx = idx * static_cast<std::size_t>(factors_[i]) +
          static_cast<std::size_t>(a.c[i]);
  return idx;
}

HClass DiscriminantGroup::element(std::size_t idx) const {
  HClass h = zero();
  for (std::size_t i = factors_.size(); i-- > 0;) {
    auto f = static_cast<std::size_t>(factors_[i]);
    h.c[i] = static_cast<std::int64_t>(idx % f);
    idx /= f;
  }
  return h;
}

std::vector<HClass> DiscriminantGroup::elements() const {
  std::vector<HClass> out;
  for (std::size_t i = 0; i < static_cast<std::size_t>(order_); ++i)
    out.push_back(element(i));
  return out;
}

std::string DiscriminantGroup::str(const HClass& a) const {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < a.c.size(); ++i) os << (i ? "," : "") << a.c[i];
  os << ')';
  return os.str();
}

std::string DiscriminantGroup::structure() const {
  if (factors_.empty()) return "0";
  std::ostringstream os;
  for (std::size_t i = 0; i < factors_.size(); ++i)
    os << (i ? " x " : "") << "Z" << factors_[i];
  return os.str();
}

Lattice::Lattice(ResolutionGraph graph)
    : graph_(std::move(graph)),
      form_(graph_.intersection_matrix()),
      group_(form_) {
  const std::size_t n = rank();
  auto minors = leading_minors(form_);
  d_ = std::llabs(minors.back());
  if (d_ != group_.order())
    throw std::logic_error("discriminant group order differs from |det|");
  auto inv = rational_inverse(form_);
  for (std::size_t v = 0; v < n; ++v) {
    std::vector<std::int64_t> num(n);
    for (std::size_t u = 0; u < n; ++u) {
      BigRational q = -inv[u][v] * d_;
      if (boost::multiprecision::denominator(q) != 1)
        throw std::logic_error("dual cycle denominator does not divide d");
      num[u] = to_i64(boost::multiprecision::numerator(q));
      if (num[u] <= 0)
        throw std::logic_error("dual cycle has a non-positive entry");
    }
    duals_.emplace_back(std::move(num), d_);
  }
  for (std::size_t v = 0; v < n; ++v)
    for (std::size_t w = 0; w < n; ++w)
      if (scaled_pairing(duals_[v], w) != (v == w ? -d_ : 0))
        throw std::logic_error("dual cycle fails its defining pairing");

  // Z_K = E - sum (2 - val v) E*_v, and independently from adjunction.
  Cycle zk = reduced_sum();
  Cycle adj = zero();
  for (std::size_t v = 0; v < n; ++v) {
    zk -= (2 - static_cast<std::int64_t>(graph_.valence(v))) * duals_[v];
    adj += (-static_cast<std::int64_t>(graph_.euler(v)) - 2) * duals_[v];
  }
  if (!(zk == adj)) throw std::logic_error("canonical cycle routes disagree");
  for (std::size_t v = 0; v < n; ++v)
    if (scaled_pairing(zk, v) != (graph_.euler(v) + 2) * d_)
      throw std::logic_error("canonical cycle violates adjunction");
  zk_ = std::move(zk);
}

Cycle Lattice::base(std::size_t v) const {
  Cycle c = zero();
  c.add_base(v);
  return c;
}

Cycle Lattice::reduced_sum() const {
  Cycle c = zero();
  for (std::size_t v = 0; v < rank(); ++v) c.add_base(v);
  return c;
}

Cycle Lattice::from_dual_coordinates(std::span<const std::int64_t> a) const {
  Cycle c = zero();
  for (std::size_t v = 0; v < rank(); ++v)
    if (a[v] != 0) c += a[v] * duals_[v];
  return c;
}

std::int64_t Lattice::scaled_pairing(const Cycle& x, std::size_t v) const {
  __int128 acc = 0;
  for (std::size_t u = 0; u < rank(); ++u)
    acc += static_cast<__int128>(x.scaled(u)) * form_[u][v];
  // x is over d; the pairing with E_v is acc / d, reported scaled by d.
  if (x.denom() != d_) {
    acc = acc * d_;
    if (acc % x.denom() != 0)
      throw std::invalid_argument("cycle denominator incompatible with lattice");
    acc /= x.denom();
  }
  return static_cast<std::int64_t>(acc);
}

Rational Lattice::pairing(const Cycle& x, const Cycle& y) const {
  __int128 acc = 0;
  for (std::size_t v = 0; v < rank(); ++v)
    acc += static_cast<__int128>(scaled_pairing(x, v)) * y.scaled(v);
  return Rational::from_wide(acc, static_cast<__int128>(d_) * y.denom());
}

Rational Lattice::chi(const Cycle& x) const {
  Cycle y = x.denom() == d_ ? x : x.rescaled(d_);
  return -pairing(y, y - zk_) / 2;
}

std::vector<std::int64_t> Lattice::dual_coordinates(const Cycle& x) const {
  std::vector<std::int64_t> a(rank());
  for (std::size_t v = 0; v < rank(); ++v) {
    std::int64_t p = scaled_pairing(x, v);
    if (p % d_ != 0)
      throw std::invalid_argument("cycle " + x.str() + " is not in L'");
    a[v] = -p / d_;
  }
  return a;
}

bool Lattice::in_dual_lattice(const Cycle& x) const {
  for (std::size_t v = 0; v < rank(); ++v)
    if (scaled_pairing(x, v) % d_ != 0) return false;
  return true;
}

bool Lattice::in_lipman_cone(const Cycle& x) const {
  if (!in_dual_lattice(x)) return false;
  for (std::size_t v = 0; v < rank(); ++v)
    if (scaled_pairing(x, v) > 0) return false;
  return true;
}

std::vector<std::size_t> Lattice::dual_support(const Cycle& x) const {
  std::vector<std::size_t> out;
  for (std::size_t v = 0; v < rank(); ++v)
    if (scaled_pairing(x, v) != 0) out.push_back(v);
  return out;
}

HClass Lattice::class_of(const Cycle& x) const {
  return group_.class_of_dual_coords(dual_coordinates(x));
}

Cycle Lattice::representative(const HClass& h) const {
  Cycle c = zero();
  for (std::size_t i = 0; i < h.c.size(); ++i) {
    if (h.c[i] == 0) continue;
    c += h.c[i] * from_dual_coordinates(group_.generator_dual_coords(i));
  }
  Cycle r = c.fractional_part();
  if (class_of(r) != h) throw std::logic_error("representative lands in wrong class");
  return r;
}

Cycle Lattice::minimal_in_class(const HClass& h) const {
  return laufer(representative(h));
}

Cycle Lattice::laufer(const Cycle& x0, const ViolatorChoice& choose) const {
  const std::size_t n = rank();
  Cycle x = x0.denom() == d_ ? x0 : x0.rescaled(d_);
  if (!in_dual_lattice(x))
    throw std::invalid_argument("Laufer saturation needs a cycle in L'");
  std::vector<std::int64_t> p(n);
  for (std::size_t v = 0; v < n; ++v) p[v] = scaled_pairing(x, v);
  std::int64_t sum_euler = 0;
  for (std::size_t v = 0; v < n; ++v) sum_euler += -graph_.euler(v);
  std::int64_t lift = 0;
  for (std::size_t v = 0; v < n; ++v)
    lift += std::llabs(floor_div(x.scaled(v), d_));
  const std::int64_t cap = checked_mul(
      checked_mul(d_, sum_euler), static_cast<std::int64_t>(n * n) * (1 + lift));
  std::vector<std::size_t> violators;
  for (std::int64_t step = 0;; ++step) {
    violators.clear();
    for (std::size_t v = 0; v < n; ++v)
      if (p[v] > 0) violators.push_back(v);
    if (violators.empty()) return x;
    if (step >= cap)
      throw std::logic_error("Laufer saturation exceeded its iteration cap");
    std::size_t u = choose ? choose(violators) : violators.front();
    x.add_base(u);
    for (std::size_t v = 0; v < n; ++v) p[v] += d_ * form_[u][v];
  }
}

std::string Lattice::vertex_label(std::size_t v) const {
  return "E" + std::to_string(graph_.id(v));
}

Rationality artin_rationality(const Lattice& lat) {
  Rationality r;
  r.z_min = lat.laufer(lat.reduced_sum());
  r.chi_z_min = lat.chi(r.z_min);
  r.rational = r.chi_z_min == Rational(1);
  return r;
}

Cycle SubgraphComponent::project(const Lattice& parent, const Cycle& x) const {
  auto a = parent.dual_coordinates(x);
  std::vector<std::int64_t> sub(vertices.size());
  for (std::size_t k = 0; k < vertices.size(); ++k) sub[k] = a[vertices[k]];
  return lattice->from_dual_coordinates(sub);
}

std::vector<SubgraphComponent> subgraph_components(
    const Lattice& lat, const std::vector<std::size_t>& removed) {
  const auto& g = lat.graph();
  std::vector<bool> gone(g.size(), false);
  for (auto v : removed) gone.at(v) = true;
  std::vector<bool> seen(g.size(), false);
  std::vector<SubgraphComponent> out;
  for (std::size_t s = 0; s < g.size(); ++s) {
    if (gone[s] || seen[s]) continue;
    std::vector<std::size_t> comp, stack{s};
    seen[s] = true;
    while (!stack.empty()) {
      auto v = stack.back();
      stack.pop_back();
      comp.push_back(v);
      for (auto w : g.neighbors(v))
        if (!gone[w] && !seen[w]) {
          seen[w] = true;
          stack.push_back(w);
        }
    }
    std::sort(comp.begin(), comp.end());
    SubgraphComponent c;
    c.vertices = comp;
    c.lattice = std::make_shared<const Lattice>(g.induced(comp));
    if (!(c.project(lat, lat.canonical()) == c.lattice->canonical()))
      throw std::logic_error("projection does not preserve the canonical cycle");
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace deltainv
