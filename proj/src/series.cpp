#include "deltainv/series.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include <boost/multiprecision/cpp_int.hpp>

namespace deltainv {

namespace {

using BigRational = boost::multiprecision::cpp_rational;

std::vector<std::size_t> normalized_subset(const Lattice& lat,
                                           std::vector<std::size_t> s,
                                           const char* what) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  for (auto v : s)
    if (v >= lat.rank())
      throw std::invalid_argument(std::string(what) + ": vertex index " +
                                  std::to_string(v) + " out of range");
  return s;
}

Cycle over(const Lattice& lat, const Cycle& x) {
  return x.denom() == lat.det() ? x : x.rescaled(lat.det());
}

void add_product(Accumulator& acc, std::int64_t coeff, std::int64_t count) {
  std::int64_t r;
  if (__builtin_mul_overflow(coeff, count, &r))
    acc.add(Integer(coeff) * count);
  else
    acc.add(r);
}

// Class arithmetic on group indices for repeated addition of fixed cycles.
using i128 = __int128;

Integer to_integer(i128 v) {
  const bool neg = v < 0;
  unsigned __int128 u = neg ? -static_cast<unsigned __int128>(v) : static_cast<unsigned __int128>(v);
  Integer r = static_cast<std::uint64_t>(u >> 64);
  r <<= 64;
  r += static_cast<std::uint64_t>(u);
  return neg ? Integer(-r) : r;
}

i128 floor_div128(i128 a, i128 b) {
  i128 q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

// sum_{t=0}^{n-1} floor((a t + b) / m), m > 0.
i128 floor_sum(i128 n, i128 m, i128 a, i128 b) {
  i128 ans = 0;
  if (n <= 0) return 0;
  if (a < 0 || a >= m) {
    i128 q = floor_div128(a, m);
    ans += n * (n - 1) / 2 * q;
    a -= q * m;
  }
  if (b < 0 || b >= m) {
    i128 q = floor_div128(b, m);
    ans += n * q;
    b -= q * m;
  }
  while (true) {
    if (a >= m) {
      ans += n * (n - 1) / 2 * (a / m);
      a %= m;
    }
    if (b >= m) {
      ans += n * (b / m);
      b %= m;
    }
    i128 y = a * n + b;
    if (y < m) break;
    n = y / m;
    b = y % m;
    std::swap(m, a);
  }
  return ans;
}

struct ClassSteps {
  const DiscriminantGroup* group = nullptr;
  std::vector<std::vector<std::uint32_t>> step;  // step[i][c] = c + [a_i]
  std::vector<std::size_t> start;                // class index of each numerator term

  ClassSteps(const Lattice& lat, const ZetaSpec& spec) : group(&lat.group()) {
    const auto& g = lat.group();
    const std::size_t order = static_cast<std::size_t>(g.order());
    auto elems = g.elements();
    for (const auto& a : spec.denominators) {
      HClass ga = lat.class_of(a);
      std::vector<std::uint32_t> row(order);
      for (std::size_t c = 0; c < order; ++c)
        row[c] = static_cast<std::uint32_t>(g.index(g.add(elems[c], ga)));
      step.push_back(std::move(row));
    }
    for (const auto& m : spec.numerator) start.push_back(g.index(lat.class_of(m.exponent)));
  }

  // hit[c] = least c0 >= 0 with c + c0 [a_i] = target, or -1; also the order of [a_i].
  std::pair<std::vector<std::int64_t>, std::int64_t> hits(std::size_t i,
                                                          std::size_t target) const {
    std::vector<std::int64_t> hit(step[i].size(), -1);
    // Walk the orbit forward from 0 to get the order, then backward from target.
    std::int64_t ord = 1;
    for (std::size_t c = step[i][0]; c != 0; c = step[i][c]) ++ord;
    std::vector<std::uint32_t> back(step[i].size());
    for (std::size_t c = 0; c < step[i].size(); ++c) back[step[i][c]] = static_cast<std::uint32_t>(c);
    std::size_t cur = target;
    for (std::int64_t c0 = 0; c0 < ord; ++c0) {
      hit[cur] = c0;
      cur = back[cur];
    }
    return {std::move(hit), ord};
  }
};

class Counter {
 public:
  Counter(const Lattice& lat, const ZetaSpec& spec, const std::optional<HClass>& h,
          const std::vector<std::size_t>& I, const Cycle& x, CountMode mode)
      : spec_(spec), I_(I), mode_(mode), k_(spec.denominators.size()) {
    for (auto w : I_) x_.push_back(x.scaled(w));
    // The last two dimensions are summed in closed form; give them the largest extents.
    std::vector<std::size_t> dims(k_);
    std::iota(dims.begin(), dims.end(), 0);
    auto extent = [&](std::size_t i) {
      std::int64_t e = 0;
      for (std::size_t j = 0; j < I_.size(); ++j)
        e = std::max(e, ceil_div(std::max<std::int64_t>(x_[j], 0),
                                 spec.denominators[i].scaled(I_[j])));
      return e;
    };
    std::stable_sort(dims.begin(), dims.end(),
                     [&](auto a, auto b) { return extent(a) < extent(b); });
    for (auto i : dims) {
      std::vector<std::int64_t> row;
      for (auto w : I_) row.push_back(spec.denominators[i].scaled(w));
      a_.push_back(std::move(row));
    }
    if (h) {
      classes_.emplace(lat, spec);
      std::vector<std::vector<std::uint32_t>> permuted;
      for (auto i : dims) permuted.push_back(classes_->step[i]);
      classes_->step = std::move(permuted);
      target_ = lat.group().index(*h);
      if (k_ > 0) std::tie(hit_, ord_) = classes_->hits(k_ - 1, target_);
      if (k_ > 1) {
        ord_pair_ = 1;
        for (std::size_t c = classes_->step[k_ - 2][0]; c != 0; c = classes_->step[k_ - 2][c])
          ++ord_pair_;
      }
    }
  }

  Integer run() {
    Accumulator acc;
    std::vector<std::int64_t> p(I_.size());
    for (std::size_t t = 0; t < spec_.numerator.size(); ++t) {
      const auto& m = spec_.numerator[t];
      for (std::size_t j = 0; j < I_.size(); ++j) p[j] = m.exponent.scaled(I_[j]);
      std::size_t cls = classes_ ? classes_->start[t] : 0;
      if (k_ == 0) {
        if (alive(p) && (!classes_ || cls == target_)) acc.add(m.coeff);
        continue;
      }
      coeff_ = m.coeff;
      descend(0, p, cls, acc);
    }
    return acc.value();
  }

 private:
  bool alive(const std::vector<std::int64_t>& p) const {
    if (mode_ == CountMode::kNotDominating) {
      for (std::size_t j = 0; j < p.size(); ++j)
        if (p[j] < x_[j]) return true;
      return false;
    }
    for (std::size_t j = 0; j < p.size(); ++j)
      if (p[j] >= x_[j]) return false;
    return true;
  }

  void descend(std::size_t i, std::vector<std::int64_t>& p, std::size_t cls,
               Accumulator& acc) {
    const auto& a = a_[i];
    if (i + 2 == k_) {
      pair_sum(p, cls, acc);
      return;
    }
    if (i + 1 == k_) {
      std::int64_t t = mode_ == CountMode::kNotDominating
                           ? std::numeric_limits<std::int64_t>::min()
                           : std::numeric_limits<std::int64_t>::max();
      for (std::size_t j = 0; j < p.size(); ++j) {
        std::int64_t r = ceil_div(x_[j] - p[j], a[j]);
        t = mode_ == CountMode::kNotDominating ? std::max(t, r) : std::min(t, r);
      }
      if (t <= 0) return;
      std::int64_t n = t;
      if (classes_) {
        std::int64_t c0 = hit_[cls];
        n = (c0 < 0 || c0 >= t) ? 0 : (t - 1 - c0) / ord_ + 1;
      }
      if (n != 0) add_product(acc, coeff_, n);
      return;
    }
    std::int64_t steps = 0;
    while (alive(p)) {
      descend(i + 1, p, cls, acc);
      for (std::size_t j = 0; j < p.size(); ++j) p[j] += a[j];
      ++steps;
      if (classes_) cls = classes_->step[i][cls];
    }
    for (std::size_t j = 0; j < p.size(); ++j) p[j] -= steps * a[j];
  }

  // Last two dimensions: i = i0 + o*t with o the order of the class of a,
  // so the class of i*a depends on i0 only; j then runs over j0 + ord_*N
  // below the envelope ceil(env_w (x_w - p_w - i a_w) / b_w), min over w for
  // all-below counting and max otherwise. Pieces of the envelope are floor sums.
  void pair_sum(const std::vector<std::int64_t>& p0, std::size_t cls, Accumulator& acc) {
    const auto& a = a_[k_ - 2];
    const auto& b = a_[k_ - 1];
    const bool below = mode_ == CountMode::kStrictlyBelow;
    const std::size_t n = p0.size();
    const std::int64_t o = classes_ ? ord_pair_ : 1;
    const std::int64_t ob = classes_ ? ord_ : 1;
    std::vector<std::int64_t> p = p0;
    std::vector<i128> gamma(n), slope(n);
    i128 total = 0;
    std::vector<i128> cuts;
    for (std::int64_t i0 = 0; i0 < o && alive(p); ++i0) {
      const std::int64_t j0 = classes_ ? hit_[cls] : 0;
      if (j0 >= 0) {
        i128 T = below ? std::numeric_limits<std::int64_t>::max() : 0;
        for (std::size_t w = 0; w < n; ++w) {
          gamma[w] = static_cast<i128>(x_[w]) - p[w];
          slope[w] = static_cast<i128>(o) * a[w];
          i128 end = gamma[w] <= 0 ? 0 : floor_div128(gamma[w] + slope[w] - 1, slope[w]);
          T = below ? std::min(T, end) : std::max(T, end);
        }
        cuts.assign({0, T});
        for (std::size_t w = 0; w < n; ++w)
          for (std::size_t u = w + 1; u < n; ++u) {
            i128 den = slope[w] * b[u] - slope[u] * b[w];
            if (den == 0) continue;
            i128 at = floor_div128(gamma[w] * b[u] - gamma[u] * b[w], den) + 1;
            if (at > 0 && at < T) cuts.push_back(at);
          }
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
        for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
          const i128 lo = cuts[c], hi = cuts[c + 1];
          std::size_t best = 0;
          for (std::size_t w = 1; w < n; ++w) {
            // Compare (gamma_w - slope_w lo) / b_w with the current best.
            i128 lhs = (gamma[w] - slope[w] * lo) * b[best];
            i128 rhs = (gamma[best] - slope[best] * lo) * b[w];
            if (below ? lhs < rhs : lhs > rhs) best = w;
          }
          // #{j >= 0 : j = j0 mod ob, j < ceil(c/D)} = floor((c - 1 - D j0) / (D ob)) + 1.
          const i128 D = b[best];
          total += floor_sum(hi - lo, D * ob, -slope[best],
                             gamma[best] - slope[best] * lo - 1 - D * j0) +
                   (hi - lo);
        }
      }
      for (std::size_t w = 0; w < n; ++w) p[w] += a[w];
      if (classes_) cls = classes_->step[k_ - 2][cls];
    }
    if (total != 0) acc.add(Integer(coeff_) * to_integer(total));
  }

  const ZetaSpec& spec_;
  std::vector<std::size_t> I_;
  CountMode mode_;
  std::size_t k_;
  std::vector<std::int64_t> x_;
  std::vector<std::vector<std::int64_t>> a_;
  std::optional<ClassSteps> classes_;
  std::size_t target_ = 0;
  std::vector<std::int64_t> hit_;
  std::int64_t ord_ = 1;
  std::int64_t ord_pair_ = 1;
  std::int64_t coeff_ = 0;
};

}  // namespace

std::vector<std::size_t> all_vertices(const Lattice& lat) {
  std::vector<std::size_t> v(lat.rank());
  std::iota(v.begin(), v.end(), 0);
  return v;
}

ZetaSpec build_zeta(const Lattice& lat, const std::optional<Cycle>& twist,
                    const std::vector<std::size_t>& relative) {
  const auto& g = lat.graph();
  ZetaSpec spec;
  spec.twist = twist ? over(lat, *twist) : lat.zero();
  if (twist && !lat.in_lipman_cone(spec.twist))
    throw std::invalid_argument("twist " + spec.twist.str() +
                                " is not in the Lipman cone");
  spec.relative_set = normalized_subset(lat, relative, "relative set");
  std::vector<bool> rel(lat.rank(), false);
  for (auto v : spec.relative_set) rel[v] = true;

  std::map<Cycle, std::int64_t> num{{spec.twist, 1}};
  for (std::size_t v = 0; v < lat.rank(); ++v) {
    int e = static_cast<int>(g.valence(v)) - 2 + (rel[v] ? 1 : 0);
    for (int r = 0; r < e; ++r) {
      std::map<Cycle, std::int64_t> next;
      for (const auto& [m, c] : num) {
        next[m] += c;
        next[m + lat.dual(v)] -= c;
      }
      num = std::move(next);
    }
    for (int r = 0; r < -e; ++r) {
      spec.denominators.push_back(lat.dual(v));
      spec.denominator_vertices.push_back(v);
    }
  }
  for (const auto& [m, c] : num)
    if (c != 0) spec.numerator.push_back({c, m});
  return spec;
}

SparseSeries::SparseSeries(std::vector<std::size_t> vars, std::int64_t denom,
                           Rational bound, std::vector<std::size_t> region_vars)
    : vars_(std::move(vars)), denom_(denom), bound_(bound), region_(std::move(region_vars)) {}

bool SparseSeries::guaranteed(const Cycle& point) const {
  if (point.size() != vars_.size())
    throw std::invalid_argument("point has wrong number of coordinates");
  for (auto w : region_) {
    auto pos = std::lower_bound(vars_.begin(), vars_.end(), w) - vars_.begin();
    if (point.coeff(static_cast<std::size_t>(pos)) < bound_) return true;
  }
  return false;
}

Integer SparseSeries::coefficient(const Cycle& point) const {
  Cycle p = point.denom() == denom_ ? point : point.rescaled(denom_);
  if (!guaranteed(p))
    throw std::out_of_range("point " + p.str() + " is outside the expanded region");
  auto it = terms_.find(p);
  return it == terms_.end() ? Integer(0) : it->second;
}

Integer SparseSeries::coefficient_sum() const {
  Integer s = 0;
  for (const auto& [p, c] : terms_) s += c;
  return s;
}

void SparseSeries::add(const Cycle& point, const Integer& c) {
  if (c == 0) return;
  auto [it, fresh] = terms_.emplace(point, c);
  if (!fresh) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

std::string SparseSeries::dump() const {
  std::ostringstream os;
  for (const auto& [p, c] : terms_) {
    os << c;
    for (std::size_t i = 0; i < p.size(); ++i) os << ' ' << p.scaled(i) << '/' << denom_;
    os << '\n';
  }
  return os.str();
}

SparseSeries expand(const Lattice& lat, const ZetaSpec& spec, const Rational& bound,
                    std::vector<std::size_t> region) {
  if (bound <= Rational(0)) throw std::invalid_argument("expansion bound must be positive");
  if (region.empty()) region = all_vertices(lat);
  region = normalized_subset(lat, region, "expansion region");
  const std::int64_t d = lat.det();
  // l'_w < B  <=>  scaled l'_w < B*d.
  const Rational scaled_bound = bound * Rational(d);
  const std::int64_t cut = ceil_div(scaled_bound.numerator(), scaled_bound.denominator());
  SparseSeries out(all_vertices(lat), d, bound, region);
  const std::size_t k = spec.denominators.size();
  auto alive = [&](const Cycle& p) {
    for (auto w : region)
      if (p.scaled(w) < cut) return true;
    return false;
  };
  std::function<void(std::size_t, Cycle&, std::int64_t)> walk =
      [&](std::size_t i, Cycle& p, std::int64_t c) {
        if (i == k) {
          if (alive(p)) out.add(p, c);
          return;
        }
        Cycle q = p;
        while (alive(q)) {
          walk(i + 1, q, c);
          q += spec.denominators[i];
        }
      };
  for (const auto& m : spec.numerator) {
    Cycle p = m.exponent;
    walk(0, p, m.coeff);
  }
  return out;
}

SparseSeries h_part(const Lattice& lat, const SparseSeries& s, const HClass& h) {
  if (s.variables().size() != lat.rank())
    throw std::invalid_argument("class decomposition needs the series in all variables");
  SparseSeries out(s.variables(), s.denom(), s.bound(), s.region_vars());
  for (const auto& [p, c] : s.terms())
    if (lat.class_of(p) == h) out.add(p, c);
  return out;
}

SparseSeries reduce(const SparseSeries& s, const std::vector<std::size_t>& I) {
  std::vector<std::size_t> keep = I;
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
  if (keep.empty()) throw std::invalid_argument("reduction to an empty variable set");
  std::vector<std::size_t> pos;
  for (auto v : keep) {
    auto it = std::lower_bound(s.variables().begin(), s.variables().end(), v);
    if (it == s.variables().end() || *it != v)
      throw std::invalid_argument("reduction variable not present in series");
    pos.push_back(static_cast<std::size_t>(it - s.variables().begin()));
  }
  std::vector<std::size_t> region;
  for (auto v : s.region_vars())
    if (std::binary_search(keep.begin(), keep.end(), v)) region.push_back(v);
  if (region.empty())
    throw std::invalid_argument(
        "expansion region does not meet the kept variables; fibers may be incomplete");
  SparseSeries out(keep, s.denom(), s.bound(), region);
  for (const auto& [p, c] : s.terms()) {
    std::vector<std::int64_t> q;
    for (auto i : pos) q.push_back(p.scaled(i));
    out.add(Cycle(std::move(q), s.denom()), c);
  }
  return out;
}

Integer count_coefficients(const Lattice& lat, const ZetaSpec& spec,
                           const std::optional<HClass>& h,
                           const std::vector<std::size_t>& I, const Cycle& x,
                           CountMode mode) {
  auto set = normalized_subset(lat, I, "counting set");
  if (set.empty()) throw std::invalid_argument("counting over an empty vertex set");
  return Counter(lat, spec, h, set, over(lat, x), mode).run();
}

double count_cost_estimate(const Lattice& lat, const ZetaSpec& spec,
                           const std::vector<std::size_t>& I, const Cycle& x,
                           CountMode mode) {
  Cycle y = over(lat, x);
  const std::size_t k = spec.denominators.size();
  if (k <= 1) return static_cast<double>(spec.numerator.size());
  std::vector<double> ext;
  for (const auto& a : spec.denominators) {
    double e = mode == CountMode::kNotDominating ? 0.0 : 1e300;
    for (auto w : I) {
      double r = std::max<double>(0.0, static_cast<double>(y.scaled(w))) /
                 static_cast<double>(a.scaled(w));
      e = mode == CountMode::kNotDominating ? std::max(e, r) : std::min(e, r);
    }
    ext.push_back(e + 1);
  }
  std::sort(ext.begin(), ext.end());
  double nodes = 1;
  for (std::size_t i = 0; i + 2 < k; ++i) nodes *= ext[i] / static_cast<double>(i + 1);
  const double m = static_cast<double>(I.size());
  nodes *= std::min(ext[k - 2], static_cast<double>(lat.group().order())) * (m * m + 1);
  return nodes * static_cast<double>(spec.numerator.size());
}

Cycle deep_probe(const Lattice& lat, const HClass& h, int margin) {
  Cycle base = lat.canonical();
  for (std::size_t v = 0; v < lat.rank(); ++v) base += margin * lat.dual(v);
  const auto& g = lat.group();
  return base + lat.minimal_in_class(g.sub(h, lat.class_of(base)));
}

Integer sw_norm(const Lattice& lat, const HClass& h) {
  ZetaSpec z = build_zeta(lat);
  auto all = all_vertices(lat);
  Rational chi_r = lat.chi(lat.representative(h));
  Integer values[2];
  for (int margin = 1; margin <= 2; ++margin) {
    Cycle p = deep_probe(lat, h, margin);
    Rational diff = lat.chi(p) - chi_r;
    if (!diff.is_integer()) throw std::logic_error("chi difference within a class is not integral");
    values[margin - 1] = counting_Q(lat, z, h, all, p) - diff.numerator();
  }
  if (values[0] != values[1])
    throw StabilizationError("normalized SW value for class " + lat.group().str(h) +
                             " did not stabilize: " + to_string(values[0]) + " vs " +
                             to_string(values[1]));
  return values[0];
}

Integer periodic_constant_full(const Lattice& lat, const ZetaSpec& spec, const HClass& h) {
  if (!spec.relative_set.empty())
    throw std::invalid_argument("closed-form periodic constant needs a zeta function without relative factors");
  if (spec.twist.is_zero()) return sw_norm(lat, h);
  const auto& g = lat.group();
  HClass shifted = g.sub(h, lat.class_of(spec.twist));
  Rational diff = lat.chi(lat.representative(h) - spec.twist) -
                  lat.chi(lat.representative(shifted));
  if (!diff.is_integer()) throw std::logic_error("chi difference within a class is not integral");
  return sw_norm(lat, shifted) + diff.numerator();
}

namespace {

using Matrix = std::vector<std::vector<BigRational>>;

// Inverse of a square rational matrix, nullopt if singular.
std::optional<Matrix> inverse(Matrix a) {
  const std::size_t n = a.size();
  for (std::size_t r = 0; r < n; ++r) {
    a[r].resize(2 * n, 0);
    a[r][n + r] = 1;
  }
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && a[p][c] == 0) ++p;
    if (p == n) return std::nullopt;
    std::swap(a[p], a[c]);
    BigRational piv = a[c][c];
    for (auto& e : a[c]) e /= piv;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || a[r][c] == 0) continue;
      BigRational f = a[r][c];
      for (std::size_t j = 0; j < 2 * n; ++j) a[r][j] -= f * a[c][j];
    }
  }
  Matrix inv(n, std::vector<BigRational>(n));
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) inv[r][c] = a[r][n + c];
  return inv;
}

// y = sum_{v in I} lambda_v E*_v|_I with every lambda_v > 0.
class InteriorTest {
 public:
  InteriorTest(const Lattice& lat, const std::vector<std::size_t>& I) {
    Matrix a(I.size(), std::vector<BigRational>(I.size()));
    for (std::size_t r = 0; r < I.size(); ++r)
      for (std::size_t c = 0; c < I.size(); ++c)
        a[r][c] = BigRational(lat.dual(I[c]).scaled(I[r]), lat.det());
    inv_ = *inverse(a);
  }

  bool operator()(const std::vector<std::int64_t>& y) const {
    for (const auto& row : inv_) {
      BigRational s = 0;
      for (std::size_t c = 0; c < row.size(); ++c) s += row[c] * y[c];
      if (s <= 0) return false;
    }
    return true;
  }

 private:
  Matrix inv_;
};

// Smallest totals first within a box of side 8; d * sum E*_v|_I if none.
std::vector<std::vector<std::int64_t>> interior_directions(const Lattice& lat,
                                                           const std::vector<std::size_t>& I,
                                                           const InteriorTest& interior,
                                                           std::size_t limit) {
  const std::size_t m = I.size();
  std::vector<std::vector<std::int64_t>> out;
  const auto mi = static_cast<std::int64_t>(m);
  for (std::int64_t total = mi; total <= 8 * mi && out.size() < limit; ++total) {
    std::vector<std::int64_t> y(m, 1);
    std::function<void(std::size_t, std::int64_t)> fill = [&](std::size_t i, std::int64_t left) {
      if (out.size() >= limit) return;
      if (i + 1 == m) {
        if (left < 1 || left > 8) return;
        y[i] = left;
        if (interior(y)) out.push_back(y);
        return;
      }
      for (std::int64_t c = 1; c <= std::min<std::int64_t>(8, left - (mi - static_cast<std::int64_t>(i) - 1)); ++c) {
        y[i] = c;
        fill(i + 1, left - c);
      }
    };
    fill(0, total);
  }
  if (out.empty()) {
    std::vector<std::int64_t> y(m, 0);
    for (auto v : I)
      for (std::size_t r = 0; r < m; ++r) y[r] += lat.dual(v).scaled(I[r]);
    std::int64_t g = 0;
    for (auto e : y) g = std::gcd(g, e);
    for (auto& e : y) e /= g;
    out.push_back(y);
  }
  return out;
}

// Counting along x0 + k*v amounts to counting points of a coset of
// {m in Z^K : sum m_i [a_i] = 0} in {m >= 0, A m < x} (all-below mode) or
// outside {m >= 0, A m >= x}, A the rows of the a_i on I. For large k the
// region moves as P_0 + k*P(v), P(v) cut out by v in place of x, so the count
// is polynomial in k once every vertex of P(v) lies in that lattice. Each
// vertex is M v for the inverse M of a nonsingular block of A; these are the
// maps returned, as K x |I| matrices.
std::vector<Matrix> vertex_maps(const ZetaSpec& spec, const std::vector<std::size_t>& I,
                                const std::vector<std::int64_t>& y, CountMode mode) {
  const bool below = mode == CountMode::kStrictlyBelow;
  const std::size_t K = spec.denominators.size();
  const std::size_t m = I.size();
  auto entry = [&](std::size_t i, std::size_t w) {
    return BigRational(spec.denominators[i].scaled(I[w]), spec.denominators[i].denom());
  };
  std::set<Matrix> out;
  for (std::uint64_t smask = 1; smask < (std::uint64_t{1} << K); ++smask) {
    std::vector<std::size_t> S;
    for (std::size_t i = 0; i < K; ++i)
      if (smask >> i & 1) S.push_back(i);
    for (std::uint64_t jmask = 1; jmask < (std::uint64_t{1} << m); ++jmask) {
      if (static_cast<std::size_t>(std::popcount(jmask)) != S.size()) continue;
      std::vector<std::size_t> J;
      for (std::size_t j = 0; j < m; ++j)
        if (jmask >> j & 1) J.push_back(j);
      const std::size_t n = S.size();
      Matrix a(n, std::vector<BigRational>(n));
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) a[r][c] = entry(S[c], J[r]);
      auto inv = inverse(a);
      if (!inv) continue;
      Matrix M(K, std::vector<BigRational>(m, 0));
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) M[S[r]][J[c]] = (*inv)[r][c];
      std::vector<BigRational> u(K, 0);
      bool feasible = true;
      for (std::size_t i = 0; i < K; ++i) {
        for (std::size_t w = 0; w < m; ++w) u[i] += M[i][w] * y[w];
        if (u[i] < 0) feasible = false;
      }
      for (std::size_t w = 0; w < m && feasible; ++w) {
        BigRational row = 0;
        for (std::size_t i = 0; i < K; ++i)
          if (u[i] != 0) row += u[i] * entry(i, w);
        feasible = below ? row <= y[w] : row >= y[w];
      }
      if (feasible) out.insert(std::move(M));
    }
  }
  return {out.begin(), out.end()};
}

struct Congruence {
  std::vector<Integer> row;
  Integer modulus;
};

// M v integral and sum_i (M v)_i [a_i] = 0, written as row . v = 0 mod modulus.
std::vector<Congruence> period_congruences(const Lattice& lat, const ZetaSpec& spec,
                                           const std::vector<Matrix>& maps) {
  const auto& grp = lat.group();
  const auto& factors = grp.invariant_factors();
  std::vector<Congruence> out;
  for (const auto& M : maps) {
    Integer D = 1;
    for (const auto& r : M)
      for (const auto& e : r) D = boost::multiprecision::lcm(D, boost::multiprecision::denominator(e));
    const std::size_t m = M.empty() ? 0 : M[0].size();
    std::vector<std::vector<Integer>> N(M.size(), std::vector<Integer>(m));
    for (std::size_t i = 0; i < M.size(); ++i)
      for (std::size_t w = 0; w < m; ++w)
        N[i][w] = boost::multiprecision::numerator(M[i][w]) * (D / boost::multiprecision::denominator(M[i][w]));
    if (D > 1)
      for (const auto& r : N) out.push_back({r, D});
    for (std::size_t j = 0; j < factors.size(); ++j) {
      std::vector<Integer> row(m, 0);
      for (std::size_t i = 0; i < M.size(); ++i) {
        const std::int64_t g = grp.class_of_dual(spec.denominator_vertices[i]).c[j];
        if (g == 0) continue;
        for (std::size_t w = 0; w < m; ++w) row[w] += g * N[i][w];
      }
      out.push_back({std::move(row), factors[j] * D});
    }
  }
  return out;
}

Integer mod_dot(const std::vector<Integer>& row, const std::vector<Integer>& v, const Integer& mod) {
  Integer s = 0;
  for (std::size_t i = 0; i < row.size(); ++i) s += row[i] * v[i];
  s %= mod;
  if (s < 0) s += mod;
  return s;
}

bool satisfies(const std::vector<Congruence>& congs, const std::vector<Integer>& v) {
  for (const auto& c : congs)
    if (mod_dot(c.row, v, c.modulus) != 0) return false;
  return true;
}

std::vector<Integer> widen(const std::vector<std::int64_t>& y) { return {y.begin(), y.end()}; }

// Least s with s*y satisfying every congruence.
Integer ray_period(const std::vector<Congruence>& congs, const std::vector<std::int64_t>& y) {
  Integer s = 1;
  auto wy = widen(y);
  for (const auto& c : congs) {
    Integer r = mod_dot(c.row, wy, c.modulus);
    s = boost::multiprecision::lcm(s, c.modulus / boost::multiprecision::gcd(c.modulus, r));
  }
  return s;
}

using Basis = std::vector<std::vector<Integer>>;

void lll_reduce(Basis& b) {
  const std::size_t n = b.size();
  if (n < 2) return;
  auto to_ld = [](const Integer& x) { return x.convert_to<long double>(); };
  std::vector<std::vector<long double>> star(n);
  std::vector<std::vector<long double>> mu(n, std::vector<long double>(n, 0));
  std::vector<long double> B(n);
  auto gram_schmidt = [&] {
    for (std::size_t i = 0; i < n; ++i) {
      star[i].assign(b[i].size(), 0);
      for (std::size_t t = 0; t < b[i].size(); ++t) star[i][t] = to_ld(b[i][t]);
      for (std::size_t j = 0; j < i; ++j) {
        long double d = 0;
        for (std::size_t t = 0; t < b[i].size(); ++t) d += to_ld(b[i][t]) * star[j][t];
        mu[i][j] = B[j] > 0 ? d / B[j] : 0;
        for (std::size_t t = 0; t < b[i].size(); ++t) star[i][t] -= mu[i][j] * star[j][t];
      }
      B[i] = 0;
      for (auto e : star[i]) B[i] += e * e;
    }
  };
  std::size_t k = 1;
  for (int guard = 0; k < n && guard < 100000; ++guard) {
    gram_schmidt();
    for (std::size_t j = k; j-- > 0;) {
      long double q = std::round(mu[k][j]);
      if (q == 0 || !std::isfinite(q)) continue;
      Integer qi = static_cast<std::int64_t>(std::clamp<long double>(q, -9e18L, 9e18L));
      for (std::size_t t = 0; t < b[k].size(); ++t) b[k][t] -= qi * b[j][t];
      gram_schmidt();
    }
    if (B[k] >= (0.75L - mu[k][k - 1] * mu[k][k - 1]) * B[k - 1]) {
      ++k;
    } else {
      std::swap(b[k], b[k - 1]);
      k = std::max<std::size_t>(k - 1, 1);
    }
  }
}

// Reduced basis of {v in Z^m : every congruence holds}.
Basis period_lattice(std::size_t m, const std::vector<Congruence>& congs) {
  Basis b(m, std::vector<Integer>(m, 0));
  for (std::size_t i = 0; i < m; ++i) b[i][i] = 1;
  for (const auto& c : congs) {
    std::vector<Integer> e(m + 1);
    bool trivial = true;
    for (std::size_t j = 0; j < m; ++j) {
      e[j] = mod_dot(c.row, b[j], c.modulus);
      if (e[j] != 0) trivial = false;
    }
    if (trivial) continue;
    e[m] = c.modulus;
    // Column operations reduce e to a single nonzero entry; the other
    // columns of the transform span the kernel of alpha -> e . alpha.
    Basis U(m + 1, std::vector<Integer>(m + 1, 0));
    for (std::size_t i = 0; i <= m; ++i) U[i][i] = 1;
    while (true) {
      std::size_t p = m + 1;
      for (std::size_t j = 0; j <= m; ++j)
        if (e[j] != 0 && (p == m + 1 || abs(e[j]) < abs(e[p]))) p = j;
      bool done = true;
      for (std::size_t j = 0; j <= m; ++j) {
        if (j == p || e[j] == 0) continue;
        Integer f = e[j] / e[p];
        e[j] -= f * e[p];
        for (std::size_t i = 0; i <= m; ++i) U[i][j] -= f * U[i][p];
        if (e[j] != 0) done = false;
      }
      if (done) {
        Basis next;
        for (std::size_t j = 0; j <= m; ++j) {
          if (j == p) continue;
          std::vector<Integer> v(m, 0);
          for (std::size_t i = 0; i < m; ++i)
            for (std::size_t t = 0; t < m; ++t) v[t] += U[i][j] * b[i][t];
          next.push_back(std::move(v));
        }
        b = std::move(next);
        break;
      }
    }
    lll_reduce(b);
  }
  return b;
}

struct RayPlan {
  std::vector<std::int64_t> direction;
  std::int64_t stride = 1;
  double cost = 0;
};

std::optional<std::vector<std::int64_t>> narrow(const std::vector<Integer>& v) {
  std::vector<std::int64_t> out;
  for (const auto& e : v) {
    if (abs(e) > (std::int64_t{1} << 40)) return std::nullopt;
    out.push_back(static_cast<std::int64_t>(e));
  }
  return out;
}

// Candidate rays, cheapest first: short interior vectors of the period
// lattice, and small interior directions at their exact period.
std::vector<RayPlan> ray_plans(const Lattice& lat, const ZetaSpec& spec,
                               const std::vector<std::size_t>& I, const Cycle& base,
                               CountMode mode) {
  const std::size_t m = I.size();
  InteriorTest interior(lat, I);
  auto dirs = interior_directions(lat, I, interior, 8);
  // d * sum_v lambda_v E*_v|_I, weighted towards one vertex or none: such
  // directions often cut out polytopes with fewer vertices.
  for (std::size_t u = 0; u <= m; ++u)
    for (std::int64_t weight : {4, 16}) {
      if (u == m && weight != 4) continue;
      std::vector<std::int64_t> y(m, 0);
      for (std::size_t c = 0; c < m; ++c) {
        const std::int64_t lambda = c == u ? weight : 1;
        for (std::size_t r = 0; r < m; ++r) y[r] += lambda * lat.dual(I[c]).scaled(I[r]);
      }
      std::int64_t g = 0;
      for (auto e : y) g = std::gcd(g, e);
      for (auto& e : y) e /= g;
      if (std::find(dirs.begin(), dirs.end(), y) == dirs.end()) dirs.push_back(y);
    }
  auto congs_at = [&](const std::vector<std::int64_t>& y) {
    return period_congruences(lat, spec, vertex_maps(spec, I, y, mode));
  };
  auto cost_of = [&](const std::vector<std::int64_t>& v, std::int64_t stride) {
    Cycle x = base;
    for (std::size_t j = 0; j < m; ++j) x.add_base(I[j], 8 * stride * v[j]);
    return count_cost_estimate(lat, spec, I, x, mode);
  };
  std::vector<RayPlan> plans;
  std::set<std::vector<std::int64_t>> seen;
  for (const auto& y : dirs) {
    auto congs = congs_at(y);
    Integer s = ray_period(congs, y);
    if (s <= (std::int64_t{1} << 40)) {
      auto si = static_cast<std::int64_t>(s);
      plans.push_back({y, si, cost_of(y, si)});
    }
    Basis b = period_lattice(m, congs);
    const int R = m <= 2 ? 6 : m <= 4 ? 3 : 2;
    std::vector<int> coef(m, -R);
    std::vector<std::pair<Integer, std::vector<std::int64_t>>> found;
    while (true) {
      std::vector<Integer> v(m, 0);
      for (std::size_t j = 0; j < m; ++j)
        if (coef[j] != 0)
          for (std::size_t t = 0; t < m; ++t) v[t] += coef[j] * b[j][t];
      bool positive = std::all_of(v.begin(), v.end(), [](const Integer& e) { return e > 0; });
      if (positive) {
        auto vi = narrow(v);
        if (vi && interior(*vi)) {
          Integer top = *std::max_element(v.begin(), v.end());
          found.emplace_back(top, *vi);
        }
      }
      std::size_t j = 0;
      while (j < m && coef[j] == R) coef[j++] = -R;
      if (j == m) break;
      ++coef[j];
    }
    std::sort(found.begin(), found.end());
    int checked = 0;
    for (const auto& [top, v] : found) {
      if (checked >= 6) break;
      if (!seen.insert(v).second) continue;
      ++checked;
      // v has to be a period for the vertices of its own region too.
      if (!satisfies(congs_at(v), widen(v))) continue;
      plans.push_back({v, 1, cost_of(v, 1)});
    }
  }
  std::stable_sort(plans.begin(), plans.end(),
                   [](const RayPlan& a, const RayPlan& b) { return a.cost < b.cost; });
  return plans;
}

Integer binomial_neg(std::int64_t n, int i) {
  // C(-n, i) = (-1)^i C(n + i - 1, i)
  Integer c = 1;
  for (int j = 0; j < i; ++j) c = c * (n + j) / (j + 1);
  return (i % 2 == 0) ? c : Integer(-c);
}

struct PolyFit {
  int degree = -1;
  int start = 0;
  Integer at_zero;
};

// Minimal degree D <= dmax whose (D+1)-st differences vanish on the last
// `window` positions; the regime is then extended back as far as it holds.
// Sample i sits at ray position offset + i; the extrapolation is to position 0.
std::optional<PolyFit> fit_tail(const std::vector<Integer>& f, int dmax, int window,
                                std::int64_t offset = 0) {
  std::vector<std::vector<Integer>> diff{f};
  for (int D = 0; D <= dmax; ++D) {
    const auto& prev = diff.back();
    if (static_cast<int>(prev.size()) < 2) return std::nullopt;
    std::vector<Integer> next(prev.size() - 1);
    for (std::size_t i = 0; i + 1 < prev.size(); ++i) next[i] = prev[i + 1] - prev[i];
    diff.push_back(next);
    const auto& top = diff.back();
    if (static_cast<int>(top.size()) < window) return std::nullopt;
    bool zero_tail = true;
    for (int i = static_cast<int>(top.size()) - window; i < static_cast<int>(top.size()); ++i)
      if (top[i] != 0) zero_tail = false;
    if (!zero_tail) continue;
    int start = static_cast<int>(top.size()) - window;
    while (start > 0 && top[start - 1] == 0) --start;
    PolyFit fit;
    fit.degree = D;
    fit.start = start;
    fit.at_zero = 0;
    for (int i = 0; i <= D; ++i)
      fit.at_zero += binomial_neg(start + offset, i) * diff[i][start];
    return fit;
  }
  return std::nullopt;
}

}  // namespace

FitResult periodic_constant_reduced(const Lattice& lat, const ZetaSpec& spec,
                                    const HClass& h, const std::vector<std::size_t>& I_in,
                                    const FitParams& params, CountMode mode) {
  auto I = normalized_subset(lat, I_in, "periodic constant");
  if (I.empty()) throw std::invalid_argument("periodic constant over an empty vertex set");
  FitResult res;
  const Cycle base = lat.representative(h);
  const int dmax = params.max_degree >= 0 ? params.max_degree
                                          : static_cast<int>(spec.denominators.size()) + 2;
  const int window = std::max(params.window, 2);
  std::vector<RayPlan> plans;
  if (params.stride > 0) {
    InteriorTest interior(lat, I);
    plans.push_back({interior_directions(lat, I, interior, 1).front(), params.stride, 0});
  } else {
    plans = ray_plans(lat, spec, I, base, mode);
    if (static_cast<int>(plans.size()) > params.max_strides) plans.resize(params.max_strides);
  }
  std::ostringstream diag;
  for (const auto& plan : plans) {
    const std::int64_t s = plan.stride;
    const auto& dir = plan.direction;
    std::string label = "ray (";
    for (std::size_t j = 0; j < dir.size(); ++j) label += (j ? "," : "") + std::to_string(dir[j]);
    label += ") stride " + std::to_string(s);
    auto point = [&](std::int64_t k) {
      Cycle x = base;
      for (std::size_t j = 0; j < I.size(); ++j)
        x.add_base(I[j], checked_mul(checked_mul(k, s), dir[j]));
      return x;
    };
    auto too_costly = [&](std::int64_t k) {
      try {
        return count_cost_estimate(lat, spec, I, point(k), mode) > params.max_cost;
      } catch (const std::overflow_error&) {
        return true;
      }
    };
    std::map<std::int64_t, Integer> cache;
    auto sample = [&](std::int64_t k) {
      auto it = cache.find(k);
      if (it == cache.end()) it = cache.emplace(k, count_coefficients(lat, spec, h, I, point(k), mode)).first;
      return it->second;
    };
    std::vector<Integer> f;
    std::optional<PolyFit> fit;
    bool costly = false;
    for (int k = 0; k < params.max_samples && !costly; ++k) {
      if (too_costly(k)) {
        diag << label << ": sample cost too high at k=" << k << "; ";
        costly = true;
        break;
      }
      f.push_back(sample(k));
      fit = fit_tail(f, dmax, window);
      if (!fit) continue;
      // Second fit at twice the stride, from the detected regime on.
      const std::int64_t j0 = (fit->start + 1) / 2;
      std::vector<Integer> g;
      std::optional<PolyFit> gfit;
      for (std::int64_t j = j0; j < j0 + dmax + 2 + window + 4; ++j) {
        if (too_costly(2 * j)) {
          diag << label << ": cost too high at k=" << 2 * j << " for the doubled stride; ";
          costly = true;
          break;
        }
        g.push_back(sample(2 * j));
        gfit = fit_tail(g, dmax, window, j0);
        if (gfit) break;
      }
      if (gfit && gfit->at_zero == fit->at_zero) {
        res.status = FitResult::Status::kOk;
        res.value = fit->at_zero;
        res.stride = s;
        res.direction = dir;
        res.degree = std::max(fit->degree, gfit->degree);
        res.regime_start = fit->start;
        return res;
      }
    }
    // Plans come cheapest first, so a later one would cost at least as much.
    if (costly) break;
    diag << label << ": no stable fit within " << params.max_samples << " samples; ";
  }
  res.diagnostic = diag.str();
  return res;
}

bool verify_symmetry(const Lattice& lat, const ZetaSpec& spec) {
  if (!spec.is_plain())
    throw std::invalid_argument("symmetry check applies to the untwisted zeta function");
  const auto& g = lat.graph();
  Cycle shift = lat.zero();
  for (std::size_t v = 0; v < lat.rank(); ++v)
    shift += (static_cast<std::int64_t>(g.valence(v)) - 2) * lat.dual(v);
  if (shift != lat.canonical() - lat.reduced_sum()) return false;
  Cycle total = shift;
  for (const auto& a : spec.denominators) total += a;
  const std::int64_t sign = spec.denominators.size() % 2 == 0 ? 1 : -1;
  std::map<Cycle, std::int64_t> num, mirrored;
  for (const auto& m : spec.numerator) {
    num[m.exponent] += m.coeff;
    mirrored[total - m.exponent] += sign * m.coeff;
  }
  return num == mirrored;
}

SurgeryReport surgery_check(const Lattice& lat, const std::vector<std::size_t>& I,
                            const Cycle& x_in) {
  Cycle x = over(lat, x_in);
  auto set = normalized_subset(lat, I, "surgery set");
  ZetaSpec z = build_zeta(lat);
  HClass h = lat.class_of(x);
  SurgeryReport rep;
  rep.full = counting_Q(lat, z, h, all_vertices(lat), x);
  rep.reduced = set.empty() ? Integer(0) : counting_Q(lat, z, h, set, x);
  rep.residual = rep.full - rep.reduced;
  for (const auto& comp : subgraph_components(lat, set)) {
    SurgeryTerm t;
    t.vertices = comp.vertices;
    t.projected = comp.project(lat, x);
    const Lattice& sub = *comp.lattice;
    t.value = counting_Q(sub, build_zeta(sub), sub.class_of(t.projected), all_vertices(sub),
                         t.projected);
    rep.residual -= t.value;
    rep.components.push_back(std::move(t));
  }
  return rep;
}

}  // namespace deltainv
