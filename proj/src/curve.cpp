#include "deltainv/curve.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>

#include "deltainv/graph.hpp"

namespace deltainv {

namespace {

std::string vec_str(const IntVec& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s + ")";
}

// Every l with 0 <= l <= upper, lexicographically.
void for_box(const IntVec& upper, const std::function<void(const IntVec&)>& fn) {
  if (std::any_of(upper.begin(), upper.end(), [](std::int64_t u) { return u < 0; })) return;
  IntVec l(upper.size(), 0);
  while (true) {
    fn(l);
    std::size_t i = l.size();
    while (i > 0 && l[i - 1] == upper[i - 1]) l[--i] = 0;
    if (i == 0) return;
    ++l[i - 1];
  }
}

IntVec plus_ones(IntVec v) {
  for (auto& e : v) ++e;
  return v;
}

// S ∩ [0, c] without the minimality requirements, for inconsistent data.
struct BoxSet {
  IntVec c;
  std::set<IntVec> values;

  bool jump(const IntVec& l, std::size_t i) const {
    if (l[i] >= c[i]) return true;
    for (const auto& t : values) {
      if (t[i] != l[i]) continue;
      bool ok = true;
      for (std::size_t j = 0; j < c.size() && ok; ++j)
        if (j != i && t[j] < std::min(l[j], c[j])) ok = false;
      if (ok) return true;
    }
    return false;
  }

  // Steps down along the first (or last) positive coordinate of l.
  std::map<IntVec, std::int64_t> hilbert(bool last_coordinate) const {
    std::map<IntVec, std::int64_t> h;
    for_box(plus_ones(c), [&](const IntVec& l) {
      std::size_t i = l.size();
      for (std::size_t j = 0; j < l.size(); ++j)
        if (l[j] > 0 && (i == l.size() || last_coordinate)) i = j;
      if (i == l.size()) {
        h[l] = 0;
        return;
      }
      IntVec prev = l;
      --prev[i];
      h[l] = h.at(prev) + (jump(prev, i) ? 1 : 0);
    });
    return h;
  }

  BoxSet project(const std::vector<std::size_t>& J) const {
    BoxSet out;
    for (auto j : J) out.c.push_back(c[j]);
    for (const auto& t : values) {
      IntVec p;
      for (auto j : J) p.push_back(t[j]);
      out.values.insert(std::move(p));
    }
    return out;
  }
};

std::int64_t eval_extended(const IntVec& box, const std::map<IntVec, std::int64_t>& h,
                           const IntVec& l) {
  IntVec m(l.size());
  std::int64_t extra = 0;
  for (std::size_t i = 0; i < l.size(); ++i) {
    if (l[i] < 0) throw std::invalid_argument("Hilbert function argument " + vec_str(l) + " is negative");
    m[i] = std::min(l[i], box[i]);
    extra += l[i] - m[i];
  }
  return h.at(m) + extra;
}

// p(l) on [0, box] from h with the extension rule.
std::map<IntVec, std::int64_t> poincare_terms(const IntVec& hbox,
                                              const std::map<IntVec, std::int64_t>& h,
                                              const IntVec& box) {
  const std::size_t r = box.size();
  std::map<IntVec, std::int64_t> terms;
  for_box(box, [&](const IntVec& l) {
    std::int64_t p = 0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << r); ++mask) {
      IntVec m = l;
      int size = 0;
      for (std::size_t i = 0; i < r; ++i)
        if (mask >> i & 1) {
          ++m[i];
          ++size;
        }
      p += (size % 2 == 1 ? 1 : -1) * eval_extended(hbox, h, m);
    }
    if (p != 0) terms[l] = p;
  });
  return terms;
}

std::int64_t series_coefficient(const std::map<IntVec, std::int64_t>& terms, const IntVec& box,
                                const IntVec& l) {
  for (std::size_t i = 0; i < l.size(); ++i)
    if (l[i] > box[i]) return l.size() == 1 ? 1 : 0;
  auto it = terms.find(l);
  return it == terms.end() ? 0 : it->second;
}

}  // namespace

MultibranchCurve::MultibranchCurve(IntVec conductor, std::set<IntVec> values_in_box)
    : c_(std::move(conductor)), values_(std::move(values_in_box)) {
  using K = CurveError::Kind;
  if (c_.empty()) throw CurveError(K::kBadInput, "a curve needs at least one branch");
  for (auto e : c_)
    if (e < 0) throw CurveError(K::kBadInput, "conductor " + vec_str(c_) + " has a negative entry");
  for (const auto& s : values_) {
    if (s.size() != c_.size())
      throw CurveError(K::kBadInput, "value " + vec_str(s) + " has the wrong number of branches");
    for (std::size_t i = 0; i < s.size(); ++i)
      if (s[i] < 0 || s[i] > c_[i])
        throw CurveError(K::kBadInput, "value " + vec_str(s) + " lies outside the box [0, " +
                                           vec_str(c_) + "]");
  }
  if (!values_.count(IntVec(c_.size(), 0)))
    throw CurveError(K::kMissingZero, "0 is not in the value set");
  for (auto a = values_.begin(); a != values_.end(); ++a)
    for (auto b = a; b != values_.end(); ++b) {
      IntVec sum(c_.size());
      bool inside = true;
      for (std::size_t i = 0; i < c_.size(); ++i) {
        sum[i] = (*a)[i] + (*b)[i];
        if (sum[i] > c_[i]) inside = false;
      }
      if (inside && !values_.count(sum))
        throw CurveError(K::kNotClosed, vec_str(*a) + " + " + vec_str(*b) + " = " + vec_str(sum) +
                                            " is missing from the value set");
    }
  if (!values_.count(c_))
    throw CurveError(K::kBadConductor, "conductor " + vec_str(c_) + " is not in the value set");
  for (std::size_t i = 0; i < c_.size(); ++i) {
    if (c_[i] == 0) continue;
    IntVec lower = c_;
    --lower[i];
    if (values_.count(lower))
      throw CurveError(K::kBadConductor, "conductor " + vec_str(c_) + " is not minimal: " +
                                             vec_str(lower) + " is already a conductor");
  }
}

MultibranchCurve MultibranchCurve::from_generators(const std::vector<std::int64_t>& gens) {
  using K = CurveError::Kind;
  if (gens.empty()) throw CurveError(K::kBadInput, "no semigroup generators");
  std::int64_t g = 0;
  for (auto a : gens) {
    if (a <= 0) throw CurveError(K::kBadInput, "semigroup generators must be positive");
    g = std::gcd(g, a);
  }
  if (g != 1) throw CurveError(K::kBadInput, "semigroup generators must have gcd 1");
  const std::int64_t least = *std::min_element(gens.begin(), gens.end());
  // Membership by dynamic programming until `least` consecutive elements.
  std::vector<bool> in{true};
  std::int64_t run = 1, n = 0;
  while (run < least) {
    ++n;
    bool member = false;
    for (auto a : gens)
      if (a <= n && in[static_cast<std::size_t>(n - a)]) member = true;
    in.push_back(member);
    run = member ? run + 1 : 0;
  }
  std::int64_t c = 0;
  for (std::int64_t k = 0; k <= n; ++k)
    if (!in[static_cast<std::size_t>(k)]) c = k + 1;
  std::set<IntVec> values;
  for (std::int64_t k = 0; k <= c; ++k)
    if (in[static_cast<std::size_t>(k)]) values.insert({k});
  return MultibranchCurve({c}, std::move(values));
}

MultibranchCurve MultibranchCurve::ordinary(std::size_t r) {
  if (r == 0) throw CurveError(CurveError::Kind::kBadInput, "an ordinary tuple needs r >= 1");
  if (r == 1) return MultibranchCurve({0}, {{0}});
  return MultibranchCurve(IntVec(r, 1), {IntVec(r, 0), IntVec(r, 1)});
}

bool MultibranchCurve::contains(const IntVec& s) const {
  if (s.size() != c_.size()) throw std::invalid_argument("value " + vec_str(s) + " has the wrong number of branches");
  IntVec t(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] < 0) return false;
    t[i] = std::min(s[i], c_[i]);
  }
  return values_.count(t) > 0;
}

MultibranchCurve MultibranchCurve::restrict(const std::vector<std::size_t>& J) const {
  if (J.empty()) throw std::invalid_argument("restriction to no branches");
  for (std::size_t k = 0; k < J.size(); ++k)
    if (J[k] >= c_.size() || (k > 0 && J[k] <= J[k - 1]))
      throw std::invalid_argument("branch subset must be ascending and in range");
  BoxSet p = BoxSet{c_, values_}.project(J);
  // Lower the conductor while c - e_i is already in S, keeping membership intact.
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < p.c.size(); ++i) {
      if (p.c[i] == 0) continue;
      IntVec lower = p.c;
      --lower[i];
      if (!p.values.count(lower)) continue;
      std::set<IntVec> kept;
      for (const auto& t : p.values) {
        bool inside = true;
        for (std::size_t j = 0; j < t.size(); ++j)
          if (t[j] > lower[j]) inside = false;
        if (inside) kept.insert(t);
      }
      bool same = true;
      for_box(p.c, [&](const IntVec& t) {
        IntVec m(t.size());
        for (std::size_t j = 0; j < t.size(); ++j) m[j] = std::min(t[j], lower[j]);
        if ((p.values.count(t) > 0) != (kept.count(m) > 0)) same = false;
      });
      if (!same)
        throw CurveError(CurveError::Kind::kInconsistent,
                         "projected value set is not determined by its box at " + vec_str(lower));
      p.c = lower;
      p.values = std::move(kept);
      changed = true;
    }
  }
  return MultibranchCurve(p.c, p.values);
}

std::vector<std::int64_t> MultibranchCurve::gaps() const {
  if (c_.size() != 1) throw std::invalid_argument("gaps are defined for a single branch");
  std::vector<std::int64_t> out;
  for (std::int64_t k = 0; k < c_[0]; ++k)
    if (!values_.count({k})) out.push_back(k);
  return out;
}

std::string MultibranchCurve::to_text() const {
  std::ostringstream os;
  os << "branches " << c_.size() << "\nconductor";
  for (auto e : c_) os << ' ' << e;
  os << '\n';
  for (const auto& s : values_) {
    os << 's';
    for (auto e : s) os << ' ' << e;
    os << '\n';
  }
  return os.str();
}

MultibranchCurve parse_curve(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  std::optional<std::size_t> r;
  std::optional<IntVec> c;
  std::set<IntVec> values;
  auto numbers = [&](std::istringstream& ls) {
    IntVec v;
    std::string tok;
    while (ls >> tok) {
      std::size_t pos = 0;
      std::int64_t x = 0;
      try {
        x = std::stoll(tok, &pos);
      } catch (const std::exception&) {
        pos = 0;
      }
      if (pos != tok.size()) throw ParseError(lineno, "expected an integer, got '" + tok + "'");
      v.push_back(x);
    }
    return v;
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    IntVec v = numbers(ls);
    if (key == "branches") {
      if (r) throw ParseError(lineno, "duplicate branches declaration");
      if (v.size() != 1 || v[0] < 1) throw ParseError(lineno, "branches takes one positive integer");
      r = static_cast<std::size_t>(v[0]);
    } else if (key == "conductor") {
      if (c) throw ParseError(lineno, "duplicate conductor declaration");
      if (!r) throw ParseError(lineno, "conductor before branches");
      if (v.size() != *r) throw ParseError(lineno, "conductor needs " + std::to_string(*r) + " entries");
      c = v;
    } else if (key == "s") {
      if (!r) throw ParseError(lineno, "value before branches");
      if (v.size() != *r) throw ParseError(lineno, "value needs " + std::to_string(*r) + " entries");
      if (!values.insert(v).second) throw ParseError(lineno, "duplicate value " + vec_str(v));
    } else {
      throw ParseError(lineno, "unknown keyword '" + key + "'");
    }
  }
  if (!r) throw ParseError(lineno, "missing branches declaration");
  if (!c) throw ParseError(lineno, "missing conductor declaration");
  return MultibranchCurve(*c, std::move(values));
}

MultibranchCurve load_curve(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open curve file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_curve(ss.str());
}

HilbertTable::HilbertTable(IntVec box, std::map<IntVec, std::int64_t> values)
    : box_(std::move(box)), values_(std::move(values)) {}

std::int64_t HilbertTable::operator()(const IntVec& l) const {
  if (l.size() != box_.size()) throw std::invalid_argument("Hilbert argument has the wrong dimension");
  return eval_extended(box_, values_, l);
}

HilbertTable hilbert(const MultibranchCurve& curve) {
  BoxSet s{curve.conductor(), curve.values_in_box()};
  auto first = s.hilbert(false);
  auto second = s.hilbert(true);
  for (const auto& [l, v] : first)
    if (second.at(l) != v)
      throw CurveError(CurveError::Kind::kInconsistent,
                       "Hilbert function depends on the path at " + vec_str(l) + ": " +
                           std::to_string(v) + " vs " + std::to_string(second.at(l)));
  return HilbertTable(plus_ones(curve.conductor()), std::move(first));
}

std::int64_t CurvePoincare::coefficient(const IntVec& l) const {
  if (l.size() != box.size()) throw std::invalid_argument("Poincare argument has the wrong dimension");
  for (auto e : l)
    if (e < 0) return 0;
  return series_coefficient(terms, box, l);
}

std::int64_t CurvePoincare::value_at_one() const {
  if (!finite) throw std::logic_error("a single-branch Poincare series is not a polynomial");
  std::int64_t s = 0;
  for (const auto& [l, c] : terms) s += c;
  return s;
}

CurvePoincare poincare(const MultibranchCurve& curve, const std::vector<std::size_t>& J) {
  MultibranchCurve sub = J.size() == curve.branches() ? curve : curve.restrict(J);
  if (J.size() == curve.branches())
    for (std::size_t k = 0; k < J.size(); ++k)
      if (J[k] != k) throw std::invalid_argument("branch subset must be ascending and in range");
  HilbertTable h = hilbert(sub);
  CurvePoincare p;
  p.branches = J;
  p.box = plus_ones(sub.conductor());
  p.finite = J.size() >= 2;
  p.terms = poincare_terms(h.box(), h.values(), p.box);
  if (p.finite)
    for (const auto& [l, c] : p.terms)
      for (std::size_t i = 0; i < l.size(); ++i)
        if (l[i] >= sub.conductor()[i])
          throw CurveError(CurveError::Kind::kInconsistent,
                           "Poincare coefficient at " + vec_str(l) + " lies beyond the conductor");
  return p;
}

std::int64_t delta_branch(const MultibranchCurve& branch) {
  if (branch.branches() != 1) throw std::invalid_argument("delta_branch needs a single branch");
  const auto gaps = static_cast<std::int64_t>(branch.gaps().size());
  // Counting function of the semigroup series is n - delta from the conductor on.
  CurvePoincare p = poincare(branch, {0});
  const std::int64_t c = branch.conductor()[0];
  std::int64_t q[3] = {0, 0, 0};
  for (int k = 0; k < 3; ++k)
    for (std::int64_t l = 0; l < c + k; ++l) q[k] += p.coefficient({l});
  if (q[1] - q[0] != 1 || q[2] - q[1] != 1)
    throw CurveError(CurveError::Kind::kInconsistent, "semigroup counting function is not n - delta at the conductor");
  const std::int64_t pc = q[0] - c;
  if (-pc != gaps)
    throw CurveError(CurveError::Kind::kInconsistent,
                     "gap count " + std::to_string(gaps) + " differs from -pc = " + std::to_string(-pc));
  return gaps;
}

std::int64_t delta_total(const MultibranchCurve& curve) {
  const std::size_t r = curve.branches();
  std::int64_t delta = 0;
  if (r == 1) {
    delta = delta_branch(curve);
  } else {
    for (std::size_t i = 0; i < r; ++i) delta += delta_branch(curve.restrict({i}));
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << r); ++mask) {
      if (std::popcount(mask) < 2) continue;
      std::vector<std::size_t> J;
      for (std::size_t i = 0; i < r; ++i)
        if (mask >> i & 1) J.push_back(i);
      delta += (J.size() % 2 == 0 ? 1 : -1) * poincare(curve, J).value_at_one();
    }
  }
  HilbertTable h = hilbert(curve);
  for_box(IntVec(r, 1), [&](const IntVec& step) {
    IntVec l = curve.conductor();
    std::int64_t size = 0;
    for (std::size_t i = 0; i < r; ++i) {
      l[i] += step[i];
      size += l[i];
    }
    if (h(l) != size - delta)
      throw CurveError(CurveError::Kind::kInconsistent,
                       "h" + vec_str(l) + " = " + std::to_string(h(l)) + " but |l| - delta = " +
                           std::to_string(size - delta));
  });
  return delta;
}

InversionResult verify_inversion(const MultibranchCurve& curve) { return verify_inversion(curve, {}); }

InversionResult verify_inversion(const MultibranchCurve& curve, const SubcurveData& subcurves) {
  const std::size_t r = curve.branches();
  BoxSet full{curve.conductor(), curve.values_in_box()};
  const auto h = full.hilbert(false);
  struct Sub {
    std::vector<std::size_t> J;
    IntVec box;
    std::map<IntVec, std::int64_t> terms;
  };
  std::vector<Sub> subs;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << r); ++mask) {
    Sub s;
    for (std::size_t i = 0; i < r; ++i)
      if (mask >> i & 1) s.J.push_back(i);
    auto given = subcurves.find(s.J);
    if (given != subcurves.end() && given->second.branches() != s.J.size())
      throw std::invalid_argument("subcurve data has the wrong number of branches");
    BoxSet p = given == subcurves.end() ? full.project(s.J)
                                        : BoxSet{given->second.conductor(), given->second.values_in_box()};
    s.box = plus_ones(p.c);
    s.terms = poincare_terms(s.box, p.hilbert(false), s.box);
    subs.push_back(std::move(s));
  }
  InversionResult res;
  for_box(plus_ones(curve.conductor()), [&](const IntVec& l) {
    if (!res.ok) return;
    std::int64_t total = 0;
    for (const auto& s : subs) {
      IntVec upper;
      for (auto j : s.J) upper.push_back(l[j] - 1);
      std::int64_t partial = 0;
      for_box(upper, [&](const IntVec& m) { partial += series_coefficient(s.terms, s.box, m); });
      total += (s.J.size() % 2 == 1 ? 1 : -1) * partial;
    }
    if (total != h.at(l)) {
      res.ok = false;
      res.witness = l;
      res.hilbert_value = h.at(l);
      res.reconstructed = total;
    }
  });
  return res;
}

}  // namespace deltainv
