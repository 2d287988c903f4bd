#include "deltainv/arith.hpp"

#include <numeric>
#include <sstream>

namespace deltainv {

Rational Rational::from_wide(__int128 n, __int128 d) {
  if (d == 0) throw std::domain_error("rational with zero denominator");
  if (d < 0) n = -n, d = -d;
  __int128 a = n < 0 ? -n : n, b = d;
  while (b != 0) {
    __int128 t = a % b;
    a = b;
    b = t;
  }
  if (a > 1) n /= a, d /= a;
  constexpr __int128 lim = std::numeric_limits<std::int64_t>::max();
  if (n > lim || n < -lim || d > lim) throw std::overflow_error("rational exceeds 64 bits");
  Rational r;
  r.num_ = static_cast<std::int64_t>(n);
  r.den_ = static_cast<std::int64_t>(d);
  return r;
}

Rational::Rational(std::int64_t n, std::int64_t d) { *this = from_wide(n, d); }

std::int64_t Rational::floor() const { return floor_div(num_, den_); }

Rational operator+(const Rational& a, const Rational& b) {
  return Rational::from_wide(static_cast<__int128>(a.num_) * b.den_ +
                                 static_cast<__int128>(b.num_) * a.den_,
                             static_cast<__int128>(a.den_) * b.den_);
}

Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }

Rational operator*(const Rational& a, const Rational& b) {
  return Rational::from_wide(static_cast<__int128>(a.num_) * b.num_,
                             static_cast<__int128>(a.den_) * b.den_);
}

Rational operator/(const Rational& a, const Rational& b) {
  return Rational::from_wide(static_cast<__int128>(a.num_) * b.den_,
                             static_cast<__int128>(a.den_) * b.num_);
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  return static_cast<__int128>(a.num_) * b.den_ <=> static_cast<__int128>(b.num_) * a.den_;
}

std::string to_string(const Rational& q) {
  return std::to_string(q.numerator()) + "/" + std::to_string(q.denominator());
}

std::string to_string(const Integer& z) { return z.str(); }

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) {
  return -floor_div(-a, b);
}

std::int64_t floor_mod(std::int64_t a, std::int64_t b) {
  std::int64_t r = a % b;
  if (r != 0 && ((r < 0) != (b < 0))) r += b;
  return r;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r))
    throw std::overflow_error("64-bit overflow in cycle arithmetic");
  return r;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r))
    throw std::overflow_error("64-bit overflow in cycle arithmetic");
  return r;
}

Cycle::Cycle(std::vector<std::int64_t> scaled, std::int64_t denom)
    : num_(std::move(scaled)), den_(denom) {
  if (den_ <= 0) throw std::invalid_argument("cycle denominator must be positive");
}

Cycle Cycle::zero(std::size_t n, std::int64_t denom) {
  return Cycle(std::vector<std::int64_t>(n, 0), denom);
}

Cycle Cycle::from_rationals(const std::vector<Rational>& coeffs,
                            std::int64_t denom) {
  std::vector<std::int64_t> num;
  num.reserve(coeffs.size());
  for (const auto& q : coeffs) {
    if (denom % q.denominator() != 0)
      throw std::invalid_argument("coefficient " + to_string(q) +
                                  " has denominator not dividing " +
                                  std::to_string(denom));
    num.push_back(checked_mul(q.numerator(), denom / q.denominator()));
  }
  return Cycle(std::move(num), denom);
}

std::vector<Rational> Cycle::coeffs() const {
  std::vector<Rational> out;
  out.reserve(num_.size());
  for (auto v : num_) out.emplace_back(v, den_);
  return out;
}

bool Cycle::is_integral() const {
  for (auto v : num_)
    if (v % den_ != 0) return false;
  return true;
}

bool Cycle::is_zero() const {
  for (auto v : num_)
    if (v != 0) return false;
  return true;
}

bool Cycle::dominates(const Cycle& y) const {
  check_compatible(y);
  for (std::size_t i = 0; i < num_.size(); ++i)
    if (num_[i] < y.num_[i]) return false;
  return true;
}

Cycle Cycle::fractional_part() const {
  Cycle r = *this;
  for (auto& v : r.num_) v = floor_mod(v, den_);
  return r;
}

Cycle Cycle::rescaled(std::int64_t new_denom) const {
  std::vector<std::int64_t> num;
  num.reserve(num_.size());
  for (auto v : num_) {
    __int128 t = static_cast<__int128>(v) * new_denom;
    if (t % den_ != 0)
      throw std::invalid_argument("cycle not representable over denominator " +
                                  std::to_string(new_denom));
    num.push_back(static_cast<std::int64_t>(t / den_));
  }
  return Cycle(std::move(num), new_denom);
}

void Cycle::check_compatible(const Cycle& o) const {
  if (o.den_ != den_ || o.num_.size() != num_.size())
    throw std::invalid_argument("cycles from different lattices");
}

Cycle& Cycle::operator+=(const Cycle& o) {
  check_compatible(o);
  for (std::size_t i = 0; i < num_.size(); ++i)
    num_[i] = checked_add(num_[i], o.num_[i]);
  return *this;
}

Cycle& Cycle::operator-=(const Cycle& o) {
  check_compatible(o);
  for (std::size_t i = 0; i < num_.size(); ++i)
    num_[i] = checked_add(num_[i], -o.num_[i]);
  return *this;
}

Cycle& Cycle::operator*=(std::int64_t k) {
  for (auto& v : num_) v = checked_mul(v, k);
  return *this;
}

Cycle& Cycle::add_base(std::size_t i, std::int64_t k) {
  num_.at(i) = checked_add(num_[i], checked_mul(k, den_));
  return *this;
}

bool operator==(const Cycle& a, const Cycle& b) {
  if (a.num_.size() != b.num_.size()) return false;
  if (a.den_ == b.den_) return a.num_ == b.num_;
  for (std::size_t i = 0; i < a.num_.size(); ++i)
    if (static_cast<__int128>(a.num_[i]) * b.den_ !=
        static_cast<__int128>(b.num_[i]) * a.den_)
      return false;
  return true;
}

std::string Cycle::str() const {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < num_.size(); ++i) {
    if (i) os << ',';
    Rational q(num_[i], den_);
    os << q.numerator();
    if (q.denominator() != 1) os << '/' << q.denominator();
  }
  os << ')';
  return os.str();
}

}  // namespace deltainv
