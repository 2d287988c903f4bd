#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace deltainv {

using Integer = boost::multiprecision::cpp_int;

/// Exact rational with 64-bit parts, always in lowest terms with a positive
/// denominator. Intermediate products use 128 bits; results that do not fit
/// throw std::overflow_error.
class Rational {
 public:
  Rational() = default;
  Rational(std::int64_t n) : num_(n) {}  // NOLINT: implicit by design
  Rational(std::int64_t n, std::int64_t d);

  std::int64_t numerator() const { return num_; }
  std::int64_t denominator() const { return den_; }
  bool is_integer() const { return den_ == 1; }
  std::int64_t floor() const;

  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a) { return Rational(-a.num_, a.den_); }
  friend bool operator==(const Rational&, const Rational&) = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

  static Rational from_wide(__int128 n, __int128 d);

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

/// "p/q" with q > 0; integers keep the "/1" so the format is uniform.
std::string to_string(const Rational& q);
std::string to_string(const Integer& z);

std::int64_t floor_div(std::int64_t a, std::int64_t b);
std::int64_t ceil_div(std::int64_t a, std::int64_t b);
std::int64_t floor_mod(std::int64_t a, std::int64_t b);
std::int64_t checked_mul(std::int64_t a, std::int64_t b);
std::int64_t checked_add(std::int64_t a, std::int64_t b);

/// Sum of machine integers that spills into an arbitrary-precision
/// integer instead of wrapping.
class Accumulator {
 public:
  void add(std::int64_t v) {
    std::int64_t r;
    if (__builtin_add_overflow(small_, v, &r)) {
      big_ += small_;
      big_ += v;
      small_ = 0;
    } else {
      small_ = r;
    }
  }
  void add(const Integer& v) { big_ += v; }
  Integer value() const { return big_ + Integer(small_); }

 private:
  std::int64_t small_ = 0;
  Integer big_ = 0;
};

/// Exact rational vector over a fixed common denominator: coefficient i is
/// scaled(i) / denom(). All cycles of one lattice share the denominator d.
class Cycle {
 public:
  Cycle() = default;
  Cycle(std::vector<std::int64_t> scaled, std::int64_t denom);
  static Cycle zero(std::size_t n, std::int64_t denom);
  static Cycle from_rationals(const std::vector<Rational>& coeffs,
                              std::int64_t denom);

  std::size_t size() const { return num_.size(); }
  std::int64_t denom() const { return den_; }
  std::int64_t scaled(std::size_t i) const { return num_[i]; }
  std::span<const std::int64_t> scaled() const { return num_; }
  Rational coeff(std::size_t i) const { return Rational(num_[i], den_); }
  std::vector<Rational> coeffs() const;

  bool is_integral() const;
  bool is_zero() const;
  /// Componentwise x >= y.
  bool dominates(const Cycle& y) const;
  Cycle fractional_part() const;
  Cycle rescaled(std::int64_t new_denom) const;

  Cycle& operator+=(const Cycle& o);
  Cycle& operator-=(const Cycle& o);
  Cycle& operator*=(std::int64_t k);
  /// Adds k copies of the base vector E_i.
  Cycle& add_base(std::size_t i, std::int64_t k = 1);

  friend Cycle operator+(Cycle a, const Cycle& b) { return a += b; }
  friend Cycle operator-(Cycle a, const Cycle& b) { return a -= b; }
  friend Cycle operator-(Cycle a) { return a *= -1; }
  friend Cycle operator*(std::int64_t k, Cycle a) { return a *= k; }
  friend bool operator==(const Cycle& a, const Cycle& b);
  friend bool operator<(const Cycle& a, const Cycle& b) {
    return a.num_ < b.num_;
  }

  std::string str() const;

 private:
  void check_compatible(const Cycle& o) const;
  std::vector<std::int64_t> num_;
  std::int64_t den_ = 1;
};

}  // namespace deltainv
