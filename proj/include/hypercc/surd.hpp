#pragma once

// Exact arithmetic in the ring Q[sqrt(d) : d > 0 squarefree].  Values are
// finite sums  sum_d  c_d * sqrt(d)  with rational c_d and squarefree
// integer kernels d.  Every verified identity in the moment-system code
// reduces to a pure rational (kernel 1), which is asserted at extraction.

#include <map>
#include <stdexcept>
#include <string>
#include <sstream>

#include "comb.hpp"

namespace hypercc {

namespace detail {

// m = s^2 * f with f squarefree; returns (s, f).  Trial division covers all
// primes up to 10^6; the desk-scale inputs here (factorials of small
// multiplicities, numerators of small rationals) factor completely.
inline std::pair<BigInt, BigInt> extract_square(BigInt m) {
  if (m <= 0) throw std::domain_error("extract_square: m must be positive");
  BigInt s = 1, f = 1;
  auto pull = [&](const BigInt& p) {
    int e = 0;
    while (m % p == 0) { m /= p; ++e; }
    if (e / 2 > 0) s *= big_pow(p, e / 2);
    if (e % 2) f *= p;
  };
  pull(2);
  for (BigInt d = 3; d * d <= m && d < 1000000; d += 2) pull(d);
  if (m > 1) {
    BigInt r = boost::multiprecision::sqrt(m);
    if (r * r == m) s *= r;
    else f *= m;  // cofactor has no prime < 10^6, treated as squarefree
  }
  return {s, f};
}

}  // namespace detail

class Surd {
 public:
  Surd() = default;
  Surd(const Rational& r) { if (r != 0) terms_[1] = r; }
  Surd(long v) { if (v != 0) terms_[1] = v; }

  // sqrt of a nonnegative rational, canonicalized.
  static Surd sqrt_of(const Rational& r) {
    if (r < 0) throw std::domain_error("Surd::sqrt_of: negative radicand");
    if (r == 0) return Surd();
    BigInt p = boost::multiprecision::numerator(r);
    BigInt q = boost::multiprecision::denominator(r);
    auto [s, f] = detail::extract_square(p * q);
    Surd out;
    out.terms_[f] = Rational(s, q);
    return out;
  }

  // (sqrt r)^e for integer e >= 0.
  static Surd sqrt_pow(const Rational& r, long e) {
    Rational whole = 1;
    for (long i = 0; i < e / 2; ++i) whole *= r;
    Surd out(whole);
    if (e % 2) out = out * sqrt_of(r);
    return out;
  }

  bool is_zero() const { return terms_.empty(); }
  bool is_rational() const {
    return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first == 1);
  }
  Rational rational_part() const {
    auto it = terms_.find(BigInt(1));
    return it == terms_.end() ? Rational(0) : it->second;
  }
  Rational as_rational() const {
    if (!is_rational()) throw std::domain_error("Surd: irrational value where rational expected");
    return rational_part();
  }

  Surd operator-() const {
    Surd out = *this;
    for (auto& [k, v] : out.terms_) v = -v;
    return out;
  }
  Surd& operator+=(const Surd& o) {
    for (const auto& [k, v] : o.terms_) {
      auto it = terms_.find(k);
      if (it == terms_.end()) terms_.emplace(k, v);
      else {
        it->second += v;
        if (it->second == 0) terms_.erase(it);
      }
    }
    return *this;
  }
  Surd& operator-=(const Surd& o) { return *this += -o; }
  friend Surd operator+(Surd a, const Surd& b) { return a += b; }
  friend Surd operator-(Surd a, const Surd& b) { return a -= b; }

  friend Surd operator*(const Surd& a, const Surd& b) {
    Surd out;
    for (const auto& [ka, va] : a.terms_)
      for (const auto& [kb, vb] : b.terms_) {
        BigInt d = boost::multiprecision::gcd(ka, kb);
        BigInt kernel = (ka / d) * (kb / d);
        Rational coef = va * vb * Rational(d);
        auto it = out.terms_.find(kernel);
        if (it == out.terms_.end()) out.terms_.emplace(kernel, coef);
        else {
          it->second += coef;
          if (it->second == 0) out.terms_.erase(it);
        }
      }
    return out;
  }
  Surd& operator*=(const Surd& o) { return *this = *this * o; }

  // Division by a single-term surd (all that the certificate algebra needs).
  friend Surd operator/(const Surd& a, const Surd& b) {
    if (b.terms_.size() != 1)
      throw std::domain_error("Surd: division only by single-term values");
    const auto& [kb, vb] = *b.terms_.begin();
    // 1 / (vb sqrt(kb)) = sqrt(kb) / (vb kb)
    Surd inv;
    inv.terms_[kb] = Rational(1) / (vb * Rational(kb));
    return a * inv;
  }

  bool operator==(const Surd& o) const { return terms_ == o.terms_; }
  bool operator!=(const Surd& o) const { return !(*this == o); }

  double to_double() const {
    double acc = 0;
    for (const auto& [k, v] : terms_)
      acc += v.convert_to<double>() * std::sqrt(k.convert_to<double>());
    return acc;
  }

  std::string str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [k, v] : terms_) {
      if (!first) os << " + ";
      os << v;
      if (k != 1) os << "*sqrt(" << k << ")";
      first = false;
    }
    return os.str();
  }

 private:
  std::map<BigInt, Rational> terms_;
};

inline Surd surd_pow(const Surd& base, long e) {
  Surd r(Rational(1));
  for (long i = 0; i < e; ++i) r *= base;
  return r;
}

}  // namespace hypercc
