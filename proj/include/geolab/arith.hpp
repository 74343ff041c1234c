#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/rational.hpp>

namespace geolab {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::rational<long long>;

// floor division and nonnegative remainder for any signed integer type
template <class I>
I floor_div(const I& a, const I& b) {
  I q = a / b;
  I r = a - q * b;
  if (r != 0 && ((r < 0) != (b < 0))) q -= 1;
  return q;
}

template <class I>
I mod_pos(const I& a, const I& m) {
  I r = a % m;
  if (r < 0) r += (m < 0 ? -m : m);
  return r;
}

template <class I>
I gcd_abs(I a, I b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    I t = a % b;
    a = b;
    b = t;
  }
  return a;
}

// x*a + y*b = g, g >= 0
template <class I>
I ext_gcd(const I& a, const I& b, I& x, I& y) {
  I r0 = a, r1 = b, s0 = 1, s1 = 0, t0 = 0, t1 = 1;
  while (r1 != 0) {
    I q = r0 / r1;
    I tmp = r0 - q * r1; r0 = r1; r1 = tmp;
    tmp = s0 - q * s1; s0 = s1; s1 = tmp;
    tmp = t0 - q * t1; t0 = t1; t1 = tmp;
  }
  if (r0 < 0) { r0 = -r0; s0 = -s0; t0 = -t0; }
  x = s0;
  y = t0;
  return r0;
}

// ---------------------------------------------------------------- roots of unity

// e(n/24).  Every value this library produces lives in mu_24.
class RootOfUnity {
 public:
  static constexpr int kDen = 24;

  constexpr RootOfUnity() = default;
  static constexpr RootOfUnity from_24ths(long long n) {
    RootOfUnity r;
    r.n_ = static_cast<int>(((n % kDen) + kDen) % kDen);
    return r;
  }
  static RootOfUnity from_rational(const Rational& q) {
    if (kDen % q.denominator() != 0)
      throw std::domain_error("root of unity with denominator not dividing 24: " +
                              std::to_string(q.numerator()) + "/" + std::to_string(q.denominator()));
    return from_24ths(q.numerator() * (kDen / q.denominator()));
  }
  static RootOfUnity from_rational(long long num, long long den) { return from_rational(Rational(num, den)); }

  constexpr int n24() const { return n_; }
  Rational exponent() const { return Rational(n_, kDen); }
  std::complex<double> value() const {
    double a = 2.0 * std::numbers::pi * n_ / kDen;
    return {std::cos(a), std::sin(a)};
  }

  constexpr RootOfUnity operator*(RootOfUnity o) const { return from_24ths(n_ + o.n_); }
  constexpr RootOfUnity& operator*=(RootOfUnity o) { return *this = *this * o; }
  constexpr RootOfUnity inverse() const { return from_24ths(-n_); }
  constexpr RootOfUnity conj() const { return inverse(); }
  constexpr RootOfUnity pow(long long k) const { return from_24ths((static_cast<long long>(n_) * (k % kDen)) % kDen); }
  constexpr bool is_one() const { return n_ == 0; }

  friend constexpr bool operator==(RootOfUnity a, RootOfUnity b) { return a.n_ == b.n_; }
  friend constexpr auto operator<=>(RootOfUnity a, RootOfUnity b) { return a.n_ <=> b.n_; }
  friend std::ostream& operator<<(std::ostream& os, RootOfUnity r) {
    Rational q = r.exponent();
    if (q.numerator() == 0) return os << "0";
    return os << q.numerator() << "/" << q.denominator();
  }

 private:
  int n_ = 0;
};

// Element of Z[zeta_24], kept reduced modulo Phi_24(x) = x^8 - x^4 + 1, so
// equality is exact equality of algebraic numbers.
class CycloInt {
 public:
  CycloInt() { c_.fill(0); }
  explicit CycloInt(long long k) : CycloInt() { c_[0] = k; }
  explicit CycloInt(RootOfUnity r) : CycloInt() { add_power(r.n24(), 1); }

  CycloInt& operator+=(const CycloInt& o) {
    for (int i = 0; i < 8; ++i) c_[i] += o.c_[i];
    return *this;
  }
  CycloInt& operator-=(const CycloInt& o) {
    for (int i = 0; i < 8; ++i) c_[i] -= o.c_[i];
    return *this;
  }
  CycloInt& operator+=(RootOfUnity r) {
    add_power(r.n24(), 1);
    return *this;
  }
  friend CycloInt operator+(CycloInt a, const CycloInt& b) { return a += b; }
  friend CycloInt operator-(CycloInt a, const CycloInt& b) { return a -= b; }
  friend CycloInt operator*(const CycloInt& a, const CycloInt& b) {
    CycloInt r;
    for (int i = 0; i < 8; ++i)
      if (a.c_[i] != 0)
        for (int j = 0; j < 8; ++j)
          if (b.c_[j] != 0) r.add_power(i + j, a.c_[i] * b.c_[j]);
    return r;
  }
  friend bool operator==(const CycloInt& a, const CycloInt& b) { return a.c_ == b.c_; }
  friend bool operator<(const CycloInt& a, const CycloInt& b) { return a.c_ < b.c_; }

  std::complex<double> value() const {
    std::complex<double> s = 0;
    for (int i = 0; i < 8; ++i)
      if (c_[i] != 0) s += static_cast<double>(c_[i]) * RootOfUnity::from_24ths(i).value();
    return s;
  }
  const std::array<long long, 8>& coeffs() const { return c_; }
  bool is_zero() const {
    for (long long v : c_)
      if (v != 0) return false;
    return true;
  }

 private:
  // adds k * x^e, e taken mod 24, reduced by x^12 = -1 and x^8 = x^4 - 1
  void add_power(int e, long long k) {
    e %= 24;
    if (e < 0) e += 24;
    if (e >= 12) { e -= 12; k = -k; }
    if (e >= 8) {
      add_power(e - 4, k);
      add_power(e - 8, -k);
      return;
    }
    c_[e] += k;
  }
  std::array<long long, 8> c_;
};

// ---------------------------------------------------------------- Jacobi symbol

template <class I>
int jacobi_positive(I c, I d) {
  // d > 0 odd
  c = mod_pos(c, d);
  int s = 1;
  while (c != 0) {
    while (c % 2 == 0) {
      c /= 2;
      I r = d % 8;
      if (r == 3 || r == 5) s = -s;
    }
    std::swap(c, d);
    if (c % 4 == 3 && d % 4 == 3) s = -s;
    c = c % d;
  }
  return d == 1 ? s : 0;
}

// Shimura's extension to negative odd d: (c/d) = (c/|d|) for c >= 0 and
// -(c/|d|) for c < 0 when d < 0;  (0/+-1) = 1.
template <class I>
int jacobi_extended(const I& c, const I& d) {
  if (d % 2 == 0) throw std::domain_error("jacobi_extended: even modulus");
  if (d > 0) return jacobi_positive<I>(c, d);
  I ad = -d;
  int v = jacobi_positive<I>(c, ad);
  return (c < 0) ? -v : v;
}

// ---------------------------------------------------------------- Eisenstein integers

// a + b*omega, omega = e(1/3), omega^2 = -1 - omega
template <class I = long long>
struct EisensteinInt {
  I a{0}, b{0};

  EisensteinInt() = default;
  EisensteinInt(I a_, I b_ = 0) : a(std::move(a_)), b(std::move(b_)) {}
  template <class J>
  explicit EisensteinInt(const EisensteinInt<J>& o) : a(static_cast<I>(o.a)), b(static_cast<I>(o.b)) {}

  static EisensteinInt omega() { return {0, 1}; }
  static EisensteinInt lambda() { return {1, 2}; }  // 1 + 2 omega = sqrt(-3)

  I norm() const { return a * a - a * b + b * b; }
  EisensteinInt conj() const { return {a - b, -b}; }
  bool is_zero() const { return a == 0 && b == 0; }
  bool is_unit() const { return norm() == 1; }
  bool is_real() const { return b == 0; }

  friend EisensteinInt operator+(const EisensteinInt& x, const EisensteinInt& y) { return {x.a + y.a, x.b + y.b}; }
  friend EisensteinInt operator-(const EisensteinInt& x, const EisensteinInt& y) { return {x.a - y.a, x.b - y.b}; }
  friend EisensteinInt operator-(const EisensteinInt& x) { return {-x.a, -x.b}; }
  friend EisensteinInt operator*(const EisensteinInt& x, const EisensteinInt& y) {
    return {x.a * y.a - x.b * y.b, x.a * y.b + x.b * y.a - x.b * y.b};
  }
  EisensteinInt& operator+=(const EisensteinInt& y) { return *this = *this + y; }
  EisensteinInt& operator-=(const EisensteinInt& y) { return *this = *this - y; }
  EisensteinInt& operator*=(const EisensteinInt& y) { return *this = *this * y; }
  friend bool operator==(const EisensteinInt& x, const EisensteinInt& y) { return x.a == y.a && x.b == y.b; }
  friend bool operator!=(const EisensteinInt& x, const EisensteinInt& y) { return !(x == y); }
  friend bool operator<(const EisensteinInt& x, const EisensteinInt& y) {
    return x.a < y.a || (x.a == y.a && x.b < y.b);
  }

  std::complex<double> value() const {
    double x = static_cast<double>(a), y = static_cast<double>(b);
    return {x - 0.5 * y, y * std::numbers::sqrt3 / 2.0};
  }

  // exact division; returns false if y does not divide x
  static bool divides_exact(const EisensteinInt& x, const EisensteinInt& y, EisensteinInt& q) {
    I n = y.norm();
    if (n == 0) return false;
    EisensteinInt num = x * y.conj();
    if (num.a % n != 0 || num.b % n != 0) return false;
    q = {num.a / n, num.b / n};
    return true;
  }

  // Euclidean division with rounded quotient, N(r) < N(y)
  static void divmod(const EisensteinInt& x, const EisensteinInt& y, EisensteinInt& q, EisensteinInt& r) {
    I n = y.norm();
    EisensteinInt num = x * y.conj();
    auto rnd = [&](const I& v) { return floor_div<I>(2 * v + n, 2 * n); };
    q = {rnd(num.a), rnd(num.b)};
    r = x - q * y;
  }

  friend std::ostream& operator<<(std::ostream& os, const EisensteinInt& z) {
    return os << "(" << z.a << (z.b < 0 ? "-" : "+") << (z.b < 0 ? I(-z.b) : z.b) << "w)";
  }
};

template <class I>
EisensteinInt<I> eis_mod(const EisensteinInt<I>& x, const EisensteinInt<I>& y) {
  EisensteinInt<I> q, r;
  EisensteinInt<I>::divmod(x, y, q, r);
  return r;
}

template <class I>
std::array<EisensteinInt<I>, 6> eisenstein_units() {
  using E = EisensteinInt<I>;
  return {E(1, 0), E(0, 1), E(-1, -1), E(-1, 0), E(0, -1), E(1, 1)};  // omega^0..2, -omega^0..2
}

// alpha = 0 mod lambda  <=>  a + b = 0 mod 3
template <class I>
bool divisible_by_lambda(const EisensteinInt<I>& x) {
  return mod_pos<I>(x.a + x.b, I(3)) == 0;
}

template <class I>
bool is_primary(const EisensteinInt<I>& x) {
  return mod_pos<I>(x.a, I(3)) == 2 && mod_pos<I>(x.b, I(3)) == 0;
}

// primary = unit * alpha with primary == -1 (mod 3)
template <class I>
std::pair<EisensteinInt<I>, EisensteinInt<I>> primary_normalize(const EisensteinInt<I>& alpha) {
  if (divisible_by_lambda(alpha)) throw std::domain_error("primary_normalize: divisible by lambda");
  for (const auto& u : eisenstein_units<I>()) {
    auto p = u * alpha;
    if (is_primary(p)) return {u, p};
  }
  throw std::logic_error("primary_normalize: no primary associate");
}

namespace detail {
// index j with u = +-omega^j
template <class I>
int unit_omega_power(const EisensteinInt<I>& u) {
  auto us = eisenstein_units<I>();
  for (int k = 0; k < 6; ++k)
    if (us[k] == u) return k % 3;
  throw std::logic_error("not a unit");
}
}  // namespace detail

// (alpha/beta)_3 as a cube root of unity, nullopt when gcd(alpha, beta) != 1.
// Reduction, supplementary laws for omega and 1 - omega, and cubic
// reciprocity between primary elements.
template <class I>
std::optional<RootOfUnity> cubic_residue_symbol(EisensteinInt<I> alpha, EisensteinInt<I> beta) {
  using E = EisensteinInt<I>;
  if (beta.is_unit() || beta.is_zero()) throw std::domain_error("cubic_residue_symbol: beta must be a nonunit");
  if (divisible_by_lambda(beta)) throw std::domain_error("cubic_residue_symbol: beta divisible by lambda");
  int acc = 0;  // exponent of omega, mod 3
  const E one_minus_omega(1, -1);
  for (;;) {
    beta = primary_normalize(beta).second;
    if (beta.norm() == 1) break;
    alpha = eis_mod(alpha, beta);
    if (alpha.is_zero()) return std::nullopt;
    // beta = a + b omega primary, a = 3m - 1
    I m = mod_pos<I>(floor_div<I>(beta.a + 1, I(3)), I(3));
    I nm1 = (beta.norm() - 1) / 3;
    int om = static_cast<int>(mod_pos<I>(nm1, I(3)));  // (omega/beta) = omega^om
    E q;
    while (divisible_by_lambda(alpha)) {
      E::divides_exact(alpha, one_minus_omega, q);
      alpha = q;
      acc += static_cast<int>(2 * m);
    }
    auto [u, p] = primary_normalize(alpha);
    // alpha = u^{-1} p, so (alpha/beta) = (u/beta)^{-1} (p/beta)
    acc -= detail::unit_omega_power(u) * om;
    if (p.norm() == 1) break;
    alpha = beta;
    beta = p;
  }
  return RootOfUnity::from_24ths(8LL * (((acc % 3) + 3) % 3));
}

// ---------------------------------------------------------------- quadratic surds

// (p + q sqrt(D)) / r, r > 0
struct QuadraticSurd {
  BigInt p{0}, q{0}, D{2}, r{1};

  QuadraticSurd() = default;
  QuadraticSurd(BigInt p_, BigInt q_, BigInt D_, BigInt r_ = 1)
      : p(std::move(p_)), q(std::move(q_)), D(std::move(D_)), r(std::move(r_)) {
    if (r == 0) throw std::domain_error("QuadraticSurd: zero denominator");
    if (r < 0) { p = -p; q = -q; r = -r; }
    normalize();
  }

  void normalize() {
    BigInt g = gcd_abs<BigInt>(gcd_abs<BigInt>(p, q), r);
    if (g > 1) { p /= g; q /= g; r /= g; }
  }

  // sign of x + y sqrt(D)
  static int sign_of(const BigInt& x, const BigInt& y, const BigInt& D) {
    int sx = x.sign(), sy = y.sign();
    if (sy == 0) return sx;
    if (sx == 0) return sy;
    if (sx == sy) return sx;
    BigInt lhs = x * x, rhs = y * y * D;
    if (lhs == rhs) return 0;
    return (lhs > rhs) ? sx : sy;
  }

  friend int compare(const QuadraticSurd& u, const QuadraticSurd& v) {
    if (u.D != v.D) throw std::domain_error("QuadraticSurd: comparison across different D");
    return sign_of(u.p * v.r - v.p * u.r, u.q * v.r - v.q * u.r, u.D);
  }
  friend bool operator==(const QuadraticSurd& u, const QuadraticSurd& v) { return compare(u, v) == 0; }
  friend bool operator<(const QuadraticSurd& u, const QuadraticSurd& v) { return compare(u, v) < 0; }
  friend bool operator<=(const QuadraticSurd& u, const QuadraticSurd& v) { return compare(u, v) <= 0; }

  friend QuadraticSurd operator*(const QuadraticSurd& u, const QuadraticSurd& v) {
    if (u.D != v.D) throw std::domain_error("QuadraticSurd: product across different D");
    return {u.p * v.p + u.q * v.q * u.D, u.p * v.q + u.q * v.p, u.D, u.r * v.r};
  }
  QuadraticSurd pow(unsigned k) const {
    QuadraticSurd res(1, 0, D, 1), b = *this;
    while (k) {
      if (k & 1) res = res * b;
      b = b * b;
      k >>= 1;
    }
    return res;
  }

  // x <= value, x a rational integer bound
  bool le_integer(const BigInt& x) const { return sign_of(x * r - p, -q, D) >= 0; }

  template <class F = double>
  F to() const {
    using boost::multiprecision::sqrt;
    using std::sqrt;
    F d = static_cast<F>(D);
    return (static_cast<F>(p) + static_cast<F>(q) * sqrt(d)) / static_cast<F>(r);
  }
  double to_double() const {
    long double d = std::sqrt(static_cast<long double>(D));
    long double num = static_cast<long double>(p) + static_cast<long double>(q) * d;
    return static_cast<double>(num / static_cast<long double>(r));
  }
};

}  // namespace geolab
