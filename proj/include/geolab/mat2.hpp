#pragma once

#include <ostream>
#include <stdexcept>

namespace geolab {

template <class T>
struct Mat2 {
  T a{1}, b{0}, c{0}, d{1};

  static Mat2 identity() { return {T(1), T(0), T(0), T(1)}; }
  T det() const { return a * d - b * c; }
  T trace() const { return a + d; }
  Mat2 inverse_unimodular() const { return {d, -b, -c, a}; }  // det = 1
  Mat2 operator-() const { return {-a, -b, -c, -d}; }

  friend Mat2 operator*(const Mat2& x, const Mat2& y) {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
  }
  Mat2& operator*=(const Mat2& y) { return *this = *this * y; }
  friend bool operator==(const Mat2& x, const Mat2& y) {
    return x.a == y.a && x.b == y.b && x.c == y.c && x.d == y.d;
  }
  friend bool operator!=(const Mat2& x, const Mat2& y) { return !(x == y); }
  friend bool operator<(const Mat2& x, const Mat2& y) {
    if (x.a != y.a) return x.a < y.a;
    if (x.b != y.b) return x.b < y.b;
    if (x.c != y.c) return x.c < y.c;
    return x.d < y.d;
  }

  Mat2 pow(unsigned long long k) const {
    Mat2 r = identity(), base = *this;
    while (k) {
      if (k & 1) r = r * base;
      base = base * base;
      k >>= 1;
    }
    return r;
  }

  template <class U>
  Mat2<U> cast() const {
    return {U(a), U(b), U(c), U(d)};
  }

  friend std::ostream& operator<<(std::ostream& os, const Mat2& m) {
    return os << "(" << m.a << "," << m.b << ";" << m.c << "," << m.d << ")";
  }
};

using Mat2i = Mat2<long long>;

inline const Mat2i kT{1, 1, 0, 1};
inline const Mat2i kTinv{1, -1, 0, 1};
inline const Mat2i kS{0, -1, 1, 0};

// 64-bit product with overflow detection
inline Mat2i mul_checked(const Mat2i& x, const Mat2i& y) {
  auto mac = [](long long p, long long q, long long r, long long s) {
    long long u, v, w;
    if (__builtin_mul_overflow(p, q, &u) || __builtin_mul_overflow(r, s, &v) || __builtin_add_overflow(u, v, &w))
      throw std::overflow_error("Mat2i product overflows 64 bits");
    return w;
  };
  return {mac(x.a, y.a, x.b, y.c), mac(x.a, y.b, x.b, y.d), mac(x.c, y.a, x.d, y.c), mac(x.c, y.b, x.d, y.d)};
}

inline Mat2i pow_checked(const Mat2i& m, unsigned k) {
  Mat2i r = Mat2i::identity();
  for (unsigned i = 0; i < k; ++i) r = mul_checked(r, m);
  return r;
}

}  // namespace geolab
