#pragma once
// Independent reference computations used only by the tests.

#include <complex>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "geolab/arith.hpp"
#include "geolab/mat2.hpp"

namespace oracle {

using geolab::EisensteinInt;
using E = EisensteinInt<long long>;

inline long long powmod(long long b, long long e, long long m) {
  __int128 r = 1, x = ((b % m) + m) % m;
  while (e > 0) {
    if (e & 1) r = r * x % m;
    x = x * x % m;
    e >>= 1;
  }
  return static_cast<long long>(r);
}

inline bool is_prime(long long n) {
  if (n < 2) return false;
  for (long long p = 2; p * p <= n; ++p)
    if (n % p == 0) return false;
  return true;
}

// Legendre symbol by Euler's criterion, p an odd prime
inline int euler_legendre(long long a, long long p) {
  long long v = powmod(a, (p - 1) / 2, p);
  if (v == 0) return 0;
  return v == 1 ? 1 : -1;
}

// Jacobi symbol (c/n), n > 0 odd, via factorisation and Euler
inline int jacobi_by_factoring(long long c, long long n) {
  int s = 1;
  for (long long p = 3; n > 1; p += 2) {
    if (p * p > n) p = n;
    while (n % p == 0) {
      s *= euler_legendre(c, p);
      n /= p;
    }
  }
  return s;
}

inline E emod(const E& x, const E& m) { return geolab::eis_mod(x, m); }

inline bool edivides(const E& m, const E& x) {
  E q;
  return E::divides_exact(x, m, q);
}

// alpha^{(N(pi)-1)/3} mod pi, matched against 1, omega, omega^2; -1 if 0
inline int cubic_by_congruence(const E& alpha, const E& pi) {
  long long N = pi.norm();
  long long e = (N - 1) / 3;
  E r(1, 0), x = emod(alpha, pi);
  if (x.is_zero()) return -1;
  while (e > 0) {
    if (e & 1) r = emod(r * x, pi);
    x = emod(x * x, pi);
    e >>= 1;
  }
  E w(1, 0);
  for (int j = 0; j < 3; ++j) {
    if (edivides(pi, r - w)) return j;
    w = w * E(0, 1);
  }
  return -2;  // not a cube root of unity: pi was not prime
}

struct EisPrime {
  E pi;
  long long norm;
};

// one prime of Z[omega] above each rational prime p != 3 with N <= bound
inline std::vector<EisPrime> eisenstein_primes(long long bound) {
  std::vector<EisPrime> out;
  for (long long p = 2; p <= bound; ++p) {
    if (!is_prime(p) || p == 3) continue;
    if (p % 3 == 2) {
      if (p * p <= bound) out.push_back({E(p, 0), p * p});
      continue;
    }
    bool found = false;
    for (long long a = 1; a * a <= 4 * p && !found; ++a)
      for (long long b = 1; b <= a && !found; ++b)
        if (a * a - a * b + b * b == p) {
          out.push_back({E(a, b), p});
          found = true;
        }
  }
  return out;
}

inline std::mt19937_64& rng() {
  static std::mt19937_64 g(20240611ULL);
  return g;
}

inline long long uniform(long long lo, long long hi) {
  return std::uniform_int_distribution<long long>(lo, hi)(rng());
}

// random element of SL2(Z) with entries bounded by about `bound`
inline geolab::Mat2i random_sl2z(long long bound) {
  for (;;) {
    long long c = uniform(-bound, bound), d = uniform(-bound, bound);
    if (c == 0 && d == 0) continue;
    long long x, y;
    long long g = geolab::ext_gcd<long long>(c, d, x, y);
    if (g != 1) continue;
    // a d - b c = 1 with a = y... solve: x c + y d = 1 -> (a, b) = (y, -x)
    long long a = y, b = -x;
    long long k = (c != 0 || d != 0) ? uniform(-3, 3) : 0;
    a += k * c;
    b += k * d;
    if (std::llabs(a) > 4 * bound || std::llabs(b) > 4 * bound) continue;
    return {a, b, c, d};
  }
}

}  // namespace oracle

namespace oracle {

// x a + y b = g in Z[omega] by the Euclidean algorithm
inline E eis_ext_gcd(const E& a, const E& b, E& x, E& y) {
  E r0 = a, r1 = b, s0(1), s1(0), t0(0), t1(1);
  while (!r1.is_zero()) {
    E q, r;
    E::divmod(r0, r1, q, r);
    r0 = r1;
    r1 = r;
    E s2 = s0 - q * s1, t2 = t0 - q * t1;
    s0 = s1;
    s1 = s2;
    t0 = t1;
    t1 = t2;
  }
  x = s0;
  y = t0;
  return r0;
}

using Mat2E = geolab::Mat2<E>;

// random (a b; c d) = I mod 3 with c, d drawn from a box of the given size
inline Mat2E random_gamma3(long long box) {
  for (;;) {
    E c(3 * uniform(-box, box), 3 * uniform(-box, box));
    E d(1 + 3 * uniform(-box, box), 3 * uniform(-box, box));
    if (c.is_zero()) continue;
    E x, y;
    E g = eis_ext_gcd(d, c, x, y);  // x d + y c = g
    if (!g.is_unit()) continue;
    // a d - b c = 1 with a = x / g, b = -y / g
    E gi = g.conj();  // unit inverse
    E a = x * gi, b = -(y * gi);
    // shift so that b = 0 mod 3; a = 1 mod 3 follows
    for (int k = 0; k < 9; ++k) {
      E kk(k % 3, k / 3);
      E bb = b + kk * d, aa = a + kk * c;
      if (geolab::mod_pos(bb.a, 3LL) == 0 && geolab::mod_pos(bb.b, 3LL) == 0) return {aa, bb, c, d};
    }
  }
}

}  // namespace oracle
