#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "arith.hpp"
#include "mat2.hpp"
#include "parallel.hpp"

namespace geolab {

using i128 = __int128;

inline long long isqrt_ll(long long n) {
  if (n < 0) throw std::domain_error("isqrt of negative");
  long long r = static_cast<long long>(std::sqrt(static_cast<long double>(n)));
  while (r > 0 && static_cast<i128>(r) * r > n) --r;
  while (static_cast<i128>(r + 1) * (r + 1) <= n) ++r;
  return r;
}

inline bool is_square_ll(long long n) {
  if (n < 0) return false;
  long long r = isqrt_ll(n);
  return r * r == n;
}

inline void check_discriminant(long long D) {
  if (D <= 0 || is_square_ll(D) || (D % 4 != 0 && D % 4 != 1))
    throw std::domain_error("discriminant must be positive, non-square, and 0 or 1 mod 4: " + std::to_string(D));
}

// ---------------------------------------------------------------- forms

struct QuadForm {
  long long A = 0, B = 0, C = 0;
  long long disc() const { return B * B - 4 * A * C; }
  bool primitive() const { return gcd_abs(gcd_abs(A, B), C) == 1; }
  friend auto operator<=>(const QuadForm&, const QuadForm&) = default;
  friend bool operator==(const QuadForm&, const QuadForm&) = default;
};

// f o M, M = (p q; r s):  f(px + qy, rx + sy)
inline QuadForm act(const QuadForm& f, const Mat2i& M) {
  i128 A = f.A, B = f.B, C = f.C, p = M.a, q = M.b, r = M.c, s = M.d;
  i128 nA = A * p * p + B * p * r + C * r * r;
  i128 nB = 2 * A * p * q + B * (p * s + q * r) + 2 * C * r * s;
  i128 nC = A * q * q + B * q * s + C * s * s;
  return {static_cast<long long>(nA), static_cast<long long>(nB), static_cast<long long>(nC)};
}

// 0 < B < sqrt D and sqrt D - B < 2|A| < sqrt D + B, all in exact integers
inline bool is_reduced(const QuadForm& f, long long D) {
  if (f.B <= 0 || static_cast<i128>(f.B) * f.B >= D) return false;
  long long A2 = 2 * (f.A < 0 ? -f.A : f.A);
  i128 lo = static_cast<i128>(A2) + f.B;
  if (lo * lo <= D) return false;  // 2|A| + B > sqrt D
  long long diff = A2 - f.B;       // 2|A| - B < sqrt D
  return diff <= 0 || static_cast<i128>(diff) * diff < D;
}

// The reduction step rho(A,B,C) = (C, B', (B'^2 - D)/4C), B' = -B mod 2C,
// B' in (-|C|, |C|] when |C| > sqrt D, else in (sqrt D - 2|C|, sqrt D).
// Also returns s with rho(f) = f o (0 -1; 1 s).
inline QuadForm rho(const QuadForm& f, long long D, long long* s_out = nullptr) {
  long long C = f.C;
  long long absC = C < 0 ? -C : C;
  long long twoC = 2 * absC;
  long long r = isqrt_ll(D);  // floor sqrt D, D non-square
  long long target_hi;        // choose B' = -B + 2|C| k, largest with B' <= target_hi
  if (static_cast<i128>(absC) * absC > D) {
    target_hi = absC;
  } else {
    target_hi = r;  // B' < sqrt D  <=>  B' <= floor(sqrt D)
  }
  long long base = -f.B;
  long long k = floor_div<long long>(target_hi - base, twoC);
  long long Bp = base + twoC * k;
  long long s = (C > 0) ? k : -k;
  QuadForm g{C, Bp, 0};
  g.C = static_cast<long long>((static_cast<i128>(Bp) * Bp - D) / (4 * static_cast<i128>(C)));
  if (s_out) *s_out = s;
  return g;
}

// all reduced primitive forms of discriminant D
inline std::vector<QuadForm> reduced_forms(long long D) {
  check_discriminant(D);
  std::vector<QuadForm> out;
  long long r = isqrt_ll(D);
  for (long long B = (D % 2 == 0 ? 2 : 1); B <= r; B += 2) {
    long long N = (D - B * B) / 4;  // = -AC > 0
    // 2|A| in (sqrt D - B, sqrt D + B)
    for (long long a = 1; a * a <= N; ++a) {
      if (N % a) continue;
      for (long long absA : {a, N / a}) {
        for (int sg : {1, -1}) {
          QuadForm f{sg * absA, B, -sg * (N / absA)};
          if (is_reduced(f, D) && f.primitive()) out.push_back(f);
        }
        if (a == N / a) break;
      }
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// reduced-form cycles under rho; each is one proper equivalence class
inline std::vector<std::vector<QuadForm>> form_cycles(long long D) {
  auto forms = reduced_forms(D);
  std::set<QuadForm> left(forms.begin(), forms.end());
  std::vector<std::vector<QuadForm>> cycles;
  for (const auto& f0 : forms) {
    if (!left.count(f0)) continue;
    std::vector<QuadForm> cyc;
    QuadForm f = f0;
    do {
      if (!left.erase(f)) throw std::logic_error("rho left the reduced set");
      cyc.push_back(f);
      f = rho(f, D);
    } while (f != f0);
    cycles.push_back(std::move(cyc));
  }
  return cycles;
}

// one representative (the least form of its cycle) per class; count is h+(D)
inline std::vector<QuadForm> form_classes(long long D) {
  std::vector<QuadForm> reps;
  for (auto& cyc : form_cycles(D)) reps.push_back(*std::min_element(cyc.begin(), cyc.end()));
  std::sort(reps.begin(), reps.end());
  return reps;
}

struct PellSolution {
  BigInt t, u;
};

// minimal t^2 - D u^2 = 4 with t, u > 0, read off the principal cycle
inline PellSolution pell_fundamental(long long D) {
  check_discriminant(D);
  long long r = isqrt_ll(D);
  long long B0 = (r % 2 == D % 2) ? r : r - 1;
  QuadForm f0{1, B0, (B0 * B0 - D) / 4};
  Mat2<BigInt> M = Mat2<BigInt>::identity();
  QuadForm f = f0;
  do {
    long long s;
    f = rho(f, D, &s);
    M = M * Mat2<BigInt>{0, -1, 1, BigInt(s)};
  } while (f != f0);
  BigInt t = M.a + M.d;
  if (t < 0) t = -t;
  BigInt u = M.c;  // = A u with A = 1
  if (u < 0) u = -u;
  return {t, u};
}

// ascending search; used by tests as an independent oracle
inline PellSolution pell_bruteforce(long long D, long long u_max = 1000000) {
  check_discriminant(D);
  for (long long u = 1; u <= u_max; ++u) {
    i128 v = static_cast<i128>(D) * u * u + 4;
    if (v > static_cast<i128>(4e18)) break;
    long long w = static_cast<long long>(v);
    if (is_square_ll(w)) return {BigInt(isqrt_ll(w)), BigInt(u)};
  }
  throw std::runtime_error("pell_bruteforce: search bound exceeded");
}

inline Mat2i class_representative(const QuadForm& f, long long t, long long u) {
  long long D = f.disc();
  if (static_cast<i128>(t) * t - static_cast<i128>(D) * u * u != 4)
    throw std::domain_error("class_representative: (t,u) does not solve t^2 - D u^2 = 4");
  long long tb = t - f.B * u;
  if (tb % 2 != 0) throw std::logic_error("class_representative: parity failure");
  return {tb / 2, -f.C * u, f.A * u, (t + f.B * u) / 2};
}

// ---------------------------------------------------------------- classes

struct GeodesicClass {
  long long trace = 0;   // t of this class (power included)
  long long D = 0;       // t^2 - 4
  Mat2i rep;
  QuadraticSurd norm;    // ((t + sqrt(t^2-4))/2)^2
  double norm_float = 0;
  double lambda = 0;     // log N(gamma_0)
  int power_index = 1;
  long long prim_trace = 0;
  long long form_disc = 0;  // discriminant of the primitive form attached to the class
  QuadForm form;

  auto order_key() const { return std::tie(trace, form_disc, form.A, form.B, form.C, power_index); }
};

inline QuadraticSurd trace_norm(long long t) {
  return QuadraticSurd(BigInt(t) * t - 2, BigInt(t), BigInt(t) * t - 4, 2);
}

inline double trace_norm_float(long long t) {
  long double tt = t;
  long double lam = (tt + std::sqrt(tt * tt - 4.0L)) / 2.0L;
  return static_cast<double>(lam * lam);
}

inline double trace_log_norm(long long t) {
  long double tt = t;
  return static_cast<double>(2.0L * std::log((tt + std::sqrt(tt * tt - 4.0L)) / 2.0L));
}

inline bool norm_le(long long t, double x) {
  double xf = std::floor(x);
  if (xf == x && x < 9e15) return trace_norm(t).le_integer(BigInt(static_cast<long long>(xf)));
  return trace_norm_float(t) <= x;
}

// largest t with N(t) <= x; N(t) is about t^2 - 2
inline long long max_trace_for_norm(double x) {
  long long t = static_cast<long long>(std::sqrt(x + 2.0)) + 2;
  while (t > 2 && !norm_le(t, x)) --t;
  return t;
}

// u > 0 with u^2 | n
inline std::vector<long long> square_divisor_roots(long long n1, long long n2) {
  std::map<long long, int> ex;
  for (long long n : {n1, n2}) {
    for (long long p = 2; p * p <= n; ++p)
      while (n % p == 0) { ex[p]++; n /= p; }
    if (n > 1) ex[n]++;
  }
  std::vector<long long> us{1};
  for (auto [p, e] : ex) {
    std::size_t k = us.size();
    long long pw = 1;
    for (int j = 1; j <= e / 2; ++j) {
      pw *= p;
      for (std::size_t i = 0; i < k; ++i) us.push_back(us[i] * pw);
    }
  }
  std::sort(us.begin(), us.end());
  return us;
}

// V_m(t0) = trace of gamma_0^m given trace t0
inline long long lucas_trace(long long t0, unsigned m) {
  i128 prev = 2, cur = t0;
  if (m == 0) return 2;
  for (unsigned k = 1; k < m; ++k) {
    i128 nxt = static_cast<i128>(t0) * cur - prev;
    if (nxt > static_cast<i128>(4e18)) return -1;  // overflow marker
    prev = cur;
    cur = nxt;
  }
  return static_cast<long long>(cur);
}

inline long long lucas_u(long long t0, unsigned m) {
  i128 prev = 0, cur = 1;
  if (m == 0) return 0;
  for (unsigned k = 1; k < m; ++k) {
    i128 nxt = static_cast<i128>(t0) * cur - prev;
    if (nxt > static_cast<i128>(4e18)) return -1;
    prev = cur;
    cur = nxt;
  }
  return static_cast<long long>(cur);
}

// is (t,u) a proper power of a smaller solution of t^2 - D u^2 = 4 ?
inline bool pell_is_power(long long t, long long u, long long D) {
  for (unsigned m = 2; m < 64; ++m) {
    // smallest trace 3 gives V_m(3) >= 2^m roughly; stop when that exceeds t
    long long v3 = lucas_trace(3, m);
    if (v3 < 0 || v3 > t) break;
    long long lo = 3, hi = t;
    while (lo < hi) {
      long long mid = lo + (hi - lo) / 2;
      long long v = lucas_trace(mid, m);
      if (v < 0 || v >= t) hi = mid; else lo = mid + 1;
    }
    if (lucas_trace(lo, m) != t) continue;
    long long um = lucas_u(lo, m);
    if (um <= 0 || u % um != 0) continue;
    long long u0 = u / um;
    if (static_cast<i128>(lo) * lo - 4 == static_cast<i128>(D) * u0 * u0) return true;
  }
  return false;
}

namespace detail {

inline std::vector<GeodesicClass> shard_classes(long long t_lo, long long t_hi, double x, bool include_powers) {
  std::vector<GeodesicClass> out;
  for (long long t = t_lo; t <= t_hi; ++t) {
    long long n = t * t - 4;
    for (long long u : square_divisor_roots(t - 2, t + 2)) {
      long long D = n / (u * u);
      if (D % 4 != 0 && D % 4 != 1) continue;
      if (is_square_ll(D)) continue;
      if (pell_is_power(t, u, D)) continue;
      QuadraticSurd n0 = trace_norm(t);
      double lam = trace_log_norm(t);
      for (const QuadForm& f : form_classes(D)) {
        Mat2i rep0 = class_representative(f, t, u);
        for (unsigned m = 1;; ++m) {
          long long tm = (m == 1) ? t : lucas_trace(t, m);
          if (tm < 0 || !norm_le(tm, x)) break;
          GeodesicClass g;
          g.trace = tm;
          g.D = tm * tm - 4;
          g.rep = (m == 1) ? rep0 : pow_checked(rep0, m);
          g.norm = (m == 1) ? n0 : n0.pow(m);
          g.norm_float = trace_norm_float(tm);
          g.lambda = lam;
          g.power_index = static_cast<int>(m);
          g.prim_trace = t;
          g.form_disc = D;
          g.form = f;
          out.push_back(std::move(g));
          if (!include_powers) break;
        }
      }
    }
  }
  return out;
}

}  // namespace detail

// Every class with N <= x, sorted by norm (= by trace), ties by attached form.
// Primitive classes come from (t, u) fundamental for D = (t^2-4)/u^2 and the
// proper form classes of D; powers are appended explicitly.
inline std::vector<GeodesicClass> enumerate_classes(double x, bool include_powers, unsigned threads = default_threads()) {
  if (!(x >= 1)) throw std::domain_error("enumerate_classes: x must be >= 1");
  long long tmax = max_trace_for_norm(x);
  if (tmax < 3) return {};
  // shards of roughly equal work (cost grows ~ t^2)
  std::size_t nshards = std::max<std::size_t>(1, std::min<long long>(64, tmax - 2));
  std::vector<long long> cuts{3};
  for (std::size_t i = 1; i < nshards; ++i) {
    double frac = std::cbrt(static_cast<double>(i) / nshards);
    long long c = 3 + static_cast<long long>(frac * (tmax - 2));
    cuts.push_back(std::max(c, cuts.back() + 1));
  }
  cuts.push_back(tmax + 1);
  nshards = cuts.size() - 1;
  std::vector<std::vector<GeodesicClass>> parts(nshards);
  run_shards(nshards, threads, [&](std::size_t i) {
    if (cuts[i] <= cuts[i + 1] - 1) parts[i] = detail::shard_classes(cuts[i], cuts[i + 1] - 1, x, include_powers);
  });
  std::vector<GeodesicClass> all;
  for (auto& p : parts)
    for (auto& g : p) all.push_back(std::move(g));
  std::sort(all.begin(), all.end(), [](const GeodesicClass& a, const GeodesicClass& b) {
    return a.order_key() < b.order_key();
  });
  return all;
}

// ---------------------------------------------------------------- brute force oracle

// word in L = (1 0; 1 1), R = (1 1; 0 1) of a matrix with nonnegative entries
inline std::string lr_word(Mat2i m) {
  std::string w;
  while (!(m.a == 1 && m.b == 0 && m.c == 0 && m.d == 1)) {
    if (m.a >= m.c && m.b >= m.d) {
      m = {m.a - m.c, m.b - m.d, m.c, m.d};
      w += 'R';
    } else if (m.c >= m.a && m.d >= m.b) {
      m = {m.a, m.b, m.c - m.a, m.d - m.b};
      w += 'L';
    } else {
      throw std::logic_error("lr_word: not a nonnegative SL2(Z) matrix");
    }
  }
  return w;
}

inline std::string min_rotation(const std::string& w) {
  std::string best = w;
  for (std::size_t i = 1; i < w.size(); ++i) {
    std::string r = w.substr(i) + w.substr(0, i);
    if (r < best) best = r;
  }
  return best;
}

inline std::size_t word_period(const std::string& w) {
  for (std::size_t p = 1; p < w.size(); ++p)
    if (w.size() % p == 0 && w.substr(p) + w.substr(0, p) == w) return p;
  return w.size();
}

inline Mat2i word_matrix(const std::string& w) {
  Mat2i m = Mat2i::identity();
  for (char ch : w) m = m * (ch == 'R' ? Mat2i{1, 1, 0, 1} : Mat2i{1, 0, 1, 1});
  return m;
}

// canonical cyclic word of a class representative coming from a reduced form
inline std::string canonical_word(const Mat2i& rep) {
  Mat2i m = rep;
  if (m.trace() < 0) m = -m;
  if (m.a < 0 || m.b < 0 || m.c < 0 || m.d < 0) m = kS * m * kS.inverse_unimodular();
  return min_rotation(lr_word(m));
}

struct BruteClass {
  std::string word;  // minimal rotation
  long long trace;
  int power_index;
  double lambda;
};

// all classes with N <= x_small by exhaustive search over nonnegative matrices
// of each trace; conjugacy = cyclic rotation of the L/R word
inline std::vector<BruteClass> brute_force_classes(double x_small) {
  if (x_small > 500) throw std::domain_error("brute_force_classes: x too large for exhaustive search");
  std::map<std::string, BruteClass> seen;
  for (long long t = 3; norm_le(t, x_small); ++t) {
    for (long long a = 0; a <= t; ++a) {
      long long d = t - a, bc = a * d - 1;
      if (bc < 0) continue;
      for (long long b = 1; b <= bc; ++b) {
        if (bc % b) continue;
        Mat2i m{a, b, bc / b, d};
        std::string w = lr_word(m);
        if (w.find('L') == std::string::npos || w.find('R') == std::string::npos) continue;
        std::string cw = min_rotation(w);
        if (seen.count(cw)) continue;
        std::size_t p = word_period(cw);
        Mat2i prim = word_matrix(cw.substr(0, p));
        seen[cw] = {cw, t, static_cast<int>(cw.size() / p), trace_log_norm(prim.trace())};
      }
    }
  }
  std::vector<BruteClass> out;
  for (auto& [k, v] : seen) out.push_back(v);
  std::sort(out.begin(), out.end(), [](const BruteClass& a, const BruteClass& b) {
    return std::tie(a.trace, a.word) < std::tie(b.trace, b.word);
  });
  return out;
}

}  // namespace geolab
