#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "arith.hpp"
#include "geodesics.hpp"
#include "mat2.hpp"
#include "multipliers.hpp"
#include "parallel.hpp"

// Loxodromic classes of PSL2(Z[omega]) by exhaustive search in a height box.

namespace geolab {

using Eis = EisensteinInt<long long>;
using MatE = Mat2E<long long>;

inline std::complex<long double> to_complex(const Eis& z) {
  const long double h = std::sqrt(3.0L) / 2;
  return {static_cast<long double>(z.a) - 0.5L * z.b, h * z.b};
}

inline long double eis_abs(const Eis& z) { return std::sqrt(static_cast<long double>(z.norm())); }

// eigenvalue of modulus >= 1 of x^2 - t x + 1
inline std::complex<long double> big_eigenvalue(const Eis& t) {
  auto tc = to_complex(t);
  auto r = std::sqrt(tc * tc - 4.0L);
  auto l1 = (tc + r) / 2.0L, l2 = (tc - r) / 2.0L;
  return std::abs(l1) >= std::abs(l2) ? l1 : l2;
}

// N = e^{length} = |lambda|^2
inline long double norm3(const Eis& t) { return std::norm(big_eigenvalue(t)); }

inline bool is_loxodromic_trace(const Eis& t) { return !(t.b == 0 && t.a >= -2 && t.a <= 2); }

// one of t, -t (PSL2)
inline bool canonical_trace_sign(const Eis& t) { return t.a > 0 || (t.a == 0 && t.b > 0); }

inline Eis round_eis(std::complex<long double> z) {
  long double b = z.imag() * 2 / std::sqrt(3.0L);
  long double a = z.real() + b / 2;
  return {static_cast<long long>(std::llround(a)), static_cast<long long>(std::llround(b))};
}

// all z in Z[omega] with |z| <= R
inline std::vector<Eis> eis_disk(long long R) {
  std::vector<Eis> out;
  long long R2 = R * R;
  for (long long b = -2 * R - 1; b <= 2 * R + 1; ++b)
    for (long long a = -2 * R - 1; a <= 2 * R + 1; ++a) {
      Eis z{a, b};
      if (z.norm() <= R2) out.push_back(z);
    }
  return out;
}

inline long double min_loxodromic_norm() {
  long double best = 1e30L;
  for (const auto& t : eis_disk(4))
    if (is_loxodromic_trace(t)) best = std::min(best, norm3(t));
  return best;
}

struct PrimitiveRoot {
  MatE root;
  int power = 1;
};

// largest m with gamma = +-gamma_0^m in SL2(Z[omega]); gamma_0^m = U_m gamma_0 - U_{m-1} I
inline PrimitiveRoot primitive_root(const MatE& g) {
  PrimitiveRoot best{g, 1};
  Eis t = g.trace();
  long double N = norm3(t);
  static const long double nmin = min_loxodromic_norm();
  int mmax = static_cast<int>(std::floor(std::log(N) / std::log(nmin) + 1e-9));
  auto lam = big_eigenvalue(t);
  for (int m = 2; m <= mmax; ++m) {
    for (int s : {1, -1}) {
      std::complex<long double> base = std::pow(static_cast<long double>(s) * lam, 1.0L / m);
      for (int j = 0; j < m; ++j) {
        auto l0 = base * std::polar(1.0L, 2 * std::numbers::pi_v<long double> * j / m);
        auto tc = l0 + 1.0L / l0;
        Eis t0 = round_eis(tc);
        if (std::abs(to_complex(t0) - tc) > 1e-6L) continue;
        // V_m(t0) = s t and the U sequence
        Eis v0{2}, v1 = t0, u0{0}, u1{1};
        for (int k = 1; k < m; ++k) {
          Eis v2 = t0 * v1 - v0, u2 = t0 * u1 - u0;
          v0 = v1, v1 = v2, u0 = u1, u1 = u2;
        }
        Eis st = s == 1 ? t : -t;
        if (v1 != st) continue;
        MatE sg = s == 1 ? g : -g;
        MatE cand;
        Eis one{1};
        if (!Eis::divides_exact(sg.a + u0, u1, cand.a) || !Eis::divides_exact(sg.b, u1, cand.b) ||
            !Eis::divides_exact(sg.c, u1, cand.c) || !Eis::divides_exact(sg.d + u0, u1, cand.d))
          continue;
        if (cand.det() != one || cand.trace() != t0) continue;
        if (m > best.power) best = {cand, m};
      }
    }
  }
  return best;
}

// left coset representatives of Gamma_2 in SL2(Z[omega]) (27 of them)
inline const std::vector<MatE>& gamma2_cosets() {
  static const std::vector<MatE> reps = [] {
    std::vector<MatE> out{MatE::identity()};
    std::vector<Eis> small;
    for (long long a = -1; a <= 1; ++a)
      for (long long b = -1; b <= 1; ++b) small.push_back({a, b});
    Eis one{1};
    for (const auto& a : small)
      for (const auto& b : small)
        for (const auto& c : small)
          for (const auto& d : small) {
            MatE g{a, b, c, d};
            if (g.det() != one) continue;
            bool fresh = true;
            for (const auto& h : out)
              if (in_gamma2(h.inverse_unimodular() * g)) {
                fresh = false;
                break;
              }
            if (fresh) out.push_back(g);
          }
    if (out.size() != 27) throw std::logic_error("gamma2_cosets: expected 27 cosets");
    return out;
  }();
  return reps;
}

// trace of the character of Gamma induced from chi_3 on Gamma_2
inline CycloInt induced_kubota_trace(const MatE& g) {
  CycloInt tr;
  for (const auto& h : gamma2_cosets()) {
    MatE c = h.inverse_unimodular() * g * h;
    if (in_gamma2(c)) tr += kubota_character(c);
  }
  return tr;
}

// number of cosets fixed by g, i.e. the induced trivial character
inline int gamma2_fixed_cosets(const MatE& g) {
  int n = 0;
  for (const auto& h : gamma2_cosets()) n += in_gamma2(h.inverse_unimodular() * g * h);
  return n;
}

struct Psi3Class {
  MatE rep;  // least element of the class found in the box
  Eis trace;
  double norm = 0;
  double lambda = 0;  // log N(gamma_0)
  int power_index = 1;
  std::size_t members = 0;  // box elements in the class
};

inline const std::vector<MatE>& conjugators3() {
  static const std::vector<MatE> g = [] {
    Eis w = Eis::omega(), w2 = w * w;
    MatE T{Eis{1}, Eis{1}, Eis{0}, Eis{1}}, U{Eis{1}, w, Eis{0}, Eis{1}}, S{Eis{0}, Eis{-1}, Eis{1}, Eis{0}},
        D{w, Eis{0}, Eis{0}, w2};
    return std::vector<MatE>{T, T.inverse_unimodular(), U, U.inverse_unimodular(), S, D, D.inverse_unimodular()};
  }();
  return g;
}

struct Psi3Box {
  double x = 0;
  long long R = 0;
  std::vector<Eis> traces;              // canonical sign, N <= x, sorted
  std::vector<std::vector<MatE>> elems;  // per trace, sorted
  std::vector<std::vector<int>> comp;    // per trace, class index of each element
  std::vector<Psi3Class> classes;

  // class index of g (either sign), -1 when g is not in the box
  int class_of(MatE g) const {
    Eis t = g.trace();
    if (!canonical_trace_sign(t)) g = -g, t = -t;
    auto it = std::lower_bound(traces.begin(), traces.end(), t);
    if (it == traces.end() || *it != t) return -1;
    std::size_t ti = static_cast<std::size_t>(it - traces.begin());
    auto jt = std::lower_bound(elems[ti].begin(), elems[ti].end(), g);
    if (jt == elems[ti].end() || *jt != g) return -1;
    return comp[ti][static_cast<std::size_t>(jt - elems[ti].begin())];
  }
};

namespace detail {

struct UnionFind {
  std::vector<int> p;
  explicit UnionFind(std::size_t n) : p(n) { std::iota(p.begin(), p.end(), 0); }
  int find(int i) {
    while (p[i] != i) i = p[i] = p[p[i]];
    return i;
  }
  void unite(int i, int j) {
    i = find(i), j = find(j);
    if (i != j) p[std::max(i, j)] = std::min(i, j);
  }
};

}  // namespace detail

// all loxodromic elements with trace of canonical sign, N <= x, entries |z| <= R,
// grouped by conjugation inside the box
inline Psi3Box psi3_box(double x, long long R, unsigned threads = default_threads()) {
  if (!(x >= 1) || x > 1e3) throw std::domain_error("psi3: x must lie in [1, 1e3]");
  if (R < 1 || R > 64) throw std::domain_error("psi3: radius must lie in [1, 64]");
  Psi3Box box;
  box.x = x;
  box.R = R;
  long long tr_r = static_cast<long long>(std::ceil(std::sqrt(x) + 1));
  for (const auto& t : eis_disk(tr_r))
    if (is_loxodromic_trace(t) && canonical_trace_sign(t) && norm3(t) <= x) box.traces.push_back(t);
  std::sort(box.traces.begin(), box.traces.end());
  std::size_t nt = box.traces.size();
  box.elems.resize(nt);
  box.comp.resize(nt);
  std::vector<std::vector<std::vector<int>>> groups(nt);
  const auto disk = eis_disk(R);
  const long long R2 = R * R;
  Eis one{1};
  run_shards(nt, threads, [&](std::size_t ti) {
    const Eis t = box.traces[ti];
    auto& el = box.elems[ti];
    for (const auto& a : disk) {
      Eis d = t - a;
      if (d.norm() > R2) continue;
      Eis num = a * d - one;
      for (const auto& c : disk) {
        if (c.is_zero()) continue;
        Eis b;
        if (!Eis::divides_exact(num, c, b) || b.norm() > R2) continue;
        el.push_back({a, b, c, d});
      }
    }
    std::sort(el.begin(), el.end());
    detail::UnionFind uf(el.size());
    for (std::size_t i = 0; i < el.size(); ++i)
      for (const auto& g : conjugators3()) {
        MatE h = g * el[i] * g.inverse_unimodular();
        auto it = std::lower_bound(el.begin(), el.end(), h);
        if (it != el.end() && *it == h) uf.unite(static_cast<int>(i), static_cast<int>(it - el.begin()));
      }
    // roots are minimal indices, so groups come out ordered by least member
    std::vector<int> root_slot(el.size(), -1);
    auto& gr = groups[ti];
    for (std::size_t i = 0; i < el.size(); ++i) {
      int r = uf.find(static_cast<int>(i));
      if (root_slot[r] < 0) {
        root_slot[r] = static_cast<int>(gr.size());
        gr.emplace_back();
      }
      gr[root_slot[r]].push_back(static_cast<int>(i));
    }
  });
  for (std::size_t ti = 0; ti < nt; ++ti) {
    box.comp[ti].assign(box.elems[ti].size(), -1);
    for (const auto& g : groups[ti]) {
      Psi3Class c;
      c.rep = box.elems[ti][g.front()];
      c.trace = box.traces[ti];
      c.norm = static_cast<double>(norm3(c.trace));
      PrimitiveRoot pr = primitive_root(c.rep);
      c.power_index = pr.power;
      c.lambda = static_cast<double>(std::log(norm3(pr.root.trace())));
      c.members = g.size();
      int idx = static_cast<int>(box.classes.size());
      for (int i : g) box.comp[ti][i] = idx;
      box.classes.push_back(c);
    }
  }
  return box;
}

// class weight: 1 for the trivial count on PSL2(Z[omega]), tr Ind chi_3 for the Kubota count on Gamma_2
inline std::complex<double> psi3_weight(const MatE& rep, MultiplierTag tag) {
  if (tag == MultiplierTag::Trivial) return 1.0;
  if (tag == MultiplierTag::Kubota) return induced_kubota_trace(rep).value();
  throw std::invalid_argument("psi3: system must be trivial or kubota");
}

inline std::complex<double> psi3_value(const Psi3Box& box, double x, MultiplierTag tag) {
  std::complex<long double> s = 0;
  for (const auto& c : box.classes)
    if (c.norm <= x) {
      auto w = psi3_weight(c.rep, tag) * c.lambda;
      s += std::complex<long double>(w.real(), w.imag());
    }
  return {static_cast<double>(s.real()), static_cast<double>(s.imag())};
}

inline long long psi3_default_radius(double x) { return std::max<long long>(4, static_cast<long long>(std::ceil(std::sqrt(x))) + 1); }

struct Psi3Result {
  std::complex<double> value;      // at radius R
  std::complex<double> value_2R;   // at radius 2R
  long long R = 0;
  std::size_t classes = 0, classes_2R = 0;
  bool stable = false;  // value and class count agree; otherwise non-authoritative
};

inline Psi3Result psi3_bruteforce(double x, MultiplierTag tag, long long R = 0, unsigned threads = default_threads()) {
  if (tag != MultiplierTag::Trivial && tag != MultiplierTag::Kubota)
    throw std::invalid_argument("psi3: system must be trivial or kubota");
  if (R <= 0) R = psi3_default_radius(x);
  Psi3Result r;
  r.R = R;
  Psi3Box b1 = psi3_box(x, R, threads), b2 = psi3_box(x, 2 * R, threads);
  r.value = psi3_value(b1, x, tag);
  r.value_2R = psi3_value(b2, x, tag);
  r.classes = b1.classes.size();
  r.classes_2R = b2.classes.size();
  r.stable = r.classes == r.classes_2R && std::abs(r.value - r.value_2R) <= 1e-9 * std::max(1.0, std::abs(r.value));
  return r;
}

struct RealTraceCheck {
  std::size_t classes_2d = 0;       // PSL2(Z) classes with N <= x
  std::size_t found = 0;            // of those, embedded into a box class
  std::size_t images = 0;           // distinct box classes hit
  std::size_t real_classes_3d = 0;  // box classes with rational-integer trace
  std::size_t lambda_differs = 0;   // hits whose primitive root shrinks over Z[omega]
  bool norms_agree = true;
  bool ok() const { return found == classes_2d && images == classes_2d && norms_agree; }
};

inline RealTraceCheck psi3_real_trace_check(const Psi3Box& box) {
  RealTraceCheck r;
  std::vector<char> hit(box.classes.size(), 0);
  for (const auto& g : enumerate_classes(box.x, true, 1)) {
    ++r.classes_2d;
    int idx = box.class_of(embed<long long>(g.rep));
    if (idx < 0) continue;
    ++r.found;
    if (!hit[idx]) ++r.images;
    hit[idx] = 1;
    const auto& c = box.classes[idx];
    if (std::abs(c.norm - g.norm_float) > 1e-9 * g.norm_float) r.norms_agree = false;
    if (std::abs(c.lambda - g.lambda) > 1e-9) ++r.lambda_differs;
  }
  for (const auto& c : box.classes) r.real_classes_3d += c.trace.b == 0;
  return r;
}

}  // namespace geolab
