#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "counting.hpp"
#include "geodesics.hpp"
#include "multipliers.hpp"
#include "parallel.hpp"

namespace geolab {

// a primitive class with det(I - z nu(gamma_0)) = prod over cycles (1 - z^L c)
struct ZetaClass {
  double norm = 0, log_norm = 0;
  int dim = 1;
  std::vector<std::pair<int, std::complex<double>>> cycles;  // (length, product of entries)
};

// cycle structure of a monomial matrix: row i has its entry in column p(i)
inline std::vector<std::pair<int, std::complex<double>>> monomial_cycles(const MultiplierMatrix& m) {
  int n = m.dim();
  std::vector<int> p(n, -1);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (m.at(i, j)) p[i] = j;
  std::vector<char> seen(n, 0);
  std::vector<std::pair<int, std::complex<double>>> out;
  for (int i = 0; i < n; ++i) {
    if (seen[i]) continue;
    if (p[i] < 0) throw std::logic_error("monomial_cycles: singular matrix");
    int len = 0;
    RootOfUnity prod;
    for (int j = i; !seen[j]; j = p[j]) {
      seen[j] = 1;
      prod = prod * *m.at(j, p[j]);
      ++len;
    }
    out.emplace_back(len, prod.value());
  }
  return out;
}

inline std::complex<double> det_one_minus(const std::vector<std::pair<int, std::complex<double>>>& cyc,
                                          std::complex<double> z) {
  std::complex<double> d = 1;
  for (const auto& [L, c] : cyc) d *= 1.0 - std::pow(z, L) * c;
  return d;
}

inline void check_zeta_system(MultiplierTag tag) {
  if (tag != MultiplierTag::Trivial && tag != MultiplierTag::Theta)
    throw std::invalid_argument("zeta: system must be trivial or theta");
}

inline double zeta_region_edge(MultiplierTag tag) {
  return 1.0 - std::abs(boost::rational_cast<double>(system_weight(tag))) / 2;
}

// primitive classes with lo < N <= hi
inline std::vector<ZetaClass> zeta_classes(double lo, double hi, MultiplierTag tag, unsigned threads = default_threads()) {
  check_zeta_system(tag);
  std::vector<ZetaClass> out;
  if (hi < 1) return out;
  for (const auto& g : enumerate_classes(hi, false, threads)) {
    if (g.norm_float <= lo) continue;
    ZetaClass z;
    z.norm = g.norm_float;
    z.log_norm = g.lambda;
    MultiplierMatrix nu = evaluate_multiplier(g.rep, tag);
    z.dim = nu.dim();
    z.cycles = monomial_cycles(nu);
    out.push_back(std::move(z));
  }
  return out;
}

struct ZetaTruncation {
  std::complex<double> s;
  double T = 0;
  int ell_max = 0;  // largest ell used by any class
  MultiplierTag tag = MultiplierTag::Trivial;
  std::complex<double> log_value;
  std::complex<double> value;
  double tail_bound = 0;  // bound on |log Z_T - log Z| (heuristic beyond 16T)
  std::size_t classes = 0;
};

namespace detail {

inline std::complex<double> log1m(std::complex<double> w) {
  if (std::abs(w) < 1e-4) return -(w + w * w / 2.0 + w * w * w / 3.0);
  return std::log(1.0 - w);
}

// sum over ell of log det(I - nu N^{-s-ell}); selberg=false keeps ell = 0 only
inline std::complex<double> class_log_factor(const ZetaClass& c, std::complex<double> s, bool selberg, int& ell_used) {
  std::complex<double> acc = 0;
  double sig = s.real();
  for (int ell = 0;; ++ell) {
    double mag = std::exp(-(sig + ell) * c.log_norm);
    if (ell > 0 && mag < 1e-15) break;
    std::complex<double> z = std::exp(-(s + static_cast<double>(ell)) * c.log_norm);
    for (const auto& [L, cc] : c.cycles) acc += log1m(std::pow(z, L) * cc);
    ell_used = std::max(ell_used, ell);
    if (!selberg) break;
  }
  return acc;
}

// majorant of |log factor| for one class
inline double class_majorant(double log_norm, int dim, double sig, bool selberg) {
  double m = 0;
  for (int ell = 0;; ++ell) {
    double mag = std::exp(-(sig + ell) * log_norm);
    m += -dim * std::log1p(-mag);
    if (!selberg || mag < 1e-17) break;
  }
  return m;
}

inline ZetaTruncation zeta_trunc(std::complex<double> s, double T, MultiplierTag tag, bool selberg,
                                 unsigned threads) {
  check_zeta_system(tag);
  double edge = zeta_region_edge(tag);
  if (!(s.real() > edge))
    throw std::domain_error("zeta: Re(s) must exceed " + std::to_string(edge) + " for this system");
  if (!(T >= 1)) throw std::domain_error("zeta: T must be >= 1");
  ZetaTruncation z;
  z.s = s;
  z.T = T;
  z.tag = tag;
  auto cls = zeta_classes(0, 16 * T, tag, threads);
  std::size_t inside = 0;
  while (inside < cls.size() && cls[inside].norm <= T) ++inside;
  z.classes = inside;
  // fixed shards, merged in order, so the sum does not depend on thread count
  const std::size_t nsh = 32;
  std::vector<std::complex<long double>> part(nsh);
  std::vector<int> ell(nsh, 0);
  run_shards(nsh, threads, [&](std::size_t k) {
    std::complex<long double> a = 0;
    for (std::size_t i = k * inside / nsh; i < (k + 1) * inside / nsh; ++i) {
      auto v = class_log_factor(cls[i], s, selberg, ell[k]);
      a += std::complex<long double>(v.real(), v.imag());
    }
    part[k] = a;
  });
  std::complex<long double> tot = 0;
  for (std::size_t k = 0; k < nsh; ++k) {
    tot += part[k];
    z.ell_max = std::max(z.ell_max, ell[k]);
  }
  z.log_value = {static_cast<double>(tot.real()), static_cast<double>(tot.imag())};
  z.value = std::exp(z.log_value);
  // tail: enumerated window (T, 16T], then a classes-per-norm density 2/log y beyond
  double sig = s.real();
  int dim = tag == MultiplierTag::Theta ? 3 : 1;
  double tail = 0;
  for (std::size_t i = inside; i < cls.size(); ++i) tail += class_majorant(cls[i].log_norm, dim, sig, selberg);
  double Y = std::max(16 * T, 3.0);
  if (sig > 1) {
    tail += 1.05 * dim * 2 * std::pow(Y, 1 - sig) / ((sig - 1) * std::log(Y));
  } else {
    tail = std::numeric_limits<double>::infinity();
  }
  if (selberg) tail += 2.0 * dim * 1e-15 * static_cast<double>(inside);
  z.tail_bound = tail;
  return z;
}

}  // namespace detail

inline ZetaTruncation selberg_zeta_trunc(std::complex<double> s, double T, MultiplierTag tag,
                                         unsigned threads = default_threads()) {
  return detail::zeta_trunc(s, T, tag, true, threads);
}

inline ZetaTruncation ruelle_zeta_trunc(std::complex<double> s, double T, MultiplierTag tag,
                                        unsigned threads = default_threads()) {
  return detail::zeta_trunc(s, T, tag, false, threads);
}

struct RatioCheck {
  double residual = 0;  // |R_T(s) - Z_T(s)/Z_T(s+1)|
  double bound = 0;     // |R_T| (exp(sum of the three log tails) - 1)
  bool ok() const { return residual <= bound; }
};

inline RatioCheck ratio_identity_check(std::complex<double> s, double T, MultiplierTag tag,
                                       unsigned threads = default_threads()) {
  auto R = ruelle_zeta_trunc(s, T, tag, threads);
  auto Z0 = selberg_zeta_trunc(s, T, tag, threads);
  auto Z1 = selberg_zeta_trunc(s + 1.0, T, tag, threads);
  RatioCheck r;
  r.residual = std::abs(R.value - Z0.value / Z1.value);
  r.bound = std::abs(R.value) * std::expm1(R.tail_bound + Z0.tail_bound + Z1.tail_bound);
  return r;
}

}  // namespace geolab
