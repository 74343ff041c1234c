#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "arith.hpp"
#include "mat2.hpp"
#include "multipliers.hpp"

namespace geolab {

// Trivial: SL2(Z) at (inf, inf).  Theta: the scalar theta system nu_2 on
// Gamma_0(2) at (inf, inf), weight 1/2, cusp parameter kappa = 1/8.
enum class KSystem { Trivial, Theta };

inline KSystem parse_ksystem(const std::string& s) {
  if (s == "trivial") return KSystem::Trivial;
  if (s == "theta") return KSystem::Theta;
  throw std::invalid_argument("unknown Kloosterman system: " + s);
}

inline Rational ksystem_kappa(KSystem s) { return s == KSystem::Theta ? Rational(1, 8) : Rational(0); }
inline Rational ksystem_weight(KSystem s) { return s == KSystem::Theta ? Rational(1, 2) : Rational(0); }

inline bool modulus_allowed(long long c, KSystem s) {
  if (c <= 0) return false;
  return s == KSystem::Trivial || c % 2 == 0;
}

struct DoubleCosetRep {
  long long c, a, b, d;
  Mat2i matrix() const { return {a, b, c, d}; }
};

inline long long inverse_mod(long long d, long long c) {
  long long x, y;
  if (ext_gcd<long long>(d, c, x, y) != 1) throw std::domain_error("inverse_mod: not invertible");
  return mod_pos(x, c);
}

// d mod c with gcd(d, c) = 1, lifted to (a b; c d) with a = d^{-1} mod c
inline std::vector<DoubleCosetRep> double_coset_reps(long long c, KSystem s = KSystem::Trivial) {
  if (!modulus_allowed(c, s)) throw std::domain_error("double_coset_reps: modulus " + std::to_string(c) + " not allowed");
  std::vector<DoubleCosetRep> out;
  for (long long d = 0; d < c; ++d) {
    if (gcd_abs(d, c) != 1) continue;
    long long a = c == 1 ? 0 : inverse_mod(d, c);
    long long b = (a * d - 1) / c;
    out.push_back({c, a, b, d});
  }
  return out;
}

inline Rational frac(const Rational& q) {
  long long n = q.numerator(), den = q.denominator();
  return Rational(mod_pos(n, den), den);
}

inline std::complex<double> e_rational(const Rational& q) {
  Rational f = frac(q);
  long double th = 2.0L * std::numbers::pi_v<long double> * f.numerator() / f.denominator();
  return {static_cast<double>(std::cos(th)), static_cast<double>(std::sin(th))};
}

// the sum as a sorted multiset of exponents q in [0, 1), value = sum e(q)
struct ExactSum {
  std::vector<Rational> exponents;
  std::complex<double> value() const {
    std::complex<long double> s = 0;
    for (const auto& q : exponents) {
      auto v = e_rational(q);
      s += std::complex<long double>(v.real(), v.imag());
    }
    return {static_cast<double>(s.real()), static_cast<double>(s.imag())};
  }
  friend bool operator==(const ExactSum&, const ExactSum&) = default;
};

// exponent of conj(nu(gamma)) e(((m + kappa) a + (n + kappa) d) / c) for one lift
inline Rational kloosterman_term(long long m, long long n, const Mat2i& g, KSystem s) {
  Rational kap = ksystem_kappa(s);
  Rational q = ((Rational(m) + kap) * Rational(g.a) + (Rational(n) + kap) * Rational(g.d)) / Rational(g.c);
  if (s == KSystem::Theta) q -= nu2(g).exponent();
  return frac(q);
}

inline ExactSum kloosterman_sum_exact(long long m, long long n, long long c, KSystem s = KSystem::Trivial) {
  ExactSum out;
  for (const auto& r : double_coset_reps(c, s)) out.exponents.push_back(kloosterman_term(m, n, r.matrix(), s));
  std::sort(out.exponents.begin(), out.exponents.end());
  return out;
}

inline std::complex<double> kloosterman_sum(long long m, long long n, long long c, KSystem s = KSystem::Trivial) {
  if (s != KSystem::Trivial) return kloosterman_sum_exact(m, n, c, s).value();
  if (c <= 0) throw std::domain_error("kloosterman_sum: modulus must be positive");
  // integer residues only, no multiset
  const long double tau = 2.0L * std::numbers::pi_v<long double> / c;
  long long mm = mod_pos(m, c), nn = mod_pos(n, c);
  std::complex<long double> acc = 0;
  for (long long d = 0; d < c; ++d) {
    if (gcd_abs(d, c) != 1) continue;
    long long a = c == 1 ? 0 : inverse_mod(d, c);
    long long r = static_cast<long long>((static_cast<__int128>(mm) * a + static_cast<__int128>(nn) * d) % c);
    acc += std::polar(1.0L, tau * r);
  }
  return {static_cast<double>(acc.real()), static_cast<double>(acc.imag())};
}

// Weil-size diagnostic |S(m,n;c)| / (tau(c) sqrt c)
inline double weil_ratio(long long m, long long n, long long c) {
  long long tau = 0;
  for (long long k = 1; k * k <= c; ++k)
    if (c % k == 0) tau += (k * k == c) ? 1 : 2;
  return std::abs(kloosterman_sum(m, n, c)) / (static_cast<double>(tau) * std::sqrt(static_cast<double>(c)));
}

// ---------------------------------------------------------------- vector-valued sums for nu_Theta

// sum over SL2(Z) double cosets of (f_l)^H conj(nu_Theta(gamma)) f_l e((m_l a + n_l d)/c),
// m_l = m + kappa_l; the frame may be rescaled by phases without changing the value
inline std::complex<double> vector_kloosterman(int l, long long m, long long n, long long c,
                                               const CuspData& cusp = theta_cusp_infinity()) {
  if (l < 1 || l > 3) throw std::out_of_range("vector_kloosterman: component must be 1..3");
  const auto& f = cusp.frame[l - 1];
  Rational kap = cusp.kappa[l - 1];
  std::complex<long double> total = 0;
  for (const auto& r : double_coset_reps(c, KSystem::Trivial)) {
    MultiplierMatrix nu = evaluate_theta_multiplier(r.matrix());
    std::complex<double> w = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) w += std::conj(f[i]) * std::conj(nu.value(i, j)) * f[j];
    Rational q = ((Rational(m) + kap) * Rational(r.a) + (Rational(n) + kap) * Rational(r.d)) / Rational(c);
    auto ph = e_rational(q);
    std::complex<double> term = w * ph;
    total += std::complex<long double>(term.real(), term.imag());
  }
  return {static_cast<double>(total.real()), static_cast<double>(total.imag())};
}

// ---------------------------------------------------------------- Eisenstein coefficients

// Lanczos approximation (g = 7, 9 terms) with reflection; about 15 digits
inline std::complex<double> complex_gamma(std::complex<double> z) {
  static const double g = 7.0;
  static const double coef[9] = {0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
                                 771.32342877765313,   -176.61502916214059,   12.507343278686905,
                                 -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
  const double pi = std::numbers::pi;
  if (z.real() < 0.5) return pi / (std::sin(pi * z) * complex_gamma(1.0 - z));
  z -= 1.0;
  std::complex<double> x = coef[0];
  for (int i = 1; i < 9; ++i) x += coef[i] / (z + static_cast<double>(i));
  std::complex<double> t = z + g + 0.5;
  return std::sqrt(2 * pi) * std::pow(t, z + 0.5) * std::exp(-t) * x;
}

struct PartialSum {
  std::complex<double> value;
  double last_increment = 0;  // |prefactor * S(0,n,c)/c^{2s}| at the largest allowed c used
  std::complex<double> prefactor;
};

// gamma-factor prefactor of the Fourier coefficient rho(n, s) at (inf, inf)
inline std::complex<double> eisenstein_prefactor(long long n, std::complex<double> s, KSystem sys) {
  const double pi = std::numbers::pi;
  double k = boost::rational_cast<double>(ksystem_weight(sys));
  double nb = static_cast<double>(n) + boost::rational_cast<double>(ksystem_kappa(sys));
  std::complex<double> phase = std::polar(1.0, -2 * pi * k / 4);
  if (nb != 0) {
    double sg = nb > 0 ? 1.0 : -1.0;
    return phase * std::pow(pi, s) * std::pow(std::abs(nb), s - 1.0) / complex_gamma(s + 0.5 * k * sg);
  }
  return phase * std::pow(4.0, 1.0 - s) * pi * complex_gamma(2.0 * s - 1.0) /
         (complex_gamma(s + 0.5 * k) * complex_gamma(s - 0.5 * k));
}

inline PartialSum eisenstein_coeff_partial(long long n, std::complex<double> s, long long c_max,
                                           KSystem sys = KSystem::Trivial) {
  PartialSum out;
  out.prefactor = eisenstein_prefactor(n, s, sys);
  std::complex<double> acc = 0;
  for (long long c = 1; c <= c_max; ++c) {
    if (!modulus_allowed(c, sys)) continue;
    std::complex<double> term = kloosterman_sum(0, n, c, sys) * std::pow(static_cast<double>(c), -2.0 * s);
    acc += term;
    out.last_increment = std::abs(out.prefactor * term);
  }
  out.value = out.prefactor * acc;
  return out;
}

}  // namespace geolab
