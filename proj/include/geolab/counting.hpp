#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "arith.hpp"
#include "geodesics.hpp"
#include "multipliers.hpp"

namespace geolab {

// M(x) = sum_j x^{s_j} / s_j over the residual spectrum
struct MainTermShape {
  std::vector<Rational> exponents;
  double operator()(double x) const {
    double m = 0;
    for (const auto& s : exponents) {
      double sd = boost::rational_cast<double>(s);
      m += std::pow(x, sd) / sd;
    }
    return m;
  }
};

// dimension 2: PSL2(Z) with trivial or theta systems; dimension 3: PSL2(Z[omega])
inline MainTermShape main_term_shape(MultiplierTag tag, int dimension = 2) {
  if (dimension == 2) {
    if (tag == MultiplierTag::Trivial) return {{Rational(1)}};
    if (tag == MultiplierTag::Theta) return {{Rational(3, 4)}};
  } else if (dimension == 3) {
    if (tag == MultiplierTag::Trivial) return {{Rational(2)}};
    if (tag == MultiplierTag::Kubota) return {{Rational(4, 3)}};
  }
  throw std::invalid_argument("main_term: no main term for system " + to_string(tag) + " in dimension " +
                              std::to_string(dimension));
}

inline double main_term(double x, MultiplierTag tag, int dimension = 2) {
  if (!(x >= 1)) throw std::domain_error("main_term: x must be >= 1");
  return main_term_shape(tag, dimension)(x);
}

inline Rational system_weight(MultiplierTag tag) {
  return tag == MultiplierTag::Trivial || tag == MultiplierTag::Kubota ? Rational(0) : Rational(1, 2);
}

// Psi(x) as a step function: strictly increasing norms, weight of each jump, prefix sums
struct PsiSeries {
  MultiplierTag tag = MultiplierTag::Trivial;
  MainTermShape main;
  Rational weight{0};
  double x_max = 1;
  std::vector<double> norms;
  std::vector<std::complex<double>> weights;
  std::vector<std::complex<double>> prefix;  // prefix[i] = Psi(norms[i])

  std::size_t size() const { return norms.size(); }

  std::complex<double> psi(double x) const {
    if (x > x_max * (1 + 1e-15)) throw std::out_of_range("psi: x beyond series range " + std::to_string(x_max));
    auto it = std::upper_bound(norms.begin(), norms.end(), x);
    if (it == norms.begin()) return 0;
    return prefix[static_cast<std::size_t>(it - norms.begin()) - 1];
  }
};

// events need not be sorted; equal norms are merged in input order
inline PsiSeries make_series(std::vector<std::pair<double, std::complex<double>>> events, double x_max,
                             MainTermShape main, MultiplierTag tag = MultiplierTag::Trivial, Rational weight = Rational(0)) {
  std::stable_sort(events.begin(), events.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  PsiSeries s;
  s.tag = tag;
  s.main = std::move(main);
  s.weight = weight;
  s.x_max = x_max;
  std::complex<long double> acc = 0;
  for (const auto& [n, w] : events) {
    if (n > x_max) continue;
    if (!s.norms.empty() && s.norms.back() == n) {
      s.weights.back() += w;
    } else {
      s.norms.push_back(n);
      s.weights.push_back(w);
    }
  }
  for (const auto& w : s.weights) {
    acc += std::complex<long double>(w.real(), w.imag());
    s.prefix.emplace_back(static_cast<double>(acc.real()), static_cast<double>(acc.imag()));
  }
  return s;
}

// events (N(gamma), tr nu(gamma) Lambda(gamma)) over all classes with N <= x_max
inline PsiSeries build_psi(double x_max, MultiplierTag tag, unsigned threads = default_threads()) {
  if (!(x_max >= 1)) throw std::domain_error("build_psi: x_max must be >= 1");
  MainTermShape main = main_term_shape(tag, 2);
  auto classes = enumerate_classes(x_max, true, threads);
  std::vector<std::pair<double, std::complex<double>>> events(classes.size());
  run_shards(64, threads, [&](std::size_t sh) {
    std::size_t n = classes.size(), lo = sh * n / 64, hi = (sh + 1) * n / 64;
    for (std::size_t i = lo; i < hi; ++i)
      events[i] = {classes[i].norm_float, class_trace(classes[i].rep, tag).value() * classes[i].lambda};
  });
  return make_series(std::move(events), x_max, std::move(main), tag, system_weight(tag));
}

inline std::complex<double> error_at(const PsiSeries& s, double x) {
  if (!(x >= 1) || x > s.x_max * (1 + 1e-15)) throw std::out_of_range("error_at: x outside [1, x_max]");
  return s.psi(x) - s.main(x);
}

namespace detail {

template <unsigned N>
double gauss_piece(const std::function<double(double)>& f, double a, double b) {
  return boost::math::quadrature::gauss<double, N>::integrate(f, a, b);
}

}  // namespace detail

// ((1/Y) int_X^{X+Y} |E|^2)^{1/2}; E is P - M(x) with P constant between events
inline double second_moment(const PsiSeries& s, double X, double Y, unsigned nodes = 20) {
  if (!(Y > 0) || !(X >= 1)) throw std::domain_error("second_moment: need X >= 1, Y > 0");
  if (X + Y > s.x_max * (1 + 1e-15)) throw std::out_of_range("second_moment: window exceeds series range");
  auto lo = std::upper_bound(s.norms.begin(), s.norms.end(), X);
  auto hi = std::upper_bound(s.norms.begin(), s.norms.end(), X + Y);
  std::vector<double> cuts{X};
  for (auto it = lo; it != hi; ++it) cuts.push_back(*it);
  cuts.push_back(X + Y);
  long double total = 0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    double a = cuts[i], b = cuts[i + 1];
    if (b <= a) continue;
    std::complex<double> P = s.psi(a);
    std::function<double(double)> f = [&](double x) { return std::norm(P - s.main(x)); };
    double v = 0;
    switch (nodes) {
      case 10: v = detail::gauss_piece<10>(f, a, b); break;
      case 20: v = detail::gauss_piece<20>(f, a, b); break;
      case 40: v = detail::gauss_piece<40>(f, a, b); break;
      default: throw std::invalid_argument("second_moment: nodes must be 10, 20 or 40");
    }
    total += v;
  }
  return std::sqrt(static_cast<double>(total / Y));
}

struct ShortInterval {
  std::complex<double> lhs;
  double rhs_main = 0;
  bool hypothesis_ok = true;  // x^{(1+|k|)/2} <= y <= x
  int terms = 0;
};

// Psi(x+y) - Psi(x) against sum_{l>=1} binom(s, l) x^{s-l} y^l / s
inline ShortInterval short_interval_diff(const PsiSeries& s, double x, double y) {
  if (!(x >= 1) || y < 0) throw std::domain_error("short_interval_diff: need x >= 1, y >= 0");
  if (x + y > s.x_max * (1 + 1e-15)) throw std::out_of_range("short_interval_diff: x + y beyond series range");
  ShortInterval r;
  r.lhs = s.psi(x + y) - s.psi(x);
  double k = std::abs(boost::rational_cast<double>(s.weight));
  r.hypothesis_ok = y >= std::pow(x, (1 + k) / 2) && y <= x;
  if (y == 0) return r;
  if (y > x) {
    // binomial series diverges; closed difference instead
    r.rhs_main = s.main(x + y) - s.main(x);
    return r;
  }
  const int cap = 2000000;
  for (const auto& sr : s.main.exponents) {
    double sd = boost::rational_cast<double>(sr);
    double coeff = 1, sum = 0;  // coeff = binom(s, l) x^{s-l} y^l
    double base = std::pow(x, sd), ratio = y / x;
    for (int l = 1; l <= cap; ++l) {
      coeff *= (sd - (l - 1)) / l * ratio;
      double term = coeff * base / sd;
      sum += term;
      ++r.terms;
      if (coeff == 0 || std::abs(term) < 1e-12 * std::abs(sum)) break;
    }
    r.rhs_main += sum;
  }
  return r;
}

struct ExponentFit {
  double slope = 0, stderr_ = 0;
  int used = 0;
};

// OLS slope of log|E| on log x over a geometric grid, skipping |E| < 1e-9
inline ExponentFit fit_error_exponent(const std::function<std::complex<double>(double)>& E, double x_lo, double x_hi,
                                      int n_samples) {
  if (n_samples < 10) throw std::invalid_argument("fit_error_exponent: need at least 10 samples");
  if (!(x_lo > 0) || !(x_hi > x_lo)) throw std::invalid_argument("fit_error_exponent: need 0 < x_lo < x_hi");
  std::vector<double> lx, ly;
  for (int i = 0; i < n_samples; ++i) {
    double x = x_lo * std::pow(x_hi / x_lo, static_cast<double>(i) / (n_samples - 1));
    if (i == n_samples - 1) x = x_hi;
    double a = std::abs(E(x));
    if (a < 1e-9) continue;
    lx.push_back(std::log(x));
    ly.push_back(std::log(a));
  }
  std::size_t n = lx.size();
  if (n < 3) throw std::runtime_error("fit_error_exponent: fewer than 3 usable samples");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) mx += lx[i], my += ly[i];
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  ExponentFit f;
  f.slope = sxy / sxx;
  double icpt = my - f.slope * mx, rss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double r = ly[i] - icpt - f.slope * lx[i];
    rss += r * r;
  }
  f.stderr_ = std::sqrt(rss / (n - 2) / sxx);
  f.used = static_cast<int>(n);
  return f;
}

inline ExponentFit fit_error_exponent(const PsiSeries& s, double x_lo, double x_hi, int n_samples) {
  return fit_error_exponent([&](double x) { return error_at(s, x); }, x_lo, x_hi, n_samples);
}

}  // namespace geolab
