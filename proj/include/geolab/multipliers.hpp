#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "arith.hpp"
#include "mat2.hpp"

namespace geolab {

// ---------------------------------------------------------------- factor system

namespace detail {

// half-plane code for principal arguments in (-pi, pi]:
// 0: y < 0, 1: positive real axis, 2: y > 0, 3: negative real axis
inline int arg_region(long long x, long long y) {
  if (y < 0) return 0;
  if (y == 0) return x > 0 ? 1 : 3;
  return 2;
}

// sign of Arg(x1 + i y1) - Arg(x2 + i y2), both nonzero
inline int arg_compare(long long x1, long long y1, long long x2, long long y2) {
  int r1 = arg_region(x1, y1), r2 = arg_region(x2, y2);
  if (r1 != r2) return r1 < r2 ? -1 : 1;
  if (r1 == 1 || r1 == 3) return 0;
  __int128 cr = static_cast<__int128>(x1) * y2 - static_cast<__int128>(y1) * x2;
  return cr > 0 ? -1 : (cr < 0 ? 1 : 0);
}

}  // namespace detail

// w~(g1, g2) in {-1, 0, 1}:  2 pi w~ = arg j(g1, g2 z) + arg j(g2, z) - arg j(g1 g2, z),
// principal arguments, evaluated at z = i.  With B = j(g2, i), A = j(g1 g2, i),
// j(g1, g2 i) = A / B.
inline int factor_system_integer(const Mat2i& g1, const Mat2i& g2) {
  Mat2i g12 = mul_checked(g1, g2);
  long long bx = g2.d, by = g2.c;    // B = c2 i + d2
  long long ax = g12.d, ay = g12.c;  // A
  int sB = detail::arg_compare(bx, by, 1, 0);  // sign of Arg B
  if (sB < 0) {
    // Arg(-B) = Arg B + pi
    if (detail::arg_compare(ax, ay, -bx, -by) > 0) return -1;
  } else if (sB > 0) {
    if (detail::arg_compare(ax, ay, -bx, -by) <= 0) return 1;
  }
  return 0;
}

inline RootOfUnity factor_system(const Mat2i& g1, const Mat2i& g2, const Rational& k) {
  int w = factor_system_integer(g1, g2);
  if (w == 0) return RootOfUnity();
  return RootOfUnity::from_rational(k * Rational(w));
}

// ---------------------------------------------------------------- generator words

enum class Gen { T, S };

struct GeneratorWord {
  // gamma = sign * prod (gen ^ power); S always carries power 1
  std::vector<std::pair<Gen, long long>> letters;
  bool negated = false;

  Mat2i product() const {
    Mat2i m = Mat2i::identity();
    for (auto [g, p] : letters) {
      if (g == Gen::T) m = mul_checked(m, Mat2i{1, p, 0, 1});
      else m = mul_checked(m, kS);
    }
    return negated ? -m : m;
  }
  std::size_t length() const { return letters.size(); }
  std::string str() const {
    std::ostringstream os;
    if (negated) os << "-";
    for (std::size_t i = 0; i < letters.size(); ++i) {
      if (i) os << " ";
      if (letters[i].first == Gen::S) os << "S";
      else os << "T^" << letters[i].second;
    }
    return os.str();
  }
};

// continued-fraction descent: gamma = T^{q1} S T^{q2} S ... (+-T^n)
inline GeneratorWord word_decompose(Mat2i g) {
  if (g.det() != 1) throw std::domain_error("word_decompose: determinant must be 1");
  GeneratorWord w;
  while (g.c != 0) {
    long long q = floor_div<long long>(g.a, g.c);
    long long rem = g.a - q * g.c;
    if (2 * (rem < 0 ? -rem : rem) > (g.c < 0 ? -g.c : g.c)) ++q;  // nearest remainder, so |c| halves
    if (q != 0) w.letters.push_back({Gen::T, q});
    // g <- S^{-1} T^{-q} g
    long long a = g.a - q * g.c, b = g.b - q * g.d;
    g = {g.c, g.d, -a, -b};
    w.letters.push_back({Gen::S, 1});
  }
  // g = +-(1 n; 0 1)
  if (g.a == -1) {
    w.negated = true;
    g = -g;
  }
  if (g.b != 0) w.letters.push_back({Gen::T, g.b});
  return w;
}

// ---------------------------------------------------------------- exact monomial matrices

class MultiplierMatrix {
 public:
  explicit MultiplierMatrix(int n = 1) : n_(n), e_(static_cast<std::size_t>(n * n)) {}
  static MultiplierMatrix identity(int n) {
    MultiplierMatrix m(n);
    for (int i = 0; i < n; ++i) m.set(i, i, RootOfUnity());
    return m;
  }
  static MultiplierMatrix scalar(RootOfUnity r) {
    MultiplierMatrix m(1);
    m.set(0, 0, r);
    return m;
  }

  int dim() const { return n_; }
  const std::optional<RootOfUnity>& at(int i, int j) const { return e_[i * n_ + j]; }
  void set(int i, int j, std::optional<RootOfUnity> v) { e_[i * n_ + j] = v; }

  // product stays monomial for permutation-times-diagonal inputs; anything
  // else would need cyclotomic sums and is rejected
  friend MultiplierMatrix operator*(const MultiplierMatrix& x, const MultiplierMatrix& y) {
    if (x.n_ != y.n_) throw std::invalid_argument("MultiplierMatrix: dimension mismatch");
    MultiplierMatrix r(x.n_);
    for (int i = 0; i < x.n_; ++i)
      for (int j = 0; j < x.n_; ++j) {
        std::optional<RootOfUnity> acc;
        for (int k = 0; k < x.n_; ++k) {
          if (!x.at(i, k) || !y.at(k, j)) continue;
          if (acc) throw std::logic_error("MultiplierMatrix: product is not monomial");
          acc = *x.at(i, k) * *y.at(k, j);
        }
        r.set(i, j, acc);
      }
    return r;
  }
  friend MultiplierMatrix operator*(RootOfUnity s, MultiplierMatrix m) {
    for (auto& v : m.e_)
      if (v) v = s * *v;
    return m;
  }
  friend bool operator==(const MultiplierMatrix&, const MultiplierMatrix&) = default;

  MultiplierMatrix pow(long long k) const {
    MultiplierMatrix base = k < 0 ? adjoint() : *this;
    unsigned long long e = k < 0 ? static_cast<unsigned long long>(-k) : static_cast<unsigned long long>(k);
    MultiplierMatrix r = identity(n_);
    while (e) {
      if (e & 1) r = r * base;
      base = base * base;
      e >>= 1;
    }
    return r;
  }

  MultiplierMatrix adjoint() const {
    MultiplierMatrix r(n_);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j)
        if (at(j, i)) r.set(i, j, at(j, i)->conj());
    return r;
  }

  bool is_unitary() const { return *this * adjoint() == identity(n_); }

  CycloInt trace() const {
    CycloInt t;
    for (int i = 0; i < n_; ++i)
      if (at(i, i)) t += *at(i, i);
    return t;
  }

  std::complex<double> value(int i, int j) const { return at(i, j) ? at(i, j)->value() : std::complex<double>(0); }

  // rows separated by ';', entries as exponents q meaning e(q), '0' for zero
  std::string str() const {
    std::ostringstream os;
    for (int i = 0; i < n_; ++i) {
      if (i) os << "; ";
      for (int j = 0; j < n_; ++j) {
        if (j) os << " ";
        if (!at(i, j)) {
          os << "0";
        } else {
          Rational q = at(i, j)->exponent();
          os << "e(" << q.numerator() << "/" << q.denominator() << ")";
        }
      }
    }
    return os.str();
  }

 private:
  int n_;
  std::vector<std::optional<RootOfUnity>> e_;
};

// ---------------------------------------------------------------- 3-fold theta multiplier

// components ordered (theta_2, theta_3, theta_4), theta_j(z) with nome e^{pi i z}
inline const Rational kThetaWeight(1, 2);

inline MultiplierMatrix theta_nu_T() {
  MultiplierMatrix m(3);
  m.set(0, 0, RootOfUnity::from_rational(1, 8));
  m.set(1, 2, RootOfUnity());
  m.set(2, 1, RootOfUnity());
  return m;
}

inline MultiplierMatrix theta_nu_S() {
  MultiplierMatrix m(3);
  auto f = RootOfUnity::from_rational(-1, 8);
  m.set(0, 2, f);
  m.set(1, 1, f);
  m.set(2, 0, f);
  return m;
}

// weight-1/2 axiom: nu(-I) = e^{-k pi i} = e(-1/4)
inline MultiplierMatrix theta_nu_minus_identity() {
  return RootOfUnity::from_rational(-1, 4) * MultiplierMatrix::identity(3);
}

inline MultiplierMatrix evaluate_theta_multiplier(const Mat2i& g) {
  GeneratorWord w = word_decompose(g);
  static const MultiplierMatrix nT = theta_nu_T(), nS = theta_nu_S();
  MultiplierMatrix M = MultiplierMatrix::identity(3);
  Mat2i P = Mat2i::identity();
  for (auto [gen, p] : w.letters) {
    Mat2i W = gen == Gen::S ? kS : Mat2i{1, p, 0, 1};
    M = factor_system(P, W, kThetaWeight) * (M * (gen == Gen::S ? nS : nT.pow(p)));
    P = mul_checked(P, W);
  }
  if (P == g) return M;
  // g = (-I) P
  return factor_system(-Mat2i::identity(), P, kThetaWeight) * (theta_nu_minus_identity() * M);
}

// Numerical ground truth: ratio Theta(g z) / (cz+d)^{1/2} against Theta(z) at
// three points z = p/q + i, solved for the 3x3 matrix.  Phases use exact
// rational reduction so large entries do not lose accuracy.
using CMat3 = std::array<std::array<std::complex<long double>, 3>, 3>;

namespace detail {

struct ThetaPoint {
  long long p, q;
};

// theta_2, theta_3, theta_4 at w with Re w = nr / dn, Im w = y (exactly q^2 / dn)
inline std::array<std::complex<long double>, 3> theta_values_exact(__int128 nr, __int128 dn, long double y) {
  const long double pi = std::numbers::pi_v<long double>;
  std::complex<long double> t2 = 0, t3 = 1, t4 = 1;
  for (long long n = 1;; ++n) {
    long double mag = std::exp(-pi * static_cast<long double>(n) * n * y);
    if (mag < 1e-20L) break;
    __int128 n2 = static_cast<__int128>(n) * n;
    __int128 r = ((n2 % (2 * dn)) * (nr % (2 * dn))) % (2 * dn);
    if (r < 0) r += 2 * dn;
    long double ph = pi * static_cast<long double>(r) / static_cast<long double>(dn);
    std::complex<long double> term = std::polar(mag, ph);
    t3 += 2.0L * term;
    t4 += (n % 2 ? -2.0L : 2.0L) * term;
  }
  for (long long n = 0;; ++n) {
    long long m = 2 * n + 1;
    long double mag = std::exp(-pi * static_cast<long double>(m) * m * y / 4.0L);
    if (mag < 1e-20L) break;
    __int128 m2 = static_cast<__int128>(m) * m;
    __int128 r = ((m2 % (8 * dn)) * (nr % (8 * dn))) % (8 * dn);
    if (r < 0) r += 8 * dn;
    long double ph = pi * static_cast<long double>(r) / (4.0L * static_cast<long double>(dn));
    t2 += 2.0L * std::polar(mag, ph);
  }
  return {t2, t3, t4};
}

inline CMat3 inverse3(const CMat3& m) {
  CMat3 inv;
  auto c = [&](int i, int j) { return m[i % 3][j % 3]; };
  std::complex<long double> det = 0;
  for (int j = 0; j < 3; ++j) det += m[0][j] * (c(1, j + 1) * c(2, j + 2) - c(1, j + 2) * c(2, j + 1));
  if (std::abs(det) < 1e-12L) throw std::runtime_error("theta_oracle: ill-conditioned sample points");
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) inv[j][i] = (c(i + 1, j + 1) * c(i + 2, j + 2) - c(i + 1, j + 2) * c(i + 2, j + 1)) / det;
  return inv;
}

}  // namespace detail

inline CMat3 theta_oracle_matrix(const Mat2i& g) {
  if (g.det() != 1) throw std::domain_error("theta_oracle: determinant must be 1");
  static const detail::ThetaPoint pts[3] = {{0, 1}, {1, 3}, {-2, 5}};
  CMat3 L{}, R{};
  for (int j = 0; j < 3; ++j) {
    __int128 p = pts[j].p, q = pts[j].q;
    __int128 a = g.a, b = g.b, c = g.c, d = g.d;
    __int128 nr = a * c * (p * p + q * q) + (a * d + b * c) * p * q + b * d * q * q;
    __int128 dn = (c * p + d * q) * (c * p + d * q) + c * c * q * q;
    long double y = static_cast<long double>(q * q) / static_cast<long double>(dn);
    auto lhs = detail::theta_values_exact(nr, dn, y);
    auto rhs = detail::theta_values_exact(p * q, q * q, 1.0L);
    std::complex<long double> j_gz(static_cast<long double>(c * p + d * q) / static_cast<long double>(q),
                                   static_cast<long double>(g.c));
    std::complex<long double> sq = std::sqrt(j_gz);
    for (int i = 0; i < 3; ++i) {
      L[i][j] = lhs[i] / sq;
      R[i][j] = rhs[i];
    }
  }
  CMat3 Ri = detail::inverse3(R), out{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) out[i][j] += L[i][k] * Ri[k][j];
  return out;
}

// row `component` (1..3) of the measured multiplier matrix
inline std::array<std::complex<double>, 3> theta_oracle(const Mat2i& g, int component) {
  if (component < 1 || component > 3) throw std::out_of_range("theta_oracle: component must be 1..3");
  CMat3 m = theta_oracle_matrix(g);
  std::array<std::complex<double>, 3> row;
  for (int j = 0; j < 3; ++j) row[j] = std::complex<double>(m[component - 1][j]);
  return row;
}

// ---------------------------------------------------------------- scalar theta multipliers

enum class ScalarTheta { Nu2, Nu3, Nu4 };

inline bool in_gamma0_2(const Mat2i& g) { return g.det() == 1 && mod_pos(g.c, 2LL) == 0; }
inline bool in_gamma_upper0_2(const Mat2i& g) { return g.det() == 1 && mod_pos(g.b, 2LL) == 0; }
// gamma = I or S mod 2
inline bool in_gamma_theta(const Mat2i& g) {
  if (g.det() != 1) return false;
  long long a = mod_pos(g.a, 2LL), b = mod_pos(g.b, 2LL), c = mod_pos(g.c, 2LL), d = mod_pos(g.d, 2LL);
  return (a == 1 && b == 0 && c == 0 && d == 1) || (a == 0 && b == 1 && c == 1 && d == 0);
}

inline RootOfUnity signed_root(int sign, const Rational& q) {
  RootOfUnity r = RootOfUnity::from_rational(q);
  return sign < 0 ? RootOfUnity::from_rational(1, 2) * r : r;
}

inline RootOfUnity nu2(const Mat2i& g) {
  if (!in_gamma0_2(g)) throw std::domain_error("nu2: matrix not in Gamma_0(2)");
  int s = jacobi_extended<long long>(g.c, g.d);
  return signed_root(s, Rational(g.d - 1 + g.b * g.d, 8));
}

inline RootOfUnity nu3(const Mat2i& g) {
  if (!in_gamma_theta(g)) throw std::domain_error("nu3: matrix not in Gamma_theta");
  if (mod_pos(g.c, 2LL) == 0) return signed_root(jacobi_extended<long long>(g.c, g.d), Rational(g.d - 1, 8));
  // here the series oracle wants the plain symbol (d/|c|); the negative-modulus
  // sign rule would flip the value when c < 0 and d < 0
  long long ac = g.c < 0 ? -g.c : g.c;
  return signed_root(jacobi_positive<long long>(g.d, ac), Rational(-g.c, 8));
}

inline RootOfUnity nu4(const Mat2i& g) {
  if (!in_gamma_upper0_2(g)) throw std::domain_error("nu4: matrix not in Gamma^0(2)");
  return nu3(mul_checked(mul_checked(kTinv, g), kT));
}

inline RootOfUnity evaluate_scalar_multiplier(const Mat2i& g, ScalarTheta which) {
  switch (which) {
    case ScalarTheta::Nu2: return nu2(g);
    case ScalarTheta::Nu3: return nu3(g);
    case ScalarTheta::Nu4: return nu4(g);
  }
  throw std::invalid_argument("unknown scalar multiplier");
}

// cusp at infinity for nu_Theta: nu_Theta(T) eigenvalues e(kappa) with frames
struct CuspData {
  std::string label;
  std::vector<Rational> kappa;
  std::vector<std::array<std::complex<double>, 3>> frame;
};

inline CuspData theta_cusp_infinity() {
  const double h = std::sqrt(0.5);
  return {"inf",
          {Rational(1, 8), Rational(0), Rational(1, 2)},
          {{{1.0, 0.0, 0.0}}, {{0.0, h, h}}, {{0.0, h, -h}}}};
}

// ---------------------------------------------------------------- Kubota character

template <class I>
using Mat2E = Mat2<EisensteinInt<I>>;

template <class I>
bool eis_congruent(const EisensteinInt<I>& x, long long a, long long b) {
  return mod_pos<I>(x.a - a, I(3)) == 0 && mod_pos<I>(x.b - b, I(3)) == 0;
}

// entries congruent to the identity mod 3
template <class I>
bool in_gamma3(const Mat2E<I>& g) {
  return g.det() == EisensteinInt<I>(1) && eis_congruent(g.a, 1, 0) && eis_congruent(g.b, 0, 0) &&
         eis_congruent(g.c, 0, 0) && eis_congruent(g.d, 1, 0);
}

// chi_3 on Gamma(3): (c/d)_3, or 1 when c = 0
template <class I>
RootOfUnity kubota_gamma3(const Mat2E<I>& g) {
  if (!in_gamma3(g)) throw std::domain_error("kubota: matrix not in Gamma(3)");
  if (g.c.is_zero() || g.d.is_unit()) return RootOfUnity();
  auto s = cubic_residue_symbol(g.c, g.d);
  if (!s) throw std::logic_error("kubota: c and d not coprime");
  return *s;
}

// Gamma_2: reduction mod 3 lands in SL2(Z/3), i.e. every omega-coefficient is 0 mod 3
template <class I>
bool in_gamma2(const Mat2E<I>& g) {
  if (g.det() != EisensteinInt<I>(1)) return false;
  for (const auto* x : {&g.a, &g.b, &g.c, &g.d})
    if (mod_pos<I>(x->b, I(3)) != 0) return false;
  return true;
}

namespace detail {

// fixed SL2(Z) lift of each element of SL2(Z/3), indexed by a + 3b + 9c + 27d
inline const std::array<std::optional<Mat2i>, 81>& sl2_f3_lifts() {
  static const auto table = [] {
    std::array<std::optional<Mat2i>, 81> t{};
    for (long long c0 = 0; c0 < 3; ++c0)
      for (long long d0 = 0; d0 < 3; ++d0) {
        if (c0 == 0 && d0 == 0) continue;
        long long c = c0, d = d0;
        if (c == 0) d = d0 == 1 ? 1 : -1;
        else
          while (gcd_abs(c, d) != 1) d += 3;
        long long x, y;
        ext_gcd<long long>(c, d, x, y);  // x c + y d = 1
        long long a = y, b = -x;
        for (int k = 0; k < 3; ++k) {
          long long ak = a + k * c, bk = b + k * d;
          int idx = static_cast<int>(mod_pos(ak, 3LL) + 3 * mod_pos(bk, 3LL) + 9 * c0 + 27 * d0);
          t[idx] = Mat2i{ak, bk, c, d};
        }
      }
    return t;
  }();
  return table;
}

}  // namespace detail

// the SL2(Z) lift sigma with sigma = g (mod 3), for g in Gamma_2
template <class I>
Mat2i gamma2_coset_lift(const Mat2E<I>& g) {
  if (!in_gamma2(g)) throw std::domain_error("kubota: matrix not in Gamma_2");
  auto r = [](const EisensteinInt<I>& x) { return static_cast<int>(mod_pos<I>(x.a, I(3))); };
  const auto& s = detail::sl2_f3_lifts()[r(g.a) + 3 * r(g.b) + 9 * r(g.c) + 27 * r(g.d)];
  if (!s) throw std::logic_error("kubota: missing SL2(Z/3) lift");
  return *s;
}

template <class I>
Mat2E<I> embed(const Mat2i& m) {
  using E = EisensteinInt<I>;
  return {E(I(m.a)), E(I(m.b)), E(I(m.c)), E(I(m.d))};
}

// chi on Gamma_2 = SL2(Z) Gamma(3), trivial on SL2(Z): chi(sigma g') = chi_3(g')
template <class I>
RootOfUnity kubota_character(const Mat2E<I>& g) {
  if (in_gamma3(g)) return kubota_gamma3(g);
  Mat2i s = gamma2_coset_lift(g);
  Mat2E<I> rest = embed<I>(s.inverse_unimodular()) * g;
  return kubota_gamma3(rest);
}

// ---------------------------------------------------------------- systems and class traces

enum class MultiplierTag { Trivial, Theta, Nu2, Nu3, Nu4, Kubota };

inline MultiplierTag parse_multiplier_tag(const std::string& s) {
  if (s == "trivial") return MultiplierTag::Trivial;
  if (s == "theta") return MultiplierTag::Theta;
  if (s == "nu2") return MultiplierTag::Nu2;
  if (s == "nu3") return MultiplierTag::Nu3;
  if (s == "nu4") return MultiplierTag::Nu4;
  if (s == "kubota") return MultiplierTag::Kubota;
  throw std::invalid_argument("unknown multiplier system: " + s);
}

inline std::string to_string(MultiplierTag t) {
  switch (t) {
    case MultiplierTag::Trivial: return "trivial";
    case MultiplierTag::Theta: return "theta";
    case MultiplierTag::Nu2: return "nu2";
    case MultiplierTag::Nu3: return "nu3";
    case MultiplierTag::Nu4: return "nu4";
    case MultiplierTag::Kubota: return "kubota";
  }
  return "?";
}

inline int multiplier_dimension(MultiplierTag t) { return t == MultiplierTag::Theta ? 3 : 1; }

// integer matrices only; Kubota takes gamma embedded in SL2(Z[omega]), where it is trivial
inline MultiplierMatrix evaluate_multiplier(const Mat2i& g, MultiplierTag t) {
  switch (t) {
    case MultiplierTag::Trivial: return MultiplierMatrix::identity(1);
    case MultiplierTag::Theta: return evaluate_theta_multiplier(g);
    case MultiplierTag::Nu2: return MultiplierMatrix::scalar(nu2(g));
    case MultiplierTag::Nu3: return MultiplierMatrix::scalar(nu3(g));
    case MultiplierTag::Nu4: return MultiplierMatrix::scalar(nu4(g));
    case MultiplierTag::Kubota: return MultiplierMatrix::scalar(kubota_character(embed<long long>(g)));
  }
  throw std::invalid_argument("unknown multiplier system");
}

// tr nu(gamma) at the given representative (positive trace for geodesic classes)
inline CycloInt class_trace(const Mat2i& rep, MultiplierTag t) {
  if (t == MultiplierTag::Trivial) return CycloInt(1);
  return evaluate_multiplier(rep, t).trace();
}

}  // namespace geolab
