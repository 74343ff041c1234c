#include <gtest/gtest.h>

#include <boost/math/special_functions/zeta.hpp>

#include "geolab/kloosterman.hpp"
#include "oracles.hpp"

using namespace geolab;

namespace {

// textbook S(m,n;c): d runs over units mod c, dbar found by search
ExactSum textbook_sum(long long m, long long n, long long c) {
  ExactSum s;
  for (long long d = 0; d < c; ++d) {
    if (std::gcd(d, c) != 1) continue;
    long long dbar = 0;
    while ((dbar * d) % c != 1 % c) ++dbar;
    s.exponents.push_back(frac(Rational(m * dbar + n * d, c)));
  }
  std::sort(s.exponents.begin(), s.exponents.end());
  return s;
}

long long euler_phi(long long c) {
  long long r = 0;
  for (long long d = 1; d <= c; ++d) r += std::gcd(d, c) == 1;
  return r;
}

}  // namespace

TEST(DoubleCosets, Counts) {
  EXPECT_EQ(double_coset_reps(1).size(), 1u);
  EXPECT_EQ(double_coset_reps(3).size(), 2u);
  EXPECT_EQ(double_coset_reps(12).size(), 4u);
  for (long long c = 1; c <= 200; ++c) {
    auto reps = double_coset_reps(c);
    ASSERT_EQ(static_cast<long long>(reps.size()), euler_phi(c));
    for (const auto& r : reps) {
      ASSERT_EQ(r.matrix().det(), 1);
      ASSERT_TRUE(r.d >= 0 && r.d < c);
    }
  }
  EXPECT_THROW(double_coset_reps(0), std::domain_error);
  EXPECT_THROW(double_coset_reps(3, KSystem::Theta), std::domain_error);
  EXPECT_EQ(double_coset_reps(4, KSystem::Theta).size(), 2u);
}

TEST(Kloosterman, SmallValues) {
  EXPECT_NEAR(std::abs(kloosterman_sum(1, 1, 1) - 1.0), 0, 1e-15);
  EXPECT_NEAR(std::abs(kloosterman_sum(1, 1, 3) + 1.0), 0, 1e-15);
  // e(2/3) + e(1/3)
  ExactSum s = kloosterman_sum_exact(1, 1, 3);
  EXPECT_EQ(s.exponents, (std::vector<Rational>{Rational(1, 3), Rational(2, 3)}));
}

TEST(Kloosterman, TrivialMatchesTextbookExactly) {
  for (long long c = 1; c <= 100; ++c)
    for (long long m = -5; m <= 5; ++m)
      for (long long n = -5; n <= 5; ++n) ASSERT_EQ(kloosterman_sum_exact(m, n, c), textbook_sum(m, n, c)) << m << n << c;
}

TEST(Kloosterman, RealAndSymmetric) {
  for (long long c = 1; c <= 60; ++c)
    for (long long m = -3; m <= 3; ++m)
      for (long long n = -3; n <= 3; ++n) {
        auto s = kloosterman_sum(m, n, c);
        ASSERT_NEAR(s.imag(), 0, 1e-12);
        ASSERT_NEAR(std::abs(s - textbook_sum(m, n, c).value()), 0, 1e-12);
        ASSERT_NEAR(std::abs(s - kloosterman_sum(n, m, c)), 0, 1e-12);
      }
}

TEST(Kloosterman, WeilBound) {
  for (long long c = 1; c <= 300; ++c) ASSERT_LE(weil_ratio(1, 1, c), 1.0 + 1e-12) << c;
}

TEST(Kloosterman, ThetaSumsAreLiftIndependent) {
  for (long long c = 2; c <= 100; c += 2)
    for (long long m = -3; m <= 3; ++m)
      for (long long n = -3; n <= 3; ++n) {
        ExactSum base = kloosterman_sum_exact(m, n, c, KSystem::Theta);
        ExactSum lifted;
        for (const auto& r : double_coset_reps(c, KSystem::Theta)) {
          long long j = oracle::uniform(-7, 7), k = oracle::uniform(-7, 7);
          Mat2i g{r.a + j * c, 0, c, r.d + k * c};
          g.b = (g.a * g.d - 1) / c;
          ASSERT_EQ(g.det(), 1);
          lifted.exponents.push_back(kloosterman_term(m, n, g, KSystem::Theta));
        }
        std::sort(lifted.exponents.begin(), lifted.exponents.end());
        ASSERT_EQ(base, lifted) << m << " " << n << " " << c;
      }
  // (1,1,4) example
  auto v = kloosterman_sum(1, 1, 4, KSystem::Theta);
  EXPECT_LE(std::abs(v), 2.0 + 1e-12);
}

TEST(VectorKloosterman, SingleTermAndPhaseInvariance) {
  CuspData cd = theta_cusp_infinity();
  for (int l = 1; l <= 3; ++l) {
    // c = 1: one rep, S itself
    MultiplierMatrix nu = evaluate_theta_multiplier(kS);
    const auto& f = cd.frame[l - 1];
    std::complex<double> w = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) w += std::conj(f[i]) * std::conj(nu.value(i, j)) * f[j];
    EXPECT_NEAR(std::abs(vector_kloosterman(l, 2, 3, 1) - w), 0, 1e-14);
  }
  CuspData rot = cd;
  for (auto& f : rot.frame)
    for (auto& v : f) v *= std::polar(1.0, 0.7);
  for (long long c = 1; c <= 30; ++c)
    for (int l = 1; l <= 3; ++l)
      ASSERT_NEAR(std::abs(vector_kloosterman(l, 1, -2, c, rot) - vector_kloosterman(l, 1, -2, c)), 0, 1e-12);
  EXPECT_THROW(vector_kloosterman(0, 1, 1, 1), std::out_of_range);
}

TEST(VectorKloosterman, FirstComponentIsScalarThetaSum) {
  for (long long c = 1; c <= 80; ++c)
    for (long long m = -2; m <= 2; ++m)
      for (long long n = -2; n <= 2; ++n) {
        auto v = vector_kloosterman(1, m, n, c);
        if (c % 2) {
          ASSERT_NEAR(std::abs(v), 0, 1e-12);
        } else {
          ASSERT_NEAR(std::abs(v - kloosterman_sum(m, n, c, KSystem::Theta)), 0, 1e-11);
        }
      }
}

TEST(Gamma, LanczosAgainstIdentities) {
  for (double x : {0.3, 0.5, 1.0, 2.5, 7.25, 20.0}) EXPECT_NEAR(complex_gamma(x).real() / std::tgamma(x), 1.0, 1e-13);
  // |Gamma(1/2 + it)|^2 = pi / cosh(pi t)
  for (double t : {0.5, 1.0, 3.0, 7.0}) {
    double lhs = std::norm(complex_gamma({0.5, t}));
    EXPECT_NEAR(lhs / (std::numbers::pi / std::cosh(std::numbers::pi * t)), 1.0, 1e-12);
  }
  // Gamma(z + 1) = z Gamma(z)
  std::complex<double> z(1.3, -2.1);
  EXPECT_NEAR(std::abs(complex_gamma(z + 1.0) / (z * complex_gamma(z)) - 1.0), 0, 1e-13);
}

TEST(Eisenstein, TrivialSumsMatchRamanujanClosedForms) {
  // sum_c phi(c) c^{-4} = zeta(3)/zeta(4);  sum_c c_c(n) c^{-2s} = sigma_{1-2s}(n)/zeta(2s)
  using boost::math::zeta;
  PartialSum p0 = eisenstein_coeff_partial(0, 2.0, 3000);
  double want0 = zeta(3.0) / zeta(4.0);
  EXPECT_NEAR((p0.value / p0.prefactor).real(), want0, 3000.0 * std::pow(3000.0, -3.0));
  for (long long n : {1LL, 2LL, 6LL, -5LL}) {
    PartialSum p = eisenstein_coeff_partial(n, 2.0, 2000);
    double sigma = 0;
    for (long long d = 1; d <= std::llabs(n); ++d)
      if (n % d == 0) sigma += std::pow(static_cast<double>(d), -3.0);
    EXPECT_NEAR((p.value / p.prefactor).real(), sigma / zeta(4.0), 1e-6) << n;
  }
}

TEST(Eisenstein, CutoffStability) {
  for (KSystem sys : {KSystem::Trivial, KSystem::Theta})
    for (long long n : {0LL, 1LL, 3LL}) {
      auto a = eisenstein_coeff_partial(n, 2.0, 1000, sys), b = eisenstein_coeff_partial(n, 2.0, 2000, sys);
      EXPECT_LT(std::abs(a.value - b.value), 1e-2);
      // tail majorant sum_{c > 1000} |S| c^{-4} <= sum c^{-3}
      EXPECT_LT(std::abs((a.value - b.value) / a.prefactor), 1.0 / (2.0 * 1000 * 1000));
    }
  auto empty = eisenstein_coeff_partial(1, 2.0, 1, KSystem::Theta);
  EXPECT_EQ(empty.value, std::complex<double>(0));
}
