#include <gtest/gtest.h>

#include <set>

#include "geolab/arith.hpp"
#include "oracles.hpp"

using namespace geolab;
using E = EisensteinInt<long long>;

TEST(RootOfUnity, GroupLaws) {
  for (int i = 0; i < 24; ++i)
    for (int j = 0; j < 24; ++j) {
      auto a = RootOfUnity::from_24ths(i), b = RootOfUnity::from_24ths(j);
      EXPECT_EQ(a * b, b * a);
      EXPECT_EQ((a * b) * a.inverse(), b);
      EXPECT_NEAR(std::abs(a.value()), 1.0, 1e-15);
    }
  auto q = RootOfUnity::from_rational(5, 8);
  EXPECT_EQ(q * RootOfUnity::from_rational(3, 8), RootOfUnity());
  EXPECT_EQ(RootOfUnity::from_rational(-1, 4), RootOfUnity::from_rational(3, 4));
  EXPECT_THROW(RootOfUnity::from_rational(1, 5), std::domain_error);
  EXPECT_THROW(RootOfUnity::from_rational(1, 48), std::domain_error);
}

TEST(CycloInt, ExactRelations) {
  CycloInt s;
  for (int j = 0; j < 3; ++j) s += RootOfUnity::from_rational(j, 3);
  EXPECT_TRUE(s.is_zero());
  CycloInt t;
  t += RootOfUnity::from_rational(1, 8);
  t += RootOfUnity::from_rational(5, 8);
  EXPECT_TRUE(t.is_zero());
  // (1 + i)^2 = 2i
  CycloInt u(1);
  u += RootOfUnity::from_rational(1, 4);
  CycloInt two_i = CycloInt(RootOfUnity::from_rational(1, 4)) + CycloInt(RootOfUnity::from_rational(1, 4));
  EXPECT_EQ(u * u, two_i);
  for (int k = 0; k < 24; ++k) {
    CycloInt z(RootOfUnity::from_24ths(k));
    EXPECT_NEAR(std::abs(z.value() - RootOfUnity::from_24ths(k).value()), 0, 1e-14);
  }
}

TEST(Jacobi, Examples) {
  for (long long c : {-7LL, 0LL, 1LL, 2LL, 10LL, 12345LL}) EXPECT_EQ(jacobi_extended<long long>(c, 1), 1);
  EXPECT_EQ(jacobi_extended<long long>(2, 7), oracle::euler_legendre(2, 7));
  EXPECT_EQ(jacobi_extended<long long>(2, 7), 1);
  EXPECT_EQ(jacobi_extended<long long>(3, 5), oracle::euler_legendre(3, 5));
  EXPECT_EQ(jacobi_extended<long long>(3, 5), -1);
  EXPECT_THROW(jacobi_extended<long long>(3, 4), std::domain_error);
  EXPECT_EQ(jacobi_extended<long long>(0, -1), 1);
}

TEST(Jacobi, AgreesWithFactoringOracle) {
  for (long long d = 1; d < 400; d += 2)
    for (long long c = -60; c <= 60; ++c) {
      int want = oracle::jacobi_by_factoring(c, d);
      ASSERT_EQ(jacobi_extended<long long>(c, d), want) << c << "/" << d;
      // negative modulus, Shimura sign rule
      ASSERT_EQ(jacobi_extended<long long>(c, -d), c < 0 ? -want : want) << c << "/" << -d;
      ASSERT_EQ(want == 0, gcd_abs(c, d) > 1 && d > 1);
    }
}

TEST(Jacobi, MultiplicativeAndPeriodic) {
  for (long long d = 3; d < 200; d += 2)
    for (long long c1 = -20; c1 <= 20; ++c1)
      for (long long c2 = -5; c2 <= 5; ++c2) {
        ASSERT_EQ(jacobi_extended<long long>(c1 * c2, d),
                  jacobi_extended<long long>(c1, d) * jacobi_extended<long long>(c2, d));
        ASSERT_EQ(jacobi_extended<long long>(c1 + d * c2, d), jacobi_extended<long long>(c1, d));
      }
}

TEST(Jacobi, BigIntMatches) {
  for (long long d = 1; d < 200; d += 2)
    for (long long c = -30; c <= 30; ++c) {
      ASSERT_EQ(jacobi_extended<BigInt>(BigInt(c), BigInt(d)), jacobi_extended<long long>(c, d));
      ASSERT_EQ(jacobi_extended<BigInt>(BigInt(c), BigInt(-d)), jacobi_extended<long long>(c, -d));
    }
}

TEST(Eisenstein, NormMultiplicative) {
  for (int i = 0; i < 10000; ++i) {
    E x(oracle::uniform(-1000, 1000), oracle::uniform(-1000, 1000));
    E y(oracle::uniform(-1000, 1000), oracle::uniform(-1000, 1000));
    ASSERT_EQ((x * y).norm(), x.norm() * y.norm());
  }
  EXPECT_EQ(E::lambda().norm(), 3);
  EXPECT_EQ(E::omega() * E::omega(), E(-1, -1));
  int units = 0;
  for (long long a = -2; a <= 2; ++a)
    for (long long b = -2; b <= 2; ++b) units += E(a, b).is_unit();
  EXPECT_EQ(units, 6);
}

TEST(Eisenstein, EuclideanDivision) {
  for (int i = 0; i < 5000; ++i) {
    E x(oracle::uniform(-10000, 10000), oracle::uniform(-10000, 10000));
    E y(oracle::uniform(-100, 100), oracle::uniform(-100, 100));
    if (y.is_zero()) continue;
    E q, r;
    E::divmod(x, y, q, r);
    ASSERT_EQ(q * y + r, x);
    ASSERT_LT(r.norm(), y.norm());
  }
}

TEST(Primary, Examples) {
  auto [u1, p1] = primary_normalize(E(-1, 0));
  EXPECT_EQ(u1, E(1, 0));
  EXPECT_EQ(p1, E(-1, 0));
  auto [u2, p2] = primary_normalize(E(1, 0));
  EXPECT_EQ(u2, E(-1, 0));
  EXPECT_EQ(p2, E(-1, 0));
  auto [u3, p3] = primary_normalize(E(0, 1));
  EXPECT_TRUE(is_primary(p3));
  EXPECT_EQ(u3 * E(0, 1), p3);
  EXPECT_THROW(primary_normalize(E::lambda()), std::domain_error);
}

TEST(Primary, UniqueAmongAssociates) {
  for (long long a = -30; a <= 30; ++a)
    for (long long b = -30; b <= 30; ++b) {
      E x(a, b);
      if (divisible_by_lambda(x)) continue;
      int n = 0;
      for (const auto& u : eisenstein_units<long long>()) n += is_primary(u * x);
      ASSERT_EQ(n, 1) << x;
      auto [u, p] = primary_normalize(x);
      ASSERT_EQ(u * x, p);
      ASSERT_TRUE(is_primary(p));
    }
}

TEST(CubicSymbol, Examples) {
  EXPECT_EQ(cubic_residue_symbol(E(1, 0), E(2, 0)), RootOfUnity());
  EXPECT_EQ(cubic_residue_symbol(E(0, 1), E(2, 0)), RootOfUnity::from_rational(1, 3));
  EXPECT_EQ(oracle::cubic_by_congruence(E(0, 1), E(2, 0)), 1);
  EXPECT_THROW(cubic_residue_symbol(E(2, 0), E(0, 1)), std::domain_error);
  EXPECT_THROW(cubic_residue_symbol(E(2, 0), E::lambda()), std::domain_error);
  EXPECT_FALSE(cubic_residue_symbol(E(14, 0), E(7, 0)).has_value());
  for (long long a = -20; a <= 20; ++a)
    for (long long b = -20; b <= 20; ++b) {
      E beta(a, b);
      if (beta.is_zero() || beta.is_unit() || divisible_by_lambda(beta)) continue;
      ASSERT_EQ(cubic_residue_symbol(E(1, 0), beta), RootOfUnity());
    }
}

TEST(CubicSymbol, MatchesCongruenceOracleSmallPrimes) {
  for (const auto& pr : oracle::eisenstein_primes(2000)) {
    long long N = pr.norm;
    std::vector<E> residues;
    if (pr.pi.b == 0) {
      long long q = pr.pi.a;
      for (long long a = 0; a < q; ++a)
        for (long long b = 0; b < q; ++b) residues.push_back(E(a, b));
    } else {
      for (long long a = 0; a < N; ++a) residues.push_back(E(a, 0));
    }
    for (const E& alpha : residues) {
      int want = oracle::cubic_by_congruence(alpha, pr.pi);
      auto got = cubic_residue_symbol(alpha, pr.pi);
      if (want < 0) {
        ASSERT_FALSE(got.has_value());
      } else {
        ASSERT_TRUE(got.has_value());
        ASSERT_EQ(got->n24(), 8 * want) << alpha << " / " << pr.pi;
      }
    }
  }
}

TEST(CubicSymbol, MultiplicativeInDenominator) {
  auto primes = oracle::eisenstein_primes(400);
  for (int it = 0; it < 2000; ++it) {
    const E& p1 = primes[oracle::uniform(0, primes.size() - 1)].pi;
    const E& p2 = primes[oracle::uniform(0, primes.size() - 1)].pi;
    E alpha(oracle::uniform(-500, 500), oracle::uniform(-500, 500));
    auto s12 = cubic_residue_symbol(alpha, p1 * p2);
    auto s1 = cubic_residue_symbol(alpha, p1), s2 = cubic_residue_symbol(alpha, p2);
    if (!s1 || !s2) {
      ASSERT_FALSE(s12.has_value());
    } else {
      ASSERT_EQ(*s12, *s1 * *s2);
    }
  }
}

TEST(CubicSymbol, ReciprocityOnPrimaryPrimes) {
  auto primes = oracle::eisenstein_primes(5000);
  for (int it = 0; it < 3000; ++it) {
    E p = primary_normalize(primes[oracle::uniform(0, primes.size() - 1)].pi).second;
    E q = primary_normalize(primes[oracle::uniform(0, primes.size() - 1)].pi).second;
    if (p.norm() == q.norm()) continue;
    int pq = oracle::cubic_by_congruence(p, q), qp = oracle::cubic_by_congruence(q, p);
    ASSERT_EQ(pq, qp);
    ASSERT_EQ(cubic_residue_symbol(p, q)->n24(), 8 * pq);
  }
}

TEST(CubicSymbol, BigIntMatches) {
  using EB = EisensteinInt<BigInt>;
  for (int it = 0; it < 500; ++it) {
    E alpha(oracle::uniform(-10000, 10000), oracle::uniform(-10000, 10000));
    E beta(oracle::uniform(-300, 300), oracle::uniform(-300, 300));
    if (beta.is_zero() || beta.is_unit() || divisible_by_lambda(beta)) continue;
    auto s = cubic_residue_symbol(alpha, beta);
    auto sb = cubic_residue_symbol(EB(alpha), EB(beta));
    ASSERT_EQ(s.has_value(), sb.has_value());
    if (s) {
      ASSERT_EQ(*s, *sb);
    }
  }
}

TEST(QuadraticSurd, ExactOrder) {
  QuadraticSurd a(3, 1, 5, 2), b(7, 3, 5, 2);  // phi^2 and phi^4
  EXPECT_TRUE(a < b);
  EXPECT_EQ(a * a, b);
  EXPECT_NEAR(a.to_double(), 2.6180339887498949, 1e-15);
  EXPECT_TRUE(a.le_integer(3));
  EXPECT_FALSE(a.le_integer(2));
  // monotone conversion
  std::vector<QuadraticSurd> v;
  for (int p = -20; p <= 20; ++p)
    for (int q = -5; q <= 5; ++q) v.emplace_back(p, q, 7, 3);
  std::sort(v.begin(), v.end());
  for (std::size_t i = 1; i < v.size(); ++i) EXPECT_LE(v[i - 1].to_double(), v[i].to_double());
  EXPECT_THROW((void)(QuadraticSurd(1, 1, 5) < QuadraticSurd(1, 1, 7)), std::domain_error);
}
