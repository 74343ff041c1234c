#include <gtest/gtest.h>

#include <map>

#include "geolab/counting.hpp"
#include "oracles.hpp"

using namespace geolab;

namespace {

const double kLogNormT3 = 2.0 * std::log((3.0 + std::sqrt(5.0)) / 2.0);

// Psi by exhaustive L/R-word enumeration, weights from the word matrix
std::complex<double> psi_bruteforce(double x, MultiplierTag tag) {
  std::complex<double> s = 0;
  for (const auto& c : brute_force_classes(x)) {
    if (trace_norm_float(c.trace) > x) continue;
    std::complex<double> tr = 1;
    if (tag == MultiplierTag::Theta) tr = evaluate_theta_multiplier(word_matrix(c.word)).trace().value();
    s += tr * c.lambda;
  }
  return s;
}

// int_a^b (P - x^s/s)^2 dx, closed form
long double piece_closed(long double P, long double s, long double a, long double b) {
  auto pw = [](long double x, long double e) { return std::pow(x, e); };
  return P * P * (b - a) - 2 * P * (pw(b, s + 1) - pw(a, s + 1)) / (s * (s + 1)) +
         (pw(b, 2 * s + 1) - pw(a, 2 * s + 1)) / (s * s * (2 * s + 1));
}

}  // namespace

TEST(MainTerm, Examples) {
  EXPECT_DOUBLE_EQ(main_term(100, MultiplierTag::Trivial), 100.0);
  EXPECT_NEAR(main_term(16, MultiplierTag::Theta), 32.0 / 3.0, 1e-12);
  EXPECT_NEAR(main_term(8, MultiplierTag::Kubota, 3), 12.0, 1e-12);
  EXPECT_NEAR(main_term(10, MultiplierTag::Trivial, 3), 50.0, 1e-12);
  EXPECT_THROW(main_term(10, MultiplierTag::Nu2), std::invalid_argument);
  EXPECT_THROW(main_term(10, MultiplierTag::Kubota, 2), std::invalid_argument);
  EXPECT_THROW(main_term(0.5, MultiplierTag::Trivial), std::domain_error);
}

TEST(BuildPsi, SmallValues) {
  for (MultiplierTag tag : {MultiplierTag::Trivial, MultiplierTag::Theta}) {
    auto s = build_psi(6, tag, 1);
    EXPECT_EQ(s.size(), 0u);
    EXPECT_EQ(s.psi(6), std::complex<double>(0));
  }
  auto s = build_psi(10, MultiplierTag::Trivial, 1);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_NEAR(s.psi(10).real(), 1.92485, 1e-5);
  EXPECT_NEAR(s.psi(10).real(), kLogNormT3, 1e-14);
  // weight of the trace-3 class measured by the theta series
  auto th = build_psi(10, MultiplierTag::Theta, 1);
  Mat2i g = enumerate_classes(10, true, 1).at(0).rep;
  CMat3 m = theta_oracle_matrix(g);
  std::complex<double> tr(m[0][0] + m[1][1] + m[2][2]);
  EXPECT_NEAR(std::abs(th.psi(10) - tr * kLogNormT3), 0, 1e-8);
  EXPECT_THROW(build_psi(0.5, MultiplierTag::Trivial), std::domain_error);
  EXPECT_THROW(s.psi(11), std::out_of_range);
}

TEST(BuildPsi, MatchesBruteForceEnumeration) {
  for (MultiplierTag tag : {MultiplierTag::Trivial, MultiplierTag::Theta}) {
    auto s = build_psi(480, tag, 1);
    for (double x : {7.0, 20.0, 50.0, 123.4, 200.0, 480.0})
      EXPECT_NEAR(std::abs(s.psi(x) - psi_bruteforce(x, tag)), 0, 1e-9) << to_string(tag) << " " << x;
  }
}

TEST(BuildPsi, SeriesInvariants) {
  auto tr = build_psi(1e5, MultiplierTag::Trivial, 1);
  auto th = build_psi(1e5, MultiplierTag::Theta, 1);
  ASSERT_EQ(tr.norms, th.norms);
  for (std::size_t i = 0; i < tr.size(); ++i) {
    if (i) {
      ASSERT_LT(tr.norms[i - 1], tr.norms[i]);
    }
    ASSERT_GT(tr.weights[i].real(), 0);
    ASSERT_EQ(tr.weights[i].imag(), 0);
    ASSERT_LE(std::abs(th.prefix[i]), 3 * tr.prefix[i].real() + 1e-9);
  }
  // prefix sums reproduce a direct sum of the weights
  std::complex<long double> acc = 0;
  for (std::size_t i = 0; i < th.size(); ++i) acc += std::complex<long double>(th.weights[i].real(), th.weights[i].imag());
  EXPECT_NEAR(std::abs(std::complex<double>(acc) - th.prefix.back()), 0, 1e-9);
  auto th3 = build_psi(1e5, MultiplierTag::Theta, 3);
  EXPECT_EQ(th.prefix, th3.prefix);
}

TEST(BuildPsi, MergesEqualNorms) {
  auto s = make_series({{3.0, 1.0}, {2.0, 0.5}, {3.0, 2.0}, {9.0, 1.0}}, 5.0, {});
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s.weights[1], std::complex<double>(3.0));
  EXPECT_EQ(s.psi(4), std::complex<double>(3.5));
}

TEST(ErrorAt, StepStructure) {
  auto s = build_psi(1e3, MultiplierTag::Trivial, 1);
  EXPECT_DOUBLE_EQ(error_at(s, 5).real(), -5.0);
  EXPECT_NEAR(error_at(s, 10).real(), kLogNormT3 - 10, 1e-12);
  for (std::size_t i = 0; i < s.size(); ++i) {
    double n = s.norms[i];
    auto jump = error_at(s, n) - error_at(s, std::nextafter(n, 0.0));
    ASSERT_NEAR(std::abs(jump - s.weights[i]), 0, 1e-9);
  }
  EXPECT_THROW(error_at(s, 2e3), std::out_of_range);
}

TEST(SecondMoment, SyntheticAndDegenerate) {
  std::complex<double> c(2.0, -1.5);
  auto s = make_series({{1.5, c}}, 10.0, {});
  EXPECT_NEAR(second_moment(s, 2, 5), std::abs(c), 1e-12);
  auto tr = build_psi(2e3, MultiplierTag::Trivial, 1);
  for (double X : {100.0, 777.0, 1500.0}) EXPECT_NEAR(second_moment(tr, X, 1e-7), std::abs(error_at(tr, X)), 1e-3);
  EXPECT_THROW(second_moment(tr, 1900, 200), std::out_of_range);
  EXPECT_THROW(second_moment(tr, 100, 0), std::domain_error);
}

TEST(SecondMoment, ClosedFormAndNodeDoubling) {
  auto tr = build_psi(2e5, MultiplierTag::Trivial, 1);
  double X = 1e5, Y = std::sqrt(X);
  long double total = 0;
  std::vector<double> cuts{X};
  for (double n : tr.norms)
    if (n > X && n <= X + Y) cuts.push_back(n);
  cuts.push_back(X + Y);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) total += piece_closed(tr.psi(cuts[i]).real(), 1, cuts[i], cuts[i + 1]);
  double want = std::sqrt(static_cast<double>(total / Y));
  double got = second_moment(tr, X, Y);
  EXPECT_NEAR(got / want, 1.0, 1e-8);
  EXPECT_NEAR(second_moment(tr, X, Y, 40) / got, 1.0, 1e-6);
  EXPECT_NEAR(second_moment(tr, X, Y, 10) / got, 1.0, 1e-6);
  EXPECT_LE(got, std::pow(X, 0.72));
  // theta, exponent 3/4 main term
  auto th = build_psi(2e4, MultiplierTag::Theta, 1);
  total = 0;
  cuts = {1e4};
  for (double n : th.norms)
    if (n > 1e4 && n <= 1.2e4) cuts.push_back(n);
  cuts.push_back(1.2e4);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    total += piece_closed(th.psi(cuts[i]).real(), 0.75L, cuts[i], cuts[i + 1]);
  EXPECT_NEAR(second_moment(th, 1e4, 2e3) / std::sqrt(static_cast<double>(total / 2e3)), 1.0, 1e-8);
}

TEST(ShortInterval, BinomialMainTerm) {
  auto tr = build_psi(3e4, MultiplierTag::Trivial, 1);
  auto z = short_interval_diff(tr, 500, 0);
  EXPECT_EQ(z.lhs, std::complex<double>(0));
  EXPECT_EQ(z.rhs_main, 0);
  auto r = short_interval_diff(tr, 1e4, 1234.5);
  EXPECT_EQ(r.rhs_main, 1234.5);
  EXPECT_EQ(r.terms, 2);
  auto th = build_psi(3e4, MultiplierTag::Theta, 1);
  for (double y : {10.0, 1e3, 5e3, 1e4}) {
    auto q = short_interval_diff(th, 1e4, y);
    double closed = th.main(1e4 + y) - th.main(1e4);
    EXPECT_NEAR(q.rhs_main / closed, 1.0, 1e-10) << y;
  }
  EXPECT_FALSE(short_interval_diff(th, 1e4, 10).hypothesis_ok);
  EXPECT_TRUE(short_interval_diff(th, 1e4, 2e3).hypothesis_ok);
  // envelope over 20 windows
  for (int i = 0; i < 20; ++i) {
    double x = 1e4 * (1 + 0.05 * i);
    auto q = short_interval_diff(th, x, 1e3);
    EXPECT_LE(std::abs(q.lhs - q.rhs_main), std::pow(x, 0.75)) << x;
  }
  EXPECT_THROW(short_interval_diff(th, 2.9e4, 2e3), std::out_of_range);
}

TEST(ExponentFit, Synthetic) {
  auto p = fit_error_exponent([](double x) { return std::complex<double>(std::pow(x, 0.6)); }, 1e3, 1e6, 64);
  EXPECT_NEAR(p.slope, 0.6, 1e-6);
  EXPECT_NEAR(p.stderr_, 0, 1e-6);
  // the grid has to cover several periods of cos(log x); [1e3, 1e6] alone gives 0.58
  auto osc = [](double x) { return std::complex<double>(std::sqrt(x) * std::cos(std::log(x))); };
  for (auto [lo, hi] : {std::pair{1.0, 1e6}, std::pair{2.0, 1e12}, std::pair{1e3, 1e9}}) {
    auto f = fit_error_exponent(osc, lo, hi, 64);
    EXPECT_GE(f.slope, 0.45) << lo << " " << hi;
    EXPECT_LE(f.slope, 0.55) << lo << " " << hi;
  }
  EXPECT_THROW(fit_error_exponent([](double) { return std::complex<double>(0); }, 1, 10, 20), std::runtime_error);
  EXPECT_THROW(fit_error_exponent(osc, 1, 10, 9), std::invalid_argument);
}

TEST(ExponentFit, TrivialSeries) {
  auto tr = build_psi(1e6, MultiplierTag::Trivial, 1);
  auto f = fit_error_exponent(tr, 1e3, 1e6, 64);
  EXPECT_LT(f.slope, 0.85);
  EXPECT_NEAR(tr.psi(1e6).real() / 1e6, 1.0, 0.05);
}
