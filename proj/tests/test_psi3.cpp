#include <gtest/gtest.h>

#include "geolab/psi3.hpp"
#include "oracles.hpp"

using namespace geolab;

namespace {

MatE random_sl2_eis(int steps) {
  // random word in the conjugating generators
  MatE g = MatE::identity();
  const auto& gens = conjugators3();
  for (int i = 0; i < steps; ++i) g = g * gens[oracle::uniform(0, static_cast<long long>(gens.size()) - 1)];
  return g;
}

const Psi3Box& box50() {
  static const Psi3Box b = psi3_box(50, psi3_default_radius(50), 1);
  return b;
}

}  // namespace

TEST(Psi3, CosetsPartitionTheGroup) {
  const auto& reps = gamma2_cosets();
  ASSERT_EQ(reps.size(), 27u);
  for (std::size_t i = 0; i < reps.size(); ++i)
    for (std::size_t j = 0; j < i; ++j) ASSERT_FALSE(in_gamma2(reps[j].inverse_unimodular() * reps[i]));
  for (int k = 0; k < 300; ++k) {
    MatE g = random_sl2_eis(12);
    int hits = 0;
    for (const auto& h : reps) hits += in_gamma2(h.inverse_unimodular() * g);
    ASSERT_EQ(hits, 1);
  }
  EXPECT_EQ(induced_kubota_trace(MatE::identity()), CycloInt(27));
  EXPECT_EQ(gamma2_fixed_cosets(MatE::identity()), 27);
}

TEST(Psi3, InducedTraceOnNormalSubgroup) {
  // every conjugate of an element of Gamma(3) stays in Gamma(3), so all cosets are fixed
  for (int k = 0; k < 50; ++k) {
    auto g = oracle::random_gamma3(4);
    ASSERT_EQ(gamma2_fixed_cosets(g), 27);
    CycloInt sum;
    for (const auto& h : gamma2_cosets()) sum += kubota_gamma3(h.inverse_unimodular() * g * h);
    ASSERT_EQ(induced_kubota_trace(g), sum);
  }
}

TEST(Psi3, InducedTraceIsClassFunction) {
  for (int k = 0; k < 200; ++k) {
    MatE g = random_sl2_eis(10), s = random_sl2_eis(6);
    MatE h = s * g * s.inverse_unimodular();
    ASSERT_EQ(induced_kubota_trace(h), induced_kubota_trace(g));
    ASSERT_EQ(induced_kubota_trace(-g), induced_kubota_trace(g));
  }
}

TEST(Psi3, PrimitiveRoots) {
  int tested = 0;
  for (const auto& c : box50().classes) {
    if (c.power_index != 1 || c.norm > 20) continue;
    for (unsigned m = 2; m <= 3; ++m) {
      MatE p = c.rep.pow(m);
      PrimitiveRoot r = primitive_root(p);
      ASSERT_EQ(r.power, static_cast<int>(m));
      MatE back = r.root.pow(m);
      ASSERT_TRUE(back == p || back == -p);
      ++tested;
    }
  }
  EXPECT_GT(tested, 20);
  for (const auto& c : box50().classes)
    ASSERT_NEAR(c.lambda * c.power_index, std::log(c.norm), 1e-9);
}

TEST(Psi3, BoxElementsAreLoxodromicAndClassesConjugationClosed) {
  const auto& b = box50();
  Eis one{1};
  for (std::size_t ti = 0; ti < b.traces.size(); ++ti)
    for (const auto& g : b.elems[ti]) {
      ASSERT_EQ(g.det(), one);
      ASSERT_TRUE(is_loxodromic_trace(g.trace()));
      ASSERT_LE(norm3(g.trace()), 50.0L);
    }
  // random conjugates that land in the box fall in the same class
  int landed = 0;
  for (int k = 0; k < 4000; ++k) {
    const auto& c = b.classes[oracle::uniform(0, static_cast<long long>(b.classes.size()) - 1)];
    MatE s = random_sl2_eis(oracle::uniform(1, 4));
    int idx = b.class_of(s * c.rep * s.inverse_unimodular());
    if (idx < 0) continue;
    ++landed;
    ASSERT_EQ(b.classes[idx].rep, c.rep);
  }
  EXPECT_GT(landed, 500);
}

TEST(Psi3, KubotaWeightConstantOnClasses) {
  const auto& b = box50();
  for (std::size_t ti = 0; ti < b.traces.size(); ++ti)
    for (std::size_t i = 0; i < b.elems[ti].size(); i += 7) {
      const auto& c = b.classes[b.comp[ti][i]];
      ASSERT_EQ(induced_kubota_trace(b.elems[ti][i]), induced_kubota_trace(c.rep));
    }
}

TEST(Psi3, BelowSmallestNorm) {
  double nmin = static_cast<double>(min_loxodromic_norm());
  EXPECT_GT(nmin, 2.0);
  for (MultiplierTag tag : {MultiplierTag::Trivial, MultiplierTag::Kubota}) {
    auto r = psi3_bruteforce(2.0, tag, 4, 1);
    EXPECT_EQ(r.value, std::complex<double>(0));
    EXPECT_TRUE(r.stable);
  }
}

TEST(Psi3, RadiusDoublingStableAtFifty) {
  for (MultiplierTag tag : {MultiplierTag::Trivial, MultiplierTag::Kubota}) {
    auto r = psi3_bruteforce(50, tag, 0, 1);
    EXPECT_TRUE(r.stable) << to_string(tag);
    EXPECT_EQ(r.classes, r.classes_2R);
    EXPECT_NEAR(std::abs(r.value - r.value_2R), 0, 1e-9);
    EXPECT_NEAR(r.value.imag(), 0, 1e-9);
  }
  // a box that is too small is flagged
  EXPECT_FALSE(psi3_bruteforce(50, MultiplierTag::Trivial, 3, 1).stable);
}

TEST(Psi3, RealTraceSubfamilyMatches2D) {
  auto rc = psi3_real_trace_check(box50());
  EXPECT_TRUE(rc.ok());
  EXPECT_EQ(rc.classes_2d, enumerate_classes(50, true, 1).size());
  EXPECT_EQ(rc.lambda_differs, 0u);
  EXPECT_GE(rc.real_classes_3d, rc.images);
}

TEST(Psi3, Errors) {
  EXPECT_THROW(psi3_box(2e3, 8), std::domain_error);
  EXPECT_THROW(psi3_bruteforce(10, MultiplierTag::Theta), std::invalid_argument);
  EXPECT_THROW(psi3_box(10, 0), std::domain_error);
}
