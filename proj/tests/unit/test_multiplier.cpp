#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "permchar/error.hpp"
#include "permchar/harness.hpp"
#include "permchar/multiplier.hpp"

namespace permchar {
namespace {

constexpr double kPi = std::numbers::pi;

double ks_uniform(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    d = std::max({d, (i + 1) / n - xs[i], xs[i] - i / n});
  }
  return d;
}

Complex fourier_moment(const std::vector<double>& angles, int j) {
  Complex sum = 0.0;
  for (double a : angles) sum += std::polar(1.0, -2.0 * kPi * j * a);
  return sum / static_cast<double>(angles.size());
}

TEST(UnitAngle, ArithmeticModOne) {
  EXPECT_DOUBLE_EQ(UnitAngle(1.25).phi(), 0.25);
  EXPECT_DOUBLE_EQ(UnitAngle(-0.25).phi(), 0.75);
  EXPECT_DOUBLE_EQ((UnitAngle(0.75) + UnitAngle(0.5)).phi(), 0.25);
  EXPECT_DOUBLE_EQ((-UnitAngle(0.25)).phi(), 0.75);
  EXPECT_DOUBLE_EQ(UnitAngle(0.3).times(10).phi(), frac(3.0));
  EXPECT_LT(UnitAngle(std::nextafter(1.0, 0.0)).phi(), 1.0);
}

TEST(SampleZ, Trivial) {
  Stream s(1);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(sample_z(MultiplierModel::trivial(), s).phi(), 0.0);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(sample_T(MultiplierModel::trivial(), 7, s).phi(), 0.0);
}

TEST(SampleZ, UniformCircularMean) {
  Stream s(2);
  std::vector<double> xs;
  for (int i = 0; i < 100000; ++i) xs.push_back(sample_z(MultiplierModel::uniform(), s).phi());
  EXPECT_LE(std::abs(fourier_moment(xs, 1)), 0.02);
}

TEST(SampleZ, DiscreteFrequency) {
  Stream s(3);
  const auto model = MultiplierModel::discrete(2, {0.75, 0.25});
  int half = 0;
  for (int i = 0; i < 100000; ++i) half += sample_z(model, s).phi() == 0.5;
  EXPECT_NEAR(half / 100000.0, 0.25, 0.01);
}

TEST(SampleT, UniformStaysUniform) {
  Stream s(4);
  for (std::size_t m : {1, 2, 5}) {
    std::vector<double> xs;
    for (int i = 0; i < 100000; ++i) xs.push_back(sample_T(MultiplierModel::uniform(), m, s).phi());
    EXPECT_LE(ks_uniform(xs), 0.01) << m;
  }
}

TEST(SampleT, FourierMomentsMatchPowers) {
  Stream s(5);
  const auto model = MultiplierModel::fourier({{0, 1.0}, {1, 0.4}, {-1, 0.4}});
  constexpr int kDraws = 100000;
  for (std::size_t m : {1, 3}) {
    std::vector<double> xs;
    for (int i = 0; i < kDraws; ++i) xs.push_back(sample_T(model, m, s).phi());
    const Complex c1 = fourier_moment(xs, 1);
    const double expected = std::pow(0.4, static_cast<double>(m));
    const double se = std::sqrt(0.5 / kDraws);
    EXPECT_NEAR(c1.real(), expected, std::max(0.01, 3 * se)) << m;
    EXPECT_NEAR(c1.imag(), 0.0, 3 * se);
  }
}

TEST(Fourier, Validation) {
  EXPECT_THROW(MultiplierModel::fourier({{0, 0.5}}), Error);
  EXPECT_THROW(MultiplierModel::fourier({{0, 1.0}, {1, 1.0}}), Error);
  // Coefficients with |c_j| < 1 whose density goes negative.
  EXPECT_THROW(MultiplierModel::fourier({{0, 1.0}, {1, 0.9}, {2, 0.9}}), Error);
  const auto ok = MultiplierModel::fourier({{0, 1.0}, {1, Complex(0.2, 0.1)}});
  const auto& g = std::get<FourierDensity>(ok.variant());
  EXPECT_EQ(g.coeffs.at(-1), Complex(0.2, -0.1));
}

TEST(ConvolvedCoeffs, Examples) {
  const auto model = MultiplierModel::fourier({{0, 1.0}, {1, 0.5}});
  const auto& g = std::get<FourierDensity>(model.variant());
  EXPECT_EQ(convolved_density_coeffs(g, 1), g.coeffs);
  EXPECT_NEAR(convolved_density_coeffs(g, 3).at(1).real(), 0.125, 1e-15);
  const auto uni = MultiplierModel::fourier({{0, 1.0}});
  const auto& u = std::get<FourierDensity>(uni.variant());
  EXPECT_EQ(convolved_density_coeffs(u, 9), u.coeffs);
}

TEST(DiscreteFourier, Examples) {
  const std::vector<Complex> one{1.0};
  EXPECT_EQ(discrete_probs_from_fourier(one), std::vector<double>{1.0});
  const std::vector<Complex> half{1.0, 0.0};
  const auto p = discrete_probs_from_fourier(half);
  EXPECT_NEAR(p[0], 0.5, 1e-15);
  EXPECT_NEAR(p[1], 0.5, 1e-15);
  const std::vector<Complex> skew{1.0, 0.5};
  const auto q = discrete_probs_from_fourier(skew);
  EXPECT_NEAR(q[0], 0.75, 1e-15);
  EXPECT_NEAR(q[1], 0.25, 1e-15);
  const std::vector<Complex> bad{1.0, 2.0};
  try {
    discrete_probs_from_fourier(bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidCoefficients);
  }
}

TEST(DiscreteFourier, RoundTrip) {
  Stream s(6);
  for (int trial = 0; trial < 200; ++trial) {
    const int rho = 1 + static_cast<int>(s.uniform_index(9));
    std::vector<double> probs(static_cast<std::size_t>(rho));
    double total = 0.0;
    for (double& p : probs) total += (p = s.uniform01() + 0.01);
    for (double& p : probs) p /= total;
    const auto c = discrete_fourier_from_probs(probs);
    EXPECT_NEAR(std::abs(c[0] - 1.0), 0.0, 1e-12);
    const auto back = discrete_probs_from_fourier(c);
    for (std::size_t k = 0; k < probs.size(); ++k) EXPECT_NEAR(back[k], probs[k], 1e-12);
    const auto c2 = discrete_fourier_from_probs(back);
    for (std::size_t j = 0; j < c.size(); ++j) EXPECT_NEAR(std::abs(c2[j] - c[j]), 0.0, 1e-12);
  }
}

TEST(DiscreteProduct, MatchesConvolution) {
  const auto model = MultiplierModel::discrete(3, {0.5, 0.3, 0.2});
  const auto& d = std::get<DiscreteRoots>(model.variant());
  // Oracle: enumerate the 27 triples.
  std::vector<double> oracle(3, 0.0);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c) oracle[(a + b + c) % 3] += d.probs[a] * d.probs[b] * d.probs[c];
  const auto p = discrete_product_probs(d, 3);
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(p[k], oracle[k], 1e-14);
}

TEST(Joint, IndependentTrivialIsZero) {
  Stream s(7);
  const auto joint = JointMultiplierModel::independent(
      {MultiplierModel::trivial(), MultiplierModel::trivial(), MultiplierModel::trivial()});
  const auto draw = sample_joint_cycle(joint, 4, s);
  for (const auto& a : draw.z) EXPECT_EQ(a.phi(), 0.0);
  for (const auto& a : draw.t) EXPECT_EQ(a.phi(), 0.0);
}

TEST(Joint, IndependentUniformUncorrelated) {
  Stream s(8);
  const auto joint = JointMultiplierModel::independent({MultiplierModel::uniform(), MultiplierModel::uniform()});
  std::vector<double> cols;
  std::vector<double> first;
  std::vector<double> second;
  for (int i = 0; i < 100000; ++i) {
    const auto d1 = sample_joint_cycle(joint, 1, s);
    cols.push_back(d1.t[0].phi());
    cols.push_back(d1.t[1].phi());
    const auto d5 = sample_joint_cycle(joint, 5, s);
    first.push_back(d5.t[0].phi());
    second.push_back(d5.t[1].phi());
  }
  const auto cov = empirical_cov(cols, 2);
  EXPECT_LE(std::abs(cov[1] / std::sqrt(cov[0] * cov[3])), 0.02);
  EXPECT_LE(ks_uniform(first), 0.01);
  EXPECT_LE(ks_uniform(second), 0.01);
}

TEST(Joint, CrossCycleIndependence) {
  // Consecutive cycles draw from fresh multipliers.
  Stream s(9);
  const auto joint = JointMultiplierModel::shared(2, MultiplierModel::uniform());
  std::vector<double> cols;
  for (int i = 0; i < 40000; ++i) {
    const auto a = sample_joint_cycle(joint, 2, s);
    const auto b = sample_joint_cycle(joint, 3, s);
    EXPECT_EQ(a.t[0], a.t[1]);
    cols.push_back(a.t[0].phi());
    cols.push_back(b.t[0].phi());
  }
  const auto cov = empirical_cov(cols, 2);
  const double se = 1.0 / std::sqrt(40000.0);
  EXPECT_LE(std::abs(cov[1] / std::sqrt(cov[0] * cov[3])), 3 * se);
}

TEST(Joint, PairwiseFourierLaw) {
  // c_{a,b} on rho1 = rho2 = 2: c_00 = 1, c_11 = 0.6, others 0 gives
  // P(k1 == k2) = 0.8.
  const auto joint = JointMultiplierModel::pairwise_fourier({{1.0, 0.0}, {0.0, 0.6}});
  ASSERT_EQ(joint.dimension(), 2u);
  Stream s(10);
  int equal = 0;
  for (int i = 0; i < 100000; ++i) {
    const auto z = sample_joint_z(joint, s);
    equal += z[0] == z[1];
  }
  EXPECT_NEAR(equal / 100000.0, 0.8, 0.01);
  const auto m0 = joint.marginal(0);
  const auto& d = std::get<DiscreteRoots>(m0.variant());
  EXPECT_NEAR(d.probs[0], 0.5, 1e-14);
}

TEST(Joint, PairwiseRowConditionEnforced) {
  EXPECT_THROW(JointMultiplierModel::pairwise_fourier({{1.0, 0.6}, {0.6, 0.6}}), Error);
}

}  // namespace
}  // namespace permchar
