#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "permchar/class_functions.hpp"
#include "permchar/error.hpp"
#include "permchar/harness.hpp"

namespace permchar {
namespace {

constexpr double kPi = std::numbers::pi;

Permutation random_permutation(std::size_t n, Stream& s) {
  std::vector<std::size_t> images(n);
  std::iota(images.begin(), images.end(), 0);
  for (std::size_t i = n; i > 1; --i) std::swap(images[i - 1], images[s.uniform_index(i)]);
  return Permutation(images);
}

TEST(BranchLog, Examples) {
  EXPECT_EQ(branch_log(1.0), (ComplexLogValue{0.0, 0.0}));
  const auto neg = branch_log(-2.0);
  EXPECT_DOUBLE_EQ(neg.re, std::log(2.0));
  EXPECT_DOUBLE_EQ(neg.im, kPi);
  EXPECT_DOUBLE_EQ(branch_log(Complex(-2.0, -0.0)).im, kPi);
  const auto i = branch_log(Complex(0.0, 1.0));
  EXPECT_DOUBLE_EQ(i.re, 0.0);
  EXPECT_DOUBLE_EQ(i.im, kPi / 2);
  try {
    branch_log(0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSingularSample);
  }
}

TEST(OneMinusUnit, AccurateNearZero) {
  for (double psi : {1e-12, 0.25, 0.5, 0.9, 1.0 - 1e-9}) {
    const Complex direct = 1.0 - std::polar(1.0, 2 * kPi * psi);
    const Complex accurate = one_minus_unit(UnitAngle(psi));
    EXPECT_NEAR(std::abs(accurate - direct), 0.0, 1e-15) << psi;
  }
  const Complex tiny = one_minus_unit(UnitAngle(1e-12));
  EXPECT_NEAR(tiny.imag() / (-2 * kPi * 1e-12), 1.0, 1e-12);
}

TEST(SpectralFunction, Labels) {
  EXPECT_EQ(SpectralFunction::from_label("charpoly").label(), "charpoly");
  EXPECT_EQ(SpectralFunction::from_label("const:2.5").label(), "const:2.5");
  EXPECT_THROW(SpectralFunction::from_label("nope"), Error);
  EXPECT_THROW(SpectralFunction::from_label("const:x"), Error);
  EXPECT_THROW(SpectralFunction::from_label("const:0"), Error);
  const auto f = SpectralFunction::antisym_part();
  EXPECT_NEAR(std::abs(f(UnitAngle(0.1)) -
                       (std::polar(1.0, -0.2 * kPi) - std::polar(1.0, 0.2 * kPi))),
              0.0, 1e-15);
  const auto g = SpectralFunction::sym_part();
  const Complex y = std::polar(1.0, 0.6 * kPi);
  EXPECT_NEAR(std::abs(g(UnitAngle(0.3)) - (2.0 - y - 1.0 / y)), 0.0, 1e-14);
}

TEST(LogZ, HandExamples) {
  Stream s(1);
  const auto a = log_Z(CycleType({1}), UnitAngle(0.5), MultiplierModel::trivial(), s);
  EXPECT_NEAR(a.re, std::log(2.0), 1e-15);
  EXPECT_NEAR(a.im, 0.0, 1e-15);
  const auto b = log_Z(CycleType({2, 0}), UnitAngle(0.25), MultiplierModel::trivial(), s);
  EXPECT_NEAR(b.re, std::log(2.0), 1e-15);
  EXPECT_NEAR(b.im, kPi / 2, 1e-15);
}

TEST(LogZ, SingularTrivialSample) {
  Stream s(2);
  try {
    log_Z(CycleType({0, 1}), UnitAngle(0.5), MultiplierModel::trivial(), s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSingularSample);
  }
}

TEST(LogZ, JensenMeanAtOneCycle) {
  Stream s(3);
  constexpr int kDraws = 100000;
  double sum = 0.0;
  double sq = 0.0;
  for (int i = 0; i < kDraws; ++i) {
    const double re = log_Z(CycleType({1}), UnitAngle(0.123), MultiplierModel::uniform(), s).re;
    sum += re;
    sq += re * re;
  }
  const double mean = sum / kDraws;
  const double se = std::sqrt((sq / kDraws - mean * mean) / kDraws);
  EXPECT_NEAR(mean, 0.0, 4 * se);
  EXPECT_NEAR(sq / kDraws, kPi * kPi / 12, 0.03);
}

TEST(LogZ, BranchContainment) {
  Stream s(4);
  for (int i = 0; i < 500; ++i) {
    const auto ct = sample_cycle_type(200, EwensParameter(1.0), s);
    const auto v = log_Z(ct, UnitAngle(0.31), MultiplierModel::uniform(), s);
    const double k = static_cast<double>(ct.total_cycles());
    EXPECT_LE(std::abs(v.im), k * kPi);
    ct.for_each_cycle([&](std::size_t) {
      const auto term = branch_log(one_minus_unit(UnitAngle(s.uniform01())));
      EXPECT_GT(term.im, -kPi);
      EXPECT_LE(term.im, kPi);
    });
  }
}

TEST(W1, ConstantFunction) {
  Stream s(5);
  const auto f = SpectralFunction::constant(3.0);
  for (int i = 0; i < 50; ++i) {
    const auto ct = sample_cycle_type(30, EwensParameter(2.0), s);
    const auto v = w1(ct, f, UnitAngle(0.2), MultiplierModel::uniform(), s);
    EXPECT_NEAR(v.re, static_cast<double>(ct.total_cycles()) * std::log(3.0), 1e-12);
    EXPECT_EQ(v.im, 0.0);
  }
}

TEST(W1, SingleThreeCycle) {
  Stream s(6);
  const double phi = 0.137;
  const auto v = w1(CycleType({0, 0, 1}), SpectralFunction::char_poly(), UnitAngle(phi),
                    MultiplierModel::trivial(), s);
  const Complex expected = std::log(1.0 - std::polar(1.0, -6 * kPi * phi));
  EXPECT_NEAR(v.re, expected.real(), 1e-14);
  EXPECT_NEAR(v.im, expected.imag(), 1e-14);
}

TEST(W2, CollapsesToLogZForTrivialMultipliers) {
  for (int i = 0; i < 200; ++i) {
    Stream s(7 + i);
    const auto ct = sample_cycle_type(50, EwensParameter(1.0), s);
    const UnitAngle x(std::sqrt(2.0) - 1.0);
    Stream a(100 + i);
    Stream b(100 + i);
    Stream c(100 + i);
    const auto z = log_Z(ct, x, MultiplierModel::trivial(), a);
    const auto w = w2(ct, SpectralFunction::char_poly(), x, MultiplierModel::trivial(), b);
    const auto v = w1(ct, SpectralFunction::char_poly(), x, MultiplierModel::trivial(), c);
    EXPECT_EQ(z, w);
    EXPECT_EQ(w, v);
  }
}

std::vector<double> draw_re(ClassFunctionKind kind, std::uint64_t seed, int count) {
  std::vector<double> out;
  const auto f = SpectralFunction::char_poly();
  const UnitAngle x(std::sqrt(3.0) - 1.0);
  for (int i = 0; i < count; ++i) {
    Stream s = derive_stream(seed, static_cast<std::uint64_t>(i));
    const auto ct = sample_cycle_type(100, EwensParameter(1.0), s);
    const auto v = kind == ClassFunctionKind::kFirst
                       ? w1(ct, f, x, MultiplierModel::uniform(), s)
                       : w2(ct, f, x, MultiplierModel::uniform(), s);
    out.push_back(v.re);
  }
  return out;
}

TEST(W2, EqualsW1InLawForUniformMultipliers) {
  constexpr int kDraws = 10000;
  const auto a = draw_re(ClassFunctionKind::kFirst, 1, kDraws);
  const auto b = draw_re(ClassFunctionKind::kSecond, 2, kDraws);
  EXPECT_LE(ks_two_sample(a, b), ks_two_sample_critical(kDraws, kDraws, 0.01));
  EXPECT_LE(ks_two_sample(a, b), 0.02);
}

TEST(W2, EqualsLogZInLawForUniformMultipliers) {
  constexpr int kDraws = 10000;
  std::vector<double> a;
  std::vector<double> b;
  const UnitAngle x(0.2718281828);
  for (int i = 0; i < kDraws; ++i) {
    Stream s = derive_stream(3, static_cast<std::uint64_t>(i));
    const auto ct = sample_cycle_type(100, EwensParameter(1.0), s);
    a.push_back(log_Z(ct, x, MultiplierModel::uniform(), s).im);
    Stream t = derive_stream(4, static_cast<std::uint64_t>(i));
    const auto ct2 = sample_cycle_type(100, EwensParameter(1.0), t);
    b.push_back(w2(ct2, SpectralFunction::char_poly(), x, MultiplierModel::uniform(), t).im);
  }
  EXPECT_LE(ks_two_sample(a, b), ks_two_sample_critical(kDraws, kDraws, 0.01));
}

TEST(Multipoint, OnePointEqualsLogZ) {
  for (int i = 0; i < 100; ++i) {
    Stream s(200 + i);
    const auto ct = sample_cycle_type(40, EwensParameter(1.5), s);
    const std::vector<UnitAngle> pts{UnitAngle(0.3141)};
    const auto joint = JointMultiplierModel::independent({MultiplierModel::uniform()});
    Stream a(300 + i);
    Stream b(300 + i);
    const auto multi = multipoint_logZ(ct, pts, joint, a);
    const auto single = log_Z(ct, pts[0], MultiplierModel::uniform(), b);
    ASSERT_EQ(multi.size(), 1u);
    EXPECT_EQ(multi[0], single);
  }
}

TEST(Multipoint, TrivialPairIsDeterministic) {
  const std::vector<UnitAngle> pts{UnitAngle(std::sqrt(2.0) - 1), UnitAngle(std::sqrt(3.0) - 1)};
  const auto joint = JointMultiplierModel::independent({MultiplierModel::trivial(), MultiplierModel::trivial()});
  Stream s(5);
  const auto ct = sample_cycle_type(60, EwensParameter(1.0), s);
  Stream a(1);
  Stream b(2);
  const auto v = multipoint_logZ(ct, pts, joint, a);
  EXPECT_EQ(v, multipoint_logZ(ct, pts, joint, b));
  for (std::size_t j = 0; j < 2; ++j) {
    Stream c(3);
    EXPECT_EQ(v[j], log_Z(ct, pts[j], MultiplierModel::trivial(), c));
  }
  const std::vector<SpectralFunction> fs{SpectralFunction::char_poly(), SpectralFunction::char_poly()};
  Stream d(4);
  EXPECT_EQ(multipoint_w(ct, ClassFunctionKind::kSecond, fs, pts, joint, d), v);
}

TEST(Multipoint, ConstantFunctions) {
  Stream s(6);
  const auto ct = sample_cycle_type(25, EwensParameter(1.0), s);
  const std::vector<SpectralFunction> fs{SpectralFunction::constant(2.0), SpectralFunction::constant(2.0)};
  const std::vector<UnitAngle> pts{UnitAngle(0.1), UnitAngle(0.7)};
  const auto joint = JointMultiplierModel::independent({MultiplierModel::uniform(), MultiplierModel::uniform()});
  const auto v = multipoint_w(ct, ClassFunctionKind::kFirst, fs, pts, joint, s);
  for (const auto& x : v) EXPECT_NEAR(x.re, ct.total_cycles() * std::log(2.0), 1e-12);
}

TEST(Multipoint, SymPartMatchesProductFormula) {
  Stream s(7);
  const std::vector<SpectralFunction> fs{SpectralFunction::sym_part(), SpectralFunction::sym_part()};
  const std::vector<UnitAngle> pts{UnitAngle(std::sqrt(2.0) - 1), UnitAngle(std::sqrt(3.0) - 1)};
  const auto joint = JointMultiplierModel::independent({MultiplierModel::trivial(), MultiplierModel::trivial()});
  for (int i = 0; i < 50; ++i) {
    const auto ct = sample_cycle_type(12, EwensParameter(1.0), s);
    const auto v = multipoint_w(ct, ClassFunctionKind::kFirst, fs, pts, joint, s);
    for (std::size_t j = 0; j < 2; ++j) {
      const double x_real = 2 * std::cos(2 * kPi * pts[j].phi());
      EXPECT_NEAR(v[j].re, std::log(std::abs(sym_char_poly(ct, x_real))), 1e-9);
    }
  }
}

TEST(Multipoint, DimensionMismatch) {
  Stream s(8);
  const std::vector<UnitAngle> pts{UnitAngle(0.1), UnitAngle(0.2)};
  const auto joint = JointMultiplierModel::independent({MultiplierModel::uniform()});
  EXPECT_THROW(multipoint_logZ(CycleType({1}), pts, joint, s), Error);
}

TEST(DetOracle, HandExamples) {
  const UnitAngle x(0.37);
  const Complex xi = std::conj(x.point());
  const std::vector<Complex> z1{std::polar(1.0, 0.4)};
  EXPECT_NEAR(std::abs(det_oracle(Permutation::identity(1), z1, x) - (1.0 - xi * z1[0])), 0.0, 1e-15);
  const std::vector<Complex> z2{std::polar(1.0, 0.4), std::polar(1.0, -1.1)};
  EXPECT_NEAR(std::abs(det_oracle(Permutation({1, 0}), z2, x) - (1.0 - xi * xi * z2[0] * z2[1])), 0.0, 1e-14);
  const std::vector<Complex> z3{std::polar(1.0, 0.4), std::polar(1.0, -1.1), std::polar(1.0, 2.0)};
  EXPECT_NEAR(std::abs(det_oracle(Permutation({1, 2, 0}), z3, x) -
                       (1.0 - xi * xi * xi * z3[0] * z3[1] * z3[2])),
              0.0, 1e-14);
  EXPECT_THROW(det_oracle(Permutation::identity(13), std::vector<Complex>(13, 1.0), x), Error);
}

TEST(DetOracle, IdentityOnRandomCases) {
  Stream s(9);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + s.uniform_index(8);
    const auto perm = random_permutation(n, s);
    std::vector<Complex> z(n);
    for (auto& v : z) v = UnitAngle(s.uniform01()).point();
    const UnitAngle x(s.uniform01());
    EXPECT_LE(std::abs(det_oracle(perm, z, x) - cycle_product(perm, z, x)), 1e-9);
  }
}

TEST(DetOracle, LogZAgreesWithDeterminant) {
  // Same multipliers routed through log_Z and through the matrix.
  Stream s(10);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + s.uniform_index(8);
    const auto perm = random_permutation(n, s);
    const UnitAngle x(s.uniform01());
    const auto v = log_Z(perm.cycle_type(), x, MultiplierModel::trivial(), s);
    const Complex det = det_oracle(perm, std::vector<Complex>(n, 1.0), x);
    EXPECT_NEAR(std::exp(v.re), std::abs(det), 1e-9 * std::max(1.0, std::abs(det)));
  }
}

TEST(SymPart, HandExamples) {
  const auto ct = CycleType({0, 1});
  EXPECT_NEAR(sym_char_poly(ct, 0.0), sym_char_poly_dense(Permutation({1, 0}), 0.0), 1e-12);
  EXPECT_NEAR(sym_char_poly_dense(Permutation({1, 0}), 0.0), -4.0, 1e-12);
  EXPECT_NEAR(sym_char_poly(CycleType({1}), 0.6), 2.0 - 0.6, 1e-14);
  EXPECT_THROW(sym_char_poly(ct, 2.5), Error);
}

TEST(SymPart, CycleEigenvalues) {
  for (std::size_t n = 2; n <= 9; ++n) {
    std::vector<std::int64_t> counts(n, 0);
    counts[n - 1] = 1;
    const CycleType ct(counts);
    for (std::size_t k = 0; k < n; ++k) {
      EXPECT_NEAR(sym_char_poly(ct, 2 * std::cos(2 * kPi * k / n)), 0.0, 1e-9);
    }
  }
}

TEST(SymPart, MatchesDenseForAllSmallPermutations) {
  for (std::size_t n = 1; n <= 6; ++n) {
    std::vector<std::size_t> images(n);
    std::iota(images.begin(), images.end(), 0);
    do {
      const Permutation perm(images);
      for (int k = 1; k <= 20; ++k) {
        const double x = -2.0 + 4.0 * k / 21.0;
        EXPECT_NEAR(sym_char_poly(perm.cycle_type(), x), sym_char_poly_dense(perm, x), 1e-8);
      }
    } while (std::next_permutation(images.begin(), images.end()));
  }
}

TEST(AntisymPart, MatchesDense) {
  Stream s(11);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + s.uniform_index(10);
    const auto perm = random_permutation(n, s);
    const double x = -3.0 + 6.0 * s.uniform01();
    const double dense = antisym_char_poly_dense(perm, x);
    EXPECT_NEAR(antisym_char_poly(perm.cycle_type(), x), dense, 1e-8 * std::max(1.0, std::abs(dense)));
  }
}

}  // namespace
}  // namespace permchar
