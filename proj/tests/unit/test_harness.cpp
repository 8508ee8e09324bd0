#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "permchar/error.hpp"
#include "permchar/harness.hpp"

namespace permchar {
namespace {

ExperimentConfig one_point(std::size_t n, std::size_t samples, std::uint64_t seed) {
  ExperimentConfig cfg;
  cfg.n = n;
  cfg.points = {UnitAngle(std::sqrt(2.0) - 1.0)};
  cfg.num_samples = samples;
  cfg.master_seed = seed;
  return cfg;
}

ErrorCode code_of(const ExperimentConfig& cfg) {
  try {
    validate(cfg);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected validation to fail";
  return ErrorCode::kInvalidArgument;
}

TEST(DeriveStream, Reproducible) {
  Stream a = derive_stream(42, 7);
  Stream b = derive_stream(42, 7);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
  Stream c = derive_stream(42, 7, 1);
  Stream d = derive_stream(42, 7);
  EXPECT_NE(c.next_u64(), d.next_u64());
}

TEST(DeriveStream, DistinctIndicesDiffer) {
  std::set<std::uint64_t> firsts;
  for (std::uint64_t i = 0; i < 10000; ++i) {
    Stream a = derive_stream(9, i);
    Stream b = derive_stream(9, i + 1);
    std::vector<std::uint64_t> da(64);
    std::vector<std::uint64_t> db(64);
    for (auto& v : da) v = a.next_u64();
    for (auto& v : db) v = b.next_u64();
    EXPECT_NE(da, db);
    firsts.insert(da[0]);
  }
  EXPECT_EQ(firsts.size(), 10000u);
  Stream x = derive_stream(1, 5);
  Stream y = derive_stream(2, 5);
  EXPECT_NE(x.next_u64(), y.next_u64());
}

TEST(Ks, Examples) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal;
  std::vector<double> xs(10000);
  for (double& x : xs) x = normal(rng);
  EXPECT_LE(ks_statistic(xs), 1.63 / std::sqrt(10000.0));
  const std::vector<double> zeros(100, 0.0);
  EXPECT_DOUBLE_EQ(ks_statistic(zeros), 0.5);
  // Quantile grid of the reference: distance 1/(2N) at most.
  std::vector<double> grid;
  for (int i = 0; i < 999; ++i) {
    const double p = (i + 0.5) / 999.0;
    double lo = -10, hi = 10;
    for (int it = 0; it < 100; ++it) {
      const double mid = 0.5 * (lo + hi);
      (0.5 * std::erfc(-mid / std::sqrt(2.0)) < p ? lo : hi) = mid;
    }
    grid.push_back(0.5 * (lo + hi));
  }
  EXPECT_LE(ks_statistic(grid), 1.0 / (2 * 999.0) + 1e-9);
  // Decreases with N on nested draws, averaged over repeats.
  double small = 0, large = 0;
  for (int r = 0; r < 20; ++r) {
    std::vector<double> a(100), b(10000);
    for (double& x : a) x = normal(rng);
    for (double& x : b) x = normal(rng);
    small += ks_statistic(a);
    large += ks_statistic(b);
  }
  EXPECT_LT(large, small);
}

TEST(Ks, TwoSample) {
  const std::vector<double> a{1, 2, 3, 4};
  const std::vector<double> b{1, 2, 3, 4};
  EXPECT_EQ(ks_two_sample(a, b), 0.0);
  const std::vector<double> c{10, 11, 12, 13};
  EXPECT_EQ(ks_two_sample(a, c), 1.0);
  EXPECT_NEAR(ks_two_sample_critical(10000, 10000, 0.01), 1.6276 * std::sqrt(2.0 / 10000), 1e-4);
}

TEST(EmpiricalCov, Examples) {
  const std::vector<double> same{1, 1, 2, 2, 4, 4, 7, 7};
  const auto c = empirical_cov(same, 2);
  EXPECT_NEAR(c[1] / std::sqrt(c[0] * c[3]), 1.0, 1e-14);
  const std::vector<double> constant{1, 5, 2, 5, 3, 5};
  const auto d = empirical_cov(constant, 2);
  EXPECT_EQ(d[3], 0.0);
  EXPECT_EQ(d[1], 0.0);
  EXPECT_NEAR(d[0], 1.0, 1e-15);
  std::mt19937_64 rng(4);
  std::normal_distribution<double> normal;
  std::vector<double> xs(8000);
  for (double& x : xs) x = normal(rng);
  EXPECT_LE(std::abs(empirical_cov(xs, 2)[1]), 0.08);
  EXPECT_THROW(empirical_cov(std::vector<double>{1, 2}, 2), Error);
}

TEST(Validate, ConfigErrors) {
  auto cfg = one_point(1, 10, 0);
  EXPECT_EQ(code_of(cfg), ErrorCode::kConfig);
  cfg = one_point(100, 0, 0);
  EXPECT_EQ(code_of(cfg), ErrorCode::kConfig);
  cfg = one_point(100, 10, 0);
  cfg.workers = 0;
  EXPECT_EQ(code_of(cfg), ErrorCode::kConfig);
  cfg = one_point(100, 10, 0);
  cfg.points = {UnitAngle(0.3), UnitAngle(0.3)};
  cfg.model = JointMultiplierModel::independent({MultiplierModel::uniform(), MultiplierModel::uniform()});
  EXPECT_EQ(code_of(cfg), ErrorCode::kConfig);
  cfg = one_point(100, 10, 0);
  cfg.points = {UnitAngle(0.3), UnitAngle(0.4)};
  EXPECT_EQ(code_of(cfg), ErrorCode::kConfig);
  cfg = one_point(100, 10, 0);
  cfg.functions = {"sym"};
  EXPECT_EQ(code_of(cfg), ErrorCode::kConfig);
}

TEST(Validate, RegimeViolations) {
  auto cfg = one_point(100, 10, 0);
  cfg.points = {UnitAngle(0.25)};
  EXPECT_EQ(code_of(cfg), ErrorCode::kRegimeViolation);
  cfg = one_point(100, 10, 0);
  cfg.points = {UnitAngle(0.1234567)};
  cfg.model = JointMultiplierModel::independent({MultiplierModel::trivial()});
  EXPECT_EQ(code_of(cfg), ErrorCode::kRegimeViolation);
  cfg.finite_type = FiniteTypeCertificate{1e-3, 1.5, 1000, false};
  EXPECT_NO_THROW(validate(cfg));
  cfg.finite_type = FiniteTypeCertificate{0.4, 1.0, 1000, false};
  EXPECT_EQ(code_of(cfg), ErrorCode::kRegimeViolation);
  cfg = one_point(100, 10, 0);
  cfg.model = JointMultiplierModel::independent({MultiplierModel::trivial()});
  EXPECT_NO_THROW(validate(cfg));
}

TEST(Validate, SharedModelIsExploratory) {
  auto cfg = one_point(100, 10, 0);
  cfg.points = {UnitAngle(std::sqrt(2.0) - 1), UnitAngle(std::sqrt(3.0) - 1)};
  cfg.model = JointMultiplierModel::shared(2, MultiplierModel::uniform());
  const auto notes = validate(cfg);
  EXPECT_FALSE(notes.empty());
}

TEST(RunExperiment, SingleSampleDeterministic) {
  auto cfg = one_point(500, 1, 77);
  cfg.model = JointMultiplierModel::independent({MultiplierModel::trivial()});
  const auto a = run_experiment(cfg);
  cfg.workers = 3;
  const auto b = run_experiment(cfg);
  ASSERT_EQ(a.raw.size(), 2u);
  EXPECT_EQ(a.raw, b.raw);
  EXPECT_EQ(a.normalized, b.normalized);
}

TEST(RunExperiment, IndependentOfWorkerCount) {
  auto cfg = one_point(2000, 301, 5);
  cfg.points = {UnitAngle(std::sqrt(2.0) - 1), UnitAngle(std::sqrt(3.0) - 1)};
  cfg.model = JointMultiplierModel::independent({MultiplierModel::uniform(), MultiplierModel::uniform()});
  const auto base = run_experiment(cfg);
  for (std::size_t w : {2, 4, 7}) {
    cfg.workers = w;
    const auto other = run_experiment(cfg);
    EXPECT_EQ(other.raw, base.raw);
    EXPECT_EQ(other.mean, base.mean);
    EXPECT_EQ(other.covariance, base.covariance);
    EXPECT_EQ(other.ks, base.ks);
  }
}

TEST(RunExperiment, CycleCountMean) {
  ExperimentConfig cfg;
  cfg.n = 1000;
  cfg.theta = 2.0;
  cfg.kind = StatisticKind::kCycleCount;
  cfg.num_samples = 10000;
  cfg.master_seed = 3;
  const auto r = run_experiment(cfg);
  double expect = 0.0;
  for (std::size_t i = 1; i <= cfg.n; ++i) expect += cfg.theta / (cfg.theta + i - 1.0);
  double sum = 0.0;
  for (std::size_t i = 0; i < r.num_samples; ++i) sum += r.raw[i * r.width()];
  EXPECT_NEAR(sum / r.num_samples, expect, 0.01 * expect);
}

TEST(RunExperiment, EmpiricalCenteringRemovesMean) {
  auto cfg = one_point(300, 500, 8);
  cfg.centering = CenteringMode::kEmpirical;
  const auto r = run_experiment(cfg);
  EXPECT_NEAR(r.mean[0], 0.0, 1e-12);
  EXPECT_NEAR(r.mean[1], 0.0, 1e-12);
}

TEST(RunExperiment, ConstantFunctionTheoreticalCentering) {
  auto cfg = one_point(1000, 2000, 9);
  cfg.kind = StatisticKind::kW1;
  cfg.functions = {"const:2"};
  cfg.centering = CenteringMode::kTheoretical;
  const auto r = run_experiment(cfg);
  EXPECT_NEAR(r.center[0], std::log(2.0) * std::log(1000.0), 1e-9);
  EXPECT_EQ(r.scale[1], 1.0);
  EXPECT_EQ(r.singular_samples, 0u);
}

TEST(RunExperiment, VarianceTrend) {
  for (const auto& [n, tol] : {std::pair<std::size_t, double>{1000, 0.3}, {10000, 0.2}}) {
    const auto r = run_experiment(one_point(n, 4000, 1));
    EXPECT_NEAR(r.variance[0], 1.0, tol) << n;
    EXPECT_LE(std::abs(r.covariance[1]), 0.08) << n;
    EXPECT_EQ(r.singular_samples, 0u);
  }
}

TEST(RunExperiment, RejectsRationalTrivialPoint) {
  auto cfg = one_point(100, 50, 1);
  cfg.points = {UnitAngle(0.5)};
  cfg.model = JointMultiplierModel::independent({MultiplierModel::trivial()});
  try {
    run_experiment(cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kRegimeViolation);
  }
}

}  // namespace
}  // namespace permchar
