#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "permchar/class_functions.hpp"
#include "permchar/equidistribution.hpp"
#include "permchar/limit_theory.hpp"
#include "permchar/multiplier.hpp"

namespace permchar {

// kLogZ evaluates log Z (f = 1 - x^{-1} with product multipliers); kW1 and
// kW2 evaluate the class functions for the configured f; kCycleCount is the
// statistic A_n with X = 1, i.e. the total number of cycles.
enum class StatisticKind { kLogZ, kW1, kW2, kCycleCount };
enum class CenteringMode { kNone, kTheoretical, kEmpirical };

std::string_view to_string(StatisticKind kind);
std::string_view to_string(CenteringMode mode);

struct ExperimentConfig {
  std::size_t n = 0;
  double theta = 1.0;
  std::vector<UnitAngle> points;
  // One label per point; a single label is applied to every point.
  std::vector<std::string> functions{"charpoly"};
  JointMultiplierModel model =
      JointMultiplierModel::independent({MultiplierModel::uniform()});
  StatisticKind kind = StatisticKind::kLogZ;
  std::size_t num_samples = 0;
  std::uint64_t master_seed = 0;
  CenteringMode centering = CenteringMode::kNone;
  std::size_t workers = 1;
  // Certificate for the points (and, for d >= 2, every pair of them) when
  // they are not one of the builtin presets.
  std::optional<FiniteTypeCertificate> finite_type;
};

inline constexpr double kSingularSampleCap = 0.001;

// Checks sizes and the hypotheses of the limit theorem that applies to the
// chosen multiplier model. Throws kConfig or kRegimeViolation. Returns
// advisory notes (for example when no limit theorem covers the run).
std::vector<std::string> validate(const ExperimentConfig& cfg);

struct ExperimentResult {
  std::size_t d = 0;          // number of points
  std::size_t num_samples = 0;
  std::vector<double> raw;         // num_samples x 2d: Re_1, Im_1, ...
  std::vector<double> normalized;  // (raw - center) / scale
  std::vector<double> center;      // 2d
  std::vector<double> scale;       // 2d
  std::vector<LimitConstants> constants;
  std::vector<double> mean;        // of normalized, 2d
  std::vector<double> variance;    // of normalized, 2d
  std::vector<double> covariance;  // 2d x 2d of normalized
  std::vector<double> ks;          // vs N(0,1), 2d
  std::size_t singular_samples = 0;
  double wall_seconds = 0.0;
  std::vector<std::string> notes;

  std::size_t width() const noexcept { return 2 * d; }
};

// Deterministic in (cfg without workers): sample i uses derive_stream(seed,
// i, attempt), with attempt raised after each singular draw.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

// sup |F_N - Phi|.
double ks_statistic(std::span<const double> samples);
// sup |F_a - F_b|.
double ks_two_sample(std::span<const double> a, std::span<const double> b);
// Critical value of the two-sample statistic at level alpha (asymptotic).
double ks_two_sample_critical(std::size_t n_a, std::size_t n_b, double alpha);

// Unbiased covariance of the k columns of an N x k row-major matrix.
std::vector<double> empirical_cov(std::span<const double> samples,
                                  std::size_t k);

}  // namespace permchar
