#include "permchar/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <thread>

#include "permchar/compensated.hpp"
#include "permchar/error.hpp"

namespace permchar {

std::string_view to_string(StatisticKind kind) {
  switch (kind) {
    case StatisticKind::kLogZ: return "logZ";
    case StatisticKind::kW1: return "w1";
    case StatisticKind::kW2: return "w2";
    case StatisticKind::kCycleCount: return "cycle_count";
  }
  return "unknown";
}

std::string_view to_string(CenteringMode mode) {
  switch (mode) {
    case CenteringMode::kNone: return "none";
    case CenteringMode::kTheoretical: return "theoretical";
    case CenteringMode::kEmpirical: return "empirical";
  }
  return "unknown";
}

namespace {

constexpr std::int64_t kRootOfUnitySearch = 10000;

bool near_root_of_unity(double phi) {
  for (std::int64_t q = 1; q <= kRootOfUnitySearch; ++q) {
    const double p = static_cast<double>(q) * phi;
    const double e = std::fma(static_cast<double>(q), phi, -p);
    if (nearest_integer_distance(p - std::round(p) + e) < 1e-12) return true;
  }
  return false;
}

std::vector<SpectralFunction> coordinate_functions(const ExperimentConfig& cfg,
                                                   std::size_t d) {
  std::vector<SpectralFunction> fs;
  if (cfg.kind == StatisticKind::kLogZ) {
    for (const auto& label : cfg.functions) {
      if (label != "charpoly") {
        fail(ErrorCode::kConfig,
             "kind logZ always uses f = charpoly, got '" + label + "'");
      }
    }
    fs.assign(d, SpectralFunction::char_poly());
    return fs;
  }
  if (cfg.functions.size() != 1 && cfg.functions.size() != d) {
    fail(ErrorCode::kConfig, "need one function label or one per point");
  }
  for (std::size_t j = 0; j < d; ++j) {
    fs.push_back(SpectralFunction::from_label(
        cfg.functions[cfg.functions.size() == 1 ? 0 : j]));
  }
  return fs;
}

bool certified(const ExperimentConfig& cfg, std::span<const double> phis) {
  if (match_finite_type_preset(phis)) return true;
  if (phis.size() == 2) {
    const double swapped[2] = {phis[1], phis[0]};
    if (match_finite_type_preset(swapped)) return true;
  }
  return cfg.finite_type && verify_certificate(phis, *cfg.finite_type);
}

std::string describe(double phi) {
  return "point " + std::to_string(phi);
}

}  // namespace

std::vector<std::string> validate(const ExperimentConfig& cfg) {
  std::vector<std::string> notes;
  const EwensParameter theta(cfg.theta);
  (void)theta;
  if (cfg.n < 2) fail(ErrorCode::kConfig, "n must be at least 2");
  if (cfg.num_samples == 0) fail(ErrorCode::kConfig, "num_samples must be >= 1");
  if (cfg.workers == 0) fail(ErrorCode::kConfig, "workers must be >= 1");
  if (cfg.kind == StatisticKind::kCycleCount) return notes;

  const std::size_t d = cfg.points.size();
  if (d == 0) fail(ErrorCode::kConfig, "need at least one point");
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t l = j + 1; l < d; ++l) {
      if (cfg.points[j] == cfg.points[l]) {
        fail(ErrorCode::kConfig, "points must be pairwise distinct");
      }
    }
  }
  if (cfg.model.dimension() != d) {
    fail(ErrorCode::kConfig, "multiplier model has dimension " +
                                 std::to_string(cfg.model.dimension()) +
                                 " but there are " + std::to_string(d) +
                                 " points");
  }
  const auto fs = coordinate_functions(cfg, d);

  for (std::size_t j = 0; j < d; ++j) {
    const double phi = cfg.points[j].phi();
    if (near_root_of_unity(phi)) {
      fail(ErrorCode::kRegimeViolation,
           describe(phi) + " is a root of unity; the limit theorems need x^m != 1");
    }
  }

  if (std::holds_alternative<SharedMultiplier>(cfg.model.variant())) {
    notes.push_back(
        "shared multiplier across points: no limit theorem covers this run");
    return notes;
  }

  bool all_trivial = true;
  for (std::size_t j = 0; j < d; ++j) {
    const auto marginal = cfg.model.marginal(j);
    const double phi = cfg.points[j].phi();
    const double single[1] = {phi};
    all_trivial &= marginal.is_trivial();
    if (marginal.is_trivial()) {
      if (!certified(cfg, single)) {
        fail(ErrorCode::kRegimeViolation,
             describe(phi) +
                 " has no finite-type certificate, required for z = 1");
      }
    } else if (const auto* disc =
                   std::get_if<DiscreteRoots>(&marginal.variant())) {
      if (!certified(cfg, single)) {
        fail(ErrorCode::kRegimeViolation,
             describe(phi) + " has no finite-type certificate, required for a "
                             "discrete multiplier");
      }
      for (double zero : fs[j].zero_angles()) {
        if (!near_root_of_unity(zero)) {
          fail(ErrorCode::kRegimeViolation,
               "zeros of " + fs[j].label() +
                   " must be roots of unity for a discrete multiplier");
        }
      }
      if (cfg.kind != StatisticKind::kW1) {
        const auto coeffs = discrete_fourier_from_probs(disc->probs);
        for (std::size_t k = 1; k < coeffs.size(); ++k) {
          if (!(std::abs(coeffs[k]) < 1.0 - 1e-12)) {
            fail(ErrorCode::kRegimeViolation,
                 "discrete multiplier needs |c_j| < 1 for j != 0 when using "
                 "product multipliers");
          }
        }
      }
    }
  }
  if (all_trivial && d >= 2) {
    for (std::size_t j = 0; j < d; ++j) {
      for (std::size_t l = j + 1; l < d; ++l) {
        const double pair[2] = {cfg.points[j].phi(), cfg.points[l].phi()};
        if (!certified(cfg, pair)) {
          fail(ErrorCode::kRegimeViolation,
               "points " + std::to_string(pair[0]) + " and " +
                   std::to_string(pair[1]) +
                   " are not certified pairwise of finite type");
        }
      }
    }
  }
  return notes;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  const auto started = std::chrono::steady_clock::now();
  ExperimentResult result;
  result.notes = validate(cfg);
  const EwensParameter theta(cfg.theta);
  const bool cycle_count = cfg.kind == StatisticKind::kCycleCount;
  const std::size_t d = cycle_count ? 1 : cfg.points.size();
  const std::size_t w = 2 * d;
  const std::size_t N = cfg.num_samples;
  result.d = d;
  result.num_samples = N;

  std::vector<SpectralFunction> fs;
  if (cycle_count) {
    result.constants.push_back({1.0, 0.0, 1.0, 0.0, 0.0});
  } else {
    fs = coordinate_functions(cfg, d);
    for (const auto& f : fs) result.constants.push_back(limit_constants(f));
  }
  result.scale.resize(w);
  for (std::size_t j = 0; j < d; ++j) {
    const auto& c = result.constants[j];
    result.scale[2 * j] =
        c.V_R > 0.0 ? normalization(cfg.n, theta, c, Part::kReal) : 1.0;
    result.scale[2 * j + 1] =
        c.V_I > 0.0 ? normalization(cfg.n, theta, c, Part::kImag) : 1.0;
  }

  const ClassFunctionKind class_kind = cfg.kind == StatisticKind::kW1
                                           ? ClassFunctionKind::kFirst
                                           : ClassFunctionKind::kSecond;
  auto evaluate = [&](const CycleType& ct, Stream& stream, double* out) {
    if (cycle_count) {
      out[0] = static_cast<double>(ct.total_cycles());
      out[1] = 0.0;
      return;
    }
    const auto values =
        cfg.kind == StatisticKind::kLogZ
            ? multipoint_logZ(ct, cfg.points, cfg.model, stream)
            : multipoint_w(ct, class_kind, fs, cfg.points, cfg.model, stream);
    for (std::size_t j = 0; j < d; ++j) {
      out[2 * j] = values[j].re;
      out[2 * j + 1] = values[j].im;
    }
  };

  const auto cap = static_cast<std::size_t>(
      std::floor(kSingularSampleCap * static_cast<double>(N)));
  result.raw.assign(N * w, 0.0);
  std::vector<std::uint32_t> singular(N, 0);
  std::vector<std::uint8_t> exhausted(N, 0);
  const std::size_t workers = std::min(cfg.workers, N);
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::size_t> error_index(workers, N);

  auto work = [&](std::size_t worker) {
    for (std::size_t i = worker; i < N; i += workers) {
      try {
        for (std::uint32_t attempt = 0;; ++attempt) {
          Stream stream = derive_stream(cfg.master_seed, i, attempt);
          const CycleType ct = sample_cycle_type(cfg.n, theta, stream);
          try {
            evaluate(ct, stream, &result.raw[i * w]);
            break;
          } catch (const Error& e) {
            if (e.code() != ErrorCode::kSingularSample) throw;
            ++singular[i];
            if (singular[i] > cap) {
              exhausted[i] = 1;
              break;
            }
          }
        }
      } catch (...) {
        errors[worker] = std::current_exception();
        error_index[worker] = i;
        return;
      }
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> threads;
    for (std::size_t k = 0; k < workers; ++k) threads.emplace_back(work, k);
    for (auto& t : threads) t.join();
  }
  std::size_t first = workers;
  for (std::size_t k = 0; k < workers; ++k) {
    if (errors[k] && (first == workers || error_index[k] < error_index[first])) {
      first = k;
    }
  }
  if (first != workers) std::rethrow_exception(errors[first]);

  for (std::size_t i = 0; i < N; ++i) result.singular_samples += singular[i];
  if (result.singular_samples > cap ||
      std::any_of(exhausted.begin(), exhausted.end(),
                  [](std::uint8_t e) { return e != 0; })) {
    fail(ErrorCode::kSingularSample,
         std::to_string(result.singular_samples) +
             " singular samples exceed the cap of " + std::to_string(cap) +
             " (0.1% of num_samples); the configuration is likely outside "
             "the theorem's regime");
  }

  result.center.assign(w, 0.0);
  if (cfg.centering == CenteringMode::kTheoretical) {
    for (std::size_t j = 0; j < d; ++j) {
      const Complex c = centering(cfg.n, theta, result.constants[j]);
      result.center[2 * j] = c.real();
      result.center[2 * j + 1] = c.imag();
    }
  } else if (cfg.centering == CenteringMode::kEmpirical) {
    for (std::size_t c = 0; c < w; ++c) {
      CompensatedSum s;
      for (std::size_t i = 0; i < N; ++i) s.add(result.raw[i * w + c]);
      result.center[c] = s.value() / static_cast<double>(N);
    }
  }
  result.normalized.resize(N * w);
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t c = 0; c < w; ++c) {
      result.normalized[i * w + c] =
          (result.raw[i * w + c] - result.center[c]) / result.scale[c];
    }
  }

  result.mean.assign(w, 0.0);
  result.variance.assign(w, 0.0);
  result.ks.assign(w, 0.0);
  std::vector<double> column(N);
  for (std::size_t c = 0; c < w; ++c) {
    CompensatedSum s;
    for (std::size_t i = 0; i < N; ++i) {
      column[i] = result.normalized[i * w + c];
      s.add(column[i]);
    }
    result.mean[c] = s.value() / static_cast<double>(N);
    result.ks[c] = ks_statistic(column);
  }
  if (N >= 2) {
    result.covariance = empirical_cov(result.normalized, w);
    for (std::size_t c = 0; c < w; ++c) {
      result.variance[c] = result.covariance[c * w + c];
    }
  } else {
    result.covariance.assign(w * w, 0.0);
  }
  result.wall_seconds = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - started)
                            .count();
  return result;
}

double ks_statistic(std::span<const double> samples) {
  if (samples.empty()) fail(ErrorCode::kInvalidArgument, "no samples");
  std::vector<double> xs(samples.begin(), samples.end());
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double best = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double cdf = 0.5 * std::erfc(-xs[i] / std::sqrt(2.0));
    best = std::max({best, static_cast<double>(i + 1) / n - cdf,
                     cdf - static_cast<double>(i) / n});
  }
  return best;
}

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) fail(ErrorCode::kInvalidArgument, "no samples");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double na = static_cast<double>(x.size());
  const double nb = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double best = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    best = std::max(best, std::abs(static_cast<double>(i) / na -
                                   static_cast<double>(j) / nb));
  }
  return best;
}

double ks_two_sample_critical(std::size_t n_a, std::size_t n_b, double alpha) {
  const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
  const double na = static_cast<double>(n_a);
  const double nb = static_cast<double>(n_b);
  return c * std::sqrt((na + nb) / (na * nb));
}

std::vector<double> empirical_cov(std::span<const double> samples,
                                  std::size_t k) {
  if (k == 0 || samples.size() % k != 0) {
    fail(ErrorCode::kInvalidArgument, "sample matrix shape mismatch");
  }
  const std::size_t N = samples.size() / k;
  if (N < 2) fail(ErrorCode::kInvalidArgument, "need at least two samples");
  std::vector<double> mean(k);
  for (std::size_t c = 0; c < k; ++c) {
    CompensatedSum s;
    for (std::size_t i = 0; i < N; ++i) s.add(samples[i * k + c]);
    mean[c] = s.value() / static_cast<double>(N);
  }
  std::vector<double> cov(k * k);
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a; b < k; ++b) {
      CompensatedSum s;
      for (std::size_t i = 0; i < N; ++i) {
        s.add((samples[i * k + a] - mean[a]) * (samples[i * k + b] - mean[b]));
      }
      cov[a * k + b] = cov[b * k + a] = s.value() / static_cast<double>(N - 1);
    }
  }
  return cov;
}

}  // namespace permchar
