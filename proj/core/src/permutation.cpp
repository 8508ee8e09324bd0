#include "permchar/permutation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "permchar/error.hpp"

namespace permchar {

EwensParameter::EwensParameter(double theta) : theta_(theta) {
  if (!std::isfinite(theta) || theta <= 0.0) {
    fail(ErrorCode::kInvalidArgument,
         "Ewens parameter must be positive and finite, got " +
             std::to_string(theta));
  }
}

CycleType::CycleType(std::vector<std::int64_t> counts)
    : counts_(std::move(counts)) {
  std::int64_t weight = 0;
  for (std::size_t m = 1; m <= counts_.size(); ++m) {
    if (counts_[m - 1] < 0) {
      fail(ErrorCode::kInvalidCycleType, "negative cycle count");
    }
    weight += static_cast<std::int64_t>(m) * counts_[m - 1];
  }
  if (weight != static_cast<std::int64_t>(counts_.size())) {
    fail(ErrorCode::kInvalidCycleType,
         "sum m*c_m = " + std::to_string(weight) + " but n = " +
             std::to_string(counts_.size()));
  }
}

std::int64_t CycleType::total_cycles() const noexcept {
  return std::accumulate(counts_.begin(), counts_.end(), std::int64_t{0});
}

Permutation::Permutation(std::vector<std::size_t> images)
    : images_(std::move(images)) {
  std::vector<bool> seen(images_.size(), false);
  for (std::size_t image : images_) {
    if (image >= images_.size() || seen[image]) {
      fail(ErrorCode::kInvalidArgument, "images do not form a bijection");
    }
    seen[image] = true;
  }
}

Permutation Permutation::identity(std::size_t n) {
  std::vector<std::size_t> images(n);
  std::iota(images.begin(), images.end(), std::size_t{0});
  return Permutation(std::move(images));
}

std::vector<std::vector<std::size_t>> Permutation::cycles() const {
  std::vector<std::vector<std::size_t>> out;
  std::vector<bool> visited(images_.size(), false);
  for (std::size_t start = 0; start < images_.size(); ++start) {
    if (visited[start]) continue;
    std::vector<std::size_t> cycle;
    for (std::size_t j = start; !visited[j]; j = images_[j]) {
      visited[j] = true;
      cycle.push_back(j);
    }
    out.push_back(std::move(cycle));
  }
  return out;
}

CycleType Permutation::cycle_type() const {
  std::vector<std::int64_t> counts(images_.size(), 0);
  for (const auto& cycle : cycles()) ++counts[cycle.size() - 1];
  return CycleType(std::move(counts));
}

BernoulliChain sample_feller_chain(std::size_t n, EwensParameter theta,
                                   Stream& stream) {
  if (n == 0) fail(ErrorCode::kInvalidArgument, "chain length must be >= 1");
  const double t = theta.value();
  BernoulliChain chain;
  chain.bits.resize(n);
  chain.bits[0] = 1;
  for (std::size_t i = 2; i <= n; ++i) {
    chain.bits[i - 1] =
        stream.bernoulli(t / (t + static_cast<double>(i) - 1.0)) ? 1 : 0;
  }
  return chain;
}

namespace {

// log P(xi_{j+1} = ... = xi_k = 0) for k >= j >= 1.
double log_survival(double theta, double log_base_j, std::int64_t k) {
  const double kd = static_cast<double>(k);
  return (std::lgamma(kd) - std::lgamma(theta + kd)) - log_base_j;
}

}  // namespace

std::vector<std::int64_t> sample_feller_ones(std::int64_t horizon,
                                             EwensParameter theta,
                                             Stream& stream) {
  if (horizon < 1) fail(ErrorCode::kInvalidArgument, "horizon must be >= 1");
  const double t = theta.value();
  std::vector<std::int64_t> ones{1};
  std::int64_t j = 1;
  while (j < horizon) {
    // Next one is the smallest k > j with S_j(k) <= v.
    const double log_v = std::log(1.0 - stream.uniform01());
    const double jd = static_cast<double>(j);
    const double log_base = std::lgamma(jd) - std::lgamma(t + jd);
    if (log_survival(t, log_base, horizon) > log_v) break;
    std::int64_t lo = j;  // S_j(lo) > v
    std::int64_t hi = horizon;
    // Exponential probe keeps short gaps cheap.
    for (std::int64_t step = 1; lo + step < hi; step *= 2) {
      if (log_survival(t, log_base, lo + step) <= log_v) {
        hi = lo + step;
        break;
      }
      lo += step;
    }
    while (hi - lo > 1) {
      const std::int64_t mid = lo + (hi - lo) / 2;
      if (log_survival(t, log_base, mid) <= log_v) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    ones.push_back(hi);
    j = hi;
  }
  return ones;
}

CycleType cycle_counts_from_ones(std::size_t n,
                                 std::span<const std::int64_t> ones) {
  if (n == 0 || ones.empty() || ones.front() != 1) {
    fail(ErrorCode::kInvalidArgument, "a Feller chain starts with xi_1 = 1");
  }
  std::vector<std::int64_t> counts(n, 0);
  const auto end = static_cast<std::int64_t>(n) + 1;  // appended 1
  std::int64_t prev = ones.front();
  for (std::size_t i = 1; i <= ones.size(); ++i) {
    const std::int64_t next = (i < ones.size()) ? std::min(ones[i], end) : end;
    ++counts[static_cast<std::size_t>(next - prev) - 1];
    if (next == end) break;
    prev = next;
  }
  return CycleType(std::move(counts));
}

CycleType cycle_counts_from_chain(const BernoulliChain& chain) {
  std::vector<std::int64_t> ones;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    if (chain.bits[i] != 0) ones.push_back(static_cast<std::int64_t>(i) + 1);
  }
  return cycle_counts_from_ones(chain.size(), ones);
}

CycleType sample_cycle_type(std::size_t n, EwensParameter theta,
                            Stream& stream) {
  const auto ones =
      sample_feller_ones(static_cast<std::int64_t>(n), theta, stream);
  return cycle_counts_from_ones(n, ones);
}

PoissonLimitCounts poisson_counts_from_ones(std::int64_t horizon,
                                            std::span<const std::int64_t> ones,
                                            std::size_t m_max) {
  if (horizon < 2 * static_cast<std::int64_t>(m_max)) {
    fail(ErrorCode::kHorizonTooSmall,
         "horizon " + std::to_string(horizon) + " < 2 * m_max");
  }
  PoissonLimitCounts out;
  out.horizon = horizon;
  out.counts.assign(m_max, 0);
  for (std::size_t i = 1; i < ones.size() && ones[i] <= horizon; ++i) {
    const auto gap = static_cast<std::size_t>(ones[i] - ones[i - 1]);
    if (gap <= m_max) ++out.counts[gap - 1];
  }
  return out;
}

PoissonLimitCounts poisson_counts_from_chain(const BernoulliChain& chain,
                                             std::size_t m_max) {
  std::vector<std::int64_t> ones;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    if (chain.bits[i] != 0) ones.push_back(static_cast<std::int64_t>(i) + 1);
  }
  return poisson_counts_from_ones(static_cast<std::int64_t>(chain.size()), ones,
                                  m_max);
}

std::int64_t default_poisson_horizon(std::size_t n, std::size_t m_max) {
  return static_cast<std::int64_t>(std::max(10 * m_max, n));
}

Permutation sample_permutation_crp(std::size_t n, EwensParameter theta,
                                   Stream& stream) {
  if (n == 0) fail(ErrorCode::kInvalidArgument, "n must be >= 1");
  const double t = theta.value();
  std::vector<std::size_t> images(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (stream.bernoulli(t / (t + static_cast<double>(i)))) {
      images[i] = i;
    } else {
      const auto j = static_cast<std::size_t>(stream.uniform_index(i));
      images[i] = images[j];
      images[j] = i;
    }
  }
  return Permutation(std::move(images));
}

double esf_probability(const CycleType& ct, EwensParameter theta) {
  const double t = theta.value();
  const auto n = static_cast<double>(ct.n());
  double log_p = std::lgamma(n + 1.0) + std::lgamma(t) - std::lgamma(t + n);
  for (std::size_t m = 1; m <= ct.n(); ++m) {
    const auto c = static_cast<double>(ct.count(m));
    if (c == 0.0) continue;
    log_p += c * (std::log(t) - std::log(static_cast<double>(m))) -
             std::lgamma(c + 1.0);
  }
  return std::exp(log_p);
}

namespace {

void partitions_into(std::size_t remaining, std::size_t max_part,
                     std::vector<std::int64_t>& counts,
                     std::vector<CycleType>& out) {
  if (remaining == 0) {
    out.emplace_back(counts);
    return;
  }
  for (std::size_t part = std::min(remaining, max_part); part >= 1; --part) {
    ++counts[part - 1];
    partitions_into(remaining - part, part, counts, out);
    --counts[part - 1];
  }
}

}  // namespace

std::vector<CycleType> all_cycle_types(std::size_t n) {
  if (n == 0) fail(ErrorCode::kInvalidArgument, "n must be >= 1");
  if (n > 60) fail(ErrorCode::kSizeLimit, "partition enumeration capped at 60");
  std::vector<CycleType> out;
  std::vector<std::int64_t> counts(n, 0);
  partitions_into(n, n, counts, out);
  return out;
}

std::map<CycleType, double> exact_feller_distribution(std::size_t n,
                                                      EwensParameter theta) {
  if (n == 0) fail(ErrorCode::kInvalidArgument, "n must be >= 1");
  if (n > kMaxExactFellerN) {
    fail(ErrorCode::kSizeLimit, "exact enumeration supports n <= 16, got " +
                                    std::to_string(n));
  }
  const double t = theta.value();
  std::vector<double> p_one(n);
  for (std::size_t i = 1; i <= n; ++i) {
    p_one[i - 1] = t / (t + static_cast<double>(i) - 1.0);
  }
  std::map<CycleType, double> law;
  BernoulliChain chain;
  chain.bits.assign(n, 0);
  chain.bits[0] = 1;
  const std::uint64_t num_chains = std::uint64_t{1} << (n - 1);
  for (std::uint64_t mask = 0; mask < num_chains; ++mask) {
    double prob = 1.0;
    for (std::size_t i = 2; i <= n; ++i) {
      const bool bit = ((mask >> (i - 2)) & 1u) != 0;
      chain.bits[i - 1] = bit ? 1 : 0;
      prob *= bit ? p_one[i - 1] : 1.0 - p_one[i - 1];
    }
    law[cycle_counts_from_chain(chain)] += prob;
  }
  return law;
}

double psi_n(std::int64_t n, std::int64_t m, EwensParameter theta) {
  if (m < 1 || m > n) {
    fail(ErrorCode::kInvalidArgument, "psi_n requires 1 <= m <= n");
  }
  const double t = theta.value();
  const auto k = static_cast<double>(n - m);
  const auto nd = static_cast<double>(n);
  return std::exp(std::lgamma(k + t) - std::lgamma(k + 1.0) +
                  std::lgamma(nd + 1.0) - std::lgamma(nd + t));
}

PsiBoundConstants psi_bound_constants(std::int64_t n_max, EwensParameter theta) {
  if (n_max < 1) fail(ErrorCode::kInvalidArgument, "n_max must be >= 1");
  const double t = theta.value();
  const auto size = static_cast<std::size_t>(n_max) + 1;
  // log Psi_n(m) = a[n - m] + b[n]
  std::vector<double> a(size);
  std::vector<double> b(size);
  std::vector<double> log_k(size, 0.0);
  for (std::size_t k = 0; k < size; ++k) {
    const auto kd = static_cast<double>(k);
    a[k] = std::lgamma(kd + t) - std::lgamma(kd + 1.0);
    b[k] = std::lgamma(kd + 1.0) - std::lgamma(kd + t);
    if (k > 0) log_k[k] = std::log(kd);
  }
  PsiBoundConstants out;
  double log_k1 = -INFINITY;
  for (std::size_t n = 2; n < size; ++n) {
    for (std::size_t k = 1; k < n; ++k) {  // k = n - m
      const double value = a[k] + b[n] - (t - 1.0) * (log_k[k] - log_k[n]);
      log_k1 = std::max(log_k1, value);
    }
  }
  out.k1 = std::exp(log_k1);
  double log_k2 = -INFINITY;
  for (std::size_t n = 1; n < size; ++n) {
    log_k2 = std::max(log_k2, a[0] + b[n] + (t - 1.0) * log_k[n]);
  }
  out.k2 = std::exp(log_k2);
  return out;
}

double feller_coupling_gap(std::size_t n, EwensParameter theta, std::size_t m,
                           std::size_t num_samples, Stream& stream,
                           std::int64_t horizon) {
  if (m < 1 || m > n) fail(ErrorCode::kInvalidArgument, "requires 1 <= m <= n");
  if (num_samples == 0) fail(ErrorCode::kInvalidArgument, "num_samples >= 1");
  if (horizon == 0) {
    horizon = std::max<std::int64_t>(1000 * static_cast<std::int64_t>(n),
                                     1'000'000);
  }
  if (horizon < static_cast<std::int64_t>(n) ||
      horizon < 2 * static_cast<std::int64_t>(m)) {
    fail(ErrorCode::kHorizonTooSmall, "horizon shorter than the chain");
  }
  double total = 0.0;
  for (std::size_t s = 0; s < num_samples; ++s) {
    const auto ones = sample_feller_ones(horizon, theta, stream);
    const auto c = cycle_counts_from_ones(n, ones).count(m);
    const auto y = poisson_counts_from_ones(horizon, ones, m).counts[m - 1];
    total += static_cast<double>(std::abs(c - y));
  }
  return total / static_cast<double>(num_samples);
}

}  // namespace permchar
