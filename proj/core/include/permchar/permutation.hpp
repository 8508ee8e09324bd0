#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "permchar/random.hpp"

namespace permchar {

// Weight theta of the Ewens measure; theta = 1 is the uniform measure on S_n.
class EwensParameter {
 public:
  explicit EwensParameter(double theta);
  double value() const noexcept { return theta_; }

 private:
  double theta_;
};

// Indicators xi_1..xi_n of the Feller coupling, stored 0-based.
struct BernoulliChain {
  std::vector<std::uint8_t> bits;
  std::size_t size() const noexcept { return bits.size(); }
};

// Cycle counts (c_1, ..., c_n) with sum m * c_m == n.
class CycleType {
 public:
  CycleType() = default;
  // counts[m - 1] is the number of m-cycles; the weight identity is checked.
  explicit CycleType(std::vector<std::int64_t> counts);

  std::size_t n() const noexcept { return counts_.size(); }
  std::int64_t count(std::size_t m) const { return counts_.at(m - 1); }
  const std::vector<std::int64_t>& counts() const noexcept { return counts_; }
  std::int64_t total_cycles() const noexcept;

  // Calls fn(m) once per cycle, by increasing length.
  template <class Fn>
  void for_each_cycle(Fn&& fn) const {
    for (std::size_t m = 1; m <= counts_.size(); ++m) {
      for (std::int64_t k = 0; k < counts_[m - 1]; ++k) fn(m);
    }
  }

  auto operator<=>(const CycleType&) const = default;

 private:
  std::vector<std::int64_t> counts_;
};

// One-line notation, 0-based: images[j] = sigma(j).
class Permutation {
 public:
  explicit Permutation(std::vector<std::size_t> images);
  static Permutation identity(std::size_t n);

  std::size_t n() const noexcept { return images_.size(); }
  std::size_t operator()(std::size_t j) const { return images_[j]; }
  const std::vector<std::size_t>& images() const noexcept { return images_; }

  // Cycles in canonical order (each starts at its smallest element).
  std::vector<std::vector<std::size_t>> cycles() const;
  CycleType cycle_type() const;

 private:
  std::vector<std::size_t> images_;
};

// Truncated Poisson-limit counts Y_1..Y_{m_max}; counts[m - 1] = Y_m.
struct PoissonLimitCounts {
  std::int64_t horizon = 0;
  std::vector<std::int64_t> counts;
};

// xi_i ~ Bernoulli(theta / (theta + i - 1)), independent; xi_1 = 1.
BernoulliChain sample_feller_chain(std::size_t n, EwensParameter theta,
                                   Stream& stream);

// Same law as sample_feller_chain, returned as the 1-based positions of the
// ones up to `horizon`. The gap to the next one is drawn by inverting its
// survival function, so the cost grows with the number of ones (about
// theta * log(horizon)) rather than with the horizon.
std::vector<std::int64_t> sample_feller_ones(std::int64_t horizon,
                                             EwensParameter theta,
                                             Stream& stream);

// c_m = number of m-spacings in 1 xi_2 ... xi_n 1.
CycleType cycle_counts_from_chain(const BernoulliChain& chain);
CycleType cycle_counts_from_ones(std::size_t n,
                                 std::span<const std::int64_t> ones);

// Cycle type of an Ewens(theta) permutation of size n via the coupling.
CycleType sample_cycle_type(std::size_t n, EwensParameter theta,
                            Stream& stream);

// Y_m estimated as the number of m-spacings lying entirely inside the chain.
// Spacings straddling the end are dropped, a downward bias of order
// theta^2 / horizon per m. Requires horizon >= 2 * m_max.
PoissonLimitCounts poisson_counts_from_chain(const BernoulliChain& chain,
                                             std::size_t m_max);
PoissonLimitCounts poisson_counts_from_ones(std::int64_t horizon,
                                            std::span<const std::int64_t> ones,
                                            std::size_t m_max);

// Default truncation horizon max(10 * m_max, n).
std::int64_t default_poisson_horizon(std::size_t n, std::size_t m_max);

// Chinese-restaurant construction: element i (1-based) opens a new cycle with
// probability theta / (theta + i - 1), else is inserted after a uniformly
// chosen earlier element.
Permutation sample_permutation_crp(std::size_t n, EwensParameter theta,
                                   Stream& stream);

// Ewens sampling formula.
double esf_probability(const CycleType& ct, EwensParameter theta);

// All cycle types (integer partitions) of n.
std::vector<CycleType> all_cycle_types(std::size_t n);

inline constexpr std::size_t kMaxExactFellerN = 16;

// Law of cycle_counts_from_chain over all 2^(n-1) chains. n <= 16.
std::map<CycleType, double> exact_feller_distribution(std::size_t n,
                                                      EwensParameter theta);

// binom(n-m+theta-1, n-m) / binom(n+theta-1, n) through log-gamma.
double psi_n(std::int64_t n, std::int64_t m, EwensParameter theta);

// Suprema of Psi_n(m) / (1 - m/n)^(theta-1) over 1 <= m < n <= n_max, and of
// Psi_n(n) * n^(theta-1) over 1 <= n <= n_max.
struct PsiBoundConstants {
  double k1 = 0.0;
  double k2 = 0.0;
};
PsiBoundConstants psi_bound_constants(std::int64_t n_max, EwensParameter theta);

// Monte Carlo E|C_m^(n) - Y_m| with both counts read off one chain. Y_m is
// truncated at `horizon` (0 picks max(1000 n, 10^6)).
double feller_coupling_gap(std::size_t n, EwensParameter theta, std::size_t m,
                           std::size_t num_samples, Stream& stream,
                           std::int64_t horizon = 0);

}  // namespace permchar
