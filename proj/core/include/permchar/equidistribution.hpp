#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "permchar/multiplier.hpp"

namespace permchar {

// n points of [0,1)^d, row-major.
class PointSequence {
 public:
  PointSequence(std::size_t d, std::vector<double> coords);

  std::size_t d() const noexcept { return d_; }
  std::size_t size() const noexcept { return coords_.size() / d_; }
  double coord(std::size_t i, std::size_t j) const { return coords_[i * d_ + j]; }
  const std::vector<double>& coords() const noexcept { return coords_; }
  // Coordinate j of every point as a 1-d sequence.
  PointSequence projection(std::size_t j) const;

 private:
  std::size_t d_;
  std::vector<double> coords_;
};

// Points (frac(m phi_1), ..., frac(m phi_d)) for m = 1..n.
PointSequence kronecker(std::span<const double> phis, std::size_t n);

// ||a|| = distance to the nearest integer.
double nearest_integer_distance(double a);

inline constexpr std::size_t kMaxExact1dN = 100000;
inline constexpr std::size_t kMaxExact2dN = 4000;

// sup over anchored boxes of |A(box)/n - vol(box)|. d = 1 uses the sorted
// closed form, d = 2 enumerates the corner candidates in O(n^2).
double star_discrepancy_exact(const PointSequence& seq);

// Supremum over boxes with corners on the grid {k / G}; a lower bound for
// the exact value, within d / G of it.
double star_discrepancy_grid_oracle(const PointSequence& seq,
                                    std::size_t grid_resolution);

// Erdos-Turan-Koksma bound for the Kronecker sequence of phis (d <= 2):
// 3^d (2/(H+1) + (1/n) sum_{0 < |q|_inf <= H} 1/(r(q) ||q.phi||)).
double etk_bound(std::span<const double> phis, std::size_t n, std::size_t H);

inline constexpr double kResonanceTolerance = 1e-12;

// ||q.phi|| >= K / |q|_inf^gamma for 0 < |q|_inf <= H_searched.
struct FiniteTypeCertificate {
  double K = 0.0;
  double gamma = 1.0;
  std::int64_t H_searched = 0;
  bool preset = false;

  bool valid() const noexcept { return K > 0.0; }
};

// Exhaustive search over 0 < |q|_inf <= H_max (d <= 2). gamma is fitted by
// least squares on the log of the record minima; K is then the smallest
// ||q.phi|| |q|_inf^gamma found. K = 0 when an exact resonance is hit.
FiniteTypeCertificate finite_type_estimate(std::span<const double> phis,
                                           std::int64_t H_max);

// Checks the certificate inequality for every q in its searched range.
bool verify_certificate(std::span<const double> phis,
                        const FiniteTypeCertificate& cert);

struct FiniteTypePreset {
  std::string name;
  std::vector<double> phis;
  FiniteTypeCertificate certificate;
};

// "sqrt2", "sqrt3", "golden", "sqrt2,sqrt3".
std::optional<FiniteTypePreset> finite_type_preset(std::string_view name);
std::vector<std::string> finite_type_preset_names();
// Preset whose angles match phis within 1e-12, if any.
std::optional<FiniteTypePreset> match_finite_type_preset(
    std::span<const double> phis);

// A real integrand on [0, 1] with its singular angles listed.
struct Integrand1D {
  std::function<double(double)> h;
  std::vector<double> singular;
};

// h(u) = log|1 - e^{2 pi i u}|.
Integrand1D log_char_integrand();

// (1/n) sum h(points). Throws kSingularPointHit if a point sits exactly on a
// singular angle.
double weighted_sum(const Integrand1D& h, const PointSequence& seq);
Complex weighted_sum(const std::function<Complex(double)>& h,
                     std::span<const double> singular,
                     const PointSequence& seq);
// Product integrand h1(u) h2(v) on a 2-d sequence.
double weighted_sum(const Integrand1D& h1, const Integrand1D& h2,
                    const PointSequence& seq);

double integral(const Integrand1D& h, double lo = 0.0, double hi = 1.0);

// Total variation of h on [lo, hi]: extrema located on a grid of sign
// changes and refined by golden-section search, grid doubled until two
// successive estimates agree within tol. Throws kNonConvergence past the cap.
double total_variation(const std::function<double(double)>& h, double lo,
                       double hi, double tol = 1e-9);

// Error bound for |weighted_sum - integral over [0,1]^d| when every point
// lies in [delta, 1-delta]^d. box is the bound against the integral over the
// shrunken box; tail is the integral of |h| outside it.
struct KhBound {
  double box = 0.0;
  double tail = 0.0;
  double total() const { return box + tail; }
};

KhBound kh_error_bound(const Integrand1D& h, const PointSequence& seq,
                       double delta);
KhBound kh_error_bound(const Integrand1D& h1, const Integrand1D& h2,
                       const PointSequence& seq, double delta);

// delta = K / n^gamma.
double shrink_delta(const FiniteTypeCertificate& cert, std::size_t n);

struct DiscrepancyReport {
  std::size_t n = 0;
  std::size_t d = 0;
  double exact = 0.0;
  std::optional<double> etk;
  std::optional<double> kh_bound;
  std::optional<double> delta;
};

}  // namespace permchar
