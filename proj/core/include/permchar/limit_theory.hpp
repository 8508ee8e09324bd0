#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "permchar/class_functions.hpp"
#include "permchar/multiplier.hpp"
#include "permchar/permutation.hpp"

namespace permchar {

// Integrals of log f(e^{2 pi i phi}) over one period.
struct LimitConstants {
  double m_R = 0.0;   // int log|f|
  double m_I = 0.0;   // int arg f
  double V_R = 0.0;   // int log^2 |f|
  double V_I = 0.0;   // int arg^2 f
  double C_RI = 0.0;  // int log|f| * arg f
};

enum class Part { kReal, kImag };

// Zeros of f plus the jumps of arg f located on a grid of `grid` cells and
// refined by bisection to machine precision.
std::vector<double> arg_split_points(const SpectralFunction& f,
                                     std::size_t grid = 4096);

LimitConstants limit_constants(const SpectralFunction& f,
                               double target_tol = 1e-12);

// Covariance of the limiting normal vector (Re N_1, Im N_1, ..., Re N_d,
// Im N_d), interleaved. Within one point the entries are theta times the raw
// second moments; across points they are theta times products of means.
struct CovarianceSpec {
  std::size_t d = 0;
  std::vector<double> sigma;  // 2d x 2d, row-major
  double min_eigenvalue = 0.0;

  double at(std::size_t r, std::size_t c) const { return sigma[r * 2 * d + c]; }
};

inline constexpr double kPsdTolerance = 1e-10;

// Throws kNonConvergence if the matrix is not PSD within kPsdTolerance.
CovarianceSpec covariance_matrix(std::span<const SpectralFunction> fs,
                                 EwensParameter theta,
                                 double target_tol = 1e-12);
CovarianceSpec covariance_matrix(std::span<const LimitConstants> constants,
                                 EwensParameter theta);

// The law of X_{m,1} through its moments, for A_n = sum_m sum_k X_{m,k}.
struct StatisticSpec {
  std::string description;
  double theta = 1.0;
  std::function<double(std::size_t m)> second_moment;
  std::function<double(std::size_t m, double p)> abs_moment;

  // X = 1.
  static StatisticSpec constant_one(EwensParameter theta);
  // X = 0.
  static StatisticSpec zero(EwensParameter theta);
  // X_{m,1} = Re or Im of log f(x^m T) with T the m-fold product of
  // multipliers drawn from `model`. Moments come from quadrature for
  // uniform and Fourier models and from finite sums for discrete ones.
  static StatisticSpec class_function_term(const SpectralFunction& f,
                                           UnitAngle x,
                                           const MultiplierModel& model,
                                           Part part, EwensParameter theta);
};

// sum_{m <= n} E[X_m^2] / m.
double v_n(const StatisticSpec& spec, std::size_t n);

// True when V_n is positive and still increasing between n/2 and n.
bool v_n_grows(const StatisticSpec& spec, std::size_t n);

struct LyapunovReport {
  double p = 0.0;
  bool precondition_ok = false;  // p > max(1/theta, 2)
  std::vector<std::size_t> ns;
  std::vector<double> ratios;  // sum_{m<=n} E|X_m|^p / m divided by V_n^{p/2}
  bool decreasing = false;
  std::string message;
};

LyapunovReport lyapunov_check(const StatisticSpec& spec,
                              std::span<const std::size_t> ns, double p);

// sqrt(theta * V * log n) with V = V_R or V_I.
double normalization(std::size_t n, EwensParameter theta,
                     const LimitConstants& c, Part part);

// theta * (m_R + i m_I) * log n.
Complex centering(std::size_t n, EwensParameter theta,
                  const LimitConstants& c);

}  // namespace permchar
