#pragma once

#include <functional>
#include <span>

namespace permchar {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int subintervals = 0;
};

inline constexpr int kMaxQuadratureBisections = 12;

// Integral of u over [a, b], split at every point of `splits` that lies
// strictly inside. Each piece is integrated by tanh-sinh, which tolerates
// integrable (e.g. logarithmic) singularities at the piece endpoints; pieces
// that miss the tolerance are bisected up to kMaxQuadratureBisections times.
// Throws kNonConvergence past that cap.
QuadratureResult singular_quadrature(const std::function<double(double)>& u,
                                     std::span<const double> splits,
                                     double target_tol = 1e-12, double a = 0.0,
                                     double b = 1.0);

}  // namespace permchar
