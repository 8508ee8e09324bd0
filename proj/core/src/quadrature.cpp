#include "permchar/quadrature.hpp"

#include <algorithm>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <vector>

#include "permchar/compensated.hpp"
#include "permchar/error.hpp"

namespace permchar {

namespace {

struct Piece {
  double value;
  double error;
  int count;
};

Piece integrate_piece(boost::math::quadrature::tanh_sinh<double>& rule,
                      const std::function<double(double)>& u, double lo,
                      double hi, double tol, int depth) {
  double error = 0.0;
  double l1 = 0.0;
  std::size_t levels = 0;
  // Abscissae that round onto an endpoint are pulled back inside.
  const double inner_lo = std::nextafter(lo, hi);
  const double inner_hi = std::nextafter(hi, lo);
  const auto inside = [&](double x) {
    return u(std::clamp(x, inner_lo, inner_hi));
  };
  const double value =
      rule.integrate(inside, lo, hi, tol, &error, &l1, &levels);
  const double allowed = tol * std::max(1.0, l1);
  if (std::isfinite(value) && error <= allowed) return {value, error, 1};
  if (depth >= kMaxQuadratureBisections) {
    fail(ErrorCode::kNonConvergence,
         "quadrature did not converge on [" + std::to_string(lo) + ", " +
             std::to_string(hi) + "]");
  }
  const double mid = 0.5 * (lo + hi);
  const Piece left = integrate_piece(rule, u, lo, mid, tol, depth + 1);
  const Piece right = integrate_piece(rule, u, mid, hi, tol, depth + 1);
  return {left.value + right.value, left.error + right.error,
          left.count + right.count};
}

// Near an endpoint far from zero the abscissae stop at the double spacing, so
// the level-difference estimate can stall a little above tol although the
// neglected mass is at rounding level. Such a piece is accepted when halving
// it does not reduce the estimate.
Piece integrate_adaptive(boost::math::quadrature::tanh_sinh<double>& rule,
                         const std::function<double(double)>& u, double lo,
                         double hi, double tol) {
  try {
    return integrate_piece(rule, u, lo, hi, tol, 0);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kNonConvergence) throw;
  }
  constexpr double kStallFactor = 1e3;
  const double inner_lo = std::nextafter(lo, hi);
  const double inner_hi = std::nextafter(hi, lo);
  const auto inside = [&](double x) {
    return u(std::clamp(x, inner_lo, inner_hi));
  };
  double error = 0.0;
  double l1 = 0.0;
  std::size_t levels = 0;
  const double value = rule.integrate(inside, lo, hi, tol, &error, &l1, &levels);
  const double mid = 0.5 * (lo + hi);
  double e_left = 0.0;
  double e_right = 0.0;
  rule.integrate(inside, lo, mid, tol, &e_left, &l1, &levels);
  rule.integrate(inside, mid, hi, tol, &e_right, &l1, &levels);
  if (std::isfinite(value) && error <= kStallFactor * tol &&
      e_left + e_right >= 0.5 * error) {
    return {value, error, 1};
  }
  fail(ErrorCode::kNonConvergence,
       "quadrature did not converge on [" + std::to_string(lo) + ", " +
           std::to_string(hi) + "]");
}

}  // namespace

QuadratureResult singular_quadrature(const std::function<double(double)>& u,
                                     std::span<const double> splits,
                                     double target_tol, double a, double b) {
  if (!(a < b)) fail(ErrorCode::kInvalidArgument, "empty integration range");
  if (!(target_tol > 0.0)) {
    fail(ErrorCode::kInvalidArgument, "tolerance must be positive");
  }
  std::vector<double> nodes{a, b};
  for (double s : splits) {
    if (s > a && s < b) nodes.push_back(s);
  }
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

  thread_local boost::math::quadrature::tanh_sinh<double> rule;
  CompensatedSum value;
  double error = 0.0;
  int pieces = 0;
  for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
    const Piece p =
        integrate_adaptive(rule, u, nodes[k], nodes[k + 1], target_tol);
    value.add(p.value);
    error += p.error;
    pieces += p.count;
  }
  return {value.value(), error, pieces};
}

}  // namespace permchar
