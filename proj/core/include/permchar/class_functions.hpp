#pragma once

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "permchar/multiplier.hpp"
#include "permchar/permutation.hpp"

namespace permchar {

// Real and imaginary part of a logarithm. The imaginary part of a sum is the
// sum of principal values and is never re-wrapped into (-pi, pi].
struct ComplexLogValue {
  double re = 0.0;
  double im = 0.0;

  ComplexLogValue& operator+=(const ComplexLogValue& other) {
    re += other.re;
    im += other.im;
    return *this;
  }
  friend bool operator==(const ComplexLogValue&,
                         const ComplexLogValue&) = default;
};

// Principal branch; strictly negative reals map to (ln|w|, +pi).
// Throws kSingularSample for w == 0.
ComplexLogValue branch_log(Complex w);

// 1 - e^{2 pi i psi}, evaluated without cancellation near psi = 0.
Complex one_minus_unit(UnitAngle psi);

// A function on the unit circle, parameterised by the angle, with its zeros
// listed explicitly so that quadrature and singular-sample checks can find
// them.
class SpectralFunction {
 public:
  using Eval = std::function<Complex(UnitAngle)>;

  SpectralFunction(std::string label, Eval eval,
                   std::vector<double> zero_angles,
                   std::vector<double> arg_jumps = {});

  // f(y) = 1 - y^{-1}; zero at angle 0.
  static SpectralFunction char_poly();
  // f(y) = 2 - y - y^{-1} = 2 - 2 cos(2 pi phi); zero at 0.
  static SpectralFunction sym_part();
  // f(y) = y^{-1} - y = -2i sin(2 pi phi); zeros at 0 and 1/2.
  static SpectralFunction antisym_part();
  static SpectralFunction constant(double c);
  // "charpoly", "sym", "antisym", "const:<value>".
  static SpectralFunction from_label(std::string_view label);

  Complex operator()(UnitAngle angle) const { return eval_(angle); }
  const std::string& label() const noexcept { return label_; }
  const std::vector<double>& zero_angles() const noexcept { return zeros_; }
  // Angles where arg f jumps away from a zero (known a priori).
  const std::vector<double>& arg_jumps() const noexcept { return jumps_; }

 private:
  std::string label_;
  Eval eval_;
  std::vector<double> zeros_;
  std::vector<double> jumps_;
};

// sum over cycles of log(1 - x^{-m} T_{m,k}), one fresh T per cycle.
ComplexLogValue log_Z(const CycleType& ct, UnitAngle x,
                      const MultiplierModel& model, Stream& stream);

// sum over cycles of log f(x^m z_{m,k}), one fresh z per cycle.
ComplexLogValue w1(const CycleType& ct, const SpectralFunction& f, UnitAngle x,
                   const MultiplierModel& model, Stream& stream);

// sum over cycles of log f(x^m T_{m,k}), one fresh T per cycle.
ComplexLogValue w2(const CycleType& ct, const SpectralFunction& f, UnitAngle x,
                   const MultiplierModel& model, Stream& stream);

// log Z at d points; all coordinates of one cycle share one joint draw.
std::vector<ComplexLogValue> multipoint_logZ(const CycleType& ct,
                                             std::span<const UnitAngle> points,
                                             const JointMultiplierModel& joint,
                                             Stream& stream);

enum class ClassFunctionKind { kFirst = 1, kSecond = 2 };

std::vector<ComplexLogValue> multipoint_w(
    const CycleType& ct, ClassFunctionKind kind,
    std::span<const SpectralFunction> fs, std::span<const UnitAngle> points,
    const JointMultiplierModel& joint, Stream& stream);

inline constexpr std::size_t kMaxDenseOracleN = 12;

// det(I - x^{-1} M(sigma, z)) with M_ij = z_i delta_{i, sigma(j)}, by LU.
Complex det_oracle(const Permutation& perm, std::span<const Complex> z_values,
                   UnitAngle x);

// prod over cycles c of (1 - x^{-|c|} prod_{j in c} z_j).
Complex cycle_product(const Permutation& perm,
                      std::span<const Complex> z_values, UnitAngle x);

// det(S - x I) for S = M(sigma,1) + M(sigma,1)^T and real x in [-2, 2]:
// (-1)^(n - l) prod_m (2 - 2 cos(m alpha))^{c_m} with x = 2 cos(alpha).
double sym_char_poly(const CycleType& ct, double x_real);
double sym_char_poly_dense(const Permutation& perm, double x_real);

// det(2A - x I) for 2A = M(sigma,1) - M(sigma,1)^T and real x. With
// x = 2 sinh(beta) an m-cycle contributes 2 cosh(m beta) - 2 for even m and
// -2 sinh(m beta) for odd m.
double antisym_char_poly(const CycleType& ct, double x_real);
double antisym_char_poly_dense(const Permutation& perm, double x_real);

}  // namespace permchar
