#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "permchar/random.hpp"

namespace permchar {

using Complex = std::complex<double>;

// A point e^{2 pi i phi} of the unit circle, stored as phi in [0, 1).
class UnitAngle {
 public:
  constexpr UnitAngle() = default;
  // Reduces any finite real modulo 1.
  explicit UnitAngle(double phi);

  double phi() const noexcept { return phi_; }
  Complex point() const;

  // Angle of the product of two circle points.
  UnitAngle operator+(UnitAngle other) const;
  UnitAngle operator-(UnitAngle other) const;
  UnitAngle operator-() const;
  // Angle of x^m.
  UnitAngle times(std::int64_t m) const;

  friend bool operator==(UnitAngle, UnitAngle) = default;

 private:
  double phi_ = 0.0;
};

// Fractional part s - floor(s), always in [0, 1).
double frac(double s);

struct TrivialMultiplier {};
struct UniformMultiplier {};

// Density g(phi) = sum_j c_j e^{2 pi i j phi} on a finite window of j.
struct FourierDensity {
  std::map<int, Complex> coeffs;  // c_{-j} = conj(c_j) is enforced
  double envelope = 1.0;           // sum |c_j|, bounds g from above
};

// z uniform over the rho-th roots of unity weighted by probs[k] for angle k/rho.
struct DiscreteRoots {
  int rho = 1;
  std::vector<double> probs;
  std::optional<std::vector<Complex>> coeffs;  // c_0..c_{rho-1} when known
};

class MultiplierModel {
 public:
  using Variant =
      std::variant<TrivialMultiplier, UniformMultiplier, FourierDensity,
                   DiscreteRoots>;

  static MultiplierModel trivial();
  static MultiplierModel uniform();
  // Validates c_0 = 1, |c_j| < 1 off zero and g >= 0 on a 4096-point grid.
  // Missing negative indices are filled in by conjugate symmetry.
  static MultiplierModel fourier(std::map<int, Complex> coeffs);
  static MultiplierModel discrete(int rho, std::vector<double> probs);
  static MultiplierModel discrete_from_fourier(std::vector<Complex> coeffs);

  const Variant& variant() const noexcept { return variant_; }
  bool is_trivial() const noexcept;
  bool is_uniform() const noexcept;
  const char* type_name() const noexcept;

  // g(phi) for Fourier models; 1 for Uniform.
  double density(double phi) const;

 private:
  explicit MultiplierModel(Variant v) : variant_(std::move(v)) {}
  Variant variant_;
};

inline constexpr std::size_t kDensityValidationGrid = 4096;

UnitAngle sample_z(const MultiplierModel& model, Stream& stream);

// Angle of T = z_1 ... z_m, by direct m-fold summation.
UnitAngle sample_T(const MultiplierModel& model, std::size_t m, Stream& stream);

// Fourier coefficients of g^{*m}: c_j -> c_j^m.
std::map<int, Complex> convolved_density_coeffs(const FourierDensity& density,
                                                std::size_t m);

// p_k = (1/rho) sum_j c_j e^{2 pi i j k / rho}; throws on negative mass or a
// total away from 1.
std::vector<double> discrete_probs_from_fourier(std::span<const Complex> coeffs);

// c_j = sum_k p_k e^{-2 pi i j k / rho}.
std::vector<Complex> discrete_fourier_from_probs(std::span<const double> probs);

// Law of T for a discrete model: probabilities of angle k/rho.
std::vector<double> discrete_product_probs(const DiscreteRoots& model,
                                           std::size_t m);

// ----------------------------------------------------------------------------
// Joint laws for several evaluation points.

struct IndependentProduct {
  std::vector<MultiplierModel> models;
};

// Two coordinates on roots of unity with joint law given by a 2-d Fourier
// table: P(k1, k2) = (1/(rho1 rho2)) sum_{a,b} c_{a,b} e^{2 pi i (a k1/rho1 +
// b k2/rho2)}.
struct PairwiseFourier {
  int rho1 = 1;
  int rho2 = 1;
  std::vector<std::vector<Complex>> coeffs;  // coeffs[a][b]
  std::vector<double> joint_probs;           // row-major rho1 x rho2
};

// Every coordinate receives the same draw of one model.
struct SharedMultiplier {
  std::size_t d = 1;
  MultiplierModel model = MultiplierModel::uniform();
};

class JointMultiplierModel {
 public:
  using Variant = std::variant<IndependentProduct, PairwiseFourier,
                               SharedMultiplier>;

  static JointMultiplierModel independent(std::vector<MultiplierModel> models);
  static JointMultiplierModel pairwise_fourier(
      std::vector<std::vector<Complex>> coeffs);
  static JointMultiplierModel shared(std::size_t d, MultiplierModel model);

  std::size_t dimension() const noexcept;
  const Variant& variant() const noexcept { return variant_; }
  // Marginal of coordinate j.
  MultiplierModel marginal(std::size_t j) const;

 private:
  explicit JointMultiplierModel(Variant v) : variant_(std::move(v)) {}
  Variant variant_;
};

struct JointCycleDraw {
  std::vector<UnitAngle> z;  // one joint draw
  std::vector<UnitAngle> t;  // componentwise product of m joint draws
};

// One joint z draw.
std::vector<UnitAngle> sample_joint_z(const JointMultiplierModel& model,
                                      Stream& stream);

// z is the first of the m joint draws whose componentwise product is t.
JointCycleDraw sample_joint_cycle(const JointMultiplierModel& model,
                                  std::size_t m, Stream& stream);

}  // namespace permchar
