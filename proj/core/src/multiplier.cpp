#include "permchar/multiplier.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "permchar/error.hpp"

namespace permchar {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kProbTolerance = 1e-12;

Complex unit(double turns) { return std::polar(1.0, kTwoPi * turns); }

std::size_t sample_index(std::span<const double> probs, Stream& stream) {
  const double u = stream.uniform01();
  double cumulative = 0.0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    cumulative += probs[k];
    if (u < cumulative) return k;
  }
  // Rounding left u above the last partial sum; take the last atom with mass.
  for (std::size_t k = probs.size(); k-- > 0;) {
    if (probs[k] > 0.0) return k;
  }
  return 0;
}

void validate_probs(std::span<const double> probs) {
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= -kProbTolerance)) {
      fail(ErrorCode::kInvalidCoefficients,
           "negative probability " + std::to_string(p));
    }
    total += p;
  }
  if (std::abs(total - 1.0) > kProbTolerance) {
    fail(ErrorCode::kInvalidCoefficients,
         "probabilities sum to " + std::to_string(total));
  }
}

}  // namespace

double frac(double s) {
  const double r = s - std::floor(s);
  return r < 1.0 ? r : 0.0;
}

UnitAngle::UnitAngle(double phi) : phi_(0.0) {
  if (!std::isfinite(phi)) fail(ErrorCode::kInvalidArgument, "angle not finite");
  phi_ = frac(phi);
}

Complex UnitAngle::point() const { return unit(phi_); }

UnitAngle UnitAngle::operator+(UnitAngle other) const {
  double s = phi_ + other.phi_;
  if (s >= 1.0) s -= 1.0;
  UnitAngle out;
  out.phi_ = s;
  return out;
}

UnitAngle UnitAngle::operator-() const {
  UnitAngle out;
  out.phi_ = phi_ == 0.0 ? 0.0 : 1.0 - phi_;
  return out;
}

UnitAngle UnitAngle::operator-(UnitAngle other) const {
  double s = phi_ - other.phi_;
  if (s < 0.0) s += 1.0;
  UnitAngle out;
  out.phi_ = s < 1.0 ? s : 0.0;
  return out;
}

UnitAngle UnitAngle::times(std::int64_t m) const {
  return UnitAngle(static_cast<double>(m) * phi_);
}

MultiplierModel MultiplierModel::trivial() {
  return MultiplierModel(TrivialMultiplier{});
}

MultiplierModel MultiplierModel::uniform() {
  return MultiplierModel(UniformMultiplier{});
}

MultiplierModel MultiplierModel::fourier(std::map<int, Complex> coeffs) {
  auto c0 = coeffs.find(0);
  if (c0 == coeffs.end() || std::abs(c0->second - Complex(1.0, 0.0)) > 1e-12) {
    fail(ErrorCode::kInvalidCoefficients, "Fourier density needs c_0 = 1");
  }
  c0->second = 1.0;
  // Complete by conjugate symmetry so that g is real.
  std::map<int, Complex> full = coeffs;
  for (const auto& [j, c] : coeffs) {
    if (j == 0) continue;
    if (std::abs(c) >= 1.0) {
      fail(ErrorCode::kInvalidCoefficients,
           "|c_" + std::to_string(j) + "| must be < 1");
    }
    auto mirror = coeffs.find(-j);
    if (mirror == coeffs.end()) {
      full[-j] = std::conj(c);
    } else if (std::abs(mirror->second - std::conj(c)) > 1e-12) {
      fail(ErrorCode::kInvalidCoefficients,
           "c_{-j} must equal conj(c_j) for a real density");
    }
  }
  FourierDensity density{std::move(full), 0.0};
  for (const auto& [j, c] : density.coeffs) density.envelope += std::abs(c);
  MultiplierModel model(std::move(density));
  for (std::size_t i = 0; i < kDensityValidationGrid; ++i) {
    const double phi =
        static_cast<double>(i) / static_cast<double>(kDensityValidationGrid);
    if (model.density(phi) < -1e-12) {
      fail(ErrorCode::kInvalidCoefficients,
           "density negative at phi = " + std::to_string(phi));
    }
  }
  return model;
}

MultiplierModel MultiplierModel::discrete(int rho, std::vector<double> probs) {
  if (rho < 1 || probs.size() != static_cast<std::size_t>(rho)) {
    fail(ErrorCode::kInvalidCoefficients, "need rho >= 1 probabilities");
  }
  validate_probs(probs);
  for (double& p : probs) p = std::max(p, 0.0);
  return MultiplierModel(DiscreteRoots{rho, std::move(probs), std::nullopt});
}

MultiplierModel MultiplierModel::discrete_from_fourier(
    std::vector<Complex> coeffs) {
  auto probs = discrete_probs_from_fourier(coeffs);
  for (std::size_t j = 1; j < coeffs.size(); ++j) {
    if (std::abs(coeffs[j]) >= 1.0) {
      fail(ErrorCode::kInvalidCoefficients,
           "|c_" + std::to_string(j) + "| must be < 1");
    }
  }
  const int rho = static_cast<int>(coeffs.size());
  return MultiplierModel(DiscreteRoots{rho, std::move(probs), std::move(coeffs)});
}

bool MultiplierModel::is_trivial() const noexcept {
  return std::holds_alternative<TrivialMultiplier>(variant_);
}

bool MultiplierModel::is_uniform() const noexcept {
  return std::holds_alternative<UniformMultiplier>(variant_);
}

const char* MultiplierModel::type_name() const noexcept {
  switch (variant_.index()) {
    case 0: return "trivial";
    case 1: return "uniform";
    case 2: return "fourier";
    default: return "discrete";
  }
}

double MultiplierModel::density(double phi) const {
  if (const auto* f = std::get_if<FourierDensity>(&variant_)) {
    Complex g = 0.0;
    for (const auto& [j, c] : f->coeffs) g += c * unit(j * phi);
    return g.real();
  }
  if (is_uniform()) return 1.0;
  fail(ErrorCode::kInvalidArgument, "model has no density");
}

UnitAngle sample_z(const MultiplierModel& model, Stream& stream) {
  return std::visit(
      [&](const auto& v) -> UnitAngle {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, TrivialMultiplier>) {
          return UnitAngle(0.0);
        } else if constexpr (std::is_same_v<T, UniformMultiplier>) {
          return UnitAngle(stream.uniform01());
        } else if constexpr (std::is_same_v<T, FourierDensity>) {
          // Rejection from the uniform proposal under the envelope sum |c_j|.
          for (;;) {
            const double phi = stream.uniform01();
            if (stream.uniform01() * v.envelope < model.density(phi)) {
              return UnitAngle(phi);
            }
          }
        } else {
          const auto k = sample_index(v.probs, stream);
          return UnitAngle(static_cast<double>(k) / v.rho);
        }
      },
      model.variant());
}

UnitAngle sample_T(const MultiplierModel& model, std::size_t m,
                   Stream& stream) {
  if (m == 0) fail(ErrorCode::kInvalidArgument, "m must be >= 1");
  if (model.is_trivial()) return UnitAngle(0.0);
  UnitAngle t;
  for (std::size_t r = 0; r < m; ++r) t = t + sample_z(model, stream);
  return t;
}

std::map<int, Complex> convolved_density_coeffs(const FourierDensity& density,
                                                std::size_t m) {
  if (m == 0) fail(ErrorCode::kInvalidArgument, "m must be >= 1");
  std::map<int, Complex> out;
  for (const auto& [j, c] : density.coeffs) {
    out[j] = std::pow(c, static_cast<double>(m));
  }
  return out;
}

std::vector<double> discrete_probs_from_fourier(
    std::span<const Complex> coeffs) {
  if (coeffs.empty() || std::abs(coeffs[0] - Complex(1.0, 0.0)) > 1e-12) {
    fail(ErrorCode::kInvalidCoefficients, "discrete law needs c_0 = 1");
  }
  const auto rho = coeffs.size();
  std::vector<double> probs(rho);
  for (std::size_t k = 0; k < rho; ++k) {
    Complex p = 0.0;
    for (std::size_t j = 0; j < rho; ++j) {
      p += coeffs[j] *
           unit(static_cast<double>((j * k) % rho) / static_cast<double>(rho));
    }
    p /= static_cast<double>(rho);
    if (std::abs(p.imag()) > kProbTolerance) {
      fail(ErrorCode::kInvalidCoefficients,
           "coefficients do not give real probabilities");
    }
    probs[k] = p.real();
  }
  validate_probs(probs);
  for (double& p : probs) p = std::max(p, 0.0);
  return probs;
}

std::vector<Complex> discrete_fourier_from_probs(std::span<const double> probs) {
  const auto rho = probs.size();
  std::vector<Complex> coeffs(rho);
  for (std::size_t j = 0; j < rho; ++j) {
    for (std::size_t k = 0; k < rho; ++k) {
      coeffs[j] += probs[k] * unit(-static_cast<double>((j * k) % rho) /
                                   static_cast<double>(rho));
    }
  }
  return coeffs;
}

std::vector<double> discrete_product_probs(const DiscreteRoots& model,
                                           std::size_t m) {
  if (m == 0) fail(ErrorCode::kInvalidArgument, "m must be >= 1");
  auto coeffs = discrete_fourier_from_probs(model.probs);
  for (auto& c : coeffs) c = std::pow(c, static_cast<double>(m));
  coeffs[0] = 1.0;
  const auto rho = coeffs.size();
  std::vector<double> probs(rho);
  for (std::size_t k = 0; k < rho; ++k) {
    Complex p = 0.0;
    for (std::size_t j = 0; j < rho; ++j) {
      p += coeffs[j] *
           unit(static_cast<double>((j * k) % rho) / static_cast<double>(rho));
    }
    probs[k] = std::max(p.real() / static_cast<double>(rho), 0.0);
  }
  return probs;
}

JointMultiplierModel JointMultiplierModel::independent(
    std::vector<MultiplierModel> models) {
  if (models.empty()) fail(ErrorCode::kInvalidArgument, "need d >= 1 models");
  return JointMultiplierModel(IndependentProduct{std::move(models)});
}

JointMultiplierModel JointMultiplierModel::shared(std::size_t d,
                                                  MultiplierModel model) {
  if (d == 0) fail(ErrorCode::kInvalidArgument, "need d >= 1");
  return JointMultiplierModel(SharedMultiplier{d, std::move(model)});
}

JointMultiplierModel JointMultiplierModel::pairwise_fourier(
    std::vector<std::vector<Complex>> coeffs) {
  const auto rho1 = coeffs.size();
  if (rho1 == 0 || coeffs[0].empty()) {
    fail(ErrorCode::kInvalidCoefficients, "empty coefficient table");
  }
  const auto rho2 = coeffs[0].size();
  for (const auto& row : coeffs) {
    if (row.size() != rho2) {
      fail(ErrorCode::kInvalidCoefficients, "ragged coefficient table");
    }
  }
  if (std::abs(coeffs[0][0] - Complex(1.0, 0.0)) > 1e-12) {
    fail(ErrorCode::kInvalidCoefficients, "joint law needs c_{0,0} = 1");
  }
  // Mixing conditions on columns b != 0 and rows a != 0.
  for (std::size_t b = 1; b < rho2; ++b) {
    double column = 0.0;
    for (std::size_t a = 0; a < rho1; ++a) column += std::abs(coeffs[a][b]);
    if (column >= 1.0) {
      fail(ErrorCode::kInvalidCoefficients,
           "sum_a |c_{a," + std::to_string(b) + "}| must be < 1");
    }
  }
  for (std::size_t a = 1; a < rho1; ++a) {
    double row = 0.0;
    for (std::size_t b = 0; b < rho2; ++b) row += std::abs(coeffs[a][b]);
    if (row >= 1.0) {
      fail(ErrorCode::kInvalidCoefficients,
           "sum_b |c_{" + std::to_string(a) + ",b}| must be < 1");
    }
  }
  std::vector<double> probs(rho1 * rho2);
  for (std::size_t k1 = 0; k1 < rho1; ++k1) {
    for (std::size_t k2 = 0; k2 < rho2; ++k2) {
      Complex p = 0.0;
      for (std::size_t a = 0; a < rho1; ++a) {
        for (std::size_t b = 0; b < rho2; ++b) {
          const double turns =
              static_cast<double>((a * k1) % rho1) / static_cast<double>(rho1) +
              static_cast<double>((b * k2) % rho2) / static_cast<double>(rho2);
          p += coeffs[a][b] * unit(turns);
        }
      }
      p /= static_cast<double>(rho1 * rho2);
      if (std::abs(p.imag()) > kProbTolerance) {
        fail(ErrorCode::kInvalidCoefficients,
             "joint coefficients do not give real probabilities");
      }
      probs[k1 * rho2 + k2] = p.real();
    }
  }
  validate_probs(probs);
  for (double& p : probs) p = std::max(p, 0.0);
  return JointMultiplierModel(PairwiseFourier{static_cast<int>(rho1),
                                              static_cast<int>(rho2),
                                              std::move(coeffs),
                                              std::move(probs)});
}

std::size_t JointMultiplierModel::dimension() const noexcept {
  return std::visit(
      [](const auto& v) -> std::size_t {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, IndependentProduct>) {
          return v.models.size();
        } else if constexpr (std::is_same_v<T, PairwiseFourier>) {
          return 2;
        } else {
          return v.d;
        }
      },
      variant_);
}

MultiplierModel JointMultiplierModel::marginal(std::size_t j) const {
  if (j >= dimension()) fail(ErrorCode::kInvalidArgument, "coordinate out of range");
  return std::visit(
      [j](const auto& v) -> MultiplierModel {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, IndependentProduct>) {
          return v.models[j];
        } else if constexpr (std::is_same_v<T, PairwiseFourier>) {
          const auto rho1 = static_cast<std::size_t>(v.rho1);
          const auto rho2 = static_cast<std::size_t>(v.rho2);
          std::vector<double> probs(j == 0 ? rho1 : rho2, 0.0);
          for (std::size_t k1 = 0; k1 < rho1; ++k1) {
            for (std::size_t k2 = 0; k2 < rho2; ++k2) {
              probs[j == 0 ? k1 : k2] += v.joint_probs[k1 * rho2 + k2];
            }
          }
          double total = std::accumulate(probs.begin(), probs.end(), 0.0);
          for (double& p : probs) p /= total;
          const auto rho = static_cast<int>(probs.size());
          return MultiplierModel::discrete(rho, std::move(probs));
        } else {
          return v.model;
        }
      },
      variant_);
}

std::vector<UnitAngle> sample_joint_z(const JointMultiplierModel& model,
                                      Stream& stream) {
  return std::visit(
      [&](const auto& v) -> std::vector<UnitAngle> {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, IndependentProduct>) {
          std::vector<UnitAngle> out;
          out.reserve(v.models.size());
          for (const auto& m : v.models) out.push_back(sample_z(m, stream));
          return out;
        } else if constexpr (std::is_same_v<T, PairwiseFourier>) {
          const auto idx = sample_index(v.joint_probs, stream);
          const auto rho2 = static_cast<std::size_t>(v.rho2);
          return {UnitAngle(static_cast<double>(idx / rho2) / v.rho1),
                  UnitAngle(static_cast<double>(idx % rho2) / v.rho2)};
        } else {
          return std::vector<UnitAngle>(v.d, sample_z(v.model, stream));
        }
      },
      model.variant());
}

JointCycleDraw sample_joint_cycle(const JointMultiplierModel& model,
                                  std::size_t m, Stream& stream) {
  if (m == 0) fail(ErrorCode::kInvalidArgument, "m must be >= 1");
  JointCycleDraw draw;
  const auto d = model.dimension();
  const auto* independent = std::get_if<IndependentProduct>(&model.variant());
  if (independent != nullptr) {
    bool all_trivial = true;
    for (const auto& mm : independent->models) all_trivial &= mm.is_trivial();
    if (all_trivial) {
      draw.z.assign(d, UnitAngle(0.0));
      draw.t.assign(d, UnitAngle(0.0));
      return draw;
    }
  }
  draw.t.assign(d, UnitAngle(0.0));
  for (std::size_t r = 0; r < m; ++r) {
    auto z = sample_joint_z(model, stream);
    for (std::size_t j = 0; j < d; ++j) draw.t[j] = draw.t[j] + z[j];
    if (r == 0) draw.z = std::move(z);
  }
  return draw;
}

}  // namespace permchar
