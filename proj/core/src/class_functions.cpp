#include "permchar/class_functions.hpp"

#include <Eigen/Dense>
#include <charconv>
#include <cmath>
#include <numbers>

#include "permchar/error.hpp"

namespace permchar {

namespace {

constexpr double kPi = std::numbers::pi;

void require_points(std::size_t d_points, std::size_t d_model) {
  if (d_points == 0) fail(ErrorCode::kInvalidArgument, "need at least one point");
  if (d_points != d_model) {
    fail(ErrorCode::kInvalidArgument,
         "joint model dimension does not match the number of points");
  }
}

ComplexLogValue log_char_term(UnitAngle x, std::size_t m, UnitAngle t) {
  // 1 - x^{-m} T
  return branch_log(one_minus_unit(t - x.times(static_cast<std::int64_t>(m))));
}

}  // namespace

ComplexLogValue branch_log(Complex w) {
  if (w == Complex(0.0, 0.0)) {
    fail(ErrorCode::kSingularSample, "log of an exact zero");
  }
  double im = std::atan2(w.imag(), w.real());
  if (im == -kPi) im = kPi;  // -0.0 imaginary part on the negative axis
  return {std::log(std::abs(w)), im};
}

Complex one_minus_unit(UnitAngle psi) {
  // Reflect to [0, 1/2] so that sin is evaluated at a small argument near
  // both ends of the circle.
  const double p = psi.phi();
  const bool upper = p > 0.5;
  const double q = upper ? 1.0 - p : p;
  const double s = std::sin(kPi * q);
  const double im = -std::sin(2.0 * kPi * q);
  return {2.0 * s * s, upper ? -im : im};
}

SpectralFunction::SpectralFunction(std::string label, Eval eval,
                                   std::vector<double> zero_angles,
                                   std::vector<double> arg_jumps)
    : label_(std::move(label)),
      eval_(std::move(eval)),
      zeros_(std::move(zero_angles)),
      jumps_(std::move(arg_jumps)) {}

SpectralFunction SpectralFunction::char_poly() {
  return SpectralFunction(
      "charpoly", [](UnitAngle a) { return one_minus_unit(-a); }, {0.0});
}

SpectralFunction SpectralFunction::sym_part() {
  return SpectralFunction(
      "sym",
      [](UnitAngle a) {
        const double q = std::min(a.phi(), 1.0 - a.phi());
        const double s = std::sin(kPi * q);
        return Complex(4.0 * s * s, 0.0);
      },
      {0.0});
}

SpectralFunction SpectralFunction::antisym_part() {
  return SpectralFunction(
      "antisym",
      [](UnitAngle a) {
        const double p = a.phi();
        // sin(2 pi p) via the nearest of 0, 1/2, 1 for accuracy at the zeros
        double s;
        if (p <= 0.25) {
          s = std::sin(2.0 * kPi * p);
        } else if (p <= 0.75) {
          s = std::sin(2.0 * kPi * (0.5 - p));
        } else {
          s = -std::sin(2.0 * kPi * (1.0 - p));
        }
        return Complex(0.0, -2.0 * s);
      },
      {0.0, 0.5});
}

SpectralFunction SpectralFunction::constant(double c) {
  if (c == 0.0 || !std::isfinite(c)) {
    fail(ErrorCode::kInvalidArgument, "constant function must be nonzero");
  }
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), c);
  return SpectralFunction("const:" + std::string(buf, res.ptr),
                          [c](UnitAngle) { return Complex(c, 0.0); }, {});
}

SpectralFunction SpectralFunction::from_label(std::string_view label) {
  if (label == "charpoly") return char_poly();
  if (label == "sym") return sym_part();
  if (label == "antisym") return antisym_part();
  constexpr std::string_view kConst = "const:";
  if (label.starts_with(kConst)) {
    const auto text = label.substr(kConst.size());
    double value = 0.0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
      fail(ErrorCode::kConfig, "bad constant in function label '" +
                                   std::string(label) + "'");
    }
    return constant(value);
  }
  fail(ErrorCode::kConfig, "unknown function label '" + std::string(label) +
                               "' (expected charpoly, sym, antisym, const:<c>)");
}

ComplexLogValue log_Z(const CycleType& ct, UnitAngle x,
                      const MultiplierModel& model, Stream& stream) {
  ComplexLogValue sum;
  ct.for_each_cycle([&](std::size_t m) {
    sum += log_char_term(x, m, sample_T(model, m, stream));
  });
  return sum;
}

ComplexLogValue w1(const CycleType& ct, const SpectralFunction& f, UnitAngle x,
                   const MultiplierModel& model, Stream& stream) {
  ComplexLogValue sum;
  ct.for_each_cycle([&](std::size_t m) {
    const UnitAngle arg = x.times(static_cast<std::int64_t>(m)) +
                          sample_z(model, stream);
    sum += branch_log(f(arg));
  });
  return sum;
}

ComplexLogValue w2(const CycleType& ct, const SpectralFunction& f, UnitAngle x,
                   const MultiplierModel& model, Stream& stream) {
  ComplexLogValue sum;
  ct.for_each_cycle([&](std::size_t m) {
    const UnitAngle arg = x.times(static_cast<std::int64_t>(m)) +
                          sample_T(model, m, stream);
    sum += branch_log(f(arg));
  });
  return sum;
}

std::vector<ComplexLogValue> multipoint_logZ(const CycleType& ct,
                                             std::span<const UnitAngle> points,
                                             const JointMultiplierModel& joint,
                                             Stream& stream) {
  require_points(points.size(), joint.dimension());
  std::vector<ComplexLogValue> sums(points.size());
  ct.for_each_cycle([&](std::size_t m) {
    const auto draw = sample_joint_cycle(joint, m, stream);
    for (std::size_t j = 0; j < points.size(); ++j) {
      sums[j] += log_char_term(points[j], m, draw.t[j]);
    }
  });
  return sums;
}

std::vector<ComplexLogValue> multipoint_w(
    const CycleType& ct, ClassFunctionKind kind,
    std::span<const SpectralFunction> fs, std::span<const UnitAngle> points,
    const JointMultiplierModel& joint, Stream& stream) {
  require_points(points.size(), joint.dimension());
  if (fs.size() != points.size()) {
    fail(ErrorCode::kInvalidArgument, "need one function per point");
  }
  std::vector<ComplexLogValue> sums(points.size());
  ct.for_each_cycle([&](std::size_t m) {
    const auto multipliers = kind == ClassFunctionKind::kFirst
                                 ? sample_joint_z(joint, stream)
                                 : sample_joint_cycle(joint, m, stream).t;
    for (std::size_t j = 0; j < points.size(); ++j) {
      const UnitAngle arg =
          points[j].times(static_cast<std::int64_t>(m)) + multipliers[j];
      sums[j] += branch_log(fs[j](arg));
    }
  });
  return sums;
}

namespace {

void require_dense_size(std::size_t n) {
  if (n > kMaxDenseOracleN) {
    fail(ErrorCode::kSizeLimit, "dense oracle supports n <= 12, got " +
                                    std::to_string(n));
  }
}

Eigen::MatrixXd permutation_matrix(const Permutation& perm) {
  const auto n = static_cast<Eigen::Index>(perm.n());
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    p(static_cast<Eigen::Index>(perm(static_cast<std::size_t>(j))), j) = 1.0;
  }
  return p;
}

}  // namespace

Complex det_oracle(const Permutation& perm, std::span<const Complex> z_values,
                   UnitAngle x) {
  require_dense_size(perm.n());
  if (z_values.size() != perm.n()) {
    fail(ErrorCode::kInvalidArgument, "need one multiplier per row");
  }
  const auto n = static_cast<Eigen::Index>(perm.n());
  const Complex x_inv = std::conj(x.point());
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Identity(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto i = static_cast<Eigen::Index>(perm(static_cast<std::size_t>(j)));
    a(i, j) -= x_inv * z_values[static_cast<std::size_t>(i)];
  }
  return a.partialPivLu().determinant();
}

Complex cycle_product(const Permutation& perm,
                      std::span<const Complex> z_values, UnitAngle x) {
  if (z_values.size() != perm.n()) {
    fail(ErrorCode::kInvalidArgument, "need one multiplier per row");
  }
  Complex product = 1.0;
  for (const auto& cycle : perm.cycles()) {
    Complex t = 1.0;
    for (std::size_t j : cycle) t *= z_values[j];
    const Complex x_pow =
        x.times(-static_cast<std::int64_t>(cycle.size())).point();
    product *= 1.0 - x_pow * t;
  }
  return product;
}

double sym_char_poly(const CycleType& ct, double x_real) {
  if (!(x_real >= -2.0 && x_real <= 2.0)) {
    fail(ErrorCode::kInvalidArgument, "x must lie in [-2, 2]");
  }
  const double alpha = std::acos(x_real / 2.0);
  double value = ((ct.n() - ct.total_cycles()) % 2 == 0) ? 1.0 : -1.0;
  for (std::size_t m = 1; m <= ct.n(); ++m) {
    const auto c = ct.count(m);
    if (c == 0) continue;
    const double factor = 2.0 - 2.0 * std::cos(static_cast<double>(m) * alpha);
    value *= std::pow(factor, static_cast<double>(c));
  }
  return value;
}

double sym_char_poly_dense(const Permutation& perm, double x_real) {
  require_dense_size(perm.n());
  const Eigen::MatrixXd p = permutation_matrix(perm);
  const auto n = p.rows();
  const Eigen::MatrixXd s =
      p + p.transpose() - x_real * Eigen::MatrixXd::Identity(n, n);
  return s.partialPivLu().determinant();
}

double antisym_char_poly(const CycleType& ct, double x_real) {
  const double beta = std::asinh(x_real / 2.0);
  double value = 1.0;
  for (std::size_t m = 1; m <= ct.n(); ++m) {
    const auto c = ct.count(m);
    if (c == 0) continue;
    const double mb = static_cast<double>(m) * beta;
    const double factor =
        (m % 2 == 0) ? 2.0 * std::cosh(mb) - 2.0 : -2.0 * std::sinh(mb);
    value *= std::pow(factor, static_cast<double>(c));
  }
  return value;
}

double antisym_char_poly_dense(const Permutation& perm, double x_real) {
  require_dense_size(perm.n());
  const Eigen::MatrixXd p = permutation_matrix(perm);
  const auto n = p.rows();
  const Eigen::MatrixXd a =
      p - p.transpose() - x_real * Eigen::MatrixXd::Identity(n, n);
  return a.partialPivLu().determinant();
}

}  // namespace permchar
