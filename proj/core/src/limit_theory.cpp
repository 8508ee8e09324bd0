#include "permchar/limit_theory.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <numbers>

#include "permchar/compensated.hpp"
#include "permchar/error.hpp"
#include "permchar/quadrature.hpp"

namespace permchar {

namespace {

constexpr double kPi = std::numbers::pi;

double arg_of(Complex w) {
  double a = std::atan2(w.imag(), w.real());
  if (a == -kPi) a = kPi;
  return a;
}

// Part of log f at phi; zero on the (measure-zero) zeros of f.
double log_part(const SpectralFunction& f, double phi, Part part) {
  const Complex w = f(UnitAngle(phi));
  if (w == Complex(0.0, 0.0)) return 0.0;
  return part == Part::kReal ? std::log(std::abs(w)) : arg_of(w);
}

double locate_jump(const SpectralFunction& f, double lo, double hi) {
  const double arg_lo = arg_of(f(UnitAngle(lo)));
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const Complex w = f(UnitAngle(mid));
    if (w == Complex(0.0, 0.0)) return mid;
    if (std::abs(arg_of(w) - arg_lo) > kPi) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace

std::vector<double> arg_split_points(const SpectralFunction& f,
                                     std::size_t grid) {
  std::vector<double> splits = f.zero_angles();
  for (double j : f.arg_jumps()) splits.push_back(j);
  if (grid < 2) grid = 2;
  double prev_phi = -1.0;
  double prev_arg = 0.0;
  for (std::size_t k = 0; k <= grid; ++k) {
    const double phi = static_cast<double>(k) / static_cast<double>(grid);
    const Complex w = f(UnitAngle(phi));
    if (w == Complex(0.0, 0.0)) {
      prev_phi = -1.0;
      continue;
    }
    const double a = arg_of(w);
    if (prev_phi >= 0.0 && std::abs(a - prev_arg) > kPi) {
      splits.push_back(locate_jump(f, prev_phi, phi));
    }
    prev_phi = phi;
    prev_arg = a;
  }
  for (double& s : splits) s = frac(s);
  std::sort(splits.begin(), splits.end());
  splits.erase(std::unique(splits.begin(), splits.end()), splits.end());
  return splits;
}

LimitConstants limit_constants(const SpectralFunction& f, double target_tol) {
  const auto splits = arg_split_points(f);
  auto integrate = [&](auto&& u) {
    return singular_quadrature(u, splits, target_tol).value;
  };
  LimitConstants c;
  c.m_R = integrate([&](double p) { return log_part(f, p, Part::kReal); });
  c.m_I = integrate([&](double p) { return log_part(f, p, Part::kImag); });
  c.V_R = integrate([&](double p) {
    const double v = log_part(f, p, Part::kReal);
    return v * v;
  });
  c.V_I = integrate([&](double p) {
    const double v = log_part(f, p, Part::kImag);
    return v * v;
  });
  c.C_RI = integrate([&](double p) {
    return log_part(f, p, Part::kReal) * log_part(f, p, Part::kImag);
  });
  return c;
}

CovarianceSpec covariance_matrix(std::span<const LimitConstants> constants,
                                 EwensParameter theta) {
  const std::size_t d = constants.size();
  if (d == 0) fail(ErrorCode::kInvalidArgument, "need at least one function");
  const double t = theta.value();
  CovarianceSpec spec;
  spec.d = d;
  spec.sigma.assign(4 * d * d, 0.0);
  auto set = [&](std::size_t r, std::size_t c, double v) {
    spec.sigma[r * 2 * d + c] = v;
  };
  for (std::size_t j = 0; j < d; ++j) {
    const auto& a = constants[j];
    for (std::size_t l = 0; l < d; ++l) {
      const auto& b = constants[l];
      if (j == l) {
        set(2 * j, 2 * j, t * a.V_R);
        set(2 * j, 2 * j + 1, t * a.C_RI);
        set(2 * j + 1, 2 * j, t * a.C_RI);
        set(2 * j + 1, 2 * j + 1, t * a.V_I);
      } else {
        set(2 * j, 2 * l, t * (a.m_R * b.m_R));
        set(2 * j, 2 * l + 1, t * (a.m_R * b.m_I));
        set(2 * j + 1, 2 * l, t * (a.m_I * b.m_R));
        set(2 * j + 1, 2 * l + 1, t * (a.m_I * b.m_I));
      }
    }
  }
  const auto k = static_cast<Eigen::Index>(2 * d);
  const Eigen::Map<const Eigen::MatrixXd> m(spec.sigma.data(), k, k);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m,
                                                        Eigen::EigenvaluesOnly);
  spec.min_eigenvalue = solver.eigenvalues().minCoeff();
  if (spec.min_eigenvalue < -kPsdTolerance) {
    fail(ErrorCode::kNonConvergence,
         "covariance matrix is not positive semidefinite (min eigenvalue " +
             std::to_string(spec.min_eigenvalue) + ")");
  }
  return spec;
}

CovarianceSpec covariance_matrix(std::span<const SpectralFunction> fs,
                                 EwensParameter theta, double target_tol) {
  std::vector<LimitConstants> constants;
  constants.reserve(fs.size());
  for (const auto& f : fs) constants.push_back(limit_constants(f, target_tol));
  return covariance_matrix(constants, theta);
}

StatisticSpec StatisticSpec::constant_one(EwensParameter theta) {
  return {"X = 1", theta.value(), [](std::size_t) { return 1.0; },
          [](std::size_t, double) { return 1.0; }};
}

StatisticSpec StatisticSpec::zero(EwensParameter theta) {
  return {"X = 0", theta.value(), [](std::size_t) { return 0.0; },
          [](std::size_t, double) { return 0.0; }};
}

namespace {

// E[phi(h(m x + T))] for the angle T of an m-fold product.
class TermMoments {
 public:
  TermMoments(SpectralFunction f, UnitAngle x, MultiplierModel model,
              Part part)
      : f_(std::move(f)),
        x_(x),
        model_(std::move(model)),
        part_(part),
        splits_(arg_split_points(f_)) {}

  double moment(std::size_t m, double p) {
    const auto h = [&](double s) { return std::abs(log_part(f_, s, part_)); };
    return std::visit(
        [&](const auto& v) -> double {
          using T = std::decay_t<decltype(v)>;
          const UnitAngle shift = x_.times(static_cast<std::int64_t>(m));
          if constexpr (std::is_same_v<T, TrivialMultiplier>) {
            return std::pow(h(shift.phi()), p);
          } else if constexpr (std::is_same_v<T, UniformMultiplier>) {
            return uniform_moment(p);
          } else if constexpr (std::is_same_v<T, FourierDensity>) {
            double largest = 0.0;
            for (const auto& [j, c] : v.coeffs) {
              if (j != 0) largest = std::max(largest, std::abs(c));
            }
            if (std::pow(largest, static_cast<double>(m)) < 1e-16) {
              return uniform_moment(p);
            }
            const auto conv = convolved_density_coeffs(v, m);
            const auto density = [&](double t) {
              double g = 0.0;
              for (const auto& [j, c] : conv) {
                g += (c * std::polar(1.0, 2.0 * kPi * j * t)).real();
              }
              return g;
            };
            return singular_quadrature(
                       [&](double s) {
                         return std::pow(h(s), p) *
                                density(s - shift.phi());
                       },
                       splits_)
                .value;
          } else {
            const auto probs = discrete_product_probs(v, m);
            CompensatedSum sum;
            for (std::size_t k = 0; k < probs.size(); ++k) {
              if (probs[k] == 0.0) continue;
              const UnitAngle a =
                  shift + UnitAngle(static_cast<double>(k) /
                                    static_cast<double>(v.rho));
              sum.add(probs[k] * std::pow(h(a.phi()), p));
            }
            return sum.value();
          }
        },
        model_.variant());
  }

 private:
  double uniform_moment(double p) {
    auto it = uniform_cache_.find(p);
    if (it != uniform_cache_.end()) return it->second;
    const double value =
        singular_quadrature(
            [&](double s) {
              return std::pow(std::abs(log_part(f_, s, part_)), p);
            },
            splits_)
            .value;
    uniform_cache_.emplace(p, value);
    return value;
  }

  SpectralFunction f_;
  UnitAngle x_;
  MultiplierModel model_;
  Part part_;
  std::vector<double> splits_;
  std::map<double, double> uniform_cache_;
};

}  // namespace

StatisticSpec StatisticSpec::class_function_term(const SpectralFunction& f,
                                                 UnitAngle x,
                                                 const MultiplierModel& model,
                                                 Part part,
                                                 EwensParameter theta) {
  auto moments = std::make_shared<TermMoments>(f, x, model, part);
  std::string description = std::string(part == Part::kReal ? "Re" : "Im") +
                            " log " + f.label() + " term, " +
                            model.type_name() + " multiplier";
  return {std::move(description), theta.value(),
          [moments](std::size_t m) { return moments->moment(m, 2.0); },
          [moments](std::size_t m, double p) { return moments->moment(m, p); }};
}

double v_n(const StatisticSpec& spec, std::size_t n) {
  CompensatedSum sum;
  for (std::size_t m = 1; m <= n; ++m) {
    sum.add(spec.second_moment(m) / static_cast<double>(m));
  }
  return sum.value();
}

bool v_n_grows(const StatisticSpec& spec, std::size_t n) {
  if (n == 0) return false;
  const double full = v_n(spec, n);
  const double half = v_n(spec, n / 2);
  return full > 0.0 && full > half;
}

LyapunovReport lyapunov_check(const StatisticSpec& spec,
                              std::span<const std::size_t> ns, double p) {
  LyapunovReport report;
  report.p = p;
  const double bound = std::max(1.0 / spec.theta, 2.0);
  report.precondition_ok = p > bound;
  if (!report.precondition_ok) {
    report.message = "p = " + std::to_string(p) +
                     " does not exceed max(1/theta, 2) = " +
                     std::to_string(bound);
  }
  std::vector<std::size_t> sorted(ns.begin(), ns.end());
  std::sort(sorted.begin(), sorted.end());
  CompensatedSum second;
  CompensatedSum pth;
  std::size_t m = 0;
  for (std::size_t n : sorted) {
    for (; m < n; ) {
      ++m;
      second.add(spec.second_moment(m) / static_cast<double>(m));
      pth.add(spec.abs_moment(m, p) / static_cast<double>(m));
    }
    const double vn = second.value();
    report.ns.push_back(n);
    report.ratios.push_back(vn > 0.0 ? pth.value() / std::pow(vn, p / 2.0)
                                     : std::numeric_limits<double>::infinity());
  }
  report.decreasing = report.ratios.size() >= 2;
  for (std::size_t k = 1; k < report.ratios.size(); ++k) {
    if (!(report.ratios[k] < report.ratios[k - 1])) report.decreasing = false;
  }
  if (report.precondition_ok && !report.decreasing) {
    report.message = "ratios are not decreasing in n";
  }
  return report;
}

double normalization(std::size_t n, EwensParameter theta,
                     const LimitConstants& c, Part part) {
  if (n < 2) fail(ErrorCode::kInvalidArgument, "normalization needs n >= 2");
  const double v = part == Part::kReal ? c.V_R : c.V_I;
  return std::sqrt(theta.value() * v * std::log(static_cast<double>(n)));
}

Complex centering(std::size_t n, EwensParameter theta,
                  const LimitConstants& c) {
  if (n < 2) fail(ErrorCode::kInvalidArgument, "centering needs n >= 2");
  const double s = theta.value() * std::log(static_cast<double>(n));
  return {s * c.m_R, s * c.m_I};
}

}  // namespace permchar
