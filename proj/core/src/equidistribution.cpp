#include "permchar/equidistribution.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <cmath>
#include <numbers>
#include <numeric>

#include "permchar/compensated.hpp"
#include "permchar/error.hpp"
#include "permchar/quadrature.hpp"

namespace permchar {

namespace {

constexpr double kPi = std::numbers::pi;

void require_dimension(std::size_t d) {
  if (d == 0 || d > 2) {
    fail(ErrorCode::kDimensionUnsupported,
         "only dimensions 1 and 2 are supported, got " + std::to_string(d));
  }
}

// frac(q * phi) with the rounding error of the product folded back in.
double frac_product(double q, double phi) {
  const double p = q * phi;
  const double e = std::fma(q, phi, -p);
  return frac(frac(p) + e);
}

double dot_distance(std::span<const std::int64_t> q,
                    std::span<const double> phis) {
  double s = 0.0;
  for (std::size_t j = 0; j < q.size(); ++j) {
    s += frac_product(static_cast<double>(q[j]), phis[j]);
  }
  return nearest_integer_distance(s);
}

// Calls fn(q, h) for one representative of each pair {q, -q} with
// |q|_inf = h, for h = 1..H.
template <class Fn>
void for_each_frequency(std::size_t d, std::int64_t H, Fn&& fn) {
  std::array<std::int64_t, 2> q{};
  for (std::int64_t h = 1; h <= H; ++h) {
    if (d == 1) {
      q[0] = h;
      fn(std::span<const std::int64_t>(q.data(), 1), h);
      continue;
    }
    // first coordinate h, second in [-h, h]; then second coordinate h,
    // first in (-h, h)
    for (std::int64_t b = -h; b <= h; ++b) {
      q = {h, b};
      fn(std::span<const std::int64_t>(q.data(), 2), h);
    }
    for (std::int64_t a = -h + 1; a < h; ++a) {
      q = {a, h};
      fn(std::span<const std::int64_t>(q.data(), 2), h);
    }
  }
}

}  // namespace

PointSequence::PointSequence(std::size_t d, std::vector<double> coords)
    : d_(d), coords_(std::move(coords)) {
  require_dimension(d);
  if (coords_.size() % d_ != 0) {
    fail(ErrorCode::kInvalidArgument, "coordinate count is not a multiple of d");
  }
  for (double c : coords_) {
    if (!(c >= 0.0 && c < 1.0)) {
      fail(ErrorCode::kInvalidArgument, "coordinates must lie in [0, 1)");
    }
  }
}

PointSequence PointSequence::projection(std::size_t j) const {
  if (j >= d_) fail(ErrorCode::kInvalidArgument, "projection index out of range");
  std::vector<double> out(size());
  for (std::size_t i = 0; i < size(); ++i) out[i] = coord(i, j);
  return PointSequence(1, std::move(out));
}

PointSequence kronecker(std::span<const double> phis, std::size_t n) {
  require_dimension(phis.size());
  if (n == 0) fail(ErrorCode::kInvalidArgument, "n must be positive");
  std::vector<double> coords;
  coords.reserve(n * phis.size());
  for (std::size_t m = 1; m <= n; ++m) {
    for (double phi : phis) {
      coords.push_back(frac_product(static_cast<double>(m), phi));
    }
  }
  return PointSequence(phis.size(), std::move(coords));
}

double nearest_integer_distance(double a) { return std::abs(a - std::round(a)); }

namespace {

double exact_1d(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double best = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double above = static_cast<double>(i + 1) / n - xs[i];
    const double below = xs[i] - static_cast<double>(i) / n;
    best = std::max({best, above, below});
  }
  return best;
}

double exact_2d(const PointSequence& seq) {
  const std::size_t n = seq.size();
  const double nd = static_cast<double>(n);
  std::vector<double> ys(n);
  for (std::size_t i = 0; i < n; ++i) ys[i] = seq.coord(i, 1);
  std::sort(ys.begin(), ys.end());
  ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
  std::vector<std::size_t> yrank(n);
  for (std::size_t i = 0; i < n; ++i) {
    yrank[i] = static_cast<std::size_t>(
        std::lower_bound(ys.begin(), ys.end(), seq.coord(i, 1)) - ys.begin());
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return seq.coord(a, 0) < seq.coord(b, 0);
  });

  std::vector<std::size_t> cnt(ys.size(), 0);
  double best = 0.0;
  // Open boxes [0,a) x [0,b): the deficit a b - A / n peaks at upper corners.
  auto open_sweep = [&](double a) {
    std::size_t running = 0;
    for (std::size_t l = 0; l < ys.size(); ++l) {
      best = std::max(best, a * ys[l] - static_cast<double>(running) / nd);
      running += cnt[l];
    }
    best = std::max(best, a - static_cast<double>(running) / nd);
  };
  // Closed boxes [0,a] x [0,b]: the excess A / n - a b peaks at point corners.
  auto closed_sweep = [&](double a) {
    std::size_t running = 0;
    for (std::size_t l = 0; l < ys.size(); ++l) {
      running += cnt[l];
      best = std::max(best, static_cast<double>(running) / nd - a * ys[l]);
    }
  };
  std::size_t k = 0;
  while (k < n) {
    const double a = seq.coord(order[k], 0);
    open_sweep(a);
    while (k < n && seq.coord(order[k], 0) == a) {
      ++cnt[yrank[order[k]]];
      ++k;
    }
    closed_sweep(a);
  }
  open_sweep(1.0);
  return best;
}

}  // namespace

double star_discrepancy_exact(const PointSequence& seq) {
  const std::size_t n = seq.size();
  if (n == 0) fail(ErrorCode::kInvalidArgument, "empty point sequence");
  if (seq.d() == 1) {
    if (n > kMaxExact1dN) {
      fail(ErrorCode::kSizeLimit, "1-d exact discrepancy supports n <= 100000");
    }
    return exact_1d(seq.coords());
  }
  if (n > kMaxExact2dN) {
    fail(ErrorCode::kSizeLimit, "2-d exact discrepancy supports n <= 4000");
  }
  return exact_2d(seq);
}

double star_discrepancy_grid_oracle(const PointSequence& seq,
                                    std::size_t grid_resolution) {
  const std::size_t n = seq.size();
  if (n == 0) fail(ErrorCode::kInvalidArgument, "empty point sequence");
  if (grid_resolution == 0) {
    fail(ErrorCode::kInvalidArgument, "grid resolution must be positive");
  }
  const double nd = static_cast<double>(n);
  const double g = static_cast<double>(grid_resolution);
  double best = 0.0;
  if (seq.d() == 1) {
    for (std::size_t k = 0; k <= grid_resolution; ++k) {
      const double a = static_cast<double>(k) / g;
      std::size_t open = 0;
      std::size_t closed = 0;
      for (double x : seq.coords()) {
        open += x < a;
        closed += x <= a;
      }
      best = std::max({best, std::abs(static_cast<double>(open) / nd - a),
                       std::abs(static_cast<double>(closed) / nd - a)});
    }
    return best;
  }
  for (std::size_t k = 0; k <= grid_resolution; ++k) {
    const double a = static_cast<double>(k) / g;
    for (std::size_t l = 0; l <= grid_resolution; ++l) {
      const double b = static_cast<double>(l) / g;
      std::size_t open = 0;
      std::size_t closed = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const double x = seq.coord(i, 0);
        const double y = seq.coord(i, 1);
        open += (x < a && y < b);
        closed += (x <= a && y <= b);
      }
      best = std::max({best, std::abs(static_cast<double>(open) / nd - a * b),
                       std::abs(static_cast<double>(closed) / nd - a * b)});
    }
  }
  return best;
}

double etk_bound(std::span<const double> phis, std::size_t n, std::size_t H) {
  require_dimension(phis.size());
  if (n == 0) fail(ErrorCode::kInvalidArgument, "n must be positive");
  if (H == 0) fail(ErrorCode::kInvalidArgument, "H must be positive");
  const std::size_t d = phis.size();
  CompensatedSum sum;
  for_each_frequency(d, static_cast<std::int64_t>(H),
                     [&](std::span<const std::int64_t> q, std::int64_t) {
                       const double dist = dot_distance(q, phis);
                       if (dist < kResonanceTolerance) {
                         fail(ErrorCode::kResonantFrequency,
                              "resonant frequency: ||q.phi|| vanishes");
                       }
                       double r = 1.0;
                       for (auto qi : q) {
                         r *= static_cast<double>(std::max<std::int64_t>(
                             1, qi < 0 ? -qi : qi));
                       }
                       sum.add(2.0 / (r * dist));  // q and -q
                     });
  const double scale = d == 1 ? 3.0 : 9.0;
  return scale * (2.0 / (static_cast<double>(H) + 1.0) +
                  sum.value() / static_cast<double>(n));
}

FiniteTypeCertificate finite_type_estimate(std::span<const double> phis,
                                           std::int64_t H_max) {
  require_dimension(phis.size());
  if (H_max < 2) fail(ErrorCode::kInvalidArgument, "H_max must be at least 2");
  std::vector<double> min_dist(static_cast<std::size_t>(H_max) + 1,
                               std::numeric_limits<double>::infinity());
  for_each_frequency(phis.size(), H_max,
                     [&](std::span<const std::int64_t> q, std::int64_t h) {
                       auto& slot = min_dist[static_cast<std::size_t>(h)];
                       slot = std::min(slot, dot_distance(q, phis));
                     });
  FiniteTypeCertificate cert;
  cert.H_searched = H_max;
  // Record minima: log-log least squares for the decay exponent.
  std::vector<double> lx;
  std::vector<double> ly;
  double running = std::numeric_limits<double>::infinity();
  for (std::int64_t h = 1; h <= H_max; ++h) {
    const double m = min_dist[static_cast<std::size_t>(h)];
    if (m < kResonanceTolerance) {
      cert.K = 0.0;
      return cert;
    }
    if (m < running) {
      running = m;
      lx.push_back(std::log(static_cast<double>(h)));
      ly.push_back(std::log(m));
    }
  }
  double gamma = 1.0;
  if (lx.size() >= 3) {
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / lx.size();
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / ly.size();
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t k = 0; k < lx.size(); ++k) {
      sxy += (lx[k] - mx) * (ly[k] - my);
      sxx += (lx[k] - mx) * (lx[k] - mx);
    }
    if (sxx > 0.0) gamma = std::max(1.0, -sxy / sxx);
  }
  cert.gamma = gamma;
  double K = std::numeric_limits<double>::infinity();
  for (std::int64_t h = 1; h <= H_max; ++h) {
    K = std::min(K, min_dist[static_cast<std::size_t>(h)] *
                        std::pow(static_cast<double>(h), gamma));
  }
  cert.K = K;
  return cert;
}

bool verify_certificate(std::span<const double> phis,
                        const FiniteTypeCertificate& cert) {
  require_dimension(phis.size());
  if (!cert.valid()) return false;
  bool ok = true;
  for_each_frequency(phis.size(), cert.H_searched,
                     [&](std::span<const std::int64_t> q, std::int64_t h) {
                       const double bound =
                           cert.K / std::pow(static_cast<double>(h), cert.gamma);
                       if (dot_distance(q, phis) < bound - 1e-14) ok = false;
                     });
  return ok;
}

namespace {

std::vector<FiniteTypePreset> make_presets() {
  const double s2 = std::sqrt(2.0) - 1.0;
  const double s3 = std::sqrt(3.0) - 1.0;
  const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
  return {
      {"sqrt2", {s2}, {0.34, 1.0, 100000, true}},
      {"sqrt3", {s3}, {0.26, 1.0, 100000, true}},
      {"golden", {golden}, {0.38, 1.0, 100000, true}},
      {"sqrt2,sqrt3", {s2, s3}, {0.05, 3.0, 2000, true}},
  };
}

const std::vector<FiniteTypePreset>& presets() {
  static const std::vector<FiniteTypePreset> all = make_presets();
  return all;
}

}  // namespace

std::optional<FiniteTypePreset> finite_type_preset(std::string_view name) {
  for (const auto& p : presets()) {
    if (p.name == name) return p;
  }
  return std::nullopt;
}

std::vector<std::string> finite_type_preset_names() {
  std::vector<std::string> names;
  for (const auto& p : presets()) names.push_back(p.name);
  return names;
}

std::optional<FiniteTypePreset> match_finite_type_preset(
    std::span<const double> phis) {
  for (const auto& p : presets()) {
    if (p.phis.size() != phis.size()) continue;
    bool same = true;
    for (std::size_t j = 0; j < phis.size(); ++j) {
      if (nearest_integer_distance(p.phis[j] - phis[j]) > 1e-12) same = false;
    }
    if (same) return p;
  }
  return std::nullopt;
}

Integrand1D log_char_integrand() {
  return {[](double u) {
            const double q = std::min(frac(u), 1.0 - frac(u));
            return std::log(2.0 * std::sin(kPi * q));
          },
          {0.0}};
}

namespace {

void check_not_singular(double x, std::span<const double> singular) {
  for (double s : singular) {
    if (x == frac(s)) {
      fail(ErrorCode::kSingularPointHit,
           "sequence point " + std::to_string(x) + " is a singular angle");
    }
  }
}

}  // namespace

double weighted_sum(const Integrand1D& h, const PointSequence& seq) {
  if (seq.d() != 1) fail(ErrorCode::kDimensionUnsupported, "need a 1-d sequence");
  CompensatedSum sum;
  for (double x : seq.coords()) {
    check_not_singular(x, h.singular);
    sum.add(h.h(x));
  }
  return sum.value() / static_cast<double>(seq.size());
}

Complex weighted_sum(const std::function<Complex(double)>& h,
                     std::span<const double> singular,
                     const PointSequence& seq) {
  if (seq.d() != 1) fail(ErrorCode::kDimensionUnsupported, "need a 1-d sequence");
  CompensatedSum re;
  CompensatedSum im;
  for (double x : seq.coords()) {
    check_not_singular(x, singular);
    const Complex v = h(x);
    re.add(v.real());
    im.add(v.imag());
  }
  const double n = static_cast<double>(seq.size());
  return {re.value() / n, im.value() / n};
}

double weighted_sum(const Integrand1D& h1, const Integrand1D& h2,
                    const PointSequence& seq) {
  if (seq.d() != 2) fail(ErrorCode::kDimensionUnsupported, "need a 2-d sequence");
  CompensatedSum sum;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    check_not_singular(seq.coord(i, 0), h1.singular);
    check_not_singular(seq.coord(i, 1), h2.singular);
    sum.add(h1.h(seq.coord(i, 0)) * h2.h(seq.coord(i, 1)));
  }
  return sum.value() / static_cast<double>(seq.size());
}

double integral(const Integrand1D& h, double lo, double hi) {
  return singular_quadrature(h.h, h.singular, 1e-12, lo, hi).value;
}

namespace {

// Sign changes of h on [lo, hi], located by bisection; |h| has a kink there.
std::vector<double> sign_changes(const std::function<double(double)>& h,
                                 double lo, double hi) {
  constexpr int kGrid = 4096;
  std::vector<double> roots;
  const double step = (hi - lo) / kGrid;
  double a = lo + 0.5 * step;
  double fa = h(a);
  for (int k = 1; k < kGrid; ++k) {
    const double b = lo + (k + 0.5) * step;
    const double fb = h(b);
    if ((fa < 0.0) != (fb < 0.0) && std::isfinite(fa) && std::isfinite(fb)) {
      double l = a;
      double r = b;
      for (int it = 0; it < 200 && r - l > 4 * std::numeric_limits<double>::epsilon(); ++it) {
        const double m = 0.5 * (l + r);
        if ((h(m) < 0.0) == (fa < 0.0)) {
          l = m;
        } else {
          r = m;
        }
      }
      roots.push_back(0.5 * (l + r));
    }
    a = b;
    fa = fb;
  }
  return roots;
}

double abs_integral(const Integrand1D& h, double lo, double hi) {
  if (!(lo < hi)) return 0.0;
  const auto u = [&](double x) { return std::abs(h.h(x)); };
  std::vector<double> splits = h.singular;
  const auto roots = sign_changes(h.h, lo, hi);
  splits.insert(splits.end(), roots.begin(), roots.end());
  return singular_quadrature(u, splits, 1e-12, lo, hi).value;
}

// Extremum of h on [lo, hi]; maximise when `max` is set.
double golden_extremum(const std::function<double(double)>& h, double lo,
                       double hi, bool max) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  const double sign = max ? -1.0 : 1.0;
  double a = lo;
  double b = hi;
  double c = b - r * (b - a);
  double d = a + r * (b - a);
  double fc = sign * h(c);
  double fd = sign * h(d);
  for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::abs(a));
       ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = sign * h(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = sign * h(d);
    }
  }
  return h(0.5 * (a + b));
}

double variation_on_grid(const std::function<double(double)>& h, double lo,
                         double hi, std::size_t cells) {
  std::vector<double> xs(cells + 1);
  std::vector<double> vs(cells + 1);
  for (std::size_t k = 0; k <= cells; ++k) {
    xs[k] = k == cells ? hi
                       : lo + (hi - lo) * static_cast<double>(k) /
                                  static_cast<double>(cells);
    vs[k] = h(xs[k]);
  }
  // Values at the interval ends and at every refined interior extremum.
  std::vector<double> knots{vs[0]};
  int prev_sign = 0;
  for (std::size_t k = 0; k < cells; ++k) {
    const double diff = vs[k + 1] - vs[k];
    const int sign = diff > 0.0 ? 1 : (diff < 0.0 ? -1 : 0);
    if (sign == 0) continue;
    if (prev_sign != 0 && sign != prev_sign) {
      const double a = xs[k == 0 ? 0 : k - 1];
      const double b = xs[k + 1];
      knots.push_back(golden_extremum(h, a, b, prev_sign > 0));
    }
    prev_sign = sign;
  }
  knots.push_back(vs[cells]);
  CompensatedSum total;
  for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
    total.add(std::abs(knots[k + 1] - knots[k]));
  }
  return total.value();
}

}  // namespace

double total_variation(const std::function<double(double)>& h, double lo,
                       double hi, double tol) {
  if (!(lo < hi)) fail(ErrorCode::kInvalidArgument, "empty interval");
  constexpr std::size_t kMaxCells = std::size_t{1} << 20;
  std::size_t cells = 64;
  double prev = variation_on_grid(h, lo, hi, cells);
  while (cells < kMaxCells) {
    cells *= 2;
    const double next = variation_on_grid(h, lo, hi, cells);
    if (!std::isfinite(next)) break;
    if (std::abs(next - prev) <= tol * std::max(1.0, next)) return next;
    prev = next;
  }
  fail(ErrorCode::kNonConvergence, "total variation did not converge");
}

namespace {

void check_in_box(const PointSequence& seq, double delta) {
  if (!(delta >= 0.0 && delta < 0.5)) {
    fail(ErrorCode::kInvalidArgument, "delta must lie in [0, 1/2)");
  }
  for (double x : seq.coords()) {
    if (x < delta || x > 1.0 - delta) {
      fail(ErrorCode::kPointOutsideBox,
           "point " + std::to_string(x) + " lies outside [delta, 1 - delta]");
    }
  }
}

}  // namespace

KhBound kh_error_bound(const Integrand1D& h, const PointSequence& seq,
                       double delta) {
  if (seq.d() != 1) fail(ErrorCode::kDimensionUnsupported, "need a 1-d sequence");
  check_in_box(seq, delta);
  const double lo = delta;
  const double hi = 1.0 - delta;
  const double disc = star_discrepancy_exact(seq);
  const double var = total_variation(h.h, lo, hi);
  KhBound b;
  b.box = delta * (std::abs(h.h(lo)) + std::abs(h.h(hi))) + disc * var;
  b.tail = abs_integral(h, 0.0, lo) + abs_integral(h, hi, 1.0);
  return b;
}

KhBound kh_error_bound(const Integrand1D& h1, const Integrand1D& h2,
                       const PointSequence& seq, double delta) {
  if (seq.d() != 2) fail(ErrorCode::kDimensionUnsupported, "need a 2-d sequence");
  check_in_box(seq, delta);
  const double lo = delta;
  const double hi = 1.0 - delta;
  const double d_full = star_discrepancy_exact(seq);
  const double d_1 = star_discrepancy_exact(seq.projection(0));
  const double d_2 = star_discrepancy_exact(seq.projection(1));
  const double v1 = total_variation(h1.h, lo, hi);
  const double v2 = total_variation(h2.h, lo, hi);
  const double a1 = std::abs(h1.h(lo)) + std::abs(h1.h(hi));
  const double a2 = std::abs(h2.h(lo)) + std::abs(h2.h(hi));
  const double i1 = abs_integral(h1, lo, hi);
  const double i2 = abs_integral(h2, lo, hi);
  KhBound b;
  b.box = delta * delta * a1 * a2 + delta * (a1 * i2 + a2 * i1) +
          d_full * v1 * v2 + d_1 * v1 * std::abs(h2.h(hi)) +
          d_2 * v2 * std::abs(h1.h(hi));
  const double j1 = abs_integral(h1, 0.0, 1.0);
  const double j2 = abs_integral(h2, 0.0, 1.0);
  b.tail = std::max(0.0, j1 * j2 - i1 * i2);
  return b;
}

double shrink_delta(const FiniteTypeCertificate& cert, std::size_t n) {
  if (!cert.valid()) {
    fail(ErrorCode::kInvalidArgument, "certificate has no positive constant");
  }
  return cert.K / std::pow(static_cast<double>(n), cert.gamma);
}

}  // namespace permchar
