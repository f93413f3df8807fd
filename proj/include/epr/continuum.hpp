#pragma once

// Renormalized limit of the Z_N EPR states imbedded in L^2(R).
//
// L^2(Z_N) is mapped into L^2(R) by N^{1/2} delta_x -> eps^{-1/2} chi_r, where
// eps = (2 pi / N)^{1/2} and chi_r is the indicator of ((r - 1/2) eps, (r + 1/2) eps),
// |r| <= (N - 1) / 2. The image sigma_N = (2 pi)^{-1/2} sum_r chi_r (x) chi_r is
// never formed; only its pairings with test functions are computed.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "epr/error.hpp"

namespace epr {

struct QuadratureRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

/// Gauss-Legendre nodes and weights by Newton iteration on P_n.
inline QuadratureRule gauss_legendre(std::size_t n) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "quadrature order must be positive");
  QuadratureRule rule{std::vector<double>(n), std::vector<double>(n)};
  const std::size_t half = (n + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (std::size_t k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * static_cast<double>(k) - 1.0) * z * p1 - (static_cast<double>(k) - 1.0) * p2) / static_cast<double>(k);
      }
      dp = static_cast<double>(n) * (z * p0 - p1) / (z * z - 1.0);
      const double step = p0 / dp;
      z -= step;
      if (std::abs(step) < 1e-16) break;
    }
    rule.nodes[i] = -z;
    rule.nodes[n - 1 - i] = z;
    rule.weights[i] = rule.weights[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return rule;
}

inline double integrate_fixed(const std::function<double(double)>& f, double lo, double hi, const QuadratureRule& rule) {
  const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
  double s = 0.0;
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) s += rule.weights[k] * f(mid + half * rule.nodes[k]);
  return half * s;
}

/// Adaptive bisection: accept a panel when its 8-point value agrees with the
/// sum over its two halves to within `abs_tol` (scaled by the panel share).
inline double integrate_adaptive(const std::function<double(double)>& f, double lo, double hi, double abs_tol = 1e-13,
                                 int max_depth = 40) {
  static const QuadratureRule rule = gauss_legendre(8);
  std::function<double(double, double, double, double, int)> recurse = [&](double a, double b, double whole, double tol,
                                                                           int depth) -> double {
    const double m = 0.5 * (a + b);
    const double left = integrate_fixed(f, a, m, rule);
    const double right = integrate_fixed(f, m, b, rule);
    if (std::abs(left + right - whole) <= tol) return left + right;
    if (depth >= max_depth)
      throw Error(ErrorCode::QuadratureFailure, "adaptive quadrature did not converge on [" + std::to_string(a) + ", " +
                                                    std::to_string(b) + "]");
    return recurse(a, m, left, 0.5 * tol, depth + 1) + recurse(m, b, right, 0.5 * tol, depth + 1);
  };
  return recurse(lo, hi, integrate_fixed(f, lo, hi, rule), abs_tol, 0);
}

/// Schwartz-class test function with a Gaussian envelope
/// |f(x)| <= amplitude * (1 + |x - center|)^degree * exp(-rate (x - center)^2),
/// used only to bound truncated tails.
struct TestFunction {
  std::string name;
  std::function<double(double)> eval;
  double amplitude = 1.0;
  double rate = 0.5;
  double center = 0.0;
  int degree = 0;

  double operator()(double x) const { return eval(x); }

  double envelope(double x) const {
    const double d = std::abs(x - center);
    return amplitude * std::pow(1.0 + d, degree) * std::exp(-rate * d * d);
  }
};

namespace test_functions {

inline TestFunction zero() {
  return {"zero", [](double) { return 0.0; }, 0.0, 0.5, 0.0, 0};
}

/// exp(-x^2 / 2)
inline TestFunction gauss() {
  return {"gauss", [](double x) { return std::exp(-0.5 * x * x); }, 1.0, 0.5, 0.0, 0};
}

/// x exp(-x^2 / 2)
inline TestFunction xgauss() {
  return {"xgauss", [](double x) { return x * std::exp(-0.5 * x * x); }, 1.0, 0.5, 0.0, 1};
}

inline TestFunction shifted_gauss(double shift) {
  return {"gauss-shift", [shift](double x) { return std::exp(-0.5 * (x - shift) * (x - shift)); }, 1.0, 0.5, shift, 0};
}

/// Normalized Hermite function h_n(x) = (2^n n! sqrt(pi))^{-1/2} H_n(x) exp(-x^2/2), n <= 4.
inline TestFunction hermite(int n) {
  if (n < 0 || n > 4) throw Error(ErrorCode::InvalidArgument, "hermite order must be in [0, 4]");
  auto poly = [n](double x) {
    double h0 = 1.0, h1 = 2.0 * x;
    if (n == 0) return h0;
    for (int k = 1; k < n; ++k) {
      const double h2 = 2.0 * x * h1 - 2.0 * k * h0;
      h0 = h1;
      h1 = h2;
    }
    return h1;
  };
  double fact = 1.0;
  for (int k = 2; k <= n; ++k) fact *= k;
  const double c = 1.0 / std::sqrt(std::pow(2.0, n) * fact * std::sqrt(std::numbers::pi));
  // Sum of |coefficients| of H_n bounds |H_n(x)| by that sum times (1 + |x|)^n.
  constexpr std::array<double, 5> coefficient_sum{1.0, 2.0, 6.0, 20.0, 76.0};
  return {"hermite" + std::to_string(n), [poly, c](double x) { return c * poly(x) * std::exp(-0.5 * x * x); },
          c * coefficient_sum[static_cast<std::size_t>(n)], 0.5, 0.0, n};
}

/// Named functions accepted by the CLI: zero, gauss, xgauss, gauss-shift, hermite0..hermite4.
inline TestFunction by_name(const std::string& name) {
  if (name == "zero") return zero();
  if (name == "gauss") return gauss();
  if (name == "xgauss") return xgauss();
  if (name == "gauss-shift") return shifted_gauss(1.0);
  if (name.rfind("hermite", 0) == 0 && name.size() == 8 && name[7] >= '0' && name[7] <= '4') return hermite(name[7] - '0');
  throw Error(ErrorCode::InvalidArgument, "unknown test function '" + name + "'");
}

}  // namespace test_functions

class GridEmbedding {
 public:
  explicit GridEmbedding(long n) : n_(n) {
    if (n < 1 || n % 2 == 0) throw Error(ErrorCode::InvalidArgument, "grid size N must be odd and positive");
    epsilon_ = std::sqrt(2.0 * std::numbers::pi / static_cast<double>(n));
  }

  long n() const noexcept { return n_; }
  double epsilon() const noexcept { return epsilon_; }
  long max_cell() const noexcept { return (n_ - 1) / 2; }

  double cell_lo(long r) const { return (static_cast<double>(r) - 0.5) * epsilon_; }
  double cell_hi(long r) const { return (static_cast<double>(r) + 0.5) * epsilon_; }

  void require_cell(long r) const {
    if (r < -max_cell() || r > max_cell())
      throw Error(ErrorCode::CellOutOfRange, "cell " + std::to_string(r) + " outside |r| <= " + std::to_string(max_cell()));
  }

  /// (eps^{-1/2} chi_r, eps^{-1/2} chi_s) in L^2(R): overlap length / eps.
  double cell_overlap(long r, long s) const {
    require_cell(r);
    require_cell(s);
    const double lo = std::max(cell_lo(r), cell_lo(s));
    const double hi = std::min(cell_hi(r), cell_hi(s));
    return hi > lo ? (hi - lo) / epsilon_ : 0.0;
  }

  /// ||sigma_N||^2 = (2 pi)^{-1} sum_r ||chi_r||^4 = (2 pi)^{-1} N eps^2.
  double state_norm() const {
    double s = 0.0;
    for (long r = -max_cell(); r <= max_cell(); ++r) {
      const double len = cell_hi(r) - cell_lo(r);
      s += len * len;
    }
    return std::sqrt(s / (2.0 * std::numbers::pi));
  }

 private:
  long n_;
  double epsilon_;
};

inline constexpr std::size_t kCellQuadratureOrder = 8;

/// <chi_r, f> by 8-point Gauss-Legendre on the cell.
inline double cell_pairing(const GridEmbedding& emb, long r, const TestFunction& f) {
  emb.require_cell(r);
  static const QuadratureRule rule = gauss_legendre(kCellQuadratureOrder);
  return integrate_fixed(f.eval, emb.cell_lo(r), emb.cell_hi(r), rule);
}

/// N^{1/2} sigma_N(f (x) g) = eps^{-1} sum_r <chi_r, f> <chi_r, g>.
inline double renormalized_pairing(const GridEmbedding& emb, const TestFunction& f, const TestFunction& g) {
  double s = 0.0;
  for (long r = -emb.max_cell(); r <= emb.max_cell(); ++r) s += cell_pairing(emb, r, f) * cell_pairing(emb, r, g);
  return s / emb.epsilon();
}

inline constexpr double kDefaultTruncation = 40.0;

/// Upper estimate of int_{|x| > L} |f g| from the envelopes.
inline double tail_estimate(const TestFunction& f, const TestFunction& g, double half_width) {
  static const QuadratureRule rule = gauss_legendre(8);
  auto env = [&](double x) { return f.envelope(x) * g.envelope(x); };
  double s = 0.0;
  for (double lo = half_width; lo < half_width + 40.0; lo += 0.25)
    s += integrate_fixed(env, lo, lo + 0.25, rule) + integrate_fixed(env, -lo - 0.25, -lo, rule);
  return s;
}

/// int_R f g dx, truncated to |x| <= L with the neglected tail below 1e-12.
inline double limit_target(const TestFunction& f, const TestFunction& g, double half_width = kDefaultTruncation) {
  double width = half_width;
  for (int attempt = 0; attempt < 4; ++attempt, width *= 2.0) {
    if (tail_estimate(f, g, width) >= 1e-12) continue;
    auto fg = [&](double x) { return f(x) * g(x); };
    // Split at the origin and at unit steps so the adaptive rule sees the bulk.
    double total = 0.0;
    const double step = 1.0;
    for (double lo = -width; lo < width; lo += step) total += integrate_adaptive(fg, lo, std::min(lo + step, width), 1e-15);
    return total;
  }
  throw Error(ErrorCode::QuadratureFailure, "tail bound 1e-12 not met for " + f.name + " x " + g.name);
}

struct SweepRow {
  long n;
  double epsilon;
  double pairing;
  double target;
  double abs_error;
};

/// Rows are independent; `ns` must be strictly increasing odd integers.
inline std::vector<SweepRow> convergence_sweep(const std::vector<long>& ns, const TestFunction& f, const TestFunction& g) {
  for (std::size_t k = 0; k < ns.size(); ++k) {
    if (ns[k] < 1 || ns[k] % 2 == 0) throw Error(ErrorCode::InvalidArgument, "grid sizes must be odd and positive");
    if (k > 0 && ns[k] <= ns[k - 1]) throw Error(ErrorCode::InvalidArgument, "grid sizes must be strictly increasing");
  }
  const double target = limit_target(f, g);
  std::vector<SweepRow> rows;
  for (long n : ns) {
    const GridEmbedding emb(n);
    const double p = renormalized_pairing(emb, f, g);
    rows.push_back({n, emb.epsilon(), p, target, std::abs(p - target)});
  }
  return rows;
}

/// Least-squares slope of log(abs_error) against log(epsilon).
inline double fitted_slope(const std::vector<SweepRow>& rows) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t m = 0;
  for (const auto& r : rows) {
    if (!(r.abs_error > 0.0)) continue;
    const double x = std::log(r.epsilon), y = std::log(r.abs_error);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  if (m < 2) throw Error(ErrorCode::InvalidArgument, "need at least two rows with nonzero error to fit a slope");
  const double dm = static_cast<double>(m);
  return (dm * sxy - sx * sy) / (dm * sxx - sx * sx);
}

}  // namespace epr
