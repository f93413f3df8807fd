#pragma once

// Weyl-Schwinger kinematics on a finite abelian group G = Z_n1 x ... x Z_nk.
//
// L^2(G) carries (f, g) = |G|^{-1} sum_x f(x) conj(g(x)). All coordinates used
// here are taken in the orthonormal delta basis {sqrt|G| delta_x}, so the
// generic tensor code works unchanged. Group elements are enumerated
// lexicographically.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "epr/epr_analysis.hpp"
#include "epr/measurement.hpp"
#include "epr/numerics.hpp"
#include "epr/tensor.hpp"

namespace epr {

using GroupElement = std::vector<int>;

class FiniteAbelianGroup {
 public:
  explicit FiniteAbelianGroup(std::vector<int> cyclic_orders) : orders_(std::move(cyclic_orders)) {
    if (orders_.empty()) orders_.push_back(1);
    for (int n : orders_)
      if (n < 1) throw Error(ErrorCode::InvalidArgument, "cyclic orders must be >= 1");
  }

  /// Parses "n1xn2x...", e.g. "2x3" or "5".
  static FiniteAbelianGroup parse(std::string_view spec) {
    if (spec.empty() || spec.front() == 'x' || spec.back() == 'x')
      throw Error(ErrorCode::InvalidArgument, "bad group spec '" + std::string(spec) + "'");
    std::vector<int> orders;
    std::string token;
    std::istringstream in{std::string(spec)};
    while (std::getline(in, token, 'x')) {
      std::size_t used = 0;
      int n = 0;
      try {
        n = std::stoi(token, &used);
      } catch (const std::exception&) {
        throw Error(ErrorCode::InvalidArgument, "bad group spec '" + std::string(spec) + "'");
      }
      if (used != token.size() || n < 1) throw Error(ErrorCode::InvalidArgument, "bad group spec '" + std::string(spec) + "'");
      orders.push_back(n);
    }
    if (orders.empty()) throw Error(ErrorCode::InvalidArgument, "empty group spec");
    return FiniteAbelianGroup(std::move(orders));
  }

  const std::vector<int>& cyclic_orders() const noexcept { return orders_; }

  std::size_t order() const {
    std::size_t n = 1;
    for (int k : orders_) n *= static_cast<std::size_t>(k);
    return n;
  }

  GroupElement element(std::size_t index) const {
    GroupElement x(orders_.size());
    for (std::size_t l = orders_.size(); l-- > 0;) {
      x[l] = static_cast<int>(index % static_cast<std::size_t>(orders_[l]));
      index /= static_cast<std::size_t>(orders_[l]);
    }
    return x;
  }

  std::size_t index(const GroupElement& x) const {
    std::size_t k = 0;
    for (std::size_t l = 0; l < orders_.size(); ++l) {
      const int n = orders_[l];
      k = k * static_cast<std::size_t>(n) + static_cast<std::size_t>(((x[l] % n) + n) % n);
    }
    return k;
  }

  GroupElement add(const GroupElement& x, const GroupElement& y) const {
    GroupElement z(orders_.size());
    for (std::size_t l = 0; l < orders_.size(); ++l) z[l] = (x[l] + y[l]) % orders_[l];
    return z;
  }

  std::string spec() const {
    std::string s;
    for (std::size_t l = 0; l < orders_.size(); ++l) s += (l ? "x" : "") + std::to_string(orders_[l]);
    return s;
  }

 private:
  std::vector<int> orders_;
};

/// xi_y(x) = exp(2 pi i sum_l x_l y_l / n_l)
inline cplx character_value(const FiniteAbelianGroup& g, const GroupElement& y, const GroupElement& x) {
  double phase = 0.0;
  const auto& n = g.cyclic_orders();
  for (std::size_t l = 0; l < n.size(); ++l) phase += static_cast<double>((x[l] * y[l]) % n[l]) / n[l];
  return std::polar(1.0, 2.0 * std::numbers::pi * phase);
}

/// Values of a function on G, indexed lexicographically.
using GroupFunction = std::vector<cplx>;

inline cplx weighted_inner(const GroupFunction& f, const GroupFunction& h) {
  if (f.size() != h.size()) throw Error(ErrorCode::ShapeMismatch, "functions on different groups");
  return inner(f, h) / static_cast<double>(f.size());
}

inline GroupFunction character_function(const FiniteAbelianGroup& g, std::size_t y) {
  GroupFunction f(g.order());
  const auto ye = g.element(y);
  for (std::size_t x = 0; x < f.size(); ++x) f[x] = character_value(g, ye, g.element(x));
  return f;
}

inline GroupFunction delta_function(const FiniteAbelianGroup& g, std::size_t x) {
  GroupFunction f(g.order());
  f[x] = 1.0;
  return f;
}

/// Column y holds the coordinates of xi_y in the basis {sqrt|G| delta_x}:
/// (xi_y, sqrt|G| delta_x) = xi_y(x) / sqrt|G|.
inline ComplexMatrix character_basis(const FiniteAbelianGroup& g) {
  const std::size_t n = g.order();
  const double s = 1.0 / std::sqrt(static_cast<double>(n));
  ComplexMatrix f(n, n);
  for (std::size_t y = 0; y < n; ++y) {
    const auto ye = g.element(y);
    for (std::size_t x = 0; x < n; ++x) f(x, y) = s * character_value(g, ye, g.element(x));
  }
  return f;
}

/// Integer label of x: each coordinate is mapped to its centered residue
/// (r = 0, +-1, ...) and the digits are combined in mixed radix, giving |G|
/// distinct integers.
inline double centered_label(const FiniteAbelianGroup& g, std::size_t index) {
  const auto x = g.element(index);
  const auto& n = g.cyclic_orders();
  long long value = 0;
  for (std::size_t l = 0; l < n.size(); ++l) {
    const int r = 2 * x[l] < n[l] ? x[l] : x[l] - n[l];
    value = value * n[l] + r;
  }
  return static_cast<double>(value);
}

inline std::vector<double> default_labels(const FiniteAbelianGroup& g) {
  std::vector<double> v(g.order());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = centered_label(g, k);
  return v;
}

namespace detail {

inline void require_distinct(const std::vector<double>& values, std::size_t expected) {
  if (values.size() != expected)
    throw Error(ErrorCode::InvalidArgument, "need " + std::to_string(expected) + " values, got " + std::to_string(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) throw Error(ErrorCode::InvalidArgument, "values must be finite");
    for (std::size_t j = i + 1; j < values.size(); ++j)
      if (values[i] == values[j]) throw Error(ErrorCode::DuplicateValues, "value " + std::to_string(values[i]) + " repeated");
  }
}

}  // namespace detail

inline HilbertSpace group_space(const FiniteAbelianGroup& g) {
  std::vector<std::string> labels;
  for (std::size_t k = 0; k < g.order(); ++k) {
    std::string s;
    for (int c : g.element(k)) s += (s.empty() ? "" : ",") + std::to_string(c);
    labels.push_back("(" + s + ")");
  }
  return HilbertSpace::labelled(std::move(labels));
}

/// Position observable: eigenvalue a_x on sqrt|G| delta_x.
inline Observable position_observable(const FiniteAbelianGroup& g, std::optional<std::vector<double>> values = std::nullopt,
                                      const Tolerances& tol = {}) {
  auto a = values ? *values : default_labels(g);
  detail::require_distinct(a, g.order());
  return Observable(group_space(g), ComplexMatrix::diagonal(a), tol);
}

/// Momentum observable: eigenvalue b_y on the character xi_y.
inline Observable momentum_observable(const FiniteAbelianGroup& g, std::optional<std::vector<double>> values = std::nullopt,
                                      const Tolerances& tol = {}) {
  auto b = values ? *values : default_labels(g);
  detail::require_distinct(b, g.order());
  const auto f = character_basis(g);
  return Observable(group_space(g), f * ComplexMatrix::diagonal(b) * dagger(f), tol);
}

/// sigma_U = sqrt|G| sum_x delta_x (x) delta_x for U = complex conjugation;
/// in the orthonormal delta bases its coefficient matrix is |G|^{-1/2} I.
inline PureState bohm_state(const FiniteAbelianGroup& g) {
  const auto h = group_space(g);
  const double s = 1.0 / std::sqrt(static_cast<double>(g.order()));
  return PureState(h, h, s * ComplexMatrix::identity(g.order()));
}

/// |G|^{-1/2} sum_xi xi^{-1} (x) xi, assembled term by term.
inline PureState bohm_state_character_form(const FiniteAbelianGroup& g) {
  const std::size_t n = g.order();
  const auto f = character_basis(g);
  const double s = 1.0 / std::sqrt(static_cast<double>(n));
  ComplexMatrix c(n, n);
  for (std::size_t y = 0; y < n; ++y)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) c(i, j) += s * std::conj(f(i, y)) * f(j, y);
  const auto h = group_space(g);
  return PureState(h, h, std::move(c));
}

struct StarIdentity {
  PureState delta_form;
  PureState character_form;
  double residual;
};

inline StarIdentity verify_star_identity(const FiniteAbelianGroup& g) {
  auto delta = bohm_state(g);
  auto chars = bohm_state_character_form(g);
  const double r = frobenius_distance(delta.coeffs(), chars.coeffs());
  return {std::move(delta), std::move(chars), r};
}

struct SymmetryTable {
  DiscreteJointDistribution position;  // (X1, X2)
  DiscreteJointDistribution momentum;  // (Y1, Y2)
  double position_off_graph;
  double momentum_off_graph;
};

/// Joint tables of (X1, X2) and (Y1, Y2) in sigma_U with X1 = U X2 U^dagger
/// and Y1 = U Y2 U^dagger; both are concentrated on the identity graph.
inline SymmetryTable epr_symmetry_table(const FiniteAbelianGroup& g, const Tolerances& tol = {}) {
  const auto sigma = bohm_state(g);
  const auto u = AntiunitaryImbedding::conjugation(g.order());
  const auto x2 = position_observable(g, std::nullopt, tol);
  const auto y2 = momentum_observable(g, std::nullopt, tol);
  const Observable x1(sigma.space1(), u.transport(x2.matrix()), tol);
  const Observable y1(sigma.space1(), u.transport(y2.matrix()), tol);
  const GraphMap identity = [](double a) -> std::optional<double> { return a; };
  auto pos = joint_distribution(sigma, x1, x2);
  auto mom = joint_distribution(sigma, y1, y2);
  const double pm = off_graph_mass(pos, identity);
  const double mm = off_graph_mass(mom, identity);
  return {std::move(pos), std::move(mom), pm, mm};
}

/// H = L^2(G) (x) C^N, index x * N + s.
inline HilbertSpace spin_space(const FiniteAbelianGroup& g, std::size_t n) {
  std::vector<std::string> labels;
  const auto base = group_space(g);
  for (const auto& x : base.basis_labels)
    for (std::size_t s = 0; s < n; ++s) labels.push_back(x + "/" + std::to_string(s));
  return HilbertSpace::labelled(std::move(labels));
}

/// {X (x) 1, P (x) 1} on L^2(G) (x) C^N.
inline std::vector<Observable> spin_observables(const FiniteAbelianGroup& g, std::size_t n, const Tolerances& tol = {}) {
  const auto id = ComplexMatrix::identity(n);
  const auto h = spin_space(g, n);
  return {Observable(h, kron(position_observable(g, std::nullopt, tol).matrix(), id), tol),
          Observable(h, kron(momentum_observable(g, std::nullopt, tol).matrix(), id), tol)};
}

/// State on (L^2(G) (x) C^N)^{(x)2} with L^dagger L = |G|^{-1} I (x) rho, rho
/// positive semidefinite with unit trace. Coefficients are conj(K^{1/2}) for
/// K = |G|^{-1} I (x) rho, so that K^{1/2 dagger} K^{1/2} = K.
inline PureState spin_system_state(const FiniteAbelianGroup& g, std::size_t n, const ComplexMatrix& rho,
                                   const Tolerances& tol = {}) {
  if (n < 1 || rho.rows() != n || rho.cols() != n)
    throw Error(ErrorCode::DimensionMismatch, "rho must be N x N");
  const auto eig = hermitian_eig(rho, tol);
  if (eig.values.front() < -1e-12)
    throw Error(ErrorCode::NotPositive, "rho has eigenvalue " + std::to_string(eig.values.front()));
  const double tr = trace(rho).real();
  if (std::abs(tr - 1.0) > 1e-10) throw Error(ErrorCode::NotNormalized, "trace(rho) = " + std::to_string(tr));
  const double s = 1.0 / std::sqrt(static_cast<double>(g.order()));
  const auto coeffs = s * kron(ComplexMatrix::identity(g.order()), conj(psd_sqrt(rho, tol)));
  const auto h = spin_space(g, n);
  return PureState(h, h, coeffs);
}

}  // namespace epr
