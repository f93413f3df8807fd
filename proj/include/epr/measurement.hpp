#pragma once

// Joint, marginal and conditional statistics of A1 (x) 1 and 1 (x) B2 in a
// pure state, restricted to discrete (finite-dimensional) spectra.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "epr/epr_analysis.hpp"
#include "epr/numerics.hpp"
#include "epr/tensor.hpp"

namespace epr {

inline constexpr double kProbabilityClamp = 1e-14;
inline constexpr double kPositiveMass = 1e-12;
inline constexpr double kValueMatch = 1e-8;

/// Eigenvalues from the two factors are identified when |x - y| <= 1e-8 (1 + |x|).
inline bool values_match(double x, double y) {
  return std::abs(x - y) <= kValueMatch * (1.0 + std::max(std::abs(x), std::abs(y)));
}

struct JointPoint {
  double a;
  double b;
  double p;
};

struct ValueMass {
  double value;
  double p;
};

struct DiscreteJointDistribution {
  std::vector<JointPoint> support;

  double total() const {
    double s = 0.0;
    for (const auto& pt : support) s += pt.p;
    return s;
  }

  void validate() const {
    for (const auto& pt : support)
      if (!(pt.p >= -kProbabilityClamp)) throw Error(ErrorCode::InvariantError, "negative probability");
    if (std::abs(total() - 1.0) > 1e-10)
      throw Error(ErrorCode::InvariantError, "probabilities sum to " + std::to_string(total()));
  }

  std::vector<ValueMass> marginal_a() const { return marginal(&JointPoint::a); }
  std::vector<ValueMass> marginal_b() const { return marginal(&JointPoint::b); }

  /// P(a, b), zero when the pair is not in the support.
  double prob(double a, double b) const {
    double s = 0.0;
    for (const auto& pt : support)
      if (values_match(pt.a, a) && values_match(pt.b, b)) s += pt.p;
    return s;
  }

 private:
  std::vector<ValueMass> marginal(double JointPoint::*field) const {
    std::vector<ValueMass> out;
    for (const auto& pt : support) {
      auto it = std::find_if(out.begin(), out.end(), [&](const ValueMass& vm) { return values_match(vm.value, pt.*field); });
      if (it == out.end())
        out.push_back({pt.*field, pt.p});
      else
        it->p += pt.p;
    }
    std::sort(out.begin(), out.end(), [](const ValueMass& x, const ValueMass& y) { return x.value < y.value; });
    return out;
  }
};

struct Conditional {
  double a;
  double marginal;
  std::vector<ValueMass> q;  // q_a(b)
};

struct ConditionalFamily {
  std::vector<Conditional> entries;

  const Conditional* find(double a) const {
    for (const auto& c : entries)
      if (values_match(c.a, a)) return &c;
    return nullptr;
  }
};

namespace detail {

inline void require_normalized(const PureState& sigma) {
  if (!sigma.is_normalized())
    throw Error(ErrorCode::NotNormalized, "state norm is " + std::to_string(sigma.norm()) + ", expected 1");
}

inline double clamp_probability(double p) { return p < kProbabilityClamp ? 0.0 : p; }

}  // namespace detail

/// P(a, b) = ||E_a C F_b^T||_F^2 = ||(E_a (x) F_b) sigma||^2 over the spectral blocks.
inline DiscreteJointDistribution joint_distribution(const PureState& sigma, const Observable& a1, const Observable& b2) {
  if (a1.dim() != sigma.dim1()) throw Error(ErrorCode::DimensionMismatch, "A1 does not act on H1");
  if (b2.dim() != sigma.dim2()) throw Error(ErrorCode::DimensionMismatch, "B2 does not act on H2");
  detail::require_normalized(sigma);
  DiscreteJointDistribution out;
  for (const auto& ea : a1.blocks()) {
    const ComplexMatrix left = dagger(ea.basis) * sigma.coeffs();
    for (const auto& fb : b2.blocks()) {
      const double amp = frobenius_norm(left * conj(fb.basis));
      out.support.push_back({ea.value, fb.value, detail::clamp_probability(amp * amp)});
    }
  }
  return out;
}

/// Distribution of A1 (x) 1 alone: ||(E_a (x) I) sigma||^2.
inline std::vector<ValueMass> distribution_h1(const PureState& sigma, const Observable& a1) {
  if (a1.dim() != sigma.dim1()) throw Error(ErrorCode::DimensionMismatch, "A1 does not act on H1");
  std::vector<ValueMass> out;
  for (const auto& ea : a1.blocks()) {
    const double amp = frobenius_norm(dagger(ea.basis) * sigma.coeffs());
    out.push_back({ea.value, detail::clamp_probability(amp * amp)});
  }
  return out;
}

/// Distribution of 1 (x) B2 alone: ||(I (x) F_b) sigma||^2.
inline std::vector<ValueMass> distribution_h2(const PureState& sigma, const Observable& b2) {
  if (b2.dim() != sigma.dim2()) throw Error(ErrorCode::DimensionMismatch, "B2 does not act on H2");
  std::vector<ValueMass> out;
  for (const auto& fb : b2.blocks()) {
    const double amp = frobenius_norm(sigma.coeffs() * conj(fb.basis));
    out.push_back({fb.value, detail::clamp_probability(amp * amp)});
  }
  return out;
}

/// Total variation distance between two finitely supported measures on R.
inline double total_variation(const std::vector<ValueMass>& p, const std::vector<ValueMass>& q) {
  std::vector<ValueMass> diff = p;
  for (const auto& vm : q) {
    auto it = std::find_if(diff.begin(), diff.end(), [&](const ValueMass& d) { return values_match(d.value, vm.value); });
    if (it == diff.end())
      diff.push_back({vm.value, -vm.p});
    else
      it->p -= vm.p;
  }
  double s = 0.0;
  for (const auto& d : diff) s += std::abs(d.p);
  return 0.5 * s;
}

/// q_a(b) = P(a, b) / P1(a) for every a with P1(a) > 1e-12.
inline ConditionalFamily conditional_family(const DiscreteJointDistribution& joint) {
  ConditionalFamily family;
  for (const auto& [a, pa] : joint.marginal_a()) {
    if (pa <= kPositiveMass) continue;
    Conditional c{a, pa, {}};
    for (const auto& pt : joint.support) {
      if (!values_match(pt.a, a)) continue;
      auto it = std::find_if(c.q.begin(), c.q.end(), [&](const ValueMass& vm) { return values_match(vm.value, pt.b); });
      if (it == c.q.end())
        c.q.push_back({pt.b, pt.p / pa});
      else
        it->p += pt.p / pa;
    }
    family.entries.push_back(std::move(c));
  }
  return family;
}

/// Candidate graph function; nullopt where undefined.
using GraphMap = std::function<std::optional<double>(double)>;

inline GraphMap graph_from_table(std::map<double, double> table) {
  return [table = std::move(table)](double a) -> std::optional<double> {
    for (const auto& [x, y] : table)
      if (values_match(x, a)) return y;
    return std::nullopt;
  };
}

/// Mass of {(a, b) : b != g(a)}.
inline double off_graph_mass(const DiscreteJointDistribution& joint, const GraphMap& g) {
  for (const auto& [a, pa] : joint.marginal_a())
    if (pa > kPositiveMass && !g(a))
      throw Error(ErrorCode::GraphUndefined, "g is undefined at a = " + std::to_string(a));
  double mass = 0.0;
  for (const auto& pt : joint.support) {
    if (pt.p == 0.0) continue;
    const auto image = g(pt.a);
    if (!image || !values_match(*image, pt.b)) mass += pt.p;
  }
  return mass;
}

inline bool graph_concentration_check(const DiscreteJointDistribution& joint, const GraphMap& g, double tol = 1e-10) {
  return off_graph_mass(joint, g) <= tol;
}

/// g maps the positive-mass a-values onto exactly the positive-mass b-values.
inline bool corollary2_check(const DiscreteJointDistribution& joint, const GraphMap& g, double tol = 1e-10) {
  if (!graph_concentration_check(joint, g, tol))
    throw Error(ErrorCode::PreconditionFailed, "joint distribution is not concentrated on the graph of g");
  std::vector<double> image;
  for (const auto& [a, pa] : joint.marginal_a()) {
    if (pa < kPositiveMass) continue;
    const double b = *g(a);
    if (std::none_of(image.begin(), image.end(), [&](double x) { return values_match(x, b); })) image.push_back(b);
  }
  std::vector<double> d2;
  for (const auto& [b, pb] : joint.marginal_b())
    if (pb >= kPositiveMass) d2.push_back(b);
  if (image.size() != d2.size()) return false;
  return std::all_of(d2.begin(), d2.end(), [&](double b) {
    return std::any_of(image.begin(), image.end(), [&](double x) { return values_match(x, b); });
  });
}

struct CorrelationResult {
  bool passed;
  double off_diagonal_mass;
  Observable b1;
  DiscreteJointDistribution joint;
};

/// Eigenvalues of B2 compressed to H2^sigma.
inline std::vector<double> support_spectrum(const PureState& sigma, const Observable& b2, const Tolerances& tol = {}) {
  const auto s = schmidt_decompose(sigma, tol).support_basis();
  const auto eig = hermitian_eig(dagger(s) * b2.matrix() * s, tol);
  std::vector<double> out;
  for (const auto& c : cluster_eigenvalues(eig.values, tol)) out.push_back(c.value);
  return out;
}

/// Forms B1 = U B2 U^dagger and measures the joint mass with b1 != b2, both in
/// the spectrum of B2 on H2^sigma.
inline CorrelationResult epr_correlation_test(const PureState& sigma, const Observable& b2, double tol = 1e-10,
                                              const Tolerances& tols = {}) {
  auto b1 = predictive_map(sigma, b2, tols);
  auto joint = joint_distribution(sigma, b1, b2);
  const auto beta = support_spectrum(sigma, b2, tols);
  auto in_beta = [&](double v) { return std::any_of(beta.begin(), beta.end(), [&](double x) { return values_match(x, v); }); };
  double mass = 0.0;
  for (const auto& pt : joint.support)
    if (!values_match(pt.a, pt.b) && in_beta(pt.a) && in_beta(pt.b)) mass += pt.p;
  return {mass <= tol, mass, std::move(b1), std::move(joint)};
}

}  // namespace epr
