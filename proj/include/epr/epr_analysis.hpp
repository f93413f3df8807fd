#pragma once

// Structure of EPR states: Schmidt/eigenspace decomposition of L^dagger L,
// the commutation criterion, the predictive antilinear map B2 -> B1 and the
// constructive parameterization by weights, blocks and antiunitary imbeddings.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "epr/numerics.hpp"
#include "epr/tensor.hpp"

namespace epr {

inline constexpr double kIsometryTolerance = 1e-10;

/// Conjugate-linear isometry from a subspace of `domain` into `codomain`.
///
/// Acts as u -> matrix * conj(u). `support` holds orthonormal columns spanning
/// the subspace on which the map is isometric; the map vanishes on its
/// orthogonal complement. A full imbedding has support = identity.
class AntiunitaryImbedding {
 public:
  static AntiunitaryImbedding full(HilbertSpace domain, HilbertSpace codomain, ComplexMatrix matrix) {
    const std::size_t n = domain.dim;
    return AntiunitaryImbedding(std::move(domain), std::move(codomain), std::move(matrix),
                                ComplexMatrix::identity(n));
  }

  static AntiunitaryImbedding full(ComplexMatrix matrix) {
    auto domain = HilbertSpace::standard(matrix.cols());
    auto codomain = HilbertSpace::standard(matrix.rows());
    return full(std::move(domain), std::move(codomain), std::move(matrix));
  }

  /// Complex conjugation of coordinates, u -> conj(u), on C^n.
  static AntiunitaryImbedding conjugation(std::size_t n) { return full(ComplexMatrix::identity(n)); }

  static AntiunitaryImbedding partial(HilbertSpace domain, HilbertSpace codomain, ComplexMatrix matrix,
                                      ComplexMatrix support) {
    return AntiunitaryImbedding(std::move(domain), std::move(codomain), std::move(matrix), std::move(support));
  }

  const HilbertSpace& domain() const noexcept { return domain_; }
  const HilbertSpace& codomain() const noexcept { return codomain_; }
  const ComplexMatrix& matrix() const noexcept { return matrix_; }
  const ComplexMatrix& support() const noexcept { return support_; }

  ComplexVector apply(std::span<const cplx> u) const {
    if (u.size() != domain_.dim) throw Error(ErrorCode::ShapeMismatch, "vector is not in the imbedding domain");
    const auto cu = conj(u);
    return matrix_ * std::span<const cplx>(cu);
  }

  /// Images of the columns of `vectors` under the map.
  ComplexMatrix apply_columns(const ComplexMatrix& vectors) const { return matrix_ * conj(vectors); }

  /// ||(W conj S)^dagger (W conj S) - I|| over an orthonormal family S.
  double isometry_defect_on(const ComplexMatrix& vectors) const { return ::epr::isometry_defect(apply_columns(vectors)); }
  double isometry_defect() const { return isometry_defect_on(support_); }

  /// B -> U B U^dagger, i.e. W conj(B) W^dagger.
  ComplexMatrix transport(const ComplexMatrix& b) const {
    if (!b.is_square() || b.rows() != domain_.dim)
      throw Error(ErrorCode::DimensionMismatch, "operator does not act on the imbedding domain");
    return matrix_ * conj(b) * dagger(matrix_);
  }

 private:
  AntiunitaryImbedding(HilbertSpace domain, HilbertSpace codomain, ComplexMatrix matrix, ComplexMatrix support)
      : domain_(std::move(domain)), codomain_(std::move(codomain)), matrix_(std::move(matrix)),
        support_(std::move(support)) {
    if (matrix_.rows() != codomain_.dim || matrix_.cols() != domain_.dim)
      throw Error(ErrorCode::ShapeMismatch, "imbedding matrix must be codomain x domain");
    if (support_.rows() != domain_.dim) throw Error(ErrorCode::ShapeMismatch, "support basis not in domain");
    if (!matrix_.all_finite()) throw Error(ErrorCode::InvariantError, "imbedding has non-finite entries");
    if (::epr::isometry_defect(support_) > kIsometryTolerance)
      throw Error(ErrorCode::NotIsometry, "support basis is not orthonormal");
    if (isometry_defect() > kIsometryTolerance)
      throw Error(ErrorCode::NotIsometry, "imbedding is not isometric on its support (defect " +
                                              std::to_string(isometry_defect()) + ")");
  }

  HilbertSpace domain_;
  HilbertSpace codomain_;
  ComplexMatrix matrix_;
  ComplexMatrix support_;
};

struct SchmidtDecomposition {
  std::vector<double> lambdas;            // strictly positive, descending
  std::vector<std::size_t> mults;         // d_j
  std::vector<ComplexMatrix> h2_blocks;   // orthonormal bases of H2(lambda_j)
  std::vector<ComplexMatrix> h1_blocks;   // U[H2(lambda_j)], orthonormal bases of H1(lambda_j)
  ComplexMatrix kernel_basis;             // orthonormal basis of H2^0 (may have zero columns)
  AntiunitaryImbedding imbedding;         // U on H2^sigma

  /// sum_j d_j lambda_j
  double weighted_sum() const {
    double s = 0.0;
    for (std::size_t j = 0; j < lambdas.size(); ++j) s += static_cast<double>(mults[j]) * lambdas[j];
    return s;
  }

  std::size_t rank() const {
    std::size_t r = 0;
    for (auto d : mults) r += d;
    return r;
  }

  /// Single eigenvalue and trivial kernel.
  bool is_maximal() const { return lambdas.size() == 1 && kernel_basis.cols() == 0; }

  /// Orthonormal basis of H2^sigma (all blocks, in order).
  ComplexMatrix support_basis() const {
    const std::size_t d2 = imbedding.domain().dim;
    std::vector<ComplexVector> cols;
    for (const auto& b : h2_blocks)
      for (std::size_t k = 0; k < b.cols(); ++k) cols.push_back(b.column(k));
    return ComplexMatrix::from_columns(d2, cols);
  }
};

inline SchmidtDecomposition schmidt_decompose(const PureState& sigma, const Tolerances& tol = {}) {
  if (sigma.norm() <= tol.zero_threshold) throw Error(ErrorCode::ZeroState, "state norm is below zero_threshold");
  const auto l = canonical_map(sigma);
  const ComplexMatrix g = gram_matrix(l);
  const auto eig = hermitian_eig(g, tol);
  const double tr = trace(g).real();
  const std::size_t d2 = sigma.dim2();

  std::size_t first_positive = 0;
  while (first_positive < d2 && eig.values[first_positive] <= tol.zero_threshold * tr) ++first_positive;

  const auto positive = std::span<const double>(eig.values).subspan(first_positive);
  auto clusters = cluster_eigenvalues(positive, tol);
  std::reverse(clusters.begin(), clusters.end());

  // Images lambda_v^{-1/2} L v of the support eigenvectors, replaced by their
  // polar factor M (M^dagger M)^{-1/2} (equal in exact arithmetic) so that U
  // stays isometric to rounding even for eigenvalues near the kernel cutoff.
  // W = images * V^T maps conj(v) to the image of v and annihilates the kernel.
  auto support = eig.vectors.columns(first_positive, d2 - first_positive);
  ComplexMatrix images = l.matrix() * conj(support);
  for (std::size_t k = 0; k < support.cols(); ++k) {
    const double scale = 1.0 / std::sqrt(eig.values[first_positive + k]);
    for (std::size_t i = 0; i < images.rows(); ++i) images(i, k) *= scale;
  }
  if (support.cols() > 0) {
    const auto overlap = hermitian_eig(dagger(images) * images, tol);
    ComplexMatrix inv_sqrt = overlap.vectors;
    for (std::size_t k = 0; k < inv_sqrt.cols(); ++k)
      for (std::size_t i = 0; i < inv_sqrt.rows(); ++i) inv_sqrt(i, k) /= std::sqrt(overlap.values[k]);
    images = images * (inv_sqrt * dagger(overlap.vectors));
  }
  ComplexMatrix w = images * transpose(support);
  auto imbedding = AntiunitaryImbedding::partial(sigma.space2(), sigma.space1(), std::move(w), support);

  SchmidtDecomposition out{{}, {}, {}, {}, eig.vectors.columns(0, first_positive), std::move(imbedding)};
  for (const auto& c : clusters) {
    out.lambdas.push_back(c.value);
    out.mults.push_back(c.count);
    auto block = eig.vectors.columns(first_positive + c.first, c.count);
    out.h1_blocks.push_back(out.imbedding.apply_columns(block));
    out.h2_blocks.push_back(std::move(block));
  }
  return out;
}

struct ObservableVerdict {
  std::string id;
  double commutator_norm;
  double threshold;
  bool passed;
};

struct EprReport {
  bool is_epr;
  std::vector<ObservableVerdict> per_observable;
  SchmidtDecomposition decomposition;
};

namespace detail {

inline double commutation_threshold(const ComplexMatrix& g, const ComplexMatrix& b, const Tolerances& tol) {
  return tol.commutator_tol * (1.0 + frobenius_norm(g)) * (1.0 + frobenius_norm(b));
}

inline void require_on_h2(const PureState& sigma, const ComplexMatrix& b) {
  if (!b.is_square() || b.rows() != sigma.dim2())
    throw Error(ErrorCode::DimensionMismatch, "observable dimension " + std::to_string(b.rows()) +
                                                  " does not match dim2 = " + std::to_string(sigma.dim2()));
}

}  // namespace detail

/// Per-observable check that L^dagger L commutes with B2.
inline EprReport is_epr(const PureState& sigma, std::span<const Observable> observables, const Tolerances& tol = {},
                        std::span<const std::string> ids = {}) {
  for (const auto& b : observables) detail::require_on_h2(sigma, b.matrix());
  const ComplexMatrix g = gram_matrix(canonical_map(sigma));
  EprReport report{true, {}, schmidt_decompose(sigma, tol)};
  for (std::size_t k = 0; k < observables.size(); ++k) {
    const auto& b = observables[k].matrix();
    const double c = commutator_norm(g, b);
    const double threshold = detail::commutation_threshold(g, b, tol);
    const bool ok = c <= threshold;
    report.per_observable.push_back({k < ids.size() ? ids[k] : std::to_string(k), c, threshold, ok});
    report.is_epr = report.is_epr && ok;
  }
  return report;
}

/// Membership of an operator on H2 in the commutant of L^dagger L.
inline bool epr_algebra_contains(const PureState& sigma, const ComplexMatrix& b2, const Tolerances& tol = {}) {
  detail::require_on_h2(sigma, b2);
  const ComplexMatrix g = gram_matrix(canonical_map(sigma));
  return commutator_norm(g, b2) <= detail::commutation_threshold(g, b2, tol);
}

inline bool epr_algebra_contains(const PureState& sigma, const Observable& b2, const Tolerances& tol = {}) {
  return epr_algebra_contains(sigma, b2.matrix(), tol);
}

/// B2 -> B1 = U B2 U^dagger for any operator in the commutant (not only
/// Hermitian ones). Zero on the orthogonal complement of H1^sigma.
inline ComplexMatrix predictive_operator(const PureState& sigma, const ComplexMatrix& b2, const Tolerances& tol = {}) {
  if (!epr_algebra_contains(sigma, b2, tol))
    throw Error(ErrorCode::NotInAlgebra, "operator does not commute with L^dagger L");
  return schmidt_decompose(sigma, tol).imbedding.transport(b2);
}

inline Observable predictive_map(const PureState& sigma, const Observable& b2, const Tolerances& tol = {}) {
  return Observable(sigma.space1(), predictive_operator(sigma, b2.matrix(), tol), tol);
}

/// sigma = sum_j lambda_j^{1/2} sum_p U e_jp (x) e_jp, with e_jp the columns
/// of blocks[j]. The weights must satisfy sum_j dim(block_j) lambda_j = 1.
inline PureState construct_epr_state(std::span<const double> lambdas, std::span<const ComplexMatrix> blocks,
                                     const AntiunitaryImbedding& imbedding) {
  if (lambdas.size() != blocks.size() || lambdas.empty())
    throw Error(ErrorCode::InvalidArgument, "need one positive weight per block");
  const std::size_t d2 = imbedding.domain().dim;
  double total = 0.0;
  std::vector<ComplexVector> all;
  for (std::size_t j = 0; j < blocks.size(); ++j) {
    if (!(lambdas[j] > 0.0)) throw Error(ErrorCode::InvalidArgument, "weights must be strictly positive");
    if (blocks[j].rows() != d2) throw Error(ErrorCode::DimensionMismatch, "block vectors not in the imbedding domain");
    if (blocks[j].cols() == 0) throw Error(ErrorCode::InvalidArgument, "empty block");
    total += lambdas[j] * static_cast<double>(blocks[j].cols());
    for (std::size_t p = 0; p < blocks[j].cols(); ++p) all.push_back(blocks[j].column(p));
  }
  if (std::abs(total - 1.0) > 1e-10)
    throw Error(ErrorCode::WeightMismatch, "sum_j d_j lambda_j = " + std::to_string(total) + ", expected 1");
  const auto stacked = ComplexMatrix::from_columns(d2, all);
  if (isometry_defect(stacked) > kIsometryTolerance)
    throw Error(ErrorCode::BlocksNotOrthogonal, "block vectors are not orthonormal");
  if (imbedding.isometry_defect_on(stacked) > kIsometryTolerance)
    throw Error(ErrorCode::NotIsometry, "imbedding is not isometric on the span of the blocks");

  ComplexMatrix coeffs(imbedding.codomain().dim, d2);
  for (std::size_t j = 0; j < blocks.size(); ++j) {
    const double s = std::sqrt(lambdas[j]);
    const ComplexMatrix images = imbedding.apply_columns(blocks[j]);
    coeffs += s * (images * transpose(blocks[j]));
  }
  return PureState(imbedding.codomain(), imbedding.domain(), std::move(coeffs));
}

/// Dimension of {X : [X, B] = 0 for all B in obs}, from the null space of
/// sum_k K_k^dagger K_k with K_k = I (x) B_k^T - B_k (x) I acting on row-major vec(X).
/// The commutator map is complex-linear, so this is the complex dimension.
inline std::size_t commutant_dimension(std::span<const Observable> observables, const Tolerances& tol = {}) {
  if (observables.empty()) throw Error(ErrorCode::InvalidArgument, "need at least one observable");
  const std::size_t n = observables.front().dim();
  const auto id = ComplexMatrix::identity(n);
  ComplexMatrix m(n * n, n * n);
  for (const auto& b : observables) {
    if (b.dim() != n) throw Error(ErrorCode::DimensionMismatch, "observables act on different spaces");
    const ComplexMatrix k = kron(id, transpose(b.matrix())) - kron(b.matrix(), id);
    m += dagger(k) * k;
  }
  const auto eig = hermitian_eig(m, tol);
  const double cutoff = tol.commutator_tol * (1.0 + eig.values.back());
  return static_cast<std::size_t>(
      std::count_if(eig.values.begin(), eig.values.end(), [&](double v) { return v <= cutoff; }));
}

inline bool commutant_is_scalar(std::span<const Observable> observables, const Tolerances& tol = {}) {
  return commutant_dimension(observables, tol) == 1;
}

/// For a maximal EPR state returns the unique U with sigma = d^{-1/2} sum_j U e_j (x) e_j.
inline AntiunitaryImbedding bijection_check(const PureState& sigma, const Tolerances& tol = {}) {
  if (!sigma.is_normalized()) throw Error(ErrorCode::NotNormalized, "state must have unit norm");
  const auto dec = schmidt_decompose(sigma, tol);
  if (!dec.is_maximal())
    throw Error(ErrorCode::NotMaximalEpr, "L^dagger L has " + std::to_string(dec.lambdas.size()) +
                                              " distinct eigenvalues and kernel dimension " +
                                              std::to_string(dec.kernel_basis.cols()));
  const double d = static_cast<double>(sigma.dim2());
  return AntiunitaryImbedding::full(sigma.space2(), sigma.space1(), std::sqrt(d) * sigma.coeffs());
}

}  // namespace epr
