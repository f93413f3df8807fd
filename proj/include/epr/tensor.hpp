#pragma once

// Bipartite pure states and their canonical conjugate-linear operators.
//
// A state sigma in H1 (x) H2 is stored as its coefficient matrix C over fixed
// product bases: C(i, j) is the coefficient of f_i (x) e_j. The canonical map
// sigma -> L_sigma sends e_j to the j-th column of C and extends
// conjugate-linearly, so L_sigma acts as u -> C * conj(u).

#include <cmath>
#include <cstddef>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "epr/numerics.hpp"

namespace epr {

struct HilbertSpace {
  std::size_t dim = 1;
  std::vector<std::string> basis_labels;

  /// Space of dimension `dim` with labels "0", "1", ...
  static HilbertSpace standard(std::size_t dim) {
    HilbertSpace h;
    h.dim = dim;
    for (std::size_t i = 0; i < dim; ++i) h.basis_labels.push_back(std::to_string(i));
    h.validate();
    return h;
  }

  static HilbertSpace labelled(std::vector<std::string> labels) {
    HilbertSpace h;
    h.dim = labels.size();
    h.basis_labels = std::move(labels);
    h.validate();
    return h;
  }

  void validate() const {
    if (dim < 1) throw Error(ErrorCode::InvalidArgument, "Hilbert space dimension must be >= 1");
    if (basis_labels.size() != dim) throw Error(ErrorCode::InvalidArgument, "basis label count != dim");
    if (std::set<std::string>(basis_labels.begin(), basis_labels.end()).size() != dim)
      throw Error(ErrorCode::InvalidArgument, "basis labels must be distinct");
  }

  friend bool operator==(const HilbertSpace& a, const HilbertSpace& b) { return a.dim == b.dim; }
};

inline constexpr double kNormalizedTolerance = 1e-10;

class PureState {
 public:
  PureState(HilbertSpace space1, HilbertSpace space2, ComplexMatrix coeffs)
      : space1_(std::move(space1)), space2_(std::move(space2)), coeffs_(std::move(coeffs)) {
    if (coeffs_.rows() != space1_.dim || coeffs_.cols() != space2_.dim)
      throw Error(ErrorCode::ShapeMismatch, "coefficient matrix must be dim1 x dim2");
    if (!coeffs_.all_finite()) throw Error(ErrorCode::InvariantError, "state has non-finite coefficients");
  }

  explicit PureState(ComplexMatrix coeffs)
      : PureState(HilbertSpace::standard(coeffs.rows()), HilbertSpace::standard(coeffs.cols()), std::move(coeffs)) {}

  const HilbertSpace& space1() const noexcept { return space1_; }
  const HilbertSpace& space2() const noexcept { return space2_; }
  const ComplexMatrix& coeffs() const noexcept { return coeffs_; }
  std::size_t dim1() const noexcept { return space1_.dim; }
  std::size_t dim2() const noexcept { return space2_.dim; }

  double norm_squared() const {
    const double n = frobenius_norm(coeffs_);
    return n * n;
  }
  double norm() const { return frobenius_norm(coeffs_); }
  bool is_normalized() const { return std::abs(norm() - 1.0) <= kNormalizedTolerance; }

  PureState normalized() const {
    const double n = norm();
    if (n == 0.0) throw Error(ErrorCode::ZeroState, "cannot normalize the zero state");
    return PureState(space1_, space2_, (1.0 / n) * coeffs_);
  }

  /// Coordinates in the product basis, index i * dim2 + j.
  ComplexVector vector() const { return ComplexVector(coeffs_.data().begin(), coeffs_.data().end()); }

 private:
  HilbertSpace space1_;
  HilbertSpace space2_;
  ComplexMatrix coeffs_;
};

/// Conjugate-linear map H2 -> H1 acting as u -> matrix * conj(u).
class ConjugateLinearMap {
 public:
  ConjugateLinearMap(HilbertSpace domain, HilbertSpace codomain, ComplexMatrix matrix)
      : domain_(std::move(domain)), codomain_(std::move(codomain)), matrix_(std::move(matrix)) {
    if (matrix_.rows() != codomain_.dim || matrix_.cols() != domain_.dim)
      throw Error(ErrorCode::ShapeMismatch, "conjugate-linear map matrix must be codomain x domain");
    if (!matrix_.all_finite()) throw Error(ErrorCode::InvariantError, "map has non-finite entries");
  }

  const HilbertSpace& domain() const noexcept { return domain_; }
  const HilbertSpace& codomain() const noexcept { return codomain_; }
  const ComplexMatrix& matrix() const noexcept { return matrix_; }

  double hilbert_schmidt_norm() const { return frobenius_norm(matrix_); }

 private:
  HilbertSpace domain_;
  HilbertSpace codomain_;
  ComplexMatrix matrix_;
};

struct SpectralBlock {
  double value;
  ComplexMatrix basis;  // orthonormal columns spanning the eigenspace
};

/// Hermitian operator with its clustered spectral decomposition, computed once.
class Observable {
 public:
  Observable(HilbertSpace space, ComplexMatrix matrix, const Tolerances& tol = {})
      : space_(std::move(space)), matrix_(std::move(matrix)) {
    if (!matrix_.is_square() || matrix_.rows() != space_.dim)
      throw Error(ErrorCode::ShapeMismatch, "observable matrix must be dim x dim");
    auto eig = hermitian_eig(matrix_, tol);
    matrix_ = 0.5 * (matrix_ + dagger(matrix_));
    eigenvalues_ = eig.values;
    for (const auto& c : cluster_eigenvalues(eig.values, tol))
      blocks_.push_back({c.value, eig.vectors.columns(c.first, c.count)});
  }

  explicit Observable(ComplexMatrix matrix, const Tolerances& tol = {})
      : Observable(HilbertSpace::standard(matrix.rows()), std::move(matrix), tol) {}

  const HilbertSpace& space() const noexcept { return space_; }
  const ComplexMatrix& matrix() const noexcept { return matrix_; }
  std::size_t dim() const noexcept { return space_.dim; }
  const std::vector<double>& eigenvalues() const noexcept { return eigenvalues_; }
  const std::vector<SpectralBlock>& blocks() const noexcept { return blocks_; }

  ComplexMatrix spectral_projector(std::size_t block) const { return projector(blocks_.at(block).basis); }

 private:
  HilbertSpace space_;
  ComplexMatrix matrix_;
  std::vector<double> eigenvalues_;
  std::vector<SpectralBlock> blocks_;
};

// ---------------------------------------------------------------------------

/// sigma -> L_sigma. The stored coefficient matrix already is the matrix of
/// L_sigma (its columns are L_sigma e_n).
inline ConjugateLinearMap canonical_map(const PureState& sigma) {
  return ConjugateLinearMap(sigma.space2(), sigma.space1(), sigma.coeffs());
}

/// sigma = sum_n L e_n (x) e_n
inline PureState inverse_canonical(const ConjugateLinearMap& l) {
  return PureState(l.codomain(), l.domain(), l.matrix());
}

/// Adjoint defined by (L u, v) = (L^dagger v, u). For the conjugate-linear
/// action u -> A conj(u) this is the plain transpose of A.
inline ConjugateLinearMap adjoint(const ConjugateLinearMap& l) {
  return ConjugateLinearMap(l.codomain(), l.domain(), transpose(l.matrix()));
}

inline ComplexVector apply_conjugate_linear(const ConjugateLinearMap& l, std::span<const cplx> u) {
  if (u.size() != l.domain().dim) throw Error(ErrorCode::ShapeMismatch, "vector is not in the domain space");
  const auto cu = conj(u);
  return l.matrix() * std::span<const cplx>(cu);
}

/// Matrix of the linear operator L^dagger L on H2: A^T conj(A).
inline ComplexMatrix gram_matrix(const ConjugateLinearMap& l) { return transpose(l.matrix()) * conj(l.matrix()); }

inline Observable gram(const ConjugateLinearMap& l, const Tolerances& tol = {}) {
  return Observable(l.domain(), gram_matrix(l), tol);
}

struct NormIdentity {
  double lhs;  // ||sigma||^2
  double rhs;  // Tr(L^dagger L)
};

inline NormIdentity state_norm_identity(const PureState& sigma) {
  return {sigma.norm_squared(), trace(gram_matrix(canonical_map(sigma))).real()};
}

/// Re-assembles sum_m L f_m (x) f_m over the orthonormal columns f_m of `basis`.
/// For any orthonormal basis of H2 this reproduces the state of L.
inline PureState reassemble(const ConjugateLinearMap& l, const ComplexMatrix& basis) {
  if (basis.rows() != l.domain().dim) throw Error(ErrorCode::ShapeMismatch, "basis vectors not in domain");
  ComplexMatrix coeffs(l.codomain().dim, l.domain().dim);
  for (std::size_t m = 0; m < basis.cols(); ++m) {
    const auto fm = basis.column(m);
    const auto image = apply_conjugate_linear(l, fm);
    for (std::size_t i = 0; i < coeffs.rows(); ++i)
      for (std::size_t j = 0; j < coeffs.cols(); ++j) coeffs(i, j) += image[i] * fm[j];
  }
  return PureState(l.codomain(), l.domain(), std::move(coeffs));
}

}  // namespace epr
