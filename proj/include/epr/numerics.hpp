#pragma once

// Dense complex matrices, Hermitian eigendecomposition (cyclic Jacobi),
// eigenvalue clustering and commutator norms.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "epr/error.hpp"

namespace epr {

using cplx = std::complex<double>;
using ComplexVector = std::vector<cplx>;

/// Row-major dense complex matrix. Entries must be finite.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_)
      throw Error(ErrorCode::ShapeMismatch, "entry count " + std::to_string(data_.size()) +
                                                " does not match " + std::to_string(rows_) + "x" +
                                                std::to_string(cols_));
  }
  ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) throw Error(ErrorCode::ShapeMismatch, "ragged matrix literal");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  static ComplexMatrix identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static ComplexMatrix diagonal(std::span<const double> values) {
    ComplexMatrix m(values.size(), values.size());
    for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
    return m;
  }

  static ComplexMatrix from_columns(std::size_t rows, const std::vector<ComplexVector>& columns) {
    ComplexMatrix m(rows, columns.size());
    for (std::size_t j = 0; j < columns.size(); ++j) {
      if (columns[j].size() != rows) throw Error(ErrorCode::ShapeMismatch, "column length mismatch");
      for (std::size_t i = 0; i < rows; ++i) m(i, j) = columns[j][i];
    }
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool is_square() const noexcept { return rows_ == cols_; }

  cplx& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<const cplx> data() const noexcept { return data_; }
  std::span<cplx> data() noexcept { return data_; }

  ComplexVector column(std::size_t j) const {
    ComplexVector v(rows_);
    for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
    return v;
  }

  /// Columns [first, first + count) as a new matrix.
  ComplexMatrix columns(std::size_t first, std::size_t count) const {
    ComplexMatrix m(rows_, count);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < count; ++j) m(i, j) = (*this)(i, first + j);
    return m;
  }

  bool all_finite() const {
    return std::all_of(data_.begin(), data_.end(),
                       [](const cplx& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
  }

  ComplexMatrix& operator+=(const ComplexMatrix& o) {
    require_same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  ComplexMatrix& operator-=(const ComplexMatrix& o) {
    require_same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  ComplexMatrix& operator*=(cplx s) {
    for (auto& z : data_) z *= s;
    return *this;
  }

  friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

 private:
  void require_same_shape(const ComplexMatrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_)
      throw Error(ErrorCode::ShapeMismatch, "matrix shapes differ");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> data_;
};

inline ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
inline ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
inline ComplexMatrix operator*(cplx s, ComplexMatrix a) { return a *= s; }
inline ComplexMatrix operator*(ComplexMatrix a, cplx s) { return a *= s; }

inline ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows())
    throw Error(ErrorCode::ShapeMismatch, "cannot multiply " + std::to_string(a.rows()) + "x" +
                                              std::to_string(a.cols()) + " by " + std::to_string(b.rows()) +
                                              "x" + std::to_string(b.cols()));
  ComplexMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const cplx aik = a(i, k);
      if (aik == cplx{}) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

inline ComplexVector operator*(const ComplexMatrix& a, std::span<const cplx> v) {
  if (a.cols() != v.size()) throw Error(ErrorCode::ShapeMismatch, "matrix-vector size mismatch");
  ComplexVector out(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out[i] += a(i, j) * v[j];
  return out;
}

inline ComplexMatrix transpose(const ComplexMatrix& m) {
  ComplexMatrix t(m.cols(), m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) t(j, i) = m(i, j);
  return t;
}

inline ComplexMatrix conj(const ComplexMatrix& m) {
  ComplexMatrix c = m;
  for (auto& z : c.data()) z = std::conj(z);
  return c;
}

/// Conjugate transpose.
inline ComplexMatrix dagger(const ComplexMatrix& m) {
  ComplexMatrix t(m.cols(), m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) t(j, i) = std::conj(m(i, j));
  return t;
}

inline ComplexVector conj(std::span<const cplx> v) {
  ComplexVector c(v.begin(), v.end());
  for (auto& z : c) z = std::conj(z);
  return c;
}

/// Kronecker product; row (i, p) of a (x) b is stored at i * b.rows() + p.
inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix k(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      for (std::size_t p = 0; p < b.rows(); ++p)
        for (std::size_t q = 0; q < b.cols(); ++q) k(i * b.rows() + p, j * b.cols() + q) = a(i, j) * b(p, q);
  return k;
}

inline double frobenius_norm(const ComplexMatrix& m) {
  double s = 0.0;
  for (const auto& z : m.data()) s += std::norm(z);
  return std::sqrt(s);
}

inline double frobenius_distance(const ComplexMatrix& a, const ComplexMatrix& b) { return frobenius_norm(a - b); }

inline cplx trace(const ComplexMatrix& m) {
  if (!m.is_square()) throw Error(ErrorCode::NonSquare, "trace of non-square matrix");
  cplx t{};
  for (std::size_t i = 0; i < m.rows(); ++i) t += m(i, i);
  return t;
}

/// Scalar product linear in the first argument, conjugate linear in the second.
inline cplx inner(std::span<const cplx> u, std::span<const cplx> v) {
  if (u.size() != v.size()) throw Error(ErrorCode::ShapeMismatch, "vector lengths differ");
  cplx s{};
  for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * std::conj(v[i]);
  return s;
}

inline double norm(std::span<const cplx> v) {
  double s = 0.0;
  for (const auto& z : v) s += std::norm(z);
  return std::sqrt(s);
}

/// ||M - M^dagger||_F
inline double hermiticity_defect(const ComplexMatrix& m) { return frobenius_norm(m - dagger(m)); }

/// ||Q^dagger Q - I||_F
inline double isometry_defect(const ComplexMatrix& q) {
  return frobenius_norm(dagger(q) * q - ComplexMatrix::identity(q.cols()));
}

// ---------------------------------------------------------------------------

struct Tolerances {
  double eigen_cluster = 1e-8;
  double zero_threshold = 1e-10;
  double commutator_tol = 1e-9;

  void validate() const {
    if (!(eigen_cluster >= 0.0) || !(zero_threshold >= 0.0) || !(commutator_tol >= 0.0))
      throw Error(ErrorCode::InvalidArgument, "tolerances must be nonnegative");
  }
};

struct EigenResult {
  std::vector<double> values;  // ascending
  ComplexMatrix vectors;       // columns are eigenvectors
};

inline constexpr int kJacobiMaxSweeps = 100;

/// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
///
/// Each rotation first removes the phase of the pivot element, then applies a
/// real symmetric Jacobi rotation, so the accumulated transform is unitary.
inline EigenResult hermitian_eig(const ComplexMatrix& m, const Tolerances& tol = {}) {
  if (!m.is_square()) throw Error(ErrorCode::NonSquare, "hermitian_eig needs a square matrix");
  if (!m.all_finite()) throw Error(ErrorCode::InvariantError, "matrix has non-finite entries");
  const double mnorm = frobenius_norm(m);
  if (hermiticity_defect(m) > tol.zero_threshold * (1.0 + mnorm))
    throw Error(ErrorCode::NotHermitian, "||M - M^dagger||_F = " + std::to_string(hermiticity_defect(m)));

  const std::size_t n = m.rows();
  ComplexMatrix a = 0.5 * (m + dagger(m));
  ComplexMatrix v = ComplexMatrix::identity(n);

  auto off_diagonal = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += std::norm(a(i, j));
    return std::sqrt(2.0 * s);
  };

  const double target = std::numeric_limits<double>::epsilon() * static_cast<double>(n) * (mnorm > 0.0 ? mnorm : 1.0);
  bool converged = off_diagonal() <= target;
  for (int sweep = 0; sweep < kJacobiMaxSweeps && !converged; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const cplx g = a(p, q);
        const double mag = std::abs(g);
        if (mag == 0.0) continue;
        const cplx phase = g / mag;  // e^{i phi}
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double tau = (aqq - app) / (2.0 * mag);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        // R restricted to (p, q): [[c, s], [-s e^{-i phi}, c e^{-i phi}]]
        const cplx rpp = c, rpq = s;
        const cplx rqp = -s * std::conj(phase), rqq = c * std::conj(phase);
        for (std::size_t k = 0; k < n; ++k) {  // A <- A R
          const cplx akp = a(k, p), akq = a(k, q);
          a(k, p) = akp * rpp + akq * rqp;
          a(k, q) = akp * rpq + akq * rqq;
        }
        for (std::size_t k = 0; k < n; ++k) {  // A <- R^dagger A
          const cplx apk = a(p, k), aqk = a(q, k);
          a(p, k) = std::conj(rpp) * apk + std::conj(rqp) * aqk;
          a(q, k) = std::conj(rpq) * apk + std::conj(rqq) * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {  // V <- V R
          const cplx vkp = v(k, p), vkq = v(k, q);
          v(k, p) = vkp * rpp + vkq * rqp;
          v(k, q) = vkp * rpq + vkq * rqq;
        }
      }
    }
    converged = off_diagonal() <= target;
  }
  if (!converged)
    throw Error(ErrorCode::NoConvergence, "Jacobi iteration exceeded " + std::to_string(kJacobiMaxSweeps) + " sweeps");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });

  EigenResult out{std::vector<double>(n), ComplexMatrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]).real();
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  return out;
}

struct EigenCluster {
  double value;       // cluster mean
  std::size_t first;  // index range [first, first + count)
  std::size_t count;
};

/// Groups consecutive ascending values whose gap is <= eigen_cluster * (1 + |value|).
inline std::vector<EigenCluster> cluster_eigenvalues(std::span<const double> values, const Tolerances& tol = {}) {
  std::vector<EigenCluster> clusters;
  std::size_t start = 0;
  for (std::size_t k = 1; k <= values.size(); ++k) {
    const bool split = k == values.size() ||
                       values[k] - values[k - 1] > tol.eigen_cluster * (1.0 + std::abs(values[k - 1]));
    if (!split) continue;
    const double sum = std::accumulate(values.begin() + start, values.begin() + k, 0.0);
    clusters.push_back({sum / static_cast<double>(k - start), start, k - start});
    start = k;
  }
  return clusters;
}

inline ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (!a.is_square() || !b.is_square() || a.rows() != b.rows())
    throw Error(ErrorCode::ShapeMismatch, "commutator needs square matrices of equal size");
  return a * b - b * a;
}

/// ||AB - BA||_F
inline double commutator_norm(const ComplexMatrix& a, const ComplexMatrix& b) {
  return frobenius_norm(commutator(a, b));
}

/// Orthogonal projector onto the span of the (orthonormal) columns of q.
inline ComplexMatrix projector(const ComplexMatrix& q) { return q * dagger(q); }

/// Positive semidefinite square root of a Hermitian PSD matrix.
inline ComplexMatrix psd_sqrt(const ComplexMatrix& m, const Tolerances& tol = {}) {
  auto eig = hermitian_eig(m, tol);
  const std::size_t n = m.rows();
  ComplexMatrix scaled = eig.vectors;
  for (std::size_t k = 0; k < n; ++k) {
    const double s = std::sqrt(std::max(eig.values[k], 0.0));
    for (std::size_t i = 0; i < n; ++i) scaled(i, k) *= s;
  }
  return scaled * dagger(eig.vectors);
}

}  // namespace epr
