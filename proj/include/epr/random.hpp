#pragma once

// Seeded generators for random states, unitaries and Hermitian matrices.

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <random>

#include "epr/numerics.hpp"

namespace epr {

class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  double normal() { return normal_(engine_); }
  cplx complex_normal() { return {normal(), normal()}; }

  std::size_t index(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(engine_);
  }

  ComplexMatrix ginibre(std::size_t rows, std::size_t cols) {
    ComplexMatrix m(rows, cols);
    for (auto& z : m.data()) z = complex_normal();
    return m;
  }

  ComplexVector vector(std::size_t n) {
    ComplexVector v(n);
    for (auto& z : v) z = complex_normal();
    return v;
  }

  ComplexVector unit_vector(std::size_t n) {
    auto v = vector(n);
    const double s = norm(v);
    for (auto& z : v) z /= s;
    return v;
  }

  /// Random Hermitian matrix (G + G^dagger) / 2.
  ComplexMatrix hermitian(std::size_t n) {
    const auto g = ginibre(n, n);
    return 0.5 * (g + dagger(g));
  }

  /// rows x cols matrix with orthonormal columns (Haar-distributed via
  /// Gram-Schmidt with reorthogonalization on a Ginibre matrix), rows >= cols.
  ComplexMatrix isometry(std::size_t rows, std::size_t cols) {
    ComplexMatrix q = ginibre(rows, cols);
    for (std::size_t j = 0; j < cols; ++j) {
      for (int pass = 0; pass < 2; ++pass)
        for (std::size_t k = 0; k < j; ++k) {
          cplx proj{};
          for (std::size_t i = 0; i < rows; ++i) proj += std::conj(q(i, k)) * q(i, j);
          for (std::size_t i = 0; i < rows; ++i) q(i, j) -= proj * q(i, k);
        }
      double s = 0.0;
      for (std::size_t i = 0; i < rows; ++i) s += std::norm(q(i, j));
      s = std::sqrt(s);
      for (std::size_t i = 0; i < rows; ++i) q(i, j) /= s;
    }
    return q;
  }

  ComplexMatrix unitary(std::size_t n) { return isometry(n, n); }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace epr
