#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "epr/epr.hpp"
#include "test_support.hpp"

using namespace epr;
using Catch::Approx;

namespace {

std::vector<FiniteAbelianGroup> sample_groups() {
  return {FiniteAbelianGroup({1}),    FiniteAbelianGroup({2}),    FiniteAbelianGroup({3}),
          FiniteAbelianGroup({5}),    FiniteAbelianGroup({2, 3}), FiniteAbelianGroup({4, 4}),
          FiniteAbelianGroup({2, 2, 2}), FiniteAbelianGroup({8, 8}), FiniteAbelianGroup({3, 7})};
}

ComplexMatrix diag2(double a, double b) {
  const std::vector<double> d{a, b};
  return ComplexMatrix::diagonal(d);
}

}  // namespace

TEST_CASE("group parsing and enumeration") {
  const auto g = FiniteAbelianGroup::parse("2x3");
  CHECK(g.order() == 6);
  CHECK(g.spec() == "2x3");
  CHECK(g.element(0) == GroupElement{0, 0});
  CHECK(g.element(1) == GroupElement{0, 1});
  CHECK(g.element(3) == GroupElement{1, 0});
  for (std::size_t k = 0; k < g.order(); ++k) CHECK(g.index(g.element(k)) == k);
  CHECK(g.add(GroupElement{1, 2}, GroupElement{1, 2}) == GroupElement{0, 1});
  CHECK(FiniteAbelianGroup::parse("5").order() == 5);
  CHECK_THROWS_AS(FiniteAbelianGroup::parse("2x"), Error);
  CHECK_THROWS_AS(FiniteAbelianGroup::parse("x3"), Error);
  CHECK_THROWS_AS(FiniteAbelianGroup::parse("2xx3"), Error);
  CHECK_THROWS_AS(FiniteAbelianGroup::parse("0"), Error);
  CHECK_THROWS_AS(FiniteAbelianGroup::parse("abc"), Error);
}

TEST_CASE("characters are orthonormal and multiplicative") {
  for (const auto& g : sample_groups()) {
    const std::size_t n = g.order();
    REQUIRE(n <= 64);
    for (std::size_t y = 0; y < n; ++y)
      for (std::size_t yp = 0; yp < n; ++yp) {
        const auto ip = weighted_inner(character_function(g, y), character_function(g, yp));
        CHECK(std::abs(ip - cplx(y == yp ? 1.0 : 0.0)) < 1e-12);
      }
    for (std::size_t y = 0; y < n; y += 3)
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; b += 2) {
          const auto ye = g.element(y), ae = g.element(a), be = g.element(b);
          const auto lhs = character_value(g, ye, g.add(ae, be));
          CHECK(std::abs(lhs - character_value(g, ye, ae) * character_value(g, ye, be)) < 1e-12);
          CHECK(std::abs(std::abs(lhs) - 1.0) < 1e-12);
        }
    // scaled deltas are orthonormal under the weighted product
    const double s = std::sqrt(static_cast<double>(n));
    auto scaled = [&](std::size_t x) {
      auto f = delta_function(g, x);
      for (auto& v : f) v *= s;
      return f;
    };
    CHECK(std::abs(weighted_inner(scaled(0), scaled(0)) - 1.0) < 1e-12);
    if (n > 1) CHECK(std::abs(weighted_inner(scaled(0), scaled(1))) < 1e-12);
    CHECK(isometry_defect(character_basis(g)) < 1e-12);
  }
}

TEST_CASE("bohm_state examples") {
  const FiniteAbelianGroup z2({2});
  const double s = 1.0 / std::sqrt(2.0);
  const auto sigma = bohm_state(z2);
  CHECK(frobenius_distance(sigma.coeffs(), s * ComplexMatrix::identity(2)) < 1e-15);
  // Z2 characters are real: xi_0 = (1, 1), xi_1 = (1, -1) as functions
  const auto f = character_basis(z2);
  CHECK(std::abs(f(1, 1) + s) < 1e-15);
  CHECK(std::abs(f(0, 1) - s) < 1e-15);
  CHECK(verify_star_identity(z2).residual < 1e-12);

  CHECK(verify_star_identity(FiniteAbelianGroup({3})).residual < 1e-12);

  const auto trivial = bohm_state(FiniteAbelianGroup({1}));
  CHECK(trivial.dim1() == 1);
  CHECK(trivial.norm() == Approx(1.0));
  CHECK(schmidt_decompose(trivial).rank() == 1);
}

TEST_CASE("star identity holds across groups") {
  for (const auto& spec : {"2", "3", "5", "2x3", "4x4", "3x7", "2x2x2"}) {
    const auto g = FiniteAbelianGroup::parse(spec);
    const auto star = verify_star_identity(g);
    CHECK(star.residual < 1e-12);
    CHECK(star.delta_form.is_normalized());
    const auto dec = schmidt_decompose(star.delta_form);
    REQUIRE(dec.lambdas.size() == 1);
    CHECK(dec.lambdas[0] == Approx(1.0 / static_cast<double>(g.order())));
    CHECK(dec.mults[0] == g.order());
  }
}

TEST_CASE("position and momentum observables") {
  const FiniteAbelianGroup z3({3});
  const std::vector<double> a{0.0, 1.0, 2.0};
  const auto x = position_observable(z3, a);
  CHECK(x.matrix() == ComplexMatrix::diagonal(a));

  const auto y = momentum_observable(z3, a);
  // column y of the discrete Fourier matrix is an eigenvector with value b_y
  const auto f = character_basis(z3);
  for (std::size_t k = 0; k < 3; ++k) {
    const auto col = f.column(k);
    const auto image = y.matrix() * std::span<const cplx>(col);
    for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(image[i] - a[k] * col[i]) < 1e-12);
  }
  CHECK(hermiticity_defect(y.matrix()) < 1e-14);

  CHECK(default_labels(FiniteAbelianGroup({5})) == std::vector<double>{0, 1, 2, -2, -1});
  CHECK(default_labels(FiniteAbelianGroup({2, 3})) == std::vector<double>{0, 1, -1, -3, -2, -4});

  const std::vector<double> dup{1.0, 1.0, 2.0};
  try {
    position_observable(z3, dup);
    FAIL("expected DuplicateValues");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DuplicateValues);
  }
  CHECK_THROWS_AS(momentum_observable(z3, dup), Error);
}

TEST_CASE("the Weyl pair is irreducible") {
  for (int n = 2; n <= 5; ++n) {
    const FiniteAbelianGroup g({n});
    const std::vector<Observable> pair{position_observable(g), momentum_observable(g)};
    CHECK(commutant_is_scalar(pair));
    const std::vector<Observable> single{position_observable(g)};
    CHECK(commutant_dimension(single) == static_cast<std::size_t>(n));
  }
  const FiniteAbelianGroup z2z2({2, 2});
  const std::vector<Observable> pair{position_observable(z2z2), momentum_observable(z2z2)};
  CHECK(commutant_is_scalar(pair));
}

TEST_CASE("symmetry tables are concentrated on the diagonal") {
  const auto t3 = epr_symmetry_table(FiniteAbelianGroup({3}));
  for (double a : {-1.0, 0.0, 1.0}) {
    CHECK(t3.position.prob(a, a) == Approx(1.0 / 3.0).margin(1e-12));
    for (double b : {-1.0, 0.0, 1.0})
      if (a != b) CHECK(t3.position.prob(a, b) < 1e-12);
  }

  const auto t2 = epr_symmetry_table(FiniteAbelianGroup({2}));
  CHECK(t2.momentum.prob(0.0, 0.0) == Approx(0.5).margin(1e-12));
  CHECK(t2.momentum.prob(-1.0, -1.0) == Approx(0.5).margin(1e-12));
  CHECK(t2.momentum_off_graph < 1e-10);

  const auto t1 = epr_symmetry_table(FiniteAbelianGroup({1}));
  REQUIRE(t1.position.support.size() == 1);
  CHECK(t1.position.support[0].p == Approx(1.0));

  for (const auto& spec : {"2", "3", "5", "2x3", "4x4"}) {
    const auto t = epr_symmetry_table(FiniteAbelianGroup::parse(spec));
    CHECK(t.position_off_graph < 1e-10);
    CHECK(t.momentum_off_graph < 1e-10);
    CHECK(t.position.total() == Approx(1.0).margin(1e-10));
    CHECK(t.momentum.total() == Approx(1.0).margin(1e-10));
  }
}

TEST_CASE("spin system states") {
  const FiniteAbelianGroup z2({2});
  const auto obs = spin_observables(z2, 2);

  SECTION("rho = I / N is maximal") {
    const auto sigma = spin_system_state(z2, 2, 0.5 * ComplexMatrix::identity(2));
    CHECK(sigma.is_normalized());
    const auto dec = schmidt_decompose(sigma);
    CHECK(dec.is_maximal());
    CHECK(dec.lambdas[0] == Approx(0.25));
    CHECK(is_epr(sigma, obs).is_epr);
  }
  SECTION("rank-one rho puts the spin factor in the kernel") {
    const auto sigma = spin_system_state(z2, 2, diag2(1.0, 0.0));
    const auto dec = schmidt_decompose(sigma);
    REQUIRE(dec.lambdas.size() == 1);
    CHECK(dec.lambdas[0] == Approx(0.5));
    CHECK(dec.mults[0] == 2);
    CHECK(dec.kernel_basis.cols() == 2);
    // H2^sigma = L^2(G) (x) e_1: every support vector has no e_2 component
    const auto s = dec.support_basis();
    for (std::size_t k = 0; k < s.cols(); ++k) {
      CHECK(std::abs(s(1, k)) < 1e-12);
      CHECK(std::abs(s(3, k)) < 1e-12);
    }
    CHECK(is_epr(sigma, obs).is_epr);
  }
  SECTION("rho = diag(0.9, 0.1) gives two clusters of multiplicity |G|") {
    const auto sigma = spin_system_state(z2, 2, diag2(0.9, 0.1));
    const auto dec = schmidt_decompose(sigma);
    REQUIRE(dec.lambdas.size() == 2);
    CHECK(dec.lambdas[0] == Approx(0.45));
    CHECK(dec.lambdas[1] == Approx(0.05));
    CHECK(dec.mults == std::vector<std::size_t>{2, 2});
    CHECK(is_epr(sigma, obs).is_epr);
  }
  SECTION("gram lies in 1 (x) M") {
    RandomSource rng(testing::kDefaultSeed);
    const auto h = rng.ginibre(3, 3);
    auto rho = h * dagger(h);
    rho = (1.0 / trace(rho).real()) * rho;
    const FiniteAbelianGroup z3({3});
    const auto sigma = spin_system_state(z3, 3, rho);
    const auto g = gram_matrix(canonical_map(sigma));
    CHECK(frobenius_distance(g, (1.0 / 3.0) * kron(ComplexMatrix::identity(3), rho)) < 1e-12);
    CHECK(is_epr(sigma, spin_observables(z3, 3)).is_epr);
  }
  SECTION("errors") {
    CHECK_THROWS_AS(spin_system_state(z2, 2, diag2(1.5, -0.5)), Error);
    CHECK_THROWS_AS(spin_system_state(z2, 2, diag2(0.5, 0.2)), Error);
    CHECK_THROWS_AS(spin_system_state(z2, 3, diag2(0.5, 0.5)), Error);
    try {
      spin_system_state(z2, 2, diag2(1.5, -0.5));
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NotPositive);
    }
  }
}

TEST_CASE("EPR property does not fix the Schmidt spectrum") {
  const FiniteAbelianGroup z2({2});
  const auto obs = spin_observables(z2, 2);
  const auto s1 = spin_system_state(z2, 2, 0.5 * ComplexMatrix::identity(2));
  const auto s2 = spin_system_state(z2, 2, diag2(0.8, 0.2));
  CHECK(is_epr(s1, obs).is_epr);
  CHECK(is_epr(s2, obs).is_epr);
  const auto e1 = hermitian_eig(gram_matrix(canonical_map(s1))).values;
  const auto e2 = hermitian_eig(gram_matrix(canonical_map(s2))).values;
  double diff = 0.0;
  for (std::size_t k = 0; k < e1.size(); ++k) diff = std::max(diff, std::abs(e1[k] - e2[k]));
  CHECK(diff > 1e-3);
  CHECK_FALSE(commutant_is_scalar(obs));
  // a generic (non-block) state is not EPR for the same pair
  RandomSource rng(testing::kDefaultSeed + 1);
  CHECK_FALSE(is_epr(testing::random_state(rng, 4, 4), obs).is_epr);
}
