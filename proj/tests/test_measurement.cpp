#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>

#include "epr/epr.hpp"
#include "test_support.hpp"

using namespace epr;
using Catch::Approx;

namespace {

DiscreteJointDistribution bohm_joint() {
  const Observable z(testing::pauli_z());
  return joint_distribution(testing::bohm_phi(), z, z);
}

const GraphMap kIdentity = [](double a) -> std::optional<double> { return a; };
const GraphMap kNegate = [](double a) -> std::optional<double> { return -a; };

// Independent oracle for the H1 marginal: ||(E_a (x) I) psi||^2 on the full
// tensor vector.
double marginal_oracle(const PureState& sigma, const ComplexMatrix& ea) {
  const auto big = kron(ea, ComplexMatrix::identity(sigma.dim2()));
  const auto v = sigma.vector();
  const auto out = big * std::span<const cplx>(v);
  return norm(out) * norm(out);
}

}  // namespace

TEST_CASE("Bohm spin-z joint distribution") {
  const auto p = bohm_joint();
  CHECK(p.prob(1.0, -1.0) == Approx(0.5).margin(1e-12));
  CHECK(p.prob(-1.0, 1.0) == Approx(0.5).margin(1e-12));
  CHECK(p.prob(1.0, 1.0) < 1e-12);
  CHECK(p.prob(-1.0, -1.0) < 1e-12);
  CHECK_NOTHROW(p.validate());
}

TEST_CASE("product state gives independent marginals") {
  const PureState product(ComplexMatrix{{1.0, 0.0}, {0.0, 0.0}});
  const Observable z(testing::pauli_z());
  const auto p = joint_distribution(product, z, z);
  CHECK(p.prob(1.0, 1.0) == Approx(1.0));
  CHECK(p.total() == Approx(1.0));

  RandomSource rng(testing::kDefaultSeed);
  const auto u = rng.unit_vector(3);
  const auto v = rng.unit_vector(4);
  ComplexMatrix c(3, 4);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 4; ++j) c(i, j) = u[i] * v[j];
  const PureState sep(c);
  const Observable a1(rng.hermitian(3)), b2(rng.hermitian(4));
  const auto joint = joint_distribution(sep, a1, b2);
  const auto pa = joint.marginal_a();
  const auto pb = joint.marginal_b();
  for (const auto& x : pa)
    for (const auto& y : pb) CHECK(joint.prob(x.value, y.value) == Approx(x.p * y.p).margin(1e-12));
  // conditionals equal the b-marginal
  for (const auto& cond : conditional_family(joint).entries)
    for (const auto& y : pb) {
      double q = 0.0;
      for (const auto& vm : cond.q)
        if (values_match(vm.value, y.value)) q = vm.p;
      CHECK(q == Approx(y.p).margin(1e-10));
    }
}

TEST_CASE("joint distribution matches the full-tensor oracle") {
  RandomSource rng(testing::kDefaultSeed + 1);
  SECTION("3 x 3") {
    const auto sigma = testing::random_state(rng, 3, 3);
    const Observable a1(rng.hermitian(3)), b2(rng.hermitian(3));
    CHECK(testing::max_joint_discrepancy(joint_distribution(sigma, a1, b2),
                                         testing::brute_force_joint(sigma, a1.matrix(), b2.matrix())) < 1e-10);
  }
  SECTION("random shapes with degenerate spectra") {
    for (int t = 0; t < 100; ++t) {
      const std::size_t d1 = rng.index(1, 8);
      const std::size_t d2 = rng.index(1, 64 / d1);
      const auto sigma = testing::random_state(rng, d1, d2);
      std::vector<double> s1(d1), s2(d2);
      for (auto& x : s1) x = static_cast<double>(rng.index(0, 3));
      for (auto& x : s2) x = static_cast<double>(rng.index(0, 3)) - 1.0;
      const Observable a1(testing::random_hermitian_with_spectrum(rng, s1));
      const Observable b2(testing::random_hermitian_with_spectrum(rng, s2));
      const auto joint = joint_distribution(sigma, a1, b2);
      CHECK_NOTHROW(joint.validate());
      CHECK(testing::max_joint_discrepancy(joint, testing::brute_force_joint(sigma, a1.matrix(), b2.matrix())) < 1e-10);
    }
  }
}

TEST_CASE("marginals agree with single-observable distributions") {
  RandomSource rng(testing::kDefaultSeed + 2);
  for (int t = 0; t < 20; ++t) {
    const auto sigma = testing::random_state(rng, rng.index(1, 6), rng.index(1, 6));
    const Observable a1(rng.hermitian(sigma.dim1())), b2(rng.hermitian(sigma.dim2()));
    const auto joint = joint_distribution(sigma, a1, b2);
    const auto pa = joint.marginal_a();
    REQUIRE(pa.size() == a1.blocks().size());
    for (std::size_t k = 0; k < pa.size(); ++k) {
      CHECK(pa[k].value == Approx(a1.blocks()[k].value));
      CHECK(pa[k].p == Approx(marginal_oracle(sigma, a1.spectral_projector(k))).margin(1e-12));
    }
    const auto h1 = distribution_h1(sigma, a1);
    const auto h2 = distribution_h2(sigma, b2);
    CHECK(total_variation(pa, h1) < 1e-12);
    CHECK(total_variation(joint.marginal_b(), h2) < 1e-12);
  }
}

TEST_CASE("joint_distribution errors") {
  const Observable z(testing::pauli_z());
  const Observable id3(ComplexMatrix::identity(3));
  CHECK_THROWS_AS(joint_distribution(testing::bohm_phi(), id3, z), Error);
  try {
    joint_distribution(PureState(ComplexMatrix::identity(2)), z, z);
    FAIL("expected NotNormalized");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotNormalized);
  }
}

TEST_CASE("conditional family") {
  const auto fam = conditional_family(bohm_joint());
  const auto* up = fam.find(1.0);
  REQUIRE(up != nullptr);
  double at_minus = 0.0, elsewhere = 0.0;
  for (const auto& vm : up->q) (values_match(vm.value, -1.0) ? at_minus : elsewhere) += vm.p;
  CHECK(at_minus == Approx(1.0));
  CHECK(elsewhere < 1e-12);

  RandomSource rng(testing::kDefaultSeed + 3);
  for (int t = 0; t < 20; ++t) {
    const auto sigma = testing::random_state(rng, rng.index(1, 5), rng.index(1, 5));
    const Observable a1(rng.hermitian(sigma.dim1())), b2(rng.hermitian(sigma.dim2()));
    const auto joint = joint_distribution(sigma, a1, b2);
    const auto family = conditional_family(joint);
    for (const auto& pt : joint.support) {
      const auto* c = family.find(pt.a);
      if (c == nullptr) {
        CHECK(pt.p <= kPositiveMass);
        continue;
      }
      double q = 0.0;
      for (const auto& vm : c->q)
        if (values_match(vm.value, pt.b)) q += vm.p;
      CHECK(c->marginal * q == Approx(pt.p).margin(1e-10));
    }
  }
}

TEST_CASE("graph concentration") {
  const auto bohm = bohm_joint();
  CHECK(graph_concentration_check(bohm, kNegate));
  CHECK_FALSE(graph_concentration_check(bohm, kIdentity));
  CHECK(off_graph_mass(bohm, kIdentity) == Approx(1.0));

  const DiscreteJointDistribution point{{{0.0, 0.0, 1.0}}};
  CHECK(graph_concentration_check(point, kIdentity));

  const auto partial = graph_from_table({{1.0, -1.0}});
  CHECK_THROWS_AS(off_graph_mass(bohm, partial), Error);
}

TEST_CASE("graph concentration is equivalent to point-mass conditionals") {
  RandomSource rng(testing::kDefaultSeed + 4);
  for (int t = 0; t < 60; ++t) {
    // random discrete measures on a small value grid, half of them graph-concentrated
    const std::size_t na = rng.index(1, 4);
    std::map<double, double> table;
    DiscreteJointDistribution p;
    std::vector<double> w(na);
    double total = 0.0;
    for (auto& x : w) total += (x = rng.uniform(0.1, 1.0));
    const bool concentrated = t % 2 == 0;
    for (std::size_t a = 0; a < na; ++a) {
      const double gb = static_cast<double>(rng.index(0, 2));
      table[static_cast<double>(a)] = gb;
      if (concentrated) {
        p.support.push_back({static_cast<double>(a), gb, w[a] / total});
      } else {
        const double split = rng.uniform(0.0, 1.0);
        p.support.push_back({static_cast<double>(a), gb, split * w[a] / total});
        p.support.push_back({static_cast<double>(a), gb + 1.0, (1.0 - split) * w[a] / total});
      }
    }
    const auto g = graph_from_table(table);
    bool point_masses = true;
    for (const auto& c : conditional_family(p).entries) {
      double at_g = 0.0;
      for (const auto& vm : c.q)
        if (values_match(vm.value, *g(c.a))) at_g += vm.p;
      point_masses = point_masses && at_g >= 1.0 - 1e-10;
    }
    CHECK(graph_concentration_check(p, g) == point_masses);
  }
}

TEST_CASE("corollary2_check") {
  CHECK(corollary2_check(bohm_joint(), kNegate));
  const DiscreteJointDistribution single{{{2.0, 5.0, 1.0}}};
  CHECK(corollary2_check(single, graph_from_table({{2.0, 5.0}})));

  // g collapses a = 0 and a = 1 onto b = 7; a = 2 goes to b = 8
  const DiscreteJointDistribution three{{{0.0, 7.0, 0.2}, {1.0, 7.0, 0.3}, {2.0, 8.0, 0.5}}};
  CHECK(corollary2_check(three, graph_from_table({{0.0, 7.0}, {1.0, 7.0}, {2.0, 8.0}})));

  // not concentrated on the graph of g
  CHECK_THROWS_AS(corollary2_check(bohm_joint(), kIdentity), Error);
}

TEST_CASE("distributions of B1 and B2 coincide") {
  RandomSource rng(testing::kDefaultSeed + 5);
  for (int t = 0; t < 30; ++t) {
    const auto sample = testing::random_epr_sample(rng, 10);
    const Observable b2(testing::block_commuting_observable(rng, sample.blocks, sample.state.dim2()));
    const auto r = epr_correlation_test(sample.state, b2);
    CHECK(r.passed);
    CHECK(r.off_diagonal_mass < 1e-10);
    CHECK(total_variation(distribution_h1(sample.state, r.b1), distribution_h2(sample.state, b2)) < 1e-10);
  }
}

TEST_CASE("epr_correlation_test examples") {
  for (int k = 0; k < 10; ++k) {
    const double theta = 0.3 * k, phi = 0.7 * k;
    const auto r = epr_correlation_test(testing::bohm_phi(), Observable(testing::spin_along(theta, phi)));
    CHECK(r.passed);
    CHECK(r.off_diagonal_mass < 1e-10);
  }

  RandomSource rng(testing::kDefaultSeed + 6);
  const PureState maximal((1.0 / std::sqrt(3.0)) * rng.unitary(3));
  for (int k = 0; k < 10; ++k) CHECK(epr_correlation_test(maximal, Observable(rng.hermitian(3))).passed);

  const auto trivial = epr_correlation_test(testing::random_state(rng, 3, 3), Observable(ComplexMatrix::identity(3)));
  CHECK(trivial.passed);
  CHECK(trivial.off_diagonal_mass == 0.0);

  const PureState diag(ComplexMatrix{{std::sqrt(0.9), 0.0}, {0.0, std::sqrt(0.1)}});
  CHECK_THROWS_AS(epr_correlation_test(diag, Observable(testing::pauli_x())), Error);
}
