#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <memory>
#include <random>

#include "szwalk/bench.hpp"
#include "szwalk/reference.hpp"
#include "szwalk/simulator.hpp"
#include "szwalk/state.hpp"

using namespace szwalk;

namespace {

TransitionMatrix cycle2() {
  RealMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return TransitionMatrix::validated(m, StochasticPolicy::strict);
}

TransitionMatrix cycle3() {
  RealMatrix m(3, 3);
  m << 0.0, 0.5, 0.5,
       0.5, 0.0, 0.5,
       0.5, 0.5, 0.0;
  return TransitionMatrix::validated(m, StochasticPolicy::strict);
}

template <class Scalar>
UnitaryPipeline<Scalar> make_sr(std::shared_ptr<const PsiMatrix<Scalar>> psi) {
  std::vector<typename UnitaryPipeline<Scalar>::Op> ops;
  ops.emplace_back(SwapOperator{});
  ops.emplace_back(ReflectionOperator<Scalar>(std::move(psi)));
  return UnitaryPipeline<Scalar>{std::move(ops)};
}

}  // namespace

TEST_CASE("measure on symmetric and basis states") {
  const auto psi = build_psi_matrix(cycle2());
  const MatrixState<Real> super = initial_superposition(psi);
  const auto p1 = measure_first(super);
  const auto p2 = measure_second(super);
  CHECK(p1[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(p1[1] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(p2[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(p2[1] == doctest::Approx(0.5).epsilon(1e-15));

  MatrixState<Real> basis = MatrixState<Real>::Zero(2, 2);
  basis(1, 0) = 1.0;  // |0>|1>
  CHECK(measure_first(basis)[0] == 1.0);
  CHECK(measure_first(basis)[1] == 0.0);
  CHECK(measure_second(basis)[0] == 0.0);
  CHECK(measure_second(basis)[1] == 1.0);

  const auto both = measure_both(basis);
  CHECK(both.first[0] == 1.0);
  CHECK(both.second[1] == 1.0);
}

TEST_CASE("measure rejects unnormalized states") {
  MatrixState<Real> off = MatrixState<Real>::Zero(2, 2);
  off(0, 0) = 1.1;
  CHECK_THROWS_AS(measure_first(off), Error);

  // A 1e-9 norm drift is tolerated and divided out.
  MatrixState<Real> close = MatrixState<Real>::Zero(2, 2);
  close(0, 0) = 1.0 + 1e-9;
  const auto p = measure_first(close);
  CHECK(std::abs(p.values().sum() - 1.0) <= 1e-12);
}

TEST_CASE("one step of U = S R on the 3-cycle matches the dense oracle") {
  const auto g = cycle3();
  const auto psi =
      std::make_shared<const PsiMatrix<Real>>(build_psi_matrix(g));
  const auto u = make_sr<Real>(psi);

  MatrixState<Real> phi = psi_state(*psi, 0);
  apply_pipeline_in_place(phi, u);
  const auto p1 = measure_first(phi);

  const reference::DenseOperator dense =
      reference::dense_swap(3) * reference::dense_reflection(g);
  const ComplexVector evolved =
      reference::dense_evolve(dense, reference::flat_psi_vector(g, 0), 1);
  const RealVector expected =
      reference::flat_probabilities(evolved, Register::first);
  CHECK((p1.values() - expected).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("evolve returns steps+1 distributions, t=0 first") {
  const auto psi = std::make_shared<const PsiMatrix<Real>>(
      build_psi_matrix(cycle2()));
  const auto u = make_sr<Real>(psi);
  const MatrixState<Real> phi0 = initial_superposition(*psi);

  const auto none = evolve(phi0, u, 0, Register::both);
  REQUIRE(none.first.size() == 1);
  REQUIRE(none.second.size() == 1);

  // Stationary case: all six vectors are uniform.
  const auto result = evolve(phi0, u, 5, Register::both);
  REQUIRE(result.first.size() == 6);
  REQUIRE(result.second.size() == 6);
  for (const auto& p : result.first) {
    CHECK(p[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(p[1] == doctest::Approx(0.5).epsilon(1e-14));
  }
}

TEST_CASE("evolve on the 3-cycle matches dense powers on both registers") {
  const auto g = cycle3();
  const auto psi =
      std::make_shared<const PsiMatrix<Real>>(build_psi_matrix(g));
  const auto u = make_sr<Real>(psi);

  const auto result = evolve(psi_state(*psi, 0), u, 3, Register::both);

  const reference::DenseOperator dense =
      reference::dense_swap(3) * reference::dense_reflection(g);
  ComplexVector v = reference::flat_psi_vector(g, 0);
  for (int t = 0; t <= 3; ++t) {
    const RealVector e1 = reference::flat_probabilities(v, Register::first);
    const RealVector e2 = reference::flat_probabilities(v, Register::second);
    CHECK((result.first[static_cast<std::size_t>(t)].values() - e1)
              .cwiseAbs()
              .maxCoeff() <= 1e-12);
    CHECK((result.second[static_cast<std::size_t>(t)].values() - e2)
              .cwiseAbs()
              .maxCoeff() <= 1e-12);
    v = dense * v;
  }
}

TEST_CASE("evolve composes: a+b steps equals resuming from the saved state") {
  const auto g = bench::random_transition_matrix(6, 123);
  const auto psi =
      std::make_shared<const PsiMatrix<Real>>(build_psi_matrix(g));
  const auto u = make_sr<Real>(psi);
  const MatrixState<Real> phi0 = initial_superposition(*psi);

  const auto whole = evolve(phi0, u, 7, Register::first);

  MatrixState<Real> mid;
  evolve(phi0, u, 3, Register::first, &mid);
  const auto rest = evolve(mid, u, 4, Register::first);

  CHECK((whole.first.back().values() - rest.first.back().values())
            .cwiseAbs()
            .maxCoeff() <= 1e-12);
}

TEST_CASE("evolve_batch equals member-wise evolve and respects order") {
  const auto g = cycle3();
  const auto psi =
      std::make_shared<const PsiMatrix<Real>>(build_psi_matrix(g));
  const auto u = make_sr<Real>(psi);

  std::vector<MatrixState<Real>> members;
  for (Index i = 0; i < 3; ++i) members.push_back(psi_state(*psi, i));
  const StateBatch<Real> batch(members);

  const auto results = evolve_batch(batch, u, 2, Register::first);
  REQUIRE(results.size() == 3);
  for (Index i = 0; i < 3; ++i) {
    const auto solo = evolve(members[static_cast<std::size_t>(i)], u, 2,
                             Register::first);
    for (std::size_t k = 0; k < solo.first.size(); ++k) {
      CHECK((results[static_cast<std::size_t>(i)].first[k].values() -
             solo.first[k].values())
                .cwiseAbs()
                .maxCoeff() == 0.0);
    }
  }

  // Permuting the batch permutes the results identically.
  std::vector<MatrixState<Real>> shuffled = {members[2], members[0],
                                             members[1]};
  const auto permuted =
      evolve_batch(StateBatch<Real>(shuffled), u, 2, Register::first);
  CHECK((permuted[0].first.back().values() -
         results[2].first.back().values())
            .cwiseAbs()
            .maxCoeff() == 0.0);
  CHECK((permuted[1].first.back().values() -
         results[0].first.back().values())
            .cwiseAbs()
            .maxCoeff() == 0.0);
}

TEST_CASE("batch of one equals evolve") {
  const auto psi = std::make_shared<const PsiMatrix<Real>>(
      build_psi_matrix(cycle2()));
  const auto u = make_sr<Real>(psi);
  const MatrixState<Real> phi = initial_superposition(*psi);
  const auto batch_result =
      evolve_batch(StateBatch<Real>({phi}), u, 4, Register::second);
  const auto solo = evolve(phi, u, 4, Register::second);
  REQUIRE(batch_result.size() == 1);
  for (std::size_t k = 0; k < solo.second.size(); ++k) {
    CHECK((batch_result[0].second[k].values() - solo.second[k].values())
              .cwiseAbs()
              .maxCoeff() == 0.0);
  }
}

TEST_CASE("mixed-state ensembles validate their invariants") {
  const auto psi = build_psi_matrix(cycle3());
  std::vector<MatrixState<Real>> members;
  for (Index i = 0; i < 3; ++i) members.push_back(psi_state(psi, i));

  RealVector good = RealVector::Constant(3, 1.0 / 3.0);
  CHECK_NOTHROW(
      (void)MixedStateEnsemble<Real>{StateBatch<Real>{members}, good});

  RealVector bad = RealVector::Constant(3, 0.5);
  CHECK_THROWS_AS(
      (void)MixedStateEnsemble<Real>(StateBatch<Real>{members}, bad), Error);

  RealVector negative(3);
  negative << 1.2, -0.1, -0.1;
  CHECK_THROWS_AS(
      (void)MixedStateEnsemble<Real>(StateBatch<Real>{members}, negative),
      Error);

  // Non-orthogonal members are rejected.
  std::vector<MatrixState<Real>> overlapping = {members[0], members[0]};
  RealVector half = RealVector::Constant(2, 0.5);
  CHECK_THROWS_AS(
      (void)MixedStateEnsemble<Real>(StateBatch<Real>{overlapping}, half),
      Error);
}

TEST_CASE("degenerate mixtures reduce to pure-state evolution") {
  const auto g = cycle3();
  const auto psi =
      std::make_shared<const PsiMatrix<Real>>(build_psi_matrix(g));
  const auto u = make_sr<Real>(psi);

  std::vector<MatrixState<Real>> members;
  for (Index i = 0; i < 3; ++i) members.push_back(psi_state(*psi, i));

  // Single member, weight 1.
  RealVector one(1);
  one << 1.0;
  const MixedStateEnsemble<Real> single(StateBatch<Real>({members[0]}), one);
  const auto mixed = mixed_state_probabilities(single, u, 3, Register::first);
  const auto pure = evolve(members[0], u, 3, Register::first);
  for (std::size_t k = 0; k < pure.first.size(); ++k) {
    CHECK((mixed.first[k].values() - pure.first[k].values())
              .cwiseAbs()
              .maxCoeff() <= 1e-14);
  }

  // Point mass on member 2.
  RealVector point = RealVector::Zero(3);
  point(2) = 1.0;
  const MixedStateEnsemble<Real> delta(StateBatch<Real>(members), point);
  const auto picked = mixed_state_probabilities(delta, u, 2, Register::second);
  const auto direct = evolve(members[2], u, 2, Register::second);
  for (std::size_t k = 0; k < direct.second.size(); ++k) {
    CHECK((picked.second[k].values() - direct.second[k].values())
              .cwiseAbs()
              .maxCoeff() <= 1e-14);
  }
}

TEST_CASE("mixed-state probabilities are linear in the weights") {
  const auto g = bench::random_transition_matrix(4, 321);
  const auto psi =
      std::make_shared<const PsiMatrix<Real>>(build_psi_matrix(g));
  const auto u = make_sr<Real>(psi);
  std::vector<MatrixState<Real>> members;
  for (Index i = 0; i < 4; ++i) members.push_back(psi_state(*psi, i));
  const StateBatch<Real> batch(members);

  RealVector c1(4), c2(4);
  c1 << 0.4, 0.3, 0.2, 0.1;
  c2 << 0.1, 0.1, 0.4, 0.4;
  const Real alpha = 0.35;
  const RealVector blend = alpha * c1 + (1.0 - alpha) * c2;

  const auto r1 = mixed_state_probabilities(MixedStateEnsemble<Real>(batch, c1),
                                            u, 3, Register::first);
  const auto r2 = mixed_state_probabilities(MixedStateEnsemble<Real>(batch, c2),
                                            u, 3, Register::first);
  const auto rb = mixed_state_probabilities(
      MixedStateEnsemble<Real>(batch, blend), u, 3, Register::first);
  for (std::size_t k = 0; k < rb.first.size(); ++k) {
    const RealVector expected =
        alpha * r1.first[k].values() + (1.0 - alpha) * r2.first[k].values();
    CHECK((rb.first[k].values() - expected).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("per-step distributions stay normalized over long evolutions") {
  const Index n = 16;
  const auto g = bench::random_transition_matrix(n, 888);
  const auto psi =
      std::make_shared<const PsiMatrix<Real>>(build_psi_matrix(g));
  const auto u = make_sr<Real>(psi);
  const auto result =
      evolve(initial_superposition(*psi), u, 100, Register::both);
  for (const auto& p : result.first) {
    CHECK(std::abs(p.values().sum() - 1.0) <= 1e-10);
    CHECK(p.values().minCoeff() >= 0.0);
  }
}
