#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <memory>

#include "szwalk/bench.hpp"
#include "szwalk/reference.hpp"
#include "szwalk/semiclassical.hpp"
#include "szwalk/state.hpp"

using namespace szwalk;

namespace {

TransitionMatrix cycle3() {
  RealMatrix m(3, 3);
  m << 0.0, 0.5, 0.5,
       0.5, 0.0, 0.5,
       0.5, 0.5, 0.0;
  return TransitionMatrix::validated(m, StochasticPolicy::strict);
}

UnitaryPipeline<Real> make_sr(const TransitionMatrix& g) {
  auto psi = std::make_shared<const PsiMatrix<Real>>(build_psi_matrix(g));
  std::vector<UnitaryPipeline<Real>::Op> ops;
  ops.emplace_back(SwapOperator{});
  ops.emplace_back(ReflectionOperator<Real>(std::move(psi)));
  return UnitaryPipeline<Real>{std::move(ops)};
}

}  // namespace

TEST_CASE("zero quantum time: class I is the identity, class II is G") {
  for (const Index n : {Index(3), Index(5), Index(9)}) {
    const auto g = bench::random_transition_matrix(n, 40 + n);
    const auto u = make_sr(g);

    SemiclassicalConfig cfg;
    cfg.quantum_time = 0;
    cfg.walk_class = WalkClass::one;
    const auto class1 = build_semiclassical_matrix(g, u, cfg);
    CHECK((class1.matrix() - RealMatrix::Identity(n, n))
              .cwiseAbs()
              .maxCoeff() <= 1e-12);

    cfg.walk_class = WalkClass::two;
    const auto class2 = build_semiclassical_matrix(g, u, cfg);
    CHECK((class2.matrix() - g.matrix()).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("one quantum step matches the dense-oracle definition") {
  const auto g = cycle3();
  const auto u = make_sr(g);
  const reference::DenseOperator dense =
      reference::dense_swap(3) * reference::dense_reflection(g);

  for (const WalkClass wc : {WalkClass::one, WalkClass::two}) {
    SemiclassicalConfig cfg;
    cfg.quantum_time = 1;
    cfg.walk_class = wc;
    const auto sc = build_semiclassical_matrix(g, u, cfg);

    const Register reg =
        wc == WalkClass::one ? Register::first : Register::second;
    for (Index i = 0; i < 3; ++i) {
      const ComplexVector evolved =
          reference::dense_evolve(dense, reference::flat_psi_vector(g, i), 1);
      const RealVector expected =
          reference::flat_probabilities(evolved, reg);
      CHECK((sc.matrix().col(i) - expected).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
}

TEST_CASE("semiclassical matrices are column-stochastic") {
  const auto g = bench::random_transition_matrix(8, 99);
  const auto u = make_sr(g);
  for (int tq : {0, 1, 2, 3}) {
    SemiclassicalConfig cfg;
    cfg.quantum_time = tq;
    cfg.walk_class = WalkClass::two;
    const auto sc = build_semiclassical_matrix(g, u, cfg);
    for (Index j = 0; j < 8; ++j) {
      CHECK(std::abs(sc.matrix().col(j).sum() - 1.0) <= 1e-10);
      CHECK(sc.matrix().col(j).minCoeff() >= 0.0);
    }
  }
}

TEST_CASE("results are bitwise identical across batch sizes") {
  const Index n = 7;
  const auto g = bench::random_transition_matrix(n, 7);
  const auto u = make_sr(g);

  SemiclassicalConfig cfg;
  cfg.quantum_time = 2;
  cfg.walk_class = WalkClass::one;

  cfg.batch_size = 1;
  const auto one = build_semiclassical_matrix(g, u, cfg);
  cfg.batch_size = 2;
  const auto two = build_semiclassical_matrix(g, u, cfg);
  cfg.batch_size = n;
  const auto all = build_semiclassical_matrix(g, u, cfg);

  CHECK((one.matrix() - two.matrix()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((one.matrix() - all.matrix()).cwiseAbs().maxCoeff() == 0.0);

  cfg.batch_size = 0;
  CHECK_THROWS_AS(build_semiclassical_matrix(g, u, cfg), Error);
}

TEST_CASE("semiclassical walk delegates to the classical walk") {
  const auto g = cycle3();
  const auto u = make_sr(g);

  SemiclassicalConfig cfg;
  cfg.quantum_time = 0;
  cfg.walk_class = WalkClass::two;
  const auto sc = build_semiclassical_matrix(g, u, cfg);  // equals G

  RealVector p0(3);
  p0 << 1, 0, 0;
  const auto p = ProbabilityVector::validated(p0);

  const auto one_step = semiclassical_walk(sc, p, 1);
  REQUIRE(one_step.size() == 2);
  const RealVector expected = g.matrix() * p0;
  CHECK((one_step[1].values() - expected).cwiseAbs().maxCoeff() <= 1e-12);

  const auto none = semiclassical_walk(sc, p, 0);
  CHECK(none.size() == 1);
  CHECK(none[0][0] == 1.0);
}

TEST_CASE("class I walk equals independent repeated multiplication") {
  const auto g = cycle3();
  const auto u = make_sr(g);

  SemiclassicalConfig cfg;
  cfg.quantum_time = 1;
  cfg.walk_class = WalkClass::one;
  const auto sc = build_semiclassical_matrix(g, u, cfg);

  RealVector p0 = RealVector::Constant(3, 1.0 / 3.0);
  const auto trace =
      semiclassical_walk(sc, ProbabilityVector::validated(p0), 5);
  REQUIRE(trace.size() == 6);

  RealVector expected = p0;
  for (std::size_t k = 1; k < trace.size(); ++k) {
    RealVector next = RealVector::Zero(3);
    for (Index i = 0; i < 3; ++i) {
      for (Index j = 0; j < 3; ++j) {
        next(i) += sc.matrix()(i, j) * expected(j);
      }
    }
    expected = next;
    CHECK((trace[k].values() - expected).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("consistency with mixed-state evolution") {
  // _kG^(tq) c equals the mixed-state distribution over {psi_i} with
  // weights c at step tq.
  const auto g = bench::random_transition_matrix(4, 2024);
  const auto u = make_sr(g);
  const auto psi = build_psi_matrix(g);

  RealVector c(4);
  c << 0.1, 0.2, 0.3, 0.4;

  std::vector<MatrixState<Real>> members;
  for (Index i = 0; i < 4; ++i) members.push_back(psi_state(psi, i));
  const MixedStateEnsemble<Real> ens(StateBatch<Real>(members), c);

  for (int tq : {1, 2, 3}) {
    for (const WalkClass wc : {WalkClass::one, WalkClass::two}) {
      SemiclassicalConfig cfg;
      cfg.quantum_time = tq;
      cfg.walk_class = wc;
      const auto sc = build_semiclassical_matrix(g, u, cfg);
      const RealVector via_matrix = sc.matrix() * c;

      const Register reg =
          wc == WalkClass::one ? Register::first : Register::second;
      const auto mixed = mixed_state_probabilities(ens, u, tq, reg);
      const RealVector via_mixed =
          (wc == WalkClass::one ? mixed.first : mixed.second)
              .back()
              .values();
      CHECK((via_matrix - via_mixed).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
}
