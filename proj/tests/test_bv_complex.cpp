#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hfeyn/bv_complex.hpp"
#include "hfeyn/errors.hpp"
#include "hfeyn/oracle.hpp"
#include "hfeyn/random.hpp"
#include "support/fixtures.hpp"
#include "support/independent.hpp"

using namespace hfeyn;
using fixtures::series;
using fixtures::x_power;

namespace {

GradedElement x(std::size_t n, std::size_t i, unsigned p = 1) { return GradedElement::x(n, i, p); }
GradedElement xi(std::size_t n, std::size_t i) { return GradedElement::xi(n, i); }
GradedElement hbar(std::size_t n, unsigned p = 1) { return GradedElement::hbar(n, p); }
GradedElement one(std::size_t n) { return GradedElement::constant(n, 1); }

Model random_model(Rng& rng, std::size_t n, unsigned max_b) { return Model::validate(random_model_spec(rng, n, max_b)); }

}  // namespace

TEST_CASE("validate") {
  const Model cubic = fixtures::cubic();
  CHECK(cubic.a_inverse() == RationalMatrix::identity(1));
  CHECK(cubic.interaction_polynomial() == scale(x(1, 0, 3), Rational(1, 6)));
  CHECK(cubic.interaction_gradient(0) == scale(x(1, 0, 2), Rational(1, 2)));

  ModelSpec singular;
  singular.dimension = 1;
  singular.a = RationalMatrix(1, {0});
  CHECK_THROWS_AS(Model::validate(singular), SingularMatrix);

  ModelSpec swap;
  swap.dimension = 2;
  swap.a = RationalMatrix(2, {0, 1, 1, 0});
  CHECK(Model::validate(swap).a_inverse() == swap.a);

  ModelSpec asym = swap;
  asym.a = RationalMatrix(2, {1, 2, 0, 1});
  CHECK_THROWS_AS(Model::validate(asym), AsymmetricTensor);

  ModelSpec bad_b = swap;
  Tensor t(3);
  t.set({0, 0, 1}, 1);
  bad_b.interaction.emplace(3, t);
  CHECK_THROWS_AS(Model::validate(bad_b), AsymmetricTensor);

  ModelSpec quadratic = swap;
  Tensor q(2);
  q.set_symmetric({0, 1}, 1);
  quadratic.interaction.emplace(2, q);
  CHECK_THROWS_AS(Model::validate(quadratic), QuadraticInteraction);

  ModelSpec out_of_range = swap;
  Tensor r(3);
  r.set({2, 2, 2}, 1);
  out_of_range.interaction.emplace(3, r);
  CHECK_THROWS_AS(Model::validate(out_of_range), InvalidModel);
}

TEST_CASE("the gradient of b uses the 1/m! convention") {
  // b^(3)_{112} = 2 gives b = x1^2 x2.
  ModelSpec spec;
  spec.dimension = 2;
  spec.a = RationalMatrix::identity(2);
  Tensor t(3);
  t.set_symmetric({0, 0, 1}, 2);
  spec.interaction.emplace(3, t);
  const Model m = Model::validate(spec);
  CHECK(m.interaction_polynomial() == mul(x(2, 0, 2), x(2, 1)));
  CHECK(m.interaction_gradient(0) == scale(mul(x(2, 0), x(2, 1)), 2));
  CHECK(m.interaction_gradient(1) == x(2, 0, 2));
}

TEST_CASE("applyQ") {
  const Model cubic = fixtures::cubic();
  for (unsigned n = 0; n <= 5; ++n) {
    const auto expected = x(1, 0, n + 1) - scale(x(1, 0, n + 2), Rational(1, 2)) -
                          (n == 0 ? GradedElement(1) : scale(mul(hbar(1), x(1, 0, n - 1)), n));
    CHECK(apply_q(cubic, mul(x(1, 0, n), xi(1, 0))) == expected);
  }
  CHECK(apply_q(cubic, x(1, 0, 4) + hbar(1)).is_zero());

  // b = 0: Q(xi f) = a x f - hbar f'
  const Rational a(-3, 2);
  const Model free = fixtures::gaussian(a);
  const GradedElement f = x(1, 0, 3) + scale(x(1, 0), 2) + one(1);
  CHECK(apply_q(free, mul(xi(1, 0), f)) == scale(mul(x(1, 0), f), a) - mul(hbar(1), partial_x(0, f)));
}

TEST_CASE("Q squares to zero") {
  Rng rng(21);
  ModelSpec swap;
  swap.dimension = 2;
  swap.a = RationalMatrix(2, {0, 1, 1, 0});
  CHECK(q_squared_vanishes(Model::validate(swap), mul(mul(x(2, 0, 2), xi(2, 0)), xi(2, 1))));
  CHECK(q_squared_vanishes(fixtures::cubic(), one(1)));
  for (int trial = 0; trial < 30; ++trial) {
    const Model m = random_model(rng, 3, 4);
    CHECK(q_squared_vanishes(m, random_element(rng, 3, 2, 4, 4, 1)));
  }
}

TEST_CASE("property: Q lowers the homological degree by one") {
  Rng rng(22);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 1 + trial % 3;
    const Model m = random_model(rng, n, 5);
    const unsigned k = static_cast<unsigned>(rng() % (n + 1));
    const GradedElement q = apply_q(m, random_element(rng, n, k, 4, 3, 1));
    if (k == 0) {
      CHECK(q.is_zero());
    } else if (!q.is_zero()) {
      CHECK(q.homogeneous_degree() == k - 1);
    }
  }
}

TEST_CASE("delta") {
  CHECK(delta(mul(x(2, 0), xi(2, 0))) == one(2));
  CHECK(delta(mul(x(2, 0), xi(2, 1))).is_zero());
  const auto p = mul(mul(x(2, 0), x(2, 1)), mul(xi(2, 0), xi(2, 1)));
  // composition of the two partial derivatives, summed over i
  CHECK(delta(p) == partial_x(0, partial_xi(0, p)) + partial_x(1, partial_xi(1, p)));
  CHECK(delta(p) == mul(x(2, 1), xi(2, 1)) - mul(x(2, 0), xi(2, 0)));
}

TEST_CASE("bracket") {
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK(bracket(x(3, i), xi(3, j)) == GradedElement::constant(3, i == j ? 1 : 0));
      CHECK(bracket(x(3, i), x(3, j)).is_zero());
    }
  }
  CHECK(bracket(xi(1, 0), xi(1, 0)).is_zero());
}

TEST_CASE("property: the bracket is a derivation in its second slot") {
  Rng rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + trial % 3;
    const unsigned kf = static_cast<unsigned>(rng() % (n + 1));
    const unsigned kg = static_cast<unsigned>(rng() % (n + 1));
    const auto f = random_element(rng, n, kf, 3, 3, 1);
    const auto g = random_element(rng, n, kg, 3, 3, 1);
    const auto h = random_element(rng, n, static_cast<unsigned>(rng() % (n + 1)), 3, 3, 1);
    const bool odd = ((kf + 1) * kg) % 2 == 1;  // (|f| - 1)|g|
    const auto second = mul(g, bracket(f, h));
    CHECK(bracket(f, mul(g, h)) == mul(bracket(f, g), h) + (odd ? -second : second));
  }
}

TEST_CASE("decomposeQ") {
  const Model free = fixtures::gaussian();
  const auto d1 = decompose_q(free, xi(1, 0));
  CHECK(d1.contraction == x(1, 0));
  CHECK(d1.laplacian.is_zero());
  const auto d2 = decompose_q(free, mul(x(1, 0), xi(1, 0)));
  CHECK(d2.contraction == x(1, 0, 2));
  CHECK(d2.laplacian == one(1));
  CHECK(apply_q(free, mul(x(1, 0), xi(1, 0))) == x(1, 0, 2) - hbar(1));

  Rng rng(24);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + trial % 3;
    const Model m = random_model(rng, n, 5);
    const auto p = random_element(rng, n, static_cast<unsigned>(rng() % (n + 1)), 4, 4, 1);
    const auto d = decompose_q(m, p);
    CHECK(apply_q(m, p) == d.contraction - mul(hbar(n), d.laplacian));
  }
}

TEST_CASE("one rewrite step differs from the monomial by a boundary") {
  Rng rng(25);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 1 + trial % 3;
    const Model m = random_model(rng, n, 5);
    const auto sample = random_element(rng, n, 0, 4, 1, 2);
    if (sample.is_zero()) continue;
    const auto& [mono, coeff] = *sample.terms().begin();
    if (mono.x_degree() == 0) continue;
    std::size_t i = 0;
    while (mono.x_exponent(i) == 0) ++i;
    Monomial rest = mono;
    rest.set_x_exponent(i, mono.x_exponent(i) - 1).set_hbar_power(0);
    GradedElement g(n);
    for (std::size_t l = 0; l < n; ++l) g += scale(mul(GradedElement::monomial(rest), xi(n, l)), m.a_inverse()(i, l));
    const auto boundary = scale(mul(hbar(n, mono.hbar_power()), apply_q(m, g)), coeff);
    CHECK(GradedElement::monomial(mono, coeff) - rewrite_monomial(m, mono, coeff) == boundary);
  }
}

TEST_CASE("reduceExpectation") {
  CHECK(reduce_expectation(fixtures::gaussian(2), x_power(4), 3) == series({0, 0, Rational(3, 4), 0}));
  CHECK(reduce_expectation(fixtures::gaussian(), x_power(4), 2) == series({0, 0, 3}));
  for (unsigned k = 0; k <= 4; ++k) {
    CHECK(reduce_expectation(fixtures::cubic(), one(1), k) == HbarSeries::one(k));
  }
  CHECK(reduce_expectation(fixtures::cubic(), x_power(2), 2) == series({0, 1, Rational(5, 4)}));
  CHECK_THROWS_AS(reduce_expectation(fixtures::cubic(), xi(1, 0), 2), NonScalarInput);

  ReductionOptions tight;
  tight.step_budget = 1;
  CHECK_THROWS_AS(reduce_expectation(fixtures::cubic(), x_power(4), 4, tight), InternalError);
}

TEST_CASE("expectation of a boundary vanishes") {
  CHECK(expectation_of_boundary(fixtures::gaussian(), mul(x(1, 0), xi(1, 0)), 4).is_zero());
  CHECK(expectation_of_boundary(fixtures::cubic(), xi(1, 0), 4).is_zero());
  CHECK(expectation_of_boundary(fixtures::cubic(), GradedElement(1), 4).is_zero());
  CHECK_THROWS(expectation_of_boundary(fixtures::cubic(), x(1, 0), 4));

  // The same statement through the independent closed form: <x> = <x^2>/2.
  const auto c1 = independent::univariate_expectation(1, {{3, Rational(1, 6)}}, 4);
  const auto c2 = independent::univariate_expectation(2, {{3, Rational(1, 6)}}, 4);
  for (unsigned k = 0; k <= 4; ++k) CHECK(c1[k] == c2[k] / 2);

  Rng rng(26);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 1 + trial % 3;
    const Model m = random_model(rng, n, 5);
    CHECK(expectation_of_boundary(m, random_element(rng, n, 1, 3, 3, 1), 4).is_zero());
  }
}

TEST_CASE("property: linearity of the expectation") {
  Rng rng(27);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + trial % 3;
    const Model m = random_model(rng, n, 4);
    const auto f = random_element(rng, n, 0, 4, 3, 1);
    const auto g = random_element(rng, n, 0, 4, 3, 1);
    const Rational alpha = random_rational(rng);
    const Rational gamma = random_rational(rng);
    const auto lhs = reduce_expectation(m, scale(f, alpha) + scale(g, gamma), 3);
    const auto rhs = alpha * reduce_expectation(m, f, 3) + gamma * reduce_expectation(m, g, 3);
    CHECK(lhs == rhs);
  }
}

TEST_CASE("property: confluence and K-stability") {
  Rng rng(28);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + trial % 3;
    const Model m = random_model(rng, n, 4);
    const auto f = random_element(rng, n, 0, 4, 3, 1);
    ReductionOptions high{SelectionStrategy::HighestDegreeFirst};
    ReductionOptions shuffled{SelectionStrategy::Randomized, static_cast<std::uint64_t>(trial)};
    const auto base = reduce_expectation(m, f, 3);
    CHECK(reduce_expectation(m, f, 3, high) == base);
    CHECK(reduce_expectation(m, f, 3, shuffled) == base);
    CHECK(reduce_expectation(m, f, 5).truncated(3) == base);
  }
}

TEST_CASE("multivariate free moments match the pairing sum") {
  Rng rng(29);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + trial % 2;
    ModelSpec spec;
    spec.dimension = n;
    spec.a = random_symmetric_invertible(rng, n);
    const Model m = Model::validate(spec);
    PairingOracleInput in{{}, m.a_inverse()};
    Monomial mono(n);
    const unsigned degree = 2 * (1 + static_cast<unsigned>(rng() % 3));
    for (unsigned k = 0; k < degree; ++k) {
      const auto i = static_cast<unsigned>(rng() % n);
      in.indices.push_back(i);
      mono.set_x_exponent(i, mono.x_exponent(i) + 1);
    }
    const WickTerm w = wick_multivariate(in);
    const HbarSeries e = reduce_expectation(m, GradedElement::monomial(mono), degree / 2);
    CHECK(e == HbarSeries::monomial(degree / 2, w.hbar_power, w.coefficient));
  }
}

TEST_CASE("property: the cached gradient is the derivative of b") {
  Rng rng(29);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 1 + trial % 3;
    const Model m = random_model(rng, n, 5);
    for (std::size_t i = 0; i < n; ++i) CHECK(m.interaction_gradient(i) == partial_x(i, m.interaction_polynomial()));
  }
}
