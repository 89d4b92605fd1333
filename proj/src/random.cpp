#include "hfeyn/random.hpp"

#include <algorithm>
#include <numeric>

namespace hfeyn {

namespace {

int uniform(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

}  // namespace

Rational random_rational(Rng& rng, int max_numerator, int max_denominator) {
  Rational q(uniform(rng, -max_numerator, max_numerator), uniform(rng, 1, max_denominator));
  q.canonicalize();
  return q;
}

RationalMatrix random_symmetric_invertible(Rng& rng, std::size_t n) {
  RationalMatrix a(n);
  RationalMatrix inverse;
  do {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) {
        a(i, j) = random_rational(rng);
        a(j, i) = a(i, j);
      }
    }
  } while (!a.try_inverse(inverse));
  return a;
}

Tensor random_symmetric_tensor(Rng& rng, std::size_t n, unsigned m, std::size_t orbits) {
  Tensor t(m);
  for (std::size_t k = 0; k < orbits; ++k) {
    Tensor::Index index(m);
    for (auto& i : index) i = static_cast<unsigned>(uniform(rng, 0, static_cast<int>(n) - 1));
    t.set_symmetric(index, random_rational(rng));
  }
  return t;
}

ModelSpec random_model_spec(Rng& rng, std::size_t n, unsigned max_b_degree) {
  ModelSpec spec;
  spec.dimension = n;
  spec.a = random_symmetric_invertible(rng, n);
  for (unsigned m = 3; m <= max_b_degree; ++m) {
    Tensor t = random_symmetric_tensor(rng, n, m, static_cast<std::size_t>(uniform(rng, 0, 3)));
    if (!t.is_zero()) spec.interaction.emplace(m, std::move(t));
  }
  spec.label = "random";
  return spec;
}

GradedElement random_element(Rng& rng, std::size_t n, unsigned xi_degree, unsigned max_x_degree, std::size_t terms,
                             unsigned max_hbar) {
  GradedElement out(n);
  std::vector<std::size_t> order(n);
  for (std::size_t k = 0; k < terms; ++k) {
    Monomial m(n);
    const int d = uniform(rng, 0, static_cast<int>(max_x_degree));
    for (int e = 0; e < d; ++e) {
      const auto i = static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(n) - 1));
      m.set_x_exponent(i, m.x_exponent(i) + 1);
    }
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    std::uint64_t mask = 0;
    for (unsigned s = 0; s < xi_degree && s < n; ++s) mask |= std::uint64_t{1} << order[s];
    m.set_xi_mask(mask);
    m.set_hbar_power(static_cast<unsigned>(uniform(rng, 0, static_cast<int>(max_hbar))));
    out.add_term(m, random_rational(rng));
  }
  return out;
}

}  // namespace hfeyn
