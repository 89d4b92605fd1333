#pragma once

#include <cstddef>
#include <random>

#include "hfeyn/bv_complex.hpp"
#include "hfeyn/rational.hpp"
#include "hfeyn/series.hpp"

namespace hfeyn {

using Rng = std::mt19937_64;

/// p/q with |p| <= max_numerator, 1 <= q <= max_denominator; may be zero.
Rational random_rational(Rng& rng, int max_numerator = 5, int max_denominator = 3);

/// Symmetric with an exact inverse; entries from random_rational.
RationalMatrix random_symmetric_invertible(Rng& rng, std::size_t n);

/// Random symmetric m-tensor over n variables with a few nonzero orbits.
Tensor random_symmetric_tensor(Rng& rng, std::size_t n, unsigned m, std::size_t orbits);

/// Random model with b^(m) for 3 <= m <= max_b_degree (possibly some zero).
ModelSpec random_model_spec(Rng& rng, std::size_t n, unsigned max_b_degree);

/// Sum of `terms` random monomials of the given homological degree with
/// x-degree <= max_x_degree and hbar power <= max_hbar.
GradedElement random_element(Rng& rng, std::size_t n, unsigned xi_degree, unsigned max_x_degree, std::size_t terms,
                             unsigned max_hbar = 0);

}  // namespace hfeyn
