#pragma once

#include <optional>
#include <span>
#include <vector>

#include "hfeyn/bv_complex.hpp"
#include "hfeyn/rational.hpp"
#include "hfeyn/series.hpp"

namespace hfeyn {

/// coefficient * hbar^hbar_power.
struct WickTerm {
  Rational coefficient;
  unsigned hbar_power = 0;

  friend bool operator==(const WickTerm&, const WickTerm&) = default;
};

/// <x^degree> for N = 1, b = 0: (hbar/a)^n (2n-1)!! when degree = 2n, else 0.
WickTerm wick_univariate(unsigned degree, const Rational& a);

struct PairingOracleInput {
  std::vector<unsigned> indices;  // 0-based
  RationalMatrix a_inverse;
};

inline constexpr std::size_t kMaxPairingIndices = 16;

/// Sum over perfect matchings of the index positions of the product of
/// a^-1 entries, times hbar^(length/2). Zero for odd length. Throws TooLarge
/// above 16 indices.
WickTerm wick_multivariate(const PairingOracleInput& in);

inline constexpr unsigned kMaxMomentDegree = 64;

/// Coefficient of hbar^(|alpha|/2) in the free Gaussian moment <x^alpha>_0,
/// summing pairings grouped by variable. Throws TooLarge above degree 64.
Rational gaussian_moment(std::span<const unsigned> exponents, const RationalMatrix& a_inverse);

/// <f e^(b/hbar)>_0 / <e^(b/hbar)>_0 mod hbar^(K+1), with every free moment
/// taken from gaussian_moment.
HbarSeries gaussian_perturbation_expectation(const Model& model, const MarkedTensor& f, unsigned max_order);

/// d_n = 12^n sum_{k >= ceil(n/2)} (hbar/288)^k (6k-2n)! / ((3k-n)! (2k-n)!), mod hbar^(K+1).
HbarSeries d_series(unsigned n, unsigned max_order);

/// d_n / d_0.
HbarSeries c_from_d(unsigned n, unsigned max_order);

/// First n at which a c_{n+1} = (g/2) c_{n+2} + hbar n c_{n-1} fails, over
/// all n with the needed terms available (the hbar term is dropped at
/// n = 0, the c_{n+2} term when g = 0). This is
/// the N = 1 model with b = g x^3 / 6; g = 0 gives the free recursion.
std::optional<unsigned> recursion_failure(std::span<const HbarSeries> c, const Rational& a, const Rational& g);

inline bool recursion_check(std::span<const HbarSeries> c, const Rational& a, const Rational& g) {
  return !recursion_failure(c, a, g).has_value();
}

/// True iff s[k+1]/s[k] is strictly increasing for first <= k < last
/// (all coefficients involved must be positive).
bool coefficient_ratios_increasing(const HbarSeries& s, unsigned first, unsigned last);

}  // namespace hfeyn
