#pragma once

#include <map>
#include <vector>

#include "hfeyn/bv_complex.hpp"
#include "hfeyn/rational.hpp"
#include "hfeyn/series.hpp"

namespace fixtures {

using hfeyn::GradedElement;
using hfeyn::HbarSeries;
using hfeyn::Model;
using hfeyn::ModelSpec;
using hfeyn::Rational;
using hfeyn::RationalMatrix;
using hfeyn::Tensor;

inline Tensor diagonal_tensor(unsigned m, const Rational& value) {
  Tensor t(m);
  t.set(std::vector<unsigned>(m, 0), value);
  return t;
}

/// N = 1 with b = sum_m coeffs[m] x^m / m!.
inline Model univariate(const Rational& a, const std::map<unsigned, Rational>& coeffs = {}) {
  ModelSpec spec;
  spec.dimension = 1;
  spec.a = RationalMatrix(1, {a});
  for (const auto& [m, c] : coeffs) spec.interaction.emplace(m, diagonal_tensor(m, c));
  return Model::validate(spec);
}

inline Model gaussian(const Rational& a = 1) { return univariate(a); }
inline Model cubic() { return univariate(1, {{3, 1}}); }
inline Model quartic() { return univariate(1, {{4, 1}}); }
inline Model mixed() { return univariate(1, {{3, 1}, {4, 1}}); }

inline GradedElement x_power(unsigned d) { return GradedElement::x(1, 0, d); }

inline HbarSeries series(std::vector<Rational> coeffs) { return HbarSeries(std::move(coeffs)); }

}  // namespace fixtures
