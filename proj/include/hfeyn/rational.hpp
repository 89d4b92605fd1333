#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

namespace hfeyn {

using Rational = mpq_class;
using Integer = mpz_class;

/// Parses "p", "-p" or "p/q" exactly. Throws std::invalid_argument on
/// anything else (decimals, exponents, zero denominators).
Rational parse_rational(std::string_view text);

/// Canonical "p/q" rendering with q > 0, or "p" when q == 1.
std::string to_string(const Rational& q);

Integer factorial(unsigned n);

/// Dense row-major square matrix of exact rationals.
class RationalMatrix {
 public:
  RationalMatrix() = default;
  explicit RationalMatrix(std::size_t n) : n_(n), data_(n * n) {}
  RationalMatrix(std::size_t n, std::vector<Rational> row_major);

  static RationalMatrix identity(std::size_t n);

  std::size_t size() const noexcept { return n_; }

  Rational& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  const Rational& operator()(std::size_t i, std::size_t j) const {
    return data_[i * n_ + j];
  }

  bool is_symmetric() const;

  /// Gauss-Jordan inverse; returns false if the matrix is singular.
  bool try_inverse(RationalMatrix& out) const;

  friend bool operator==(const RationalMatrix&, const RationalMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<Rational> data_;
};

RationalMatrix operator*(const RationalMatrix& lhs, const RationalMatrix& rhs);

}  // namespace hfeyn
