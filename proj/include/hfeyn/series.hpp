#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hfeyn/rational.hpp"

namespace hfeyn {

/// Keeps a monomial hbar^j x^alpha iff j + ceil(|alpha|/2) <= max_hbar_order.
///
/// A monomial of x-degree d cannot reach the expectation before order
/// ceil(d/2): every closed diagram with d marked legs has Betti number at
/// least d/2 once all internal vertices are at least trivalent.
struct TruncationPolicy {
  unsigned max_hbar_order = 0;

  bool retains(unsigned hbar_power, unsigned x_degree) const noexcept {
    return hbar_power + (x_degree + 1) / 2 <= max_hbar_order;
  }

  friend bool operator==(const TruncationPolicy&, const TruncationPolicy&) = default;
};

inline constexpr std::size_t kMaxVariables = 64;

/// x^alpha xi_S hbar^j. The odd part is a bitmask, so the xi factors are
/// always read in increasing index order.
class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(std::size_t num_vars) : x_(num_vars, 0) {}
  Monomial(std::vector<unsigned> x_exponents, std::uint64_t xi_mask, unsigned hbar_power);

  std::size_t num_vars() const noexcept { return x_.size(); }
  std::span<const unsigned> x_exponents() const noexcept { return x_; }
  unsigned x_exponent(std::size_t i) const { return x_.at(i); }
  std::uint64_t xi_mask() const noexcept { return xi_; }
  bool has_xi(std::size_t i) const noexcept { return (xi_ >> i) & 1U; }
  unsigned hbar_power() const noexcept { return hbar_; }

  /// Homological degree: the number of xi factors.
  unsigned degree() const noexcept;
  unsigned x_degree() const noexcept;
  std::vector<std::size_t> xi_indices() const;

  Monomial& set_x_exponent(std::size_t i, unsigned e);
  Monomial& set_hbar_power(unsigned j) noexcept {
    hbar_ = j;
    return *this;
  }
  Monomial& set_xi_mask(std::uint64_t mask);

  friend auto operator<=>(const Monomial&, const Monomial&) = default;

 private:
  std::vector<unsigned> x_;
  std::uint64_t xi_ = 0;
  unsigned hbar_ = 0;
};

/// An element of K[x_1..x_N, xi_1..xi_N, hbar], finitely supported, with an
/// optional record of the truncation applied to it.
class GradedElement {
 public:
  using Terms = std::map<Monomial, Rational>;

  GradedElement() = default;
  explicit GradedElement(std::size_t num_vars) : num_vars_(num_vars) {}

  static GradedElement constant(std::size_t num_vars, const Rational& c);
  static GradedElement monomial(const Monomial& m, const Rational& c = 1);
  static GradedElement x(std::size_t num_vars, std::size_t i, unsigned power = 1);
  static GradedElement xi(std::size_t num_vars, std::size_t i);
  static GradedElement hbar(std::size_t num_vars, unsigned power = 1);

  std::size_t num_vars() const noexcept { return num_vars_; }
  const Terms& terms() const noexcept { return terms_; }
  std::size_t size() const noexcept { return terms_.size(); }
  bool is_zero() const noexcept { return terms_.empty(); }
  const std::optional<TruncationPolicy>& truncation() const noexcept { return truncation_; }

  Rational coefficient(const Monomial& m) const;

  /// Adds c * m, dropping the term if the coefficient cancels.
  void add_term(const Monomial& m, const Rational& c);

  /// The common homological degree of all terms; nullopt if the element is
  /// inhomogeneous. Zero counts as homogeneous of every degree (returns 0).
  std::optional<unsigned> homogeneous_degree() const;
  bool has_xi() const;

  GradedElement& operator+=(const GradedElement& other);
  GradedElement& operator-=(const GradedElement& other);
  GradedElement& operator*=(const Rational& c);

  friend bool operator==(const GradedElement& lhs, const GradedElement& rhs) {
    return lhs.num_vars_ == rhs.num_vars_ && lhs.terms_ == rhs.terms_;
  }

 private:
  friend GradedElement truncate(const GradedElement&, const TruncationPolicy&);

  std::size_t num_vars_ = 0;
  Terms terms_;
  std::optional<TruncationPolicy> truncation_;
};

GradedElement add(const GradedElement& p, const GradedElement& q);
GradedElement subtract(const GradedElement& p, const GradedElement& q);
GradedElement mul(const GradedElement& p, const GradedElement& q);
GradedElement scale(const GradedElement& p, const Rational& c);

/// d/dx_i; i is zero-based.
GradedElement partial_x(std::size_t i, const GradedElement& p);

/// Left derivative d/dxi_i (odd): removing xi_i from xi_{i1}...xi_{ik}
/// contributes (-1)^(number of xi factors before xi_i).
GradedElement partial_xi(std::size_t i, const GradedElement& p);

GradedElement truncate(const GradedElement& p, const TruncationPolicy& policy);

inline GradedElement operator+(const GradedElement& p, const GradedElement& q) { return add(p, q); }
inline GradedElement operator-(const GradedElement& p, const GradedElement& q) {
  return subtract(p, q);
}
inline GradedElement operator*(const GradedElement& p, const GradedElement& q) { return mul(p, q); }
inline GradedElement operator*(const Rational& c, const GradedElement& p) { return scale(p, c); }
inline GradedElement operator-(const GradedElement& p) { return scale(p, -1); }

std::string to_string(const Monomial& m);
std::string to_string(const GradedElement& p);

/// A truncated power series in hbar: coefficients of hbar^0 .. hbar^order.
class HbarSeries {
 public:
  explicit HbarSeries(unsigned order = 0) : coeffs_(order + 1) {}
  explicit HbarSeries(std::vector<Rational> coefficients);

  static HbarSeries one(unsigned order);
  static HbarSeries monomial(unsigned order, unsigned power, const Rational& c);

  unsigned order() const noexcept { return static_cast<unsigned>(coeffs_.size() - 1); }
  const Rational& operator[](unsigned k) const { return coeffs_.at(k); }
  Rational& operator[](unsigned k) { return coeffs_.at(k); }
  std::span<const Rational> coefficients() const noexcept { return coeffs_; }
  bool is_zero() const;

  HbarSeries truncated(unsigned order) const;
  HbarSeries derivative() const;
  /// Multiplies by hbar, keeping the same order.
  HbarSeries shifted() const;

  /// Quotient of truncated series; the divisor must have constant term 1.
  HbarSeries divided_by(const HbarSeries& divisor) const;

  HbarSeries& operator+=(const HbarSeries& other);
  HbarSeries& operator-=(const HbarSeries& other);
  HbarSeries& operator*=(const Rational& c);

  friend bool operator==(const HbarSeries&, const HbarSeries&) = default;

 private:
  std::vector<Rational> coeffs_;
};

// Binary operators keep the smaller of the two orders.
HbarSeries operator+(const HbarSeries& lhs, const HbarSeries& rhs);
HbarSeries operator-(const HbarSeries& lhs, const HbarSeries& rhs);
HbarSeries operator*(const HbarSeries& lhs, const HbarSeries& rhs);
HbarSeries operator*(const Rational& c, const HbarSeries& s);

/// Lowest power first, e.g. "ħ + 5/4 ħ²"; the zero series renders as "0".
std::string to_string(const HbarSeries& s);

/// Index of the first coefficient where the two series differ, comparing
/// through the smaller order; nullopt if they agree.
std::optional<unsigned> first_mismatch(const HbarSeries& a, const HbarSeries& b);

}  // namespace hfeyn
