#include "hfeyn/series.hpp"

#include <bit>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "hfeyn/errors.hpp"

namespace hfeyn {

namespace {

std::optional<TruncationPolicy> merged_policy(const GradedElement& p, const GradedElement& q) {
  const auto& a = p.truncation();
  const auto& b = q.truncation();
  if (a && b && *a != *b) {
    throw TruncationMismatch("operands truncated at different hbar orders (" +
                             std::to_string(a->max_hbar_order) + " vs " +
                             std::to_string(b->max_hbar_order) + ")");
  }
  return a ? a : b;
}

void check_vars(const GradedElement& p, const GradedElement& q) {
  if (p.num_vars() != q.num_vars()) {
    throw std::invalid_argument("elements live in algebras with different N");
  }
}

void check_index(std::size_t i, std::size_t n) {
  if (i >= n) {
    throw std::out_of_range("variable index " + std::to_string(i) + " out of range for N = " +
                            std::to_string(n));
  }
}

// Sign of xi_A * xi_B after sorting into increasing order: one factor of -1
// for each pair a in A, b in B with a > b.
int koszul_sign(std::uint64_t left, std::uint64_t right) {
  unsigned inversions = 0;
  while (right != 0) {
    const int b = std::countr_zero(right);
    right &= right - 1;
    const std::uint64_t above = b == 63 ? 0 : (~std::uint64_t{0} << (b + 1));
    inversions += std::popcount(left & above);
  }
  return (inversions & 1U) ? -1 : 1;
}

const char* const kSuperscripts[] = {"⁰", "¹", "²", "³", "⁴", "⁵", "⁶", "⁷", "⁸", "⁹"};

std::string superscript(unsigned k) {
  std::string digits = std::to_string(k);
  std::string out;
  for (char c : digits) out += kSuperscripts[c - '0'];
  return out;
}

}  // namespace

// Monomial ------------------------------------------------------------------

Monomial::Monomial(std::vector<unsigned> x_exponents, std::uint64_t xi_mask, unsigned hbar_power)
    : x_(std::move(x_exponents)), xi_(xi_mask), hbar_(hbar_power) {
  set_xi_mask(xi_mask);
}

unsigned Monomial::degree() const noexcept { return static_cast<unsigned>(std::popcount(xi_)); }

unsigned Monomial::x_degree() const noexcept {
  unsigned d = 0;
  for (unsigned e : x_) d += e;
  return d;
}

std::vector<std::size_t> Monomial::xi_indices() const {
  std::vector<std::size_t> out;
  for (std::uint64_t m = xi_; m != 0; m &= m - 1) out.push_back(std::countr_zero(m));
  return out;
}

Monomial& Monomial::set_x_exponent(std::size_t i, unsigned e) {
  check_index(i, x_.size());
  x_[i] = e;
  return *this;
}

Monomial& Monomial::set_xi_mask(std::uint64_t mask) {
  if (x_.size() < 64 && (mask >> x_.size()) != 0) {
    throw std::out_of_range("xi index beyond N");
  }
  xi_ = mask;
  return *this;
}

// GradedElement --------------------------------------------------------------

GradedElement GradedElement::constant(std::size_t num_vars, const Rational& c) {
  GradedElement p(num_vars);
  p.add_term(Monomial(num_vars), c);
  return p;
}

GradedElement GradedElement::monomial(const Monomial& m, const Rational& c) {
  GradedElement p(m.num_vars());
  p.add_term(m, c);
  return p;
}

GradedElement GradedElement::x(std::size_t num_vars, std::size_t i, unsigned power) {
  check_index(i, num_vars);
  Monomial m(num_vars);
  m.set_x_exponent(i, power);
  return monomial(m);
}

GradedElement GradedElement::xi(std::size_t num_vars, std::size_t i) {
  check_index(i, num_vars);
  Monomial m(num_vars);
  m.set_xi_mask(std::uint64_t{1} << i);
  return monomial(m);
}

GradedElement GradedElement::hbar(std::size_t num_vars, unsigned power) {
  Monomial m(num_vars);
  m.set_hbar_power(power);
  return monomial(m);
}

Rational GradedElement::coefficient(const Monomial& m) const {
  const auto it = terms_.find(m);
  return it == terms_.end() ? Rational(0) : it->second;
}

void GradedElement::add_term(const Monomial& m, const Rational& c) {
  if (m.num_vars() != num_vars_) throw std::invalid_argument("monomial has wrong number of variables");
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

std::optional<unsigned> GradedElement::homogeneous_degree() const {
  if (terms_.empty()) return 0U;
  const unsigned d = terms_.begin()->first.degree();
  for (const auto& [m, c] : terms_) {
    if (m.degree() != d) return std::nullopt;
  }
  return d;
}

bool GradedElement::has_xi() const {
  for (const auto& [m, c] : terms_) {
    if (m.xi_mask() != 0) return true;
  }
  return false;
}

GradedElement& GradedElement::operator+=(const GradedElement& other) {
  *this = add(*this, other);
  return *this;
}

GradedElement& GradedElement::operator-=(const GradedElement& other) {
  *this = subtract(*this, other);
  return *this;
}

GradedElement& GradedElement::operator*=(const Rational& c) {
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, coeff] : terms_) coeff *= c;
  return *this;
}

GradedElement add(const GradedElement& p, const GradedElement& q) {
  check_vars(p, q);
  const auto policy = merged_policy(p, q);
  GradedElement out = p;
  for (const auto& [m, c] : q.terms()) out.add_term(m, c);
  return policy ? truncate(out, *policy) : out;
}

GradedElement subtract(const GradedElement& p, const GradedElement& q) { return add(p, scale(q, -1)); }

GradedElement scale(const GradedElement& p, const Rational& c) {
  GradedElement out = p;
  out *= c;
  return out;
}

GradedElement mul(const GradedElement& p, const GradedElement& q) {
  check_vars(p, q);
  const auto policy = merged_policy(p, q);
  const std::size_t n = p.num_vars();
  GradedElement out(n);
  std::vector<unsigned> exps(n);
  for (const auto& [mp, cp] : p.terms()) {
    for (const auto& [mq, cq] : q.terms()) {
      if ((mp.xi_mask() & mq.xi_mask()) != 0) continue;
      const unsigned hbar = mp.hbar_power() + mq.hbar_power();
      unsigned xdeg = 0;
      for (std::size_t i = 0; i < n; ++i) {
        exps[i] = mp.x_exponent(i) + mq.x_exponent(i);
        xdeg += exps[i];
      }
      if (policy && !policy->retains(hbar, xdeg)) continue;
      const int sign = koszul_sign(mp.xi_mask(), mq.xi_mask());
      Rational c = cp * cq;
      if (sign < 0) c = -c;
      out.add_term(Monomial(exps, mp.xi_mask() | mq.xi_mask(), hbar), c);
    }
  }
  return policy ? truncate(out, *policy) : out;
}

GradedElement partial_x(std::size_t i, const GradedElement& p) {
  check_index(i, p.num_vars());
  GradedElement out(p.num_vars());
  for (const auto& [m, c] : p.terms()) {
    const unsigned e = m.x_exponent(i);
    if (e == 0) continue;
    Monomial d = m;
    d.set_x_exponent(i, e - 1);
    out.add_term(d, c * e);
  }
  return p.truncation() ? truncate(out, *p.truncation()) : out;
}

GradedElement partial_xi(std::size_t i, const GradedElement& p) {
  check_index(i, p.num_vars());
  const std::uint64_t bit = std::uint64_t{1} << i;
  GradedElement out(p.num_vars());
  for (const auto& [m, c] : p.terms()) {
    if ((m.xi_mask() & bit) == 0) continue;
    const int preceding = std::popcount(m.xi_mask() & (bit - 1));
    Monomial d = m;
    d.set_xi_mask(m.xi_mask() & ~bit);
    out.add_term(d, (preceding & 1) ? Rational(-c) : c);
  }
  return p.truncation() ? truncate(out, *p.truncation()) : out;
}

GradedElement truncate(const GradedElement& p, const TruncationPolicy& policy) {
  GradedElement out(p.num_vars());
  for (const auto& [m, c] : p.terms()) {
    if (policy.retains(m.hbar_power(), m.x_degree())) out.terms_.emplace_hint(out.terms_.end(), m, c);
  }
  out.truncation_ = policy;
  return out;
}

std::string to_string(const Monomial& m) {
  std::ostringstream os;
  bool first = true;
  auto sep = [&] {
    if (!first) os << ' ';
    first = false;
  };
  for (std::size_t i = 0; i < m.num_vars(); ++i) {
    const unsigned e = m.x_exponent(i);
    if (e == 0) continue;
    sep();
    os << 'x' << (i + 1);
    if (e > 1) os << '^' << e;
  }
  for (std::size_t i : m.xi_indices()) {
    sep();
    os << "ξ" << (i + 1);
  }
  if (m.hbar_power() > 0) {
    sep();
    os << "ħ";
    if (m.hbar_power() > 1) os << '^' << m.hbar_power();
  }
  if (first) os << '1';
  return os.str();
}

std::string to_string(const GradedElement& p) {
  if (p.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : p.terms()) {
    const bool negative = c < 0;
    const Rational mag = abs(c);
    if (first) {
      if (negative) os << '-';
    } else {
      os << (negative ? " - " : " + ");
    }
    first = false;
    const bool unit_monomial = m.x_degree() == 0 && m.degree() == 0 && m.hbar_power() == 0;
    if (unit_monomial) {
      os << to_string(mag);
    } else {
      if (mag != 1) os << to_string(mag) << ' ';
      os << to_string(m);
    }
  }
  return os.str();
}

// HbarSeries -----------------------------------------------------------------

HbarSeries::HbarSeries(std::vector<Rational> coefficients) : coeffs_(std::move(coefficients)) {
  if (coeffs_.empty()) coeffs_.resize(1);
}

HbarSeries HbarSeries::one(unsigned order) {
  HbarSeries s(order);
  s.coeffs_[0] = 1;
  return s;
}

HbarSeries HbarSeries::monomial(unsigned order, unsigned power, const Rational& c) {
  HbarSeries s(order);
  if (power <= order) s.coeffs_[power] = c;
  return s;
}

bool HbarSeries::is_zero() const {
  for (const auto& c : coeffs_) {
    if (c != 0) return false;
  }
  return true;
}

HbarSeries HbarSeries::truncated(unsigned order) const {
  HbarSeries out(order);
  for (unsigned k = 0; k <= order && k < coeffs_.size(); ++k) out.coeffs_[k] = coeffs_[k];
  return out;
}

HbarSeries HbarSeries::derivative() const {
  HbarSeries out(order() == 0 ? 0 : order() - 1);
  for (unsigned k = 1; k < coeffs_.size(); ++k) out.coeffs_[k - 1] = coeffs_[k] * k;
  return out;
}

HbarSeries HbarSeries::shifted() const {
  HbarSeries out(order());
  for (unsigned k = 1; k < coeffs_.size(); ++k) out.coeffs_[k] = coeffs_[k - 1];
  return out;
}

HbarSeries HbarSeries::divided_by(const HbarSeries& divisor) const {
  if (divisor.coeffs_[0] != 1) {
    throw std::domain_error("series division needs a divisor with constant term 1");
  }
  const unsigned n = std::min(order(), divisor.order());
  HbarSeries q(n);
  for (unsigned k = 0; k <= n; ++k) {
    Rational acc = coeffs_[k];
    for (unsigned j = 1; j <= k; ++j) acc -= divisor.coeffs_[j] * q.coeffs_[k - j];
    q.coeffs_[k] = acc;
  }
  return q;
}

HbarSeries& HbarSeries::operator+=(const HbarSeries& other) {
  *this = *this + other;
  return *this;
}

HbarSeries& HbarSeries::operator-=(const HbarSeries& other) {
  *this = *this - other;
  return *this;
}

HbarSeries& HbarSeries::operator*=(const Rational& c) {
  for (auto& x : coeffs_) x *= c;
  return *this;
}

HbarSeries operator+(const HbarSeries& lhs, const HbarSeries& rhs) {
  HbarSeries out(std::min(lhs.order(), rhs.order()));
  for (unsigned k = 0; k <= out.order(); ++k) out[k] = lhs[k] + rhs[k];
  return out;
}

HbarSeries operator-(const HbarSeries& lhs, const HbarSeries& rhs) {
  HbarSeries out(std::min(lhs.order(), rhs.order()));
  for (unsigned k = 0; k <= out.order(); ++k) out[k] = lhs[k] - rhs[k];
  return out;
}

HbarSeries operator*(const HbarSeries& lhs, const HbarSeries& rhs) {
  HbarSeries out(std::min(lhs.order(), rhs.order()));
  for (unsigned i = 0; i <= out.order(); ++i) {
    if (lhs[i] == 0) continue;
    for (unsigned j = 0; i + j <= out.order(); ++j) out[i + j] += lhs[i] * rhs[j];
  }
  return out;
}

HbarSeries operator*(const Rational& c, const HbarSeries& s) {
  HbarSeries out = s;
  out *= c;
  return out;
}

std::string to_string(const HbarSeries& s) {
  std::ostringstream os;
  bool first = true;
  for (unsigned k = 0; k <= s.order(); ++k) {
    const Rational& c = s[k];
    if (c == 0) continue;
    const bool negative = c < 0;
    const Rational mag = abs(c);
    if (first) {
      if (negative) os << '-';
    } else {
      os << (negative ? " - " : " + ");
    }
    first = false;
    if (k == 0) {
      os << to_string(mag);
      continue;
    }
    if (mag != 1) os << to_string(mag) << ' ';
    os << "ħ";
    if (k > 1) os << superscript(k);
  }
  if (first) return "0";
  return os.str();
}

std::optional<unsigned> first_mismatch(const HbarSeries& a, const HbarSeries& b) {
  const unsigned n = std::min(a.order(), b.order());
  for (unsigned k = 0; k <= n; ++k) {
    if (a[k] != b[k]) return k;
  }
  return std::nullopt;
}

}  // namespace hfeyn
