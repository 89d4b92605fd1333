#include "hfeyn/rational.hpp"

#include <cctype>
#include <stdexcept>
#include <utility>

namespace hfeyn {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view body = text;
  if (!body.empty() && (body.front() == '+' || body.front() == '-')) body.remove_prefix(1);
  const auto slash = body.find('/');
  const std::string_view num = body.substr(0, slash);
  const std::string_view den = slash == std::string_view::npos ? std::string_view{} : body.substr(slash + 1);
  if (!all_digits(num) || (slash != std::string_view::npos && !all_digits(den))) {
    throw std::invalid_argument("not an exact rational: '" + std::string(text) + "'");
  }
  Integer n(std::string(num), 10);
  Integer d(1);
  if (slash != std::string_view::npos) {
    d = Integer(std::string(den), 10);
    if (d == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
  }
  if (!text.empty() && text.front() == '-') n = -n;
  Rational q(n, d);
  q.canonicalize();
  return q;
}

std::string to_string(const Rational& q) { return q.get_str(); }

Integer factorial(unsigned n) {
  Integer r;
  mpz_fac_ui(r.get_mpz_t(), n);
  return r;
}

RationalMatrix::RationalMatrix(std::size_t n, std::vector<Rational> row_major)
    : n_(n), data_(std::move(row_major)) {
  if (data_.size() != n * n) throw std::invalid_argument("matrix data has wrong size");
}

RationalMatrix RationalMatrix::identity(std::size_t n) {
  RationalMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

bool RationalMatrix::is_symmetric() const {
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i + 1; j < n_; ++j)
      if ((*this)(i, j) != (*this)(j, i)) return false;
  return true;
}

bool RationalMatrix::try_inverse(RationalMatrix& out) const {
  RationalMatrix work = *this;
  RationalMatrix inv = identity(n_);
  for (std::size_t col = 0; col < n_; ++col) {
    std::size_t pivot = col;
    while (pivot < n_ && work(pivot, col) == 0) ++pivot;
    if (pivot == n_) return false;
    if (pivot != col) {
      for (std::size_t j = 0; j < n_; ++j) {
        std::swap(work(pivot, j), work(col, j));
        std::swap(inv(pivot, j), inv(col, j));
      }
    }
    const Rational scale = 1 / work(col, col);
    for (std::size_t j = 0; j < n_; ++j) {
      work(col, j) *= scale;
      inv(col, j) *= scale;
    }
    for (std::size_t row = 0; row < n_; ++row) {
      if (row == col || work(row, col) == 0) continue;
      const Rational factor = work(row, col);
      for (std::size_t j = 0; j < n_; ++j) {
        work(row, j) -= factor * work(col, j);
        inv(row, j) -= factor * inv(col, j);
      }
    }
  }
  out = std::move(inv);
  return true;
}

RationalMatrix operator*(const RationalMatrix& lhs, const RationalMatrix& rhs) {
  const std::size_t n = lhs.size();
  RationalMatrix out(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      if (lhs(i, k) == 0) continue;
      for (std::size_t j = 0; j < n; ++j) out(i, j) += lhs(i, k) * rhs(k, j);
    }
  return out;
}

}  // namespace hfeyn
