#include "hfeyn/oracle.hpp"

#include <map>

#include "hfeyn/errors.hpp"

namespace hfeyn {

namespace {

Rational double_factorial_odd(unsigned n) {
  // (2n-1)!!
  Integer r = 1;
  for (unsigned k = 1; k < 2 * n; k += 2) r *= k;
  return Rational(r);
}

Rational pow(const Rational& q, unsigned e) {
  Rational r = 1;
  for (unsigned k = 0; k < e; ++k) r *= q;
  return r;
}

Rational matching_sum(std::vector<unsigned>& pool, const RationalMatrix& ainv) {
  if (pool.empty()) return 1;
  const unsigned first = pool.back();
  pool.pop_back();
  Rational sum = 0;
  for (std::size_t k = 0; k < pool.size(); ++k) {
    const Rational& w = ainv(first, pool[k]);
    if (w == 0) continue;
    std::swap(pool[k], pool.back());
    const unsigned other = pool.back();
    pool.pop_back();
    sum += w * matching_sum(pool, ainv);
    pool.push_back(other);
    std::swap(pool[k], pool.back());
  }
  pool.push_back(first);
  return sum;
}

class MomentTable {
 public:
  explicit MomentTable(const RationalMatrix& ainv) : ainv_(ainv) {}

  // Pair one copy of the first variable present with every remaining copy.
  Rational operator()(std::vector<unsigned>& counts) {
    std::size_t i = 0;
    while (i < counts.size() && counts[i] == 0) ++i;
    if (i == counts.size()) return 1;
    if (auto it = memo_.find(counts); it != memo_.end()) return it->second;
    const std::vector<unsigned> key = counts;
    Rational sum = 0;
    --counts[i];
    for (std::size_t j = i; j < counts.size(); ++j) {
      if (counts[j] == 0 || ainv_(i, j) == 0) continue;
      const unsigned ways = counts[j];
      --counts[j];
      sum += Rational(ways) * ainv_(i, j) * (*this)(counts);
      ++counts[j];
    }
    ++counts[i];
    memo_.emplace(key, sum);
    return sum;
  }

 private:
  const RationalMatrix& ainv_;
  std::map<std::vector<unsigned>, Rational> memo_;
};

}  // namespace

WickTerm wick_univariate(unsigned degree, const Rational& a) {
  if (a == 0) throw SingularMatrix("a must be nonzero");
  if (degree % 2 != 0) return {Rational(0), 0};
  const unsigned n = degree / 2;
  return {pow(1 / a, n) * double_factorial_odd(n), n};
}

WickTerm wick_multivariate(const PairingOracleInput& in) {
  if (in.indices.size() > kMaxPairingIndices) {
    throw TooLarge("pairing oracle is capped at " + std::to_string(kMaxPairingIndices) + " indices");
  }
  for (unsigned i : in.indices) {
    if (i >= in.a_inverse.size()) throw InvalidModel("pairing index out of range");
  }
  if (in.indices.size() % 2 != 0) return {Rational(0), 0};
  std::vector<unsigned> pool = in.indices;
  return {matching_sum(pool, in.a_inverse), static_cast<unsigned>(in.indices.size() / 2)};
}

Rational gaussian_moment(std::span<const unsigned> exponents, const RationalMatrix& a_inverse) {
  unsigned degree = 0;
  for (unsigned e : exponents) degree += e;
  if (degree > kMaxMomentDegree) {
    throw TooLarge("Gaussian moments are capped at degree " + std::to_string(kMaxMomentDegree));
  }
  if (degree % 2 != 0) return 0;
  std::vector<unsigned> counts(exponents.begin(), exponents.end());
  return MomentTable(a_inverse)(counts);
}

HbarSeries gaussian_perturbation_expectation(const Model& model, const MarkedTensor& f, unsigned max_order) {
  const std::size_t n = model.dimension();
  const GradedElement observable = polynomial_from_tensor(n, f);
  const GradedElement& b = model.interaction_polynomial();
  MomentTable moments(model.a_inverse());

  // A monomial of degree d inside b^k / k! lands at hbar^(d/2 - k); adding
  // factors of b or f never lowers that, so terms beyond 2K are dropped.
  auto prune = [&](const GradedElement& p, unsigned k) {
    GradedElement out(n);
    for (const auto& [m, c] : p.terms()) {
      if (m.x_degree() <= 2 * (max_order + k)) out.add_term(m, c);
    }
    return out;
  };
  auto accumulate = [&](HbarSeries& into, const GradedElement& p, unsigned k) {
    for (const auto& [m, c] : p.terms()) {
      const unsigned d = m.x_degree();
      if (d % 2 != 0 || d / 2 < k || d / 2 - k > max_order) continue;
      std::vector<unsigned> counts(m.x_exponents().begin(), m.x_exponents().end());
      if (d > kMaxMomentDegree) throw TooLarge("Gaussian moments are capped at degree " + std::to_string(kMaxMomentDegree));
      into[d / 2 - k] += c * moments(counts);
    }
  };

  HbarSeries numerator(max_order);
  HbarSeries denominator(max_order);
  GradedElement power = GradedElement::constant(n, 1);  // b^k / k!
  for (unsigned k = 0; !power.is_zero(); ++k) {
    accumulate(denominator, power, k);
    accumulate(numerator, prune(observable * power, k), k);
    power = prune(scale(power * b, Rational(1, k + 1)), k + 1);
  }
  return numerator.divided_by(denominator);
}

HbarSeries d_series(unsigned n, unsigned max_order) {
  HbarSeries d(max_order);
  Rational scale12 = pow(Rational(12), n);
  for (unsigned k = (n + 1) / 2; k <= max_order; ++k) {
    const Rational ratio = Rational(factorial(6 * k - 2 * n)) / Rational(factorial(3 * k - n) * factorial(2 * k - n));
    d[k] = scale12 * pow(Rational(1, 288), k) * ratio;
  }
  return d;
}

HbarSeries c_from_d(unsigned n, unsigned max_order) {
  return d_series(n, max_order).divided_by(d_series(0, max_order));
}

std::optional<unsigned> recursion_failure(std::span<const HbarSeries> c, const Rational& a, const Rational& g) {
  const std::size_t span = g == 0 ? 1 : 2;
  for (unsigned n = 0; n + span < c.size(); ++n) {
    HbarSeries rhs(c[n + 1].order());
    if (g != 0) rhs += (g / 2) * c[n + 2];
    if (n > 0) rhs += Rational(n) * c[n - 1].shifted();
    if (!(a * c[n + 1] == rhs.truncated(c[n + 1].order()))) return n;
  }
  return std::nullopt;
}

bool coefficient_ratios_increasing(const HbarSeries& s, unsigned first, unsigned last) {
  if (last + 1 > s.order()) throw std::invalid_argument("series too short for the ratio window");
  Rational previous;
  for (unsigned k = first; k <= last; ++k) {
    if (s[k] <= 0 || s[k + 1] <= 0) return false;
    const Rational ratio = s[k + 1] / s[k];
    if (k > first && !(ratio > previous)) return false;
    previous = ratio;
  }
  return true;
}

}  // namespace hfeyn
