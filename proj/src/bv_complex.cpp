#include "hfeyn/bv_complex.hpp"

#include <algorithm>
#include <iterator>
#include <random>
#include <stdexcept>
#include <utility>

#include "hfeyn/errors.hpp"

namespace hfeyn {

// Tensor ---------------------------------------------------------------------

Rational Tensor::at(std::span<const unsigned> index) const {
  const auto it = entries_.find(Index(index.begin(), index.end()));
  return it == entries_.end() ? Rational(0) : it->second;
}

void Tensor::set(const Index& index, const Rational& value) {
  if (index.size() != arity_) throw std::invalid_argument("index length does not match tensor arity");
  if (value == 0) {
    entries_.erase(index);
  } else {
    entries_[index] = value;
  }
}

void Tensor::add(const Index& index, const Rational& value) { set(index, at(index) + value); }

void Tensor::set_symmetric(Index index, const Rational& value) {
  std::sort(index.begin(), index.end());
  do {
    set(index, value);
  } while (std::next_permutation(index.begin(), index.end()));
}

bool Tensor::is_symmetric() const {
  for (const auto& [index, value] : entries_) {
    Index perm = index;
    std::sort(perm.begin(), perm.end());
    do {
      if (at(perm) != value) return false;
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  return true;
}

std::size_t Tensor::min_dimension() const {
  std::size_t n = 0;
  for (const auto& [index, value] : entries_)
    for (unsigned i : index) n = std::max<std::size_t>(n, i + 1);
  return n;
}

GradedElement polynomial_from_tensor(std::size_t num_vars, const Tensor& f) {
  if (f.min_dimension() > num_vars) throw std::out_of_range("tensor index exceeds N");
  GradedElement p(num_vars);
  for (const auto& [index, value] : f.entries()) {
    Monomial m(num_vars);
    for (unsigned i : index) m.set_x_exponent(i, m.x_exponent(i) + 1);
    p.add_term(m, value);
  }
  return p;
}

MarkedTensor tensor_from_monomial(std::span<const unsigned> exponents) {
  Tensor::Index index;
  for (unsigned i = 0; i < exponents.size(); ++i) index.insert(index.end(), exponents[i], i);
  MarkedTensor f(static_cast<unsigned>(index.size()));
  f.set(index, 1);
  return f;
}

// Model ----------------------------------------------------------------------

Model::Model(ModelSpec spec) : spec_(std::move(spec)) {}

Model Model::validate(ModelSpec spec) {
  const std::size_t n = spec.dimension;
  if (n == 0 || n > kMaxVariables) {
    throw InvalidModel("dimension must be between 1 and " + std::to_string(kMaxVariables));
  }
  if (spec.a.size() != n) throw InvalidModel("quadratic form is not " + std::to_string(n) + "x" + std::to_string(n));
  if (!spec.a.is_symmetric()) throw AsymmetricTensor("quadratic form a is not symmetric");
  for (const auto& [m, tensor] : spec.interaction) {
    if (m < 3) {
      throw QuadraticInteraction("interaction term of order " + std::to_string(m) +
                                 " present; b must start at cubic order");
    }
    if (tensor.arity() != m) throw InvalidModel("b^(" + std::to_string(m) + ") has the wrong arity");
    if (tensor.min_dimension() > n) throw InvalidModel("b^(" + std::to_string(m) + ") index exceeds N");
    if (!tensor.is_symmetric()) throw AsymmetricTensor("b^(" + std::to_string(m) + ") is not symmetric");
  }

  Model model(std::move(spec));
  if (!model.spec_.a.try_inverse(model.a_inverse_)) throw SingularMatrix("quadratic form a is not invertible");

  model.b_ = GradedElement(n);
  model.db_.assign(n, GradedElement(n));
  for (const auto& [m, tensor] : model.spec_.interaction) {
    const Rational inv_m = Rational(1) / Rational(factorial(m));
    const Rational inv_m1 = Rational(1) / Rational(factorial(m - 1));
    for (const auto& [index, value] : tensor.entries()) {
      Monomial full(n);
      for (unsigned i : index) full.set_x_exponent(i, full.x_exponent(i) + 1);
      model.b_.add_term(full, value * inv_m);
      // db/dx_i = sum_m 1/(m-1)! sum_j b^(m)_{i,j} x_j: read the first slot as i.
      Monomial rest(n);
      for (std::size_t k = 1; k < index.size(); ++k) rest.set_x_exponent(index[k], rest.x_exponent(index[k]) + 1);
      model.db_[index[0]].add_term(rest, value * inv_m1);
    }
  }
  return model;
}

std::set<unsigned> Model::interaction_valences() const {
  std::set<unsigned> out;
  for (const auto& [m, tensor] : spec_.interaction) {
    if (!tensor.is_zero()) out.insert(m);
  }
  return out;
}

// Operators ------------------------------------------------------------------

GradedElement apply_q(const Model& model, const GradedElement& p) {
  const std::size_t n = model.dimension();
  if (p.num_vars() != n) throw std::invalid_argument("element and model have different N");
  GradedElement out(n);
  if (p.truncation()) out = truncate(out, *p.truncation());
  for (std::size_t j = 0; j < n; ++j) {
    const GradedElement dxi = partial_xi(j, p);
    if (dxi.is_zero()) continue;
    GradedElement linear(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (model.a()(i, j) != 0) linear.add_term(Monomial(n).set_x_exponent(i, 1), model.a()(i, j));
    }
    out += mul(linear, dxi);
    out -= mul(model.interaction_gradient(j), dxi);
    out -= mul(GradedElement::hbar(n), partial_x(j, dxi));
  }
  return out;
}

bool q_squared_vanishes(const Model& model, const GradedElement& p) {
  GradedElement exact(p.num_vars());
  for (const auto& [m, c] : p.terms()) exact.add_term(m, c);
  return apply_q(model, apply_q(model, exact)).is_zero();
}

GradedElement delta(const GradedElement& p) {
  GradedElement out(p.num_vars());
  if (p.truncation()) out = truncate(out, *p.truncation());
  for (std::size_t i = 0; i < p.num_vars(); ++i) out += partial_x(i, partial_xi(i, p));
  return out;
}

namespace {

std::map<unsigned, GradedElement> homogeneous_parts(const GradedElement& p) {
  std::map<unsigned, GradedElement> parts;
  for (const auto& [m, c] : p.terms()) {
    auto [it, inserted] = parts.try_emplace(m.degree(), p.num_vars());
    it->second.add_term(m, c);
  }
  return parts;
}

}  // namespace

GradedElement bracket(const GradedElement& f, const GradedElement& g) {
  GradedElement out(f.num_vars());
  const GradedElement dg = delta(g);
  for (const auto& [deg, part] : homogeneous_parts(f)) {
    GradedElement term = delta(mul(part, g)) - mul(delta(part), g);
    if (deg % 2 == 0) {
      term -= mul(part, dg);
    } else {
      term += mul(part, dg);
    }
    out += term;
  }
  return out;
}

QDecomposition decompose_q(const Model& model, const GradedElement& p) {
  const std::size_t n = model.dimension();
  GradedElement contraction(n);
  for (std::size_t i = 0; i < n; ++i) {
    const GradedElement dxi = partial_xi(i, p);
    if (dxi.is_zero()) continue;
    GradedElement ds(n);
    for (std::size_t j = 0; j < n; ++j) {
      if (model.a()(i, j) != 0) ds.add_term(Monomial(n).set_x_exponent(j, 1), model.a()(i, j));
    }
    ds -= model.interaction_gradient(i);
    contraction += mul(ds, dxi);
  }
  return {std::move(contraction), delta(p)};
}

// Reduction ------------------------------------------------------------------

namespace {

std::size_t leading_variable(const Monomial& m) {
  for (std::size_t i = 0; i < m.num_vars(); ++i) {
    if (m.x_exponent(i) > 0) return i;
  }
  throw std::invalid_argument("monomial has no x factor to rewrite");
}

// Work list ordered by x-degree first, so constants sit at the front and the
// lowest/highest nonconstant terms are at the ends of the nonconstant range.
struct WorkKey {
  unsigned x_degree;
  Monomial monomial;
  friend auto operator<=>(const WorkKey&, const WorkKey&) = default;
};

using WorkList = std::map<WorkKey, Rational>;

void accumulate(WorkList& work, const Monomial& m, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = work.try_emplace(WorkKey{m.x_degree(), m}, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) work.erase(it);
  }
}

template <typename Sink>
void emit_rewrite(const Model& model, const Monomial& m, const Rational& c, Sink&& sink) {
  const std::size_t n = model.dimension();
  const std::size_t i = leading_variable(m);
  Monomial rest = m;
  rest.set_x_exponent(i, m.x_exponent(i) - 1);
  for (std::size_t l = 0; l < n; ++l) {
    const Rational& ainv = model.a_inverse()(i, l);
    if (ainv == 0) continue;
    const Rational cl = c * ainv;
    // interaction part: (a^-1)_il (db/dx_l) x^rest
    for (const auto& [t, d] : model.interaction_gradient(l).terms()) {
      Monomial out = rest;
      for (std::size_t k = 0; k < n; ++k) out.set_x_exponent(k, rest.x_exponent(k) + t.x_exponent(k));
      sink(out, cl * d);
    }
    // contraction part: hbar (a^-1)_il d/dx_l x^rest
    const unsigned e = rest.x_exponent(l);
    if (e > 0) {
      Monomial out = rest;
      out.set_x_exponent(l, e - 1);
      out.set_hbar_power(rest.hbar_power() + 1);
      sink(out, cl * e);
    }
  }
}

}  // namespace

GradedElement rewrite_monomial(const Model& model, const Monomial& m, const Rational& c) {
  GradedElement out(model.dimension());
  emit_rewrite(model, m, c, [&](const Monomial& t, const Rational& d) { out.add_term(t, d); });
  return out;
}

HbarSeries reduce_expectation(const Model& model, const GradedElement& f, unsigned max_order,
                              const ReductionOptions& options, ReductionStats* stats) {
  if (f.num_vars() != model.dimension()) throw std::invalid_argument("observable and model have different N");
  if (f.has_xi()) throw NonScalarInput("expectation needs an element of V_0 (no xi factors)");

  const TruncationPolicy policy{max_order};
  WorkList work;
  for (const auto& [m, c] : f.terms()) {
    if (policy.retains(m.hbar_power(), m.x_degree())) accumulate(work, m, c);
  }

  std::mt19937_64 rng(options.seed);
  const WorkKey first_nonconstant{1, Monomial()};
  std::uint64_t steps = 0;
  std::size_t peak = work.size();

  while (true) {
    auto lo = work.lower_bound(first_nonconstant);
    if (lo == work.end()) break;
    WorkList::iterator target;
    switch (options.strategy) {
      case SelectionStrategy::LowestDegreeFirst:
        target = lo;
        break;
      case SelectionStrategy::HighestDegreeFirst:
        target = std::prev(work.end());
        break;
      case SelectionStrategy::Randomized: {
        const auto count = static_cast<std::uint64_t>(std::distance(lo, work.end()));
        std::uniform_int_distribution<std::uint64_t> pick(0, count - 1);
        target = std::next(lo, static_cast<std::ptrdiff_t>(pick(rng)));
        break;
      }
    }
    if (++steps > options.step_budget) {
      throw InternalError("rewrite step budget of " + std::to_string(options.step_budget) + " exhausted");
    }
    const Monomial m = target->first.monomial;
    const Rational c = target->second;
    work.erase(target);
    emit_rewrite(model, m, c, [&](const Monomial& t, const Rational& d) {
      if (policy.retains(t.hbar_power(), t.x_degree())) accumulate(work, t, d);
    });
    peak = std::max(peak, work.size());
  }

  if (stats) {
    stats->steps = steps;
    stats->peak_terms = peak;
  }
  HbarSeries result(max_order);
  for (const auto& [key, c] : work) result[key.monomial.hbar_power()] += c;
  return result;
}

HbarSeries expectation_of_boundary(const Model& model, const GradedElement& g, unsigned max_order,
                                   const ReductionOptions& options) {
  const auto degree = g.homogeneous_degree();
  if (!degree || (*degree != 1 && !g.is_zero())) {
    throw std::invalid_argument("expectation_of_boundary needs a homogeneous degree-1 element");
  }
  return reduce_expectation(model, apply_q(model, g), max_order, options);
}

}  // namespace hfeyn
