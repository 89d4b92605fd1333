#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "hfeyn/rational.hpp"
#include "hfeyn/series.hpp"

namespace hfeyn {

/// Sparse tensor over {0..N-1}^arity. Entries are keyed by the full index
/// vector; zero entries are never stored.
class Tensor {
 public:
  using Index = std::vector<unsigned>;

  Tensor() = default;
  explicit Tensor(unsigned arity) : arity_(arity) {}

  unsigned arity() const noexcept { return arity_; }
  const std::map<Index, Rational>& entries() const noexcept { return entries_; }
  bool is_zero() const noexcept { return entries_.empty(); }

  Rational at(std::span<const unsigned> index) const;
  void set(const Index& index, const Rational& value);
  void add(const Index& index, const Rational& value);

  /// Sets value at every permutation of index.
  void set_symmetric(Index index, const Rational& value);

  bool is_symmetric() const;
  /// Largest index used plus one (0 for an empty tensor).
  std::size_t min_dimension() const;

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  unsigned arity_ = 0;
  std::map<Index, Rational> entries_;
};

/// The tensor f carried by the marked vertex; legs read f in order.
using MarkedTensor = Tensor;

/// Sum over index vectors of f_i x_{i1}...x_{in}.
GradedElement polynomial_from_tensor(std::size_t num_vars, const Tensor& f);

/// Single-entry tensor for x^alpha: the index vector lists each variable
/// with its multiplicity, in increasing order.
MarkedTensor tensor_from_monomial(std::span<const unsigned> exponents);

/// Unvalidated model data: a quadratic form and the Taylor tensors b^(m).
struct ModelSpec {
  std::size_t dimension = 0;
  RationalMatrix a;
  std::map<unsigned, Tensor> interaction;  // m -> b^(m)
  std::string label;

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

/// A model that passed validation, with a^-1 and the gradient of b cached.
/// Immutable; safe to share between threads.
class Model {
 public:
  static Model validate(ModelSpec spec);

  const ModelSpec& spec() const noexcept { return spec_; }
  std::size_t dimension() const noexcept { return spec_.dimension; }
  const RationalMatrix& a() const noexcept { return spec_.a; }
  const RationalMatrix& a_inverse() const noexcept { return a_inverse_; }
  const std::map<unsigned, Tensor>& interaction() const noexcept { return spec_.interaction; }

  /// Valences m with a nonzero b^(m).
  std::set<unsigned> interaction_valences() const;

  /// b(x) = sum_m 1/m! sum_i b^(m)_i x_i.
  const GradedElement& interaction_polynomial() const noexcept { return b_; }
  /// db/dx_i.
  const GradedElement& interaction_gradient(std::size_t i) const { return db_.at(i); }

 private:
  explicit Model(ModelSpec spec);

  ModelSpec spec_;
  RationalMatrix a_inverse_;
  GradedElement b_;
  std::vector<GradedElement> db_;
};

/// Q = sum a_ij x_i d/dxi_j - sum (db/dx_i) d/dxi_i - hbar sum d^2/dx_i dxi_i.
GradedElement apply_q(const Model& model, const GradedElement& p);

/// Applies Q twice without truncation and checks for zero.
bool q_squared_vanishes(const Model& model, const GradedElement& p);

/// The BV Laplacian sum_i d^2/dx_i dxi_i.
GradedElement delta(const GradedElement& p);

/// {f, g} = Delta(fg) - (Delta f) g - (-1)^|f| f (Delta g), extended
/// bilinearly over the homogeneous components of f.
GradedElement bracket(const GradedElement& f, const GradedElement& g);

struct QDecomposition {
  GradedElement contraction;  // sum (dS/dx_i) d/dxi_i applied to p
  GradedElement laplacian;    // Delta p
};

/// Splits Q = A - hbar Delta with S = 1/2 x.a.x - b.
QDecomposition decompose_q(const Model& model, const GradedElement& p);

enum class SelectionStrategy { LowestDegreeFirst, HighestDegreeFirst, Randomized };

struct ReductionOptions {
  SelectionStrategy strategy = SelectionStrategy::LowestDegreeFirst;
  std::uint64_t seed = 0;
  std::uint64_t step_budget = 100'000'000;
};

struct ReductionStats {
  std::uint64_t steps = 0;
  std::size_t peak_terms = 0;
};

/// <f> mod hbar^(K+1), by rewriting f modulo boundaries until only
/// constants remain. Throws NonScalarInput if f carries any xi factor.
HbarSeries reduce_expectation(const Model& model, const GradedElement& f, unsigned max_order,
                              const ReductionOptions& options = {}, ReductionStats* stats = nullptr);

/// One rewrite of c hbar^j x^alpha: subtracts c hbar^j Q(sum_j (a^-1)_ij x^(alpha - e_i) xi_j)
/// where i is the smallest variable in alpha. Exposed for testing.
GradedElement rewrite_monomial(const Model& model, const Monomial& m, const Rational& c);

/// <Q g>, which must vanish for every degree-1 g.
HbarSeries expectation_of_boundary(const Model& model, const GradedElement& g, unsigned max_order,
                                   const ReductionOptions& options = {});

}  // namespace hfeyn
