#include <algorithm>
#include <limits>
#include <map>
#include <numeric>

#include "hfeyn/diagram.hpp"
#include "hfeyn/errors.hpp"

namespace hfeyn {

namespace {

constexpr std::uint64_t kMaxLabelings = 10'000'000;

// Dense factor over a list of half-edge variables, row-major with the first
// variable slowest.
struct Factor {
  std::vector<unsigned> vars;
  std::vector<Rational> data;
};

std::size_t power(std::size_t base, std::size_t exp) {
  std::size_t r = 1;
  for (std::size_t k = 0; k < exp; ++k) r *= base;
  return r;
}

Factor dense_from_tensor(const Tensor& t, std::span<const unsigned> vars, std::size_t n) {
  Factor f{{vars.begin(), vars.end()}, std::vector<Rational>(power(n, vars.size()))};
  for (const auto& [index, value] : t.entries()) {
    std::size_t flat = 0;
    for (unsigned i : index) flat = flat * n + i;
    f.data[flat] = value;
  }
  return f;
}

// Multiplies all factors in `group` and sums out `var` (pass UINT_MAX to keep all).
Factor combine(const std::vector<const Factor*>& group, unsigned var, std::size_t n) {
  std::vector<unsigned> all;
  for (const Factor* g : group) all.insert(all.end(), g->vars.begin(), g->vars.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());

  Factor out;
  for (unsigned v : all) {
    if (v != var) out.vars.push_back(v);
  }
  out.data.assign(power(n, out.vars.size()), Rational(0));

  // Stride of each variable of `all` inside each factor, and inside out.
  const std::size_t k = all.size();
  std::vector<std::vector<std::size_t>> strides(group.size(), std::vector<std::size_t>(k, 0));
  for (std::size_t g = 0; g < group.size(); ++g) {
    const auto& vars = group[g]->vars;
    std::size_t s = 1;
    for (std::size_t p = vars.size(); p-- > 0;) {
      const auto pos = static_cast<std::size_t>(std::lower_bound(all.begin(), all.end(), vars[p]) - all.begin());
      strides[g][pos] = s;
      s *= n;
    }
  }
  std::vector<std::size_t> out_stride(k, 0);
  {
    std::size_t s = 1;
    for (std::size_t p = k; p-- > 0;) {
      if (all[p] == var) continue;
      out_stride[p] = s;
      s *= n;
    }
  }

  std::vector<unsigned> digit(k, 0);
  std::vector<std::size_t> offset(group.size(), 0);
  std::size_t out_offset = 0;
  Rational term;
  while (true) {
    term = 1;
    for (std::size_t g = 0; g < group.size() && term != 0; ++g) term *= group[g]->data[offset[g]];
    if (term != 0) out.data[out_offset] += term;
    std::size_t p = k;
    while (p-- > 0) {
      if (++digit[p] < n) {
        for (std::size_t g = 0; g < group.size(); ++g) offset[g] += strides[g][p];
        out_offset += out_stride[p];
        break;
      }
      digit[p] = 0;
      for (std::size_t g = 0; g < group.size(); ++g) offset[g] -= strides[g][p] * (n - 1);
      out_offset -= out_stride[p] * (n - 1);
    }
    if (p == std::numeric_limits<std::size_t>::max()) break;
  }
  return out;
}

void check_inputs(const Model& model, const MarkedTensor& f, const FeynmanDiagram& d) {
  const unsigned n = d.valence(d.marked_vertex());
  if (f.arity() != n) {
    throw ArityMismatch("observable has arity " + std::to_string(f.arity()) + " but the marked vertex has valence " +
                        std::to_string(n));
  }
  if (f.min_dimension() > model.dimension()) throw InvalidModel("observable index exceeds the model dimension");
}

bool is_external(const FeynmanDiagram& d, unsigned h) { return d.kind(d.vertex_of(h)) == VertexKind::External; }

GradedElement open_result(std::size_t num_vars, const std::vector<unsigned>& open_vars, const Factor& f) {
  GradedElement out(num_vars);
  const std::size_t n = num_vars;
  std::vector<unsigned> digit(open_vars.size(), 0);
  for (std::size_t flat = 0; flat < f.data.size(); ++flat) {
    if (f.data[flat] != 0) {
      Monomial m(n);
      for (unsigned i : digit) m.set_x_exponent(i, m.x_exponent(i) + 1);
      out.add_term(m, f.data[flat]);
    }
    for (std::size_t p = digit.size(); p-- > 0;) {
      if (++digit[p] < n) break;
      digit[p] = 0;
    }
  }
  return out;
}

}  // namespace

GradedElement evaluate(const Model& model, const MarkedTensor& f, const FeynmanDiagram& d) {
  check_inputs(model, f, d);
  const std::size_t n = model.dimension();
  const auto& interaction = model.interaction();

  if (n == 1) {
    const std::vector<unsigned> zeros(d.half_edge_count(), 0);
    Rational value = f.at(std::span(zeros).first(f.arity()));
    unsigned externals = 0;
    for (unsigned v = 0; v < d.vertex_count() && value != 0; ++v) {
      if (d.kind(v) == VertexKind::External) {
        ++externals;
      } else if (d.kind(v) == VertexKind::Internal) {
        const auto it = interaction.find(d.valence(v));
        value *= it == interaction.end() ? Rational(0) : it->second.at(std::span(zeros).first(d.valence(v)));
      }
    }
    for (const auto& [h, p] : d.edges()) {
      if (!is_external(d, h) && !is_external(d, p)) value *= model.a_inverse()(0, 0);
    }
    GradedElement out(1);
    if (value != 0) {
      Monomial m(1);
      m.set_x_exponent(0, externals);
      out.add_term(m, value);
    }
    return out;
  }

  // Variables are half-edges. An edge touching an external vertex is a
  // delta, so the external half-edge and its partner share one open
  // variable: we name it by the partner and drop the delta factor.
  std::vector<unsigned> var_of(d.half_edge_count());
  for (unsigned h = 0; h < d.half_edge_count(); ++h) var_of[h] = is_external(d, h) ? d.partner(h) : h;

  std::vector<Factor> factors;
  std::vector<unsigned> open_vars;
  for (unsigned v = 0; v < d.vertex_count(); ++v) {
    std::vector<unsigned> vars;
    switch (d.kind(v)) {
      case VertexKind::Marked:
        for (unsigned h : d.marked_legs()) vars.push_back(var_of[h]);
        factors.push_back(dense_from_tensor(f, vars, n));
        break;
      case VertexKind::Internal: {
        for (unsigned h : d.incident(v)) vars.push_back(var_of[h]);
        const auto it = interaction.find(d.valence(v));
        if (it == interaction.end()) return GradedElement(n);
        factors.push_back(dense_from_tensor(it->second, vars, n));
        break;
      }
      case VertexKind::External:
        open_vars.push_back(var_of[d.incident(v)[0]]);
        break;
    }
  }
  for (const auto& [h, p] : d.edges()) {
    if (is_external(d, h) || is_external(d, p)) continue;
    Factor e{{h, p}, std::vector<Rational>(n * n)};
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) e.data[i * n + j] = model.a_inverse()(i, j);
    }
    factors.push_back(std::move(e));
  }

  std::vector<unsigned> summed;
  for (unsigned h = 0; h < d.half_edge_count(); ++h) {
    if (var_of[h] == h && std::find(open_vars.begin(), open_vars.end(), h) == open_vars.end()) summed.push_back(h);
  }

  while (!summed.empty()) {
    // Greedy: eliminate the variable whose merged factor is smallest.
    std::size_t best = 0;
    std::size_t best_size = std::numeric_limits<std::size_t>::max();
    for (std::size_t s = 0; s < summed.size(); ++s) {
      std::vector<unsigned> all;
      for (const auto& fac : factors) {
        if (std::find(fac.vars.begin(), fac.vars.end(), summed[s]) != fac.vars.end()) {
          all.insert(all.end(), fac.vars.begin(), fac.vars.end());
        }
      }
      std::sort(all.begin(), all.end());
      all.erase(std::unique(all.begin(), all.end()), all.end());
      if (all.size() < best_size) {
        best_size = all.size();
        best = s;
      }
    }
    const unsigned var = summed[best];
    summed.erase(summed.begin() + static_cast<std::ptrdiff_t>(best));

    std::vector<const Factor*> group;
    std::vector<Factor> rest;
    for (const auto& fac : factors) {
      if (std::find(fac.vars.begin(), fac.vars.end(), var) != fac.vars.end()) group.push_back(&fac);
    }
    Factor merged = combine(group, var, n);
    for (auto& fac : factors) {
      if (std::find(fac.vars.begin(), fac.vars.end(), var) == fac.vars.end()) rest.push_back(std::move(fac));
    }
    rest.push_back(std::move(merged));
    factors = std::move(rest);
  }

  std::vector<const Factor*> group;
  for (const auto& fac : factors) group.push_back(&fac);
  Factor final_factor = combine(group, std::numeric_limits<unsigned>::max(), n);
  // combine orders its variables increasingly; open_vars must match.
  std::vector<unsigned> sorted_open = open_vars;
  std::sort(sorted_open.begin(), sorted_open.end());
  sorted_open.erase(std::unique(sorted_open.begin(), sorted_open.end()), sorted_open.end());
  if (sorted_open.size() != open_vars.size()) throw InternalError("external vertices share a variable");
  return open_result(n, sorted_open, final_factor);
}

GradedElement evaluate_by_labeling(const Model& model, const MarkedTensor& f, const FeynmanDiagram& d) {
  check_inputs(model, f, d);
  const std::size_t n = model.dimension();
  const std::size_t h_count = d.half_edge_count();
  std::uint64_t total = 1;
  for (std::size_t k = 0; k < h_count; ++k) {
    total *= n;
    if (total > kMaxLabelings) throw TooLarge("labeling sum exceeds " + std::to_string(kMaxLabelings) + " terms");
  }

  const auto& interaction = model.interaction();
  GradedElement out(n);
  std::vector<unsigned> label(h_count, 0);
  std::vector<unsigned> idx;
  for (std::uint64_t count = 0; count < total; ++count) {
    idx.clear();
    for (unsigned h : d.marked_legs()) idx.push_back(label[h]);
    Rational value = f.at(idx);
    Monomial m(n);
    for (unsigned v = 0; v < d.vertex_count() && value != 0; ++v) {
      if (d.kind(v) == VertexKind::Internal) {
        const auto it = interaction.find(d.valence(v));
        if (it == interaction.end()) {
          value = 0;
          break;
        }
        idx.clear();
        for (unsigned h : d.incident(v)) idx.push_back(label[h]);
        value *= it->second.at(idx);
      } else if (d.kind(v) == VertexKind::External) {
        const unsigned i = label[d.incident(v)[0]];
        m.set_x_exponent(i, m.x_exponent(i) + 1);
      }
    }
    for (const auto& [h, p] : d.edges()) {
      if (value == 0) break;
      if (is_external(d, h) || is_external(d, p)) {
        if (label[h] != label[p]) value = 0;
      } else {
        value *= model.a_inverse()(label[h], label[p]);
      }
    }
    if (value != 0) out.add_term(m, value);
    for (std::size_t p = h_count; p-- > 0;) {
      if (++label[p] < n) break;
      label[p] = 0;
    }
  }
  return out;
}

HbarSeries diagram_expectation(const Model& model, const MarkedTensor& f, unsigned max_order) {
  HbarSeries sum(max_order);
  const Monomial one(model.dimension());
  for_each_closed_diagram(f.arity(), model.interaction_valences(), max_order, [&](const EnumeratedDiagram& e) {
    const Rational ev = evaluate(model, f, e.diagram).coefficient(one);
    if (ev != 0) sum[static_cast<unsigned>(e.betti)] += ev / Rational(e.aut_order);
  });
  return sum;
}

}  // namespace hfeyn
