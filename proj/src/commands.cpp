#include "hfeyn/commands.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "hfeyn/diagram.hpp"
#include "hfeyn/errors.hpp"
#include "hfeyn/oracle.hpp"
#include "hfeyn/random.hpp"

namespace hfeyn {

namespace {

std::size_t display_width(const std::string& s) {
  return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [](char c) { return (c & 0xC0) != 0x80; }));
}

std::string pad(const std::string& s, std::size_t width) {
  const std::size_t w = display_width(s);
  return w >= width ? s : s + std::string(width - w, ' ');
}

std::string series_term(unsigned power, const Rational& c) {
  return to_string(HbarSeries::monomial(power, power, c));
}

const char* method_name(Method m) {
  switch (m) {
    case Method::Reduce:
      return "reduce";
    case Method::Diagrams:
      return "diagrams";
    case Method::Oracle:
      return "oracle";
    case Method::All:
      break;
  }
  return "all";
}

HbarSeries run_method(Method m, const Model& model, const MarkedTensor& f, unsigned max_order) {
  switch (m) {
    case Method::Reduce:
      return reduce_expectation(model, polynomial_from_tensor(model.dimension(), f), max_order);
    case Method::Diagrams:
      return diagram_expectation(model, f, max_order);
    case Method::Oracle:
      return gaussian_perturbation_expectation(model, f, max_order);
    case Method::All:
      break;
  }
  throw std::invalid_argument("run_method needs a single method");
}

// Returns the disagreement description, if any.
std::optional<std::string> compare_three(const Model& model, const MarkedTensor& f, unsigned max_order,
                                         HbarSeries* agreed = nullptr) {
  const Method methods[] = {Method::Reduce, Method::Diagrams, Method::Oracle};
  std::vector<HbarSeries> results;
  for (Method m : methods) results.push_back(run_method(m, model, f, max_order));
  for (std::size_t k = 1; k < results.size(); ++k) {
    if (const auto at = first_mismatch(results[0], results[k])) {
      std::ostringstream os;
      os << "disagree at ħ^" << *at << ":";
      for (std::size_t j = 0; j < results.size(); ++j) {
        os << ' ' << method_name(methods[j]) << " = " << to_string(results[j]) << (j + 1 < results.size() ? ";" : "");
      }
      return os.str();
    }
  }
  if (agreed != nullptr) *agreed = results[0];
  return std::nullopt;
}

std::string describe_tensor(const MarkedTensor& f) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [index, value] : f.entries()) {
    os << (first ? "" : "; ") << '[';
    for (std::size_t k = 0; k < index.size(); ++k) os << (k ? " " : "") << index[k] + 1;
    os << "] = " << to_string(value);
    first = false;
  }
  return first ? "0" : os.str();
}

std::string edge_list(const FeynmanDiagram& d) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [h, p] : d.edges()) {
    os << (first ? "" : " ") << h << '-' << p;
    first = false;
  }
  return first ? "-" : os.str();
}

nlohmann::json integer_json(const Integer& z) {
  if (z.fits_ulong_p()) return z.get_ui();
  return z.get_str();
}

nlohmann::json series_json(const HbarSeries& s) {
  nlohmann::json coeffs = nlohmann::json::array();
  for (const auto& c : s.coefficients()) coeffs.push_back(to_string(c));
  return coeffs;
}

}  // namespace

CommandResult cmd_expect(const Model& model, const MarkedTensor& f, unsigned max_order, Method method) {
  CommandResult r;
  std::ostringstream out;
  if (method != Method::All) {
    out << "⟨f⟩ = " << to_string(run_method(method, model, f, max_order)) << '\n';
  } else {
    HbarSeries value;
    if (const auto mismatch = compare_three(model, f, max_order, &value)) {
      out << "methods " << *mismatch << '\n';
      r.exit_code = 1;
    } else {
      out << "⟨f⟩ = " << to_string(value) << " ; methods agree\n";
    }
  }
  r.output = out.str();
  return r;
}

CommandResult cmd_list_diagrams(const Model& model, const MarkedTensor& f, unsigned max_order, ListFormat format) {
  struct Row {
    EnumeratedDiagram e;
    Rational ev;
  };
  std::vector<Row> rows;
  HbarSeries sum(max_order);
  const Monomial one(model.dimension());
  for_each_closed_diagram(f.arity(), model.interaction_valences(), max_order, [&](const EnumeratedDiagram& e) {
    Rational ev = evaluate(model, f, e.diagram).coefficient(one);
    sum[static_cast<unsigned>(e.betti)] += ev / Rational(e.aut_order);
    rows.push_back({e, std::move(ev)});
  });

  std::ostringstream out;
  if (format == ListFormat::Table) {
    std::vector<std::vector<std::string>> cells;
    cells.push_back({"#", "β", "|Aut|", "ev", "contribution", "edges"});
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const auto& [e, ev] = rows[k];
      cells.push_back({std::to_string(k + 1), std::to_string(e.betti), e.aut_order.get_str(), to_string(ev),
                       series_term(static_cast<unsigned>(e.betti), ev / Rational(e.aut_order)),
                       edge_list(e.diagram)});
    }
    std::vector<std::size_t> width(cells[0].size(), 0);
    for (const auto& row : cells) {
      for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], display_width(row[c]));
    }
    for (const auto& row : cells) {
      std::string line;
      for (std::size_t c = 0; c < row.size(); ++c) line += c + 1 < row.size() ? pad(row[c], width[c] + 2) : row[c];
      out << line << '\n';
    }
    out << rows.size() << " diagram" << (rows.size() == 1 ? "" : "s") << "; sum through ħ^" << max_order << " = "
        << to_string(sum) << '\n';
  } else {
    static constexpr const char* kKind[] = {"marked", "internal", "external"};
    for (const auto& [e, ev] : rows) {
      const auto& d = e.diagram;
      nlohmann::json rec;
      rec["H"] = d.half_edge_count();
      rec["pairing"] = nlohmann::json::array();
      for (const auto& [h, p] : d.edges()) rec["pairing"].push_back({h, p});
      rec["vertexOf"] = std::vector<unsigned>(d.vertex_assignment().begin(), d.vertex_assignment().end());
      rec["vertexKind"] = nlohmann::json::array();
      for (VertexKind k : d.vertex_kinds()) rec["vertexKind"].push_back(kKind[static_cast<int>(k)]);
      rec["markedLegs"] = std::vector<unsigned>(d.marked_legs().begin(), d.marked_legs().end());
      rec["betti"] = e.betti;
      rec["aut"] = integer_json(e.aut_order);
      rec["evaluation"] = to_string(ev);
      rec["contribution"] = to_string(ev / Rational(e.aut_order));
      out << rec.dump() << '\n';
    }
    nlohmann::json footer;
    footer["diagrams"] = rows.size();
    footer["order"] = max_order;
    footer["partialSum"] = series_json(sum);
    out << footer.dump() << '\n';
  }
  return {0, out.str()};
}

CommandResult cmd_check(const Model& model, const CheckOptions& opt) {
  const std::size_t n = model.dimension();
  const unsigned K = opt.max_order;
  Rng rng(opt.seed);
  std::ostringstream out;
  int failures = 0;
  auto report = [&](const std::string& name, const std::string& detail, std::optional<std::string> counterexample) {
    if (counterexample) {
      ++failures;
      out << "FAIL " << name << ": " << detail << "\n  counterexample: " << *counterexample << '\n';
    } else {
      out << "PASS " << name << ": " << detail << '\n';
    }
  };

  {
    std::optional<std::string> bad;
    for (std::size_t s = 0; s < opt.samples && !bad; ++s) {
      const auto deg = static_cast<unsigned>(s % (std::min<std::size_t>(n, 3) + 1));
      const GradedElement p = random_element(rng, n, deg, 4, 4, 2);
      if (!q_squared_vanishes(model, p)) bad = to_string(p);
    }
    report("q-squared", std::to_string(opt.samples) + " random elements, Q(Q(p)) = 0", bad);
  }
  {
    std::optional<std::string> bad;
    for (std::size_t s = 0; s < opt.samples && !bad; ++s) {
      const GradedElement g = random_element(rng, n, 1, 3, 3);
      const HbarSeries e = expectation_of_boundary(model, g, K);
      if (!e.is_zero()) bad = "g = " + to_string(g) + ", ⟨Q g⟩ = " + to_string(e);
    }
    report("boundaries", std::to_string(opt.samples) + " random degree-1 g, ⟨Q g⟩ = 0 through ħ^" + std::to_string(K),
           bad);
  }

  std::vector<MarkedTensor> observables;
  if (n == 1) {
    for (unsigned d = 0; d <= opt.max_degree; ++d) observables.push_back(tensor_from_monomial(std::vector<unsigned>{d}));
  } else {
    for (std::size_t s = 0; s < opt.samples; ++s) {
      std::vector<unsigned> exps(n, 0);
      const auto d = std::uniform_int_distribution<unsigned>(0, opt.max_degree)(rng);
      for (unsigned e = 0; e < d; ++e) ++exps[std::uniform_int_distribution<std::size_t>(0, n - 1)(rng)];
      observables.push_back(tensor_from_monomial(exps));
    }
  }
  {
    std::optional<std::string> bad;
    for (const auto& f : observables) {
      if (auto mismatch = compare_three(model, f, K)) {
        bad = "f = " + describe_tensor(f) + ": " + *mismatch;
        break;
      }
    }
    report("three-way", std::to_string(observables.size()) + " observables, reduce = diagrams = oracle through ħ^" +
                            std::to_string(K),
           bad);
  }
  {
    std::optional<std::string> bad;
    std::size_t checked = 0;
    for (unsigned legs = 0; legs <= opt.max_degree && !bad; ++legs) {
      for_each_closed_diagram(legs, model.interaction_valences(), K, [&](const EnumeratedDiagram& e) {
        if (bad || e.diagram.half_edge_count() > kMaxBruteForceHalfEdges) return;
        ++checked;
        const std::uint64_t brute = aut_order_brute_force(e.diagram);
        if (Integer(static_cast<unsigned long>(brute)) != e.aut_order) {
          bad = "edges " + edge_list(e.diagram) + ": orbit count " + e.aut_order.get_str() + ", brute force " +
                std::to_string(brute);
        }
      });
    }
    report("aut-oracle", std::to_string(checked) + " diagrams, orbit |Aut| = brute-force |Aut|", bad);
  }

  const auto& interaction = model.interaction();
  const bool cubic_only = interaction.empty() || (interaction.size() == 1 && interaction.count(3) == 1);
  if (n == 1 && cubic_only) {
    const Rational a = model.a()(0, 0);
    const Rational g = interaction.empty() ? Rational(0) : interaction.at(3).at(std::vector<unsigned>{0, 0, 0});
    std::vector<HbarSeries> c;
    for (unsigned d = 0; d <= opt.max_degree + 2; ++d) {
      c.push_back(reduce_expectation(model, GradedElement::x(1, 0, d), K));
    }
    const auto at = recursion_failure(c, a, g);
    report("recursion",
           "a c[n+1] = (g/2) c[n+2] + ħ n c[n-1] for n <= " + std::to_string(opt.max_degree) + " through ħ^" +
               std::to_string(K),
           at ? std::optional<std::string>("n = " + std::to_string(*at)) : std::nullopt);

    if (interaction.empty()) {
      std::optional<std::string> bad;
      for (unsigned d = 0; d <= opt.max_degree; ++d) {
        const WickTerm w = wick_univariate(d, a);
        const HbarSeries expected =
            w.hbar_power <= K ? HbarSeries::monomial(K, w.hbar_power, w.coefficient) : HbarSeries(K);
        out << "  ⟨x^" << d << "⟩ = " << to_string(c[d]) << "   Wick: " << series_term(w.hbar_power, w.coefficient)
            << '\n';
        if (!bad && !(c[d] == expected)) bad = "n = " + std::to_string(d);
      }
      report("wick-table", "⟨x^n⟩ = (ħ/a)^(n/2) (n-1)!! for n <= " + std::to_string(opt.max_degree), bad);
    }

    if (a == 1 && g == 1) {
      std::optional<std::string> bad;
      for (unsigned d = 0; d <= opt.max_degree && !bad; ++d) {
        const HbarSeries from_d = c_from_d(d, K);
        if (!(from_d == c[d])) bad = "n = " + std::to_string(d) + ": d_n/d_0 = " + to_string(from_d);
      }
      // d_1 = (ħ/2) d_0 + 3 ħ² d_0'
      const HbarSeries d1 = d_series(1, K);
      const HbarSeries rhs = Rational(1, 2) * d_series(0, K).shifted() +
                             Rational(3) * d_series(0, K + 1).derivative().shifted().shifted();
      if (!bad && !(d1 == rhs)) bad = "d_1 = " + to_string(d1) + " but (ħ/2) d_0 + 3 ħ² d_0' = " + to_string(rhs);
      if (!bad && !coefficient_ratios_increasing(d_series(0, 10), 0, 8)) bad = "d_0 coefficient ratios not increasing";
      report("d-series", "c_n = d_n/d_0 for n <= " + std::to_string(opt.max_degree) + ", d_1 = (ħ/2) d_0 + 3 ħ² d_0', d_0 growth",
             bad);
    }
  }
  out << (failures == 0 ? "all checks passed" : std::to_string(failures) + " check(s) failed") << '\n';
  return {failures == 0 ? 0 : 1, out.str()};
}

}  // namespace hfeyn
