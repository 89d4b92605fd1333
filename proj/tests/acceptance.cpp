// Acceptance criteria, one PASS/FAIL line each. Pass criterion numbers to run
// a subset; the exit status is 1 if any selected criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "hfeyn/diagram.hpp"
#include "hfeyn/errors.hpp"
#include "hfeyn/oracle.hpp"
#include "hfeyn/random.hpp"
#include "support/fixtures.hpp"

using namespace hfeyn;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

MarkedTensor x_tensor(unsigned d) {
  const unsigned e[] = {d};
  return tensor_from_monomial(e);
}

std::string show(const HbarSeries& s) { return to_string(s); }

// All three engines on x^d for an N = 1 model, compared through hbar^K.
void three_way(Outcome& o, const Model& m, unsigned d, unsigned K, const std::string& name) {
  const auto r = reduce_expectation(m, fixtures::x_power(d), K);
  const auto g = diagram_expectation(m, x_tensor(d), K);
  const auto p = gaussian_perturbation_expectation(m, x_tensor(d), K);
  if (r != g || r != p) {
    o.fail(name + " <x^" + std::to_string(d) + ">: reduce " + show(r) + ", diagrams " + show(g) + ", oracle " +
           show(p));
  }
}

Outcome wick_table() {
  Outcome o;
  for (const Rational a : {Rational(1), Rational(2), Rational(-3, 2)}) {
    const Model m = fixtures::gaussian(a);
    for (unsigned d = 0; d <= 16; ++d) {
      HbarSeries expected(8);
      if (d % 2 == 0) {
        Rational v = 1;
        for (unsigned k = 1; k < d; k += 2) v *= Rational(k) / a;
        expected[d / 2] = v;
      }
      const auto r = reduce_expectation(m, fixtures::x_power(d), 8);
      const auto g = diagram_expectation(m, x_tensor(d), 8);
      if (r != expected || g != expected) {
        o.fail("a = " + to_string(a) + ", <x^" + std::to_string(d) + ">: expected " + show(expected) + ", reduce " +
               show(r) + ", diagrams " + show(g));
      }
    }
  }
  return o;
}

Outcome cubic_table() {
  Outcome o;
  const auto ds = enumerate_closed_diagrams(2, {3}, 2);
  std::multiset<std::pair<int, std::uint64_t>> found;
  for (const auto& e : ds) found.emplace(e.betti, e.aut_order.get_ui());
  const std::multiset<std::pair<int, std::uint64_t>> expected{{1, 1}, {2, 2}, {2, 2}, {2, 4}};
  if (found != expected) o.fail(std::to_string(ds.size()) + " classes with the wrong (betti, |Aut|) profile");
  const auto target = fixtures::series({0, 1, Rational(5, 4)});
  const Model m = fixtures::cubic();
  three_way(o, m, 2, 2, "cubic");
  if (reduce_expectation(m, fixtures::x_power(2), 2) != target) o.fail("cubic <x^2> is not hbar + 5/4 hbar^2");
  return o;
}

Outcome recursion() {
  Outcome o;
  std::vector<HbarSeries> c;
  for (unsigned n = 0; n <= 6; ++n) c.push_back(reduce_expectation(fixtures::cubic(), fixtures::x_power(n), 4));
  if (const auto bad = recursion_failure(c, 1, 1)) o.fail("recursion fails at n = " + std::to_string(*bad));
  return o;
}

Outcome d_series_checks() {
  Outcome o;
  const auto d0 = d_series(0, 6);
  if (d0[1] != Rational(5, 24)) o.fail("hbar-coefficient of d0 is " + to_string(d0[1]));
  for (unsigned n = 0; n <= 4; ++n) {
    const auto from_d = c_from_d(n, 4);
    const auto r = reduce_expectation(fixtures::cubic(), fixtures::x_power(n), 4);
    if (from_d != r) o.fail("c_" + std::to_string(n) + " = " + show(from_d) + " but reduce gives " + show(r));
  }
  // d1 = 3 d d0/dhbar, coefficientwise through hbar^5.
  const auto d1 = d_series(1, 6);
  for (unsigned k = 0; k <= 5; ++k) {
    const Rational rhs = Rational(3 * (k + 1)) * d0[k + 1];
    if (d1[k] != rhs) {
      // Report whether d1 = (hbar/2) d0 + 3 hbar^2 d0' holds instead.
      bool shifted = true;
      for (unsigned j = 0; j <= 5; ++j) {
        Rational alt = 0;
        if (j >= 1) alt += d0[j - 1] / 2;
        if (j >= 2) alt += Rational(3 * (j - 1)) * d0[j - 1];
        shifted = shifted && d1[j] == alt;
      }
      o.fail("d1 differs from 3 d0' at hbar^" + std::to_string(k) + ": " + to_string(d1[k]) + " vs " +
             to_string(rhs) + "; d1 = hbar/2 d0 + 3 hbar^2 d0' " + (shifted ? "holds" : "fails too"));
      break;
    }
  }
  return o;
}

Outcome quartic_exercise() {
  Outcome o;
  const Model q = fixtures::quartic();
  three_way(o, q, 2, 2, "quartic");
  if (reduce_expectation(q, fixtures::x_power(2), 2) != fixtures::series({0, 1, Rational(1, 2)})) {
    o.fail("quartic <x^2> is not hbar + hbar^2/2");
  }
  const Model mixed = fixtures::mixed();
  for (unsigned d = 0; d <= 4; ++d) three_way(o, mixed, d, 3, "mixed");
  return o;
}

Outcome multivariate() {
  Outcome o;
  Rng rng(601);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + trial % 2;
    ModelSpec spec;
    spec.dimension = n;
    spec.a = random_symmetric_invertible(rng, n);
    const Model m = Model::validate(spec);
    const unsigned degree = 1 + static_cast<unsigned>(rng() % 6);
    std::vector<unsigned> idx(degree);
    Monomial mono(n);
    for (auto& i : idx) {
      i = static_cast<unsigned>(rng() % n);
      mono.set_x_exponent(i, mono.x_exponent(i) + 1);
    }
    const auto w = wick_multivariate({idx, m.a_inverse()});
    HbarSeries expected(3);
    if (w.coefficient != 0) expected[w.hbar_power] = w.coefficient;
    const auto r = reduce_expectation(m, GradedElement::monomial(mono), 3);
    if (r != expected) o.fail("case " + std::to_string(trial) + ": reduce " + show(r) + ", pairing " + show(expected));
  }
  return o;
}

Outcome homological() {
  Outcome o;
  Rng rng(701);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + trial % 3;
    const Model m = Model::validate(random_model_spec(rng, n, 5));
    const auto p = random_element(rng, n, static_cast<unsigned>(rng() % (n + 1)), 4, 3, 1);
    if (!q_squared_vanishes(m, p)) o.fail("Q^2 != 0 on element " + std::to_string(trial));
  }
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + trial % 3;
    const Model m = Model::validate(random_model_spec(rng, n, 5));
    const auto g = random_element(rng, n, 1, 3, 3, 1);
    const auto e = reduce_expectation(m, apply_q(m, g), 4);
    if (!e.is_zero()) o.fail("<Q g> = " + show(e) + " for g number " + std::to_string(trial));
  }
  return o;
}

Outcome confluence() {
  Outcome o;
  for (const auto& [name, m] : {std::pair{"cubic", fixtures::cubic()}, std::pair{"quartic", fixtures::quartic()}}) {
    for (unsigned d = 0; d <= 4; ++d) {
      const auto f = fixtures::x_power(d);
      for (unsigned K = 1; K <= 4; ++K) {
        const auto low = reduce_expectation(m, f, K);
        const auto high = reduce_expectation(m, f, K, {SelectionStrategy::HighestDegreeFirst});
        const auto shuffled = reduce_expectation(m, f, K, {SelectionStrategy::Randomized, 1000 + d * 10 + K});
        if (low != high || low != shuffled) {
          o.fail(std::string(name) + " <x^" + std::to_string(d) + "> at K = " + std::to_string(K) +
                 ": strategies disagree");
        }
        if (reduce_expectation(m, f, K + 2).truncated(K) != low) {
          o.fail(std::string(name) + " <x^" + std::to_string(d) + ">: K = " + std::to_string(K) +
                 " and K + 2 disagree");
        }
      }
    }
  }
  return o;
}

Outcome symmetry_factors() {
  Outcome o;
  std::uint64_t checked = 0;
  auto visit = [&](const EnumeratedDiagram& e) {
    if (e.diagram.half_edge_count() > kMaxBruteForceHalfEdges) return;
    ++checked;
    const auto brute = aut_order_brute_force(e.diagram);
    if (e.aut_order != brute) {
      o.fail("diagram " + canonical_form(e.diagram) + ": orbit count " + e.aut_order.get_str() + ", brute force " +
             std::to_string(brute));
    }
  };
  for (unsigned d = 0; d <= 16; ++d) for_each_closed_diagram(d, {}, 8, visit);  // Wick table
  for_each_closed_diagram(2, {3}, 2, visit);                                     // cubic table
  for_each_closed_diagram(2, {4}, 2, visit);                                     // quartic
  for (unsigned d = 0; d <= 4; ++d) for_each_closed_diagram(d, {3, 4}, 3, visit);  // mixed
  if (o.pass) o.detail = std::to_string(checked) + " diagrams";
  return o;
}

Outcome bracket_laws() {
  Outcome o;
  Rng rng(1001);
  auto sign = [](bool odd, const GradedElement& e) { return odd ? -e : e; };
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + trial % 3;
    const unsigned kf = static_cast<unsigned>(rng() % (n + 1));
    const unsigned kg = static_cast<unsigned>(rng() % (n + 1));
    const unsigned kh = static_cast<unsigned>(rng() % (n + 1));
    const auto f = random_element(rng, n, kf, 3, 3, 1);
    const auto g = random_element(rng, n, kg, 3, 3, 1);
    const auto h = random_element(rng, n, kh, 3, 3, 1);
    const auto second = mul(bracket(f, g), h) + sign((kf + 1) * kg % 2 == 1, mul(g, bracket(f, h)));
    if (bracket(f, mul(g, h)) != second) o.fail("second slot, triple " + std::to_string(trial));
    // The bracket is graded symmetric with sign (-1)^(|f||g|), which turns the
    // second-slot rule into this one.
    const auto first = sign(kf % 2 == 1, mul(f, bracket(g, h))) + sign(kg * kh % 2 == 1, mul(bracket(f, h), g));
    if (bracket(mul(f, g), h) != first) o.fail("first slot, triple " + std::to_string(trial));

    const Model m = Model::validate(random_model_spec(rng, n, 4));
    const auto parts = decompose_q(m, f);
    if (apply_q(m, f) != parts.contraction - mul(GradedElement::hbar(n), parts.laplacian)) {
      o.fail("Q != A - hbar Delta on element " + std::to_string(trial));
    }
  }
  return o;
}

struct Criterion {
  int number;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {1, "Wick table", wick_table},
      {2, "cubic diagram table", cubic_table},
      {3, "recursion", recursion},
      {4, "d-series", d_series_checks},
      {5, "quartic and mixed models", quartic_exercise},
      {6, "multivariate pairings", multivariate},
      {7, "homological invariants", homological},
      {8, "confluence and K-stability", confluence},
      {9, "symmetry factors", symmetry_factors},
      {10, "bracket laws", bracket_laws},
  };
  std::vector<int> selected;
  for (int k = 1; k < argc; ++k) selected.push_back(std::stoi(argv[k]));

  bool all_pass = true;
  for (const auto& c : criteria) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.number) == selected.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    all_pass = all_pass && o.pass;
    std::ostringstream line;
    line << (o.pass ? "PASS " : "FAIL ") << c.number << " " << c.name;
    if (!o.detail.empty()) line << ": " << o.detail;
    char t[32];
    std::snprintf(t, sizeof t, " [%.2fs]", secs);
    std::cout << line.str() << t << std::endl;
  }
  return all_pass ? 0 : 1;
}
