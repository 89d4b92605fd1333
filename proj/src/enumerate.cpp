#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>

#include "hfeyn/diagram.hpp"
#include "hfeyn/errors.hpp"

// Closed diagrams are enumerated as perfect matchings on a fixed half-edge
// layout: marked legs 0..n-1, then one block per internal vertex, blocks
// sorted by valence. The group G permuting half-edges inside each internal
// vertex and permuting same-valence vertices acts on these matchings; its
// orbits are exactly the isomorphism classes, and |Aut| = |G| / |orbit|.
//
// Instead of listing all (H-1)!! labeled matchings, the search only makes a
// partner choice up to the G-moves that fix everything paired so far: the
// partner inside an already used vertex is always its lowest free slot, and
// a fresh vertex is always the first unused one of its valence. Each such
// standardized matching stands for (product of the collapsed choices)
// labeled matchings of the same orbit, so summing those weights per class
// gives the orbit size.

namespace hfeyn {

namespace {

constexpr unsigned kUnset = ~0U;
constexpr std::size_t kMaxEnumerationHalfEdges = 32;

struct Layout {
  unsigned n = 0;
  std::vector<unsigned> valence;     // per vertex; vertex 0 is marked
  std::vector<unsigned> block_start;  // first half-edge of each vertex
  std::vector<unsigned> vertex_of;
  Integer group_order = 1;
};

Layout make_layout(unsigned n, const std::vector<std::pair<unsigned, unsigned>>& multiset) {
  Layout L;
  L.n = n;
  L.valence.push_back(n);
  L.block_start.push_back(0);
  L.vertex_of.assign(n, 0);
  for (const auto& [m, count] : multiset) {
    L.group_order *= factorial(count);
    for (unsigned c = 0; c < count; ++c) {
      const unsigned v = static_cast<unsigned>(L.valence.size());
      L.valence.push_back(m);
      L.block_start.push_back(static_cast<unsigned>(L.vertex_of.size()));
      L.vertex_of.insert(L.vertex_of.end(), m, v);
      L.group_order *= factorial(m);
    }
  }
  return L;
}

class MatchingSearch {
 public:
  using Leaf = std::function<void(const std::vector<unsigned>& partner, std::uint64_t weight)>;

  MatchingSearch(const Layout& layout, Leaf leaf) : L_(layout), leaf_(std::move(leaf)) {
    const std::size_t h_count = L_.vertex_of.size();
    partner_.assign(h_count, kUnset);
    free_.resize(L_.valence.size());
    for (unsigned v = 0; v < L_.valence.size(); ++v) free_[v] = L_.valence[v];
    touched_.assign(L_.valence.size(), false);
    touched_[0] = true;
  }

  void run() { step(0, 1); }

 private:
  unsigned lowest_free(unsigned v) const {
    const unsigned start = L_.block_start[v];
    for (unsigned h = start; h < start + L_.valence[v]; ++h) {
      if (partner_[h] == kUnset) return h;
    }
    return kUnset;
  }

  void pair_up(unsigned a, unsigned b) {
    partner_[a] = b;
    partner_[b] = a;
    --free_[L_.vertex_of[a]];
    --free_[L_.vertex_of[b]];
  }

  void unpair(unsigned a, unsigned b) {
    partner_[a] = kUnset;
    partner_[b] = kUnset;
    ++free_[L_.vertex_of[a]];
    ++free_[L_.vertex_of[b]];
  }

  void step(unsigned h, std::uint64_t weight) {
    const unsigned h_count = static_cast<unsigned>(partner_.size());
    while (h < h_count && partner_[h] != kUnset) ++h;
    if (h == h_count) {
      leaf_(partner_, weight);
      return;
    }
    const unsigned u = L_.vertex_of[h];
    const bool u_was_touched = touched_[u];
    touched_[u] = true;

    auto try_pair = [&](unsigned p, std::uint64_t multiplicity) {
      const unsigned v = L_.vertex_of[p];
      const bool v_was_touched = touched_[v];
      touched_[v] = true;
      pair_up(h, p);
      step(h + 1, weight * multiplicity);
      unpair(h, p);
      touched_[v] = v_was_touched;
    };

    // Marked legs are individually distinguished.
    if (u == 0) {
      for (unsigned q = h + 1; q < L_.n; ++q) {
        if (partner_[q] == kUnset) try_pair(q, 1);
      }
    }
    for (unsigned v = 1; v < L_.valence.size(); ++v) {
      if (!touched_[v]) continue;
      const unsigned slots = free_[v] - (v == u ? 1 : 0);
      if (slots == 0) continue;
      unsigned p = lowest_free(v);
      if (p == h) {
        p = kUnset;
        for (unsigned q = h + 1; q < L_.block_start[v] + L_.valence[v]; ++q) {
          if (partner_[q] == kUnset) {
            p = q;
            break;
          }
        }
      }
      try_pair(p, slots);
    }
    // One representative per valence among untouched vertices.
    unsigned v = 1;
    while (v < L_.valence.size()) {
      const unsigned m = L_.valence[v];
      unsigned first = kUnset;
      unsigned count = 0;
      for (; v < L_.valence.size() && L_.valence[v] == m; ++v) {
        if (touched_[v]) continue;
        if (first == kUnset) first = v;
        ++count;
      }
      if (first != kUnset) try_pair(L_.block_start[first], std::uint64_t{count} * m);
    }
    touched_[u] = u_was_touched;
  }

  const Layout& L_;
  Leaf leaf_;
  std::vector<unsigned> partner_;
  std::vector<unsigned> free_;
  std::vector<bool> touched_;
};

bool connected(const Layout& L, const std::vector<unsigned>& partner) {
  std::vector<unsigned> parent(L.valence.size());
  std::iota(parent.begin(), parent.end(), 0U);
  auto root = [&](unsigned v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  for (unsigned h = 0; h < partner.size(); ++h) parent[root(L.vertex_of[h])] = root(L.vertex_of[partner[h]]);
  const unsigned r = root(0);
  for (unsigned v = 1; v < parent.size(); ++v) {
    if (root(v) != r) return false;
  }
  return true;
}

FeynmanDiagram to_diagram(const Layout& L, const std::vector<unsigned>& partner) {
  std::vector<VertexKind> kinds(L.valence.size(), VertexKind::Internal);
  kinds[0] = VertexKind::Marked;
  std::vector<unsigned> legs(L.n);
  std::iota(legs.begin(), legs.end(), 0U);
  return FeynmanDiagram(partner, L.vertex_of, std::move(kinds), std::move(legs));
}

// All (valence, count) multisets with sum count*(m-2) <= budget and the
// right handshake parity, ordered by Betti number.
std::vector<std::vector<std::pair<unsigned, unsigned>>> valence_multisets(unsigned n, const std::vector<unsigned>& vals,
                                                                          unsigned max_betti) {
  std::vector<std::pair<int, std::vector<std::pair<unsigned, unsigned>>>> found;
  if (n == 0) {
    // A marked vertex with no legs cannot be joined to anything.
    found.push_back({0, {}});
  } else if (2 * max_betti >= n) {
    const unsigned budget = 2 * max_betti - n;
    std::vector<unsigned> counts(vals.size(), 0);
    std::function<void(std::size_t, unsigned)> rec = [&](std::size_t i, unsigned used) {
      if (i == vals.size()) {
        unsigned total = n;
        for (std::size_t k = 0; k < vals.size(); ++k) total += counts[k] * vals[k];
        if (total % 2 != 0) return;
        std::vector<std::pair<unsigned, unsigned>> ms;
        for (std::size_t k = 0; k < vals.size(); ++k) {
          if (counts[k] > 0) ms.emplace_back(vals[k], counts[k]);
        }
        found.push_back({static_cast<int>((n + used) / 2), std::move(ms)});
        return;
      }
      for (unsigned c = 0; used + c * (vals[i] - 2) <= budget; ++c) {
        counts[i] = c;
        rec(i + 1, used + c * (vals[i] - 2));
      }
      counts[i] = 0;
    };
    rec(0, 0);
  }
  std::stable_sort(found.begin(), found.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::vector<std::pair<unsigned, unsigned>>> out;
  for (auto& [b, ms] : found) out.push_back(std::move(ms));
  return out;
}

}  // namespace

void for_each_closed_diagram(unsigned n, const std::set<unsigned>& valences, unsigned max_betti,
                             const DiagramVisitor& visit) {
  for (unsigned m : valences) {
    if (m < 3) throw std::invalid_argument("internal vertices need valence at least 3");
  }
  const std::vector<unsigned> vals(valences.begin(), valences.end());
  for (const auto& multiset : valence_multisets(n, vals, max_betti)) {
    const Layout layout = make_layout(n, multiset);
    if (layout.vertex_of.size() > kMaxEnumerationHalfEdges) {
      throw TooLarge("diagram enumeration is capped at " + std::to_string(kMaxEnumerationHalfEdges) + " half-edges");
    }
    const int beta = static_cast<int>(layout.vertex_of.size() / 2) - static_cast<int>(layout.valence.size() - 1);

    if (layout.valence.size() == 1) {
      // Only the marked vertex: G is trivial, every matching is its own class.
      if (n == 0) {
        visit(EnumeratedDiagram{FeynmanDiagram::empty(), 0, Integer(1)});
        continue;
      }
      MatchingSearch(layout, [&](const std::vector<unsigned>& partner, std::uint64_t) {
        visit(EnumeratedDiagram{to_diagram(layout, partner), beta, Integer(1)});
      }).run();
      continue;
    }

    struct ClassEntry {
      FeynmanDiagram diagram;
      Integer orbit;
    };
    std::map<std::string, ClassEntry> classes;
    MatchingSearch(layout, [&](const std::vector<unsigned>& partner, std::uint64_t weight) {
      if (!connected(layout, partner)) return;
      FeynmanDiagram d = to_diagram(layout, partner);
      std::string key = canonical_form(d);
      const Integer w(static_cast<unsigned long>(weight));
      auto it = classes.find(key);
      if (it == classes.end()) {
        classes.emplace(std::move(key), ClassEntry{std::move(d), w});
      } else {
        it->second.orbit += w;
      }
    }).run();

    for (auto& [key, entry] : classes) {
      if (layout.group_order % entry.orbit != 0) {
        throw InternalError("orbit size does not divide the group order");
      }
      visit(EnumeratedDiagram{std::move(entry.diagram), beta, Integer(layout.group_order / entry.orbit)});
    }
  }
}

std::vector<EnumeratedDiagram> enumerate_closed_diagrams(unsigned n, const std::set<unsigned>& valences,
                                                         unsigned max_betti) {
  std::vector<EnumeratedDiagram> out;
  for_each_closed_diagram(n, valences, max_betti, [&](const EnumeratedDiagram& e) { out.push_back(e); });
  return out;
}

}  // namespace hfeyn
