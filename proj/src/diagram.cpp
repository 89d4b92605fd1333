#include "hfeyn/diagram.hpp"

#include <algorithm>
#include <numeric>
#include <span>
#include <sstream>
#include <stdexcept>

#include "hfeyn/errors.hpp"

namespace hfeyn {

namespace {

constexpr unsigned kUnset = ~0U;

unsigned find_root(std::vector<unsigned>& parent, unsigned v) {
  while (parent[v] != v) {
    parent[v] = parent[parent[v]];
    v = parent[v];
  }
  return v;
}

}  // namespace

FeynmanDiagram::FeynmanDiagram(std::vector<unsigned> partner, std::vector<unsigned> vertex_of,
                               std::vector<VertexKind> vertex_kinds, std::vector<unsigned> marked_legs)
    : partner_(std::move(partner)),
      vertex_of_(std::move(vertex_of)),
      kinds_(std::move(vertex_kinds)),
      marked_legs_(std::move(marked_legs)) {
  const std::size_t h_count = partner_.size();
  if (vertex_of_.size() != h_count) throw std::invalid_argument("vertex_of must cover every half-edge");
  for (unsigned h = 0; h < h_count; ++h) {
    const unsigned p = partner_[h];
    if (p >= h_count || p == h || partner_[p] != h) {
      throw std::invalid_argument("pairing is not a fixed-point-free involution");
    }
    if (vertex_of_[h] >= kinds_.size()) throw std::invalid_argument("half-edge attached to unknown vertex");
  }

  const auto marked_count = std::count(kinds_.begin(), kinds_.end(), VertexKind::Marked);
  if (marked_count != 1) throw std::invalid_argument("diagram needs exactly one marked vertex");
  marked_vertex_ = static_cast<unsigned>(std::find(kinds_.begin(), kinds_.end(), VertexKind::Marked) - kinds_.begin());

  incident_.assign(kinds_.size(), {});
  for (unsigned h = 0; h < h_count; ++h) incident_[vertex_of_[h]].push_back(h);

  std::vector<unsigned> legs = marked_legs_;
  std::sort(legs.begin(), legs.end());
  if (legs != incident_[marked_vertex_]) {
    throw std::invalid_argument("marked legs must list each half-edge of the marked vertex once");
  }
  for (unsigned v = 0; v < kinds_.size(); ++v) {
    if (kinds_[v] == VertexKind::Internal && incident_[v].size() < 3) {
      throw std::invalid_argument("internal vertex with valence below 3");
    }
    if (kinds_[v] == VertexKind::External && incident_[v].size() != 1) {
      throw std::invalid_argument("external vertex must be univalent");
    }
  }

  std::vector<unsigned> parent(kinds_.size());
  std::iota(parent.begin(), parent.end(), 0U);
  for (unsigned h = 0; h < h_count; ++h) {
    parent[find_root(parent, vertex_of_[h])] = find_root(parent, vertex_of_[partner_[h]]);
  }
  const unsigned root = find_root(parent, 0);
  for (unsigned v = 1; v < kinds_.size(); ++v) {
    if (find_root(parent, v) != root) throw std::invalid_argument("diagram is not connected");
  }
}

FeynmanDiagram FeynmanDiagram::from_edges(std::span<const std::pair<unsigned, unsigned>> edges,
                                          std::vector<unsigned> vertex_of, std::vector<VertexKind> vertex_kinds,
                                          std::vector<unsigned> marked_legs) {
  std::vector<unsigned> partner(vertex_of.size(), kUnset);
  for (const auto& [a, b] : edges) {
    if (a >= partner.size() || b >= partner.size() || partner[a] != kUnset || partner[b] != kUnset) {
      throw std::invalid_argument("edge list does not describe a perfect matching");
    }
    partner[a] = b;
    partner[b] = a;
  }
  return FeynmanDiagram(std::move(partner), std::move(vertex_of), std::move(vertex_kinds), std::move(marked_legs));
}

FeynmanDiagram FeynmanDiagram::empty() { return FeynmanDiagram({}, {}, {VertexKind::Marked}, {}); }

std::vector<std::pair<unsigned, unsigned>> FeynmanDiagram::edges() const {
  std::vector<std::pair<unsigned, unsigned>> out;
  for (unsigned h = 0; h < partner_.size(); ++h) {
    if (h < partner_[h]) out.emplace_back(h, partner_[h]);
  }
  return out;
}

std::size_t FeynmanDiagram::count_vertices(VertexKind kind) const {
  return static_cast<std::size_t>(std::count(kinds_.begin(), kinds_.end(), kind));
}

int betti(const FeynmanDiagram& d) {
  return static_cast<int>(d.edge_count()) - static_cast<int>(d.vertex_count() - 1);
}

// Automorphisms --------------------------------------------------------------

namespace {

class AutomorphismCounter {
 public:
  explicit AutomorphismCounter(const FeynmanDiagram& d) : d_(d) {}

  std::uint64_t count() {
    State s;
    s.image.assign(d_.half_edge_count(), kUnset);
    s.used.assign(d_.half_edge_count(), false);
    s.vimage.assign(d_.vertex_count(), kUnset);
    s.vused.assign(d_.vertex_count(), false);
    s.vimage[d_.marked_vertex()] = d_.marked_vertex();
    s.vused[d_.marked_vertex()] = true;
    for (unsigned leg : d_.marked_legs()) {
      if (!assign(s, leg, leg)) return 0;
    }
    return search(std::move(s));
  }

 private:
  struct State {
    std::vector<unsigned> image;
    std::vector<bool> used;
    std::vector<unsigned> vimage;
    std::vector<bool> vused;
  };

  // Sets image[h] = t and propagates through the pairing.
  bool assign(State& s, unsigned h, unsigned t) const {
    std::vector<std::pair<unsigned, unsigned>> pending{{h, t}};
    while (!pending.empty()) {
      const auto [src, dst] = pending.back();
      pending.pop_back();
      if (s.image[src] != kUnset) {
        if (s.image[src] != dst) return false;
        continue;
      }
      if (s.used[dst]) return false;
      const unsigned v = d_.vertex_of(src);
      const unsigned w = d_.vertex_of(dst);
      if (s.vimage[v] == kUnset) {
        if (s.vused[w] || d_.kind(v) != d_.kind(w) || d_.valence(v) != d_.valence(w)) return false;
        s.vimage[v] = w;
        s.vused[w] = true;
      } else if (s.vimage[v] != w) {
        return false;
      }
      s.image[src] = dst;
      s.used[dst] = true;
      pending.emplace_back(d_.partner(src), d_.partner(dst));
    }
    return true;
  }

  std::uint64_t search(State s) const {
    // Prefer a half-edge whose vertex already has an image: few candidates.
    unsigned pick = kUnset;
    for (unsigned h = 0; h < d_.half_edge_count(); ++h) {
      if (s.image[h] != kUnset) continue;
      if (pick == kUnset) pick = h;
      if (s.vimage[d_.vertex_of(h)] != kUnset) {
        pick = h;
        break;
      }
    }
    if (pick == kUnset) return 1;
    std::uint64_t total = 0;
    for (unsigned t = 0; t < d_.half_edge_count(); ++t) {
      if (s.used[t]) continue;
      const unsigned v = s.vimage[d_.vertex_of(pick)];
      if (v != kUnset && d_.vertex_of(t) != v) continue;
      State next = s;
      if (assign(next, pick, t)) total += search(std::move(next));
    }
    return total;
  }

  const FeynmanDiagram& d_;
};

}  // namespace

std::uint64_t aut_order_brute_force(const FeynmanDiagram& d) {
  if (d.half_edge_count() > kMaxBruteForceHalfEdges) {
    throw TooLarge("brute-force automorphism search is capped at " + std::to_string(kMaxBruteForceHalfEdges) +
                   " half-edges");
  }
  return AutomorphismCounter(d).count();
}

// Canonical form -------------------------------------------------------------
//
// New labels are handed out in discovery order: the marked legs keep labels
// 0..n-1; a vertex reached for the first time gets the next block of labels,
// sized by its valence. Scanning labels in order, each position records the
// label of its partner (allocating one if needed) plus a code for the
// kind/valence of a newly discovered vertex. The only freedom is which
// unlabeled half-edge of a vertex takes the next label; those choices are
// branched on and the lexicographically smallest record wins.

namespace {

class Canonicalizer {
 public:
  explicit Canonicalizer(const FeynmanDiagram& d) : d_(d) {}

  std::string run() {
    const unsigned h_count = static_cast<unsigned>(d_.half_edge_count());
    State s;
    s.new_of.assign(h_count, kUnset);
    s.old_of.assign(h_count, kUnset);
    s.vnew.assign(d_.vertex_count(), kUnset);
    s.block_of_label.assign(h_count, kUnset);
    const unsigned marked = d_.marked_vertex();
    s.vnew[marked] = 0;
    s.block_next.push_back(static_cast<unsigned>(d_.marked_legs().size()));
    s.allocated = s.block_next[0];
    for (unsigned k = 0; k < d_.marked_legs().size(); ++k) {
      s.new_of[d_.marked_legs()[k]] = k;
      s.old_of[k] = d_.marked_legs()[k];
      s.block_of_label[k] = 0;
    }
    scan(std::move(s), 0);

    std::ostringstream os;
    os << "n=" << d_.marked_legs().size() << ';';
    for (std::size_t i = 0; i < best_.size(); ++i) {
      if (i) os << ',';
      os << best_[i];
    }
    return os.str();
  }

 private:
  struct State {
    std::vector<unsigned> new_of;
    std::vector<unsigned> old_of;
    std::vector<unsigned> vnew;
    std::vector<unsigned> block_next;  // next free label per new vertex
    std::vector<unsigned> block_of_label;
    unsigned allocated = 0;
    std::vector<unsigned> code;
    int cmp = 0;  // <0 once the prefix is already below best_
    unsigned best_version = 0;
  };

  static unsigned kind_code(VertexKind k, unsigned valence) {
    return (static_cast<unsigned>(k) + 1) * 1024 + valence;
  }

  // Gives label h to old half-edge `old`, then records its partner.
  // Returns false if the record is already worse than best_.
  bool place(State& s, unsigned h, unsigned old) {
    if (s.old_of[h] == kUnset) {
      s.old_of[h] = old;
      s.new_of[old] = h;
      ++s.block_next[s.block_of_label[h]];
    }
    const unsigned p = d_.partner(old);
    unsigned discovered = 0;
    if (s.new_of[p] == kUnset) {
      const unsigned u = d_.vertex_of(p);
      if (s.vnew[u] == kUnset) {
        const unsigned w = static_cast<unsigned>(s.block_next.size());
        s.vnew[u] = w;
        s.block_next.push_back(s.allocated);
        for (unsigned k = 0; k < d_.valence(u); ++k) s.block_of_label[s.allocated + k] = w;
        s.allocated += d_.valence(u);
        discovered = kind_code(d_.kind(u), d_.valence(u));
      }
      const unsigned label = s.block_next[s.vnew[u]]++;
      s.new_of[p] = label;
      s.old_of[label] = p;
    }
    return push(s, s.new_of[p]) && push(s, discovered);
  }

  bool push(State& s, unsigned value) {
    const std::size_t pos = s.code.size();
    if (s.cmp <= 0 && s.best_version != best_version_) {
      // best_ moved since this state last compared against it.
      s.best_version = best_version_;
      const auto mine = std::span(s.code);
      const auto theirs = std::span(best_).first(pos);
      if (std::lexicographical_compare(theirs.begin(), theirs.end(), mine.begin(), mine.end())) return false;
      s.cmp = std::lexicographical_compare(mine.begin(), mine.end(), theirs.begin(), theirs.end()) ? -1 : 0;
    }
    s.code.push_back(value);
    if (s.cmp == 0 && have_best_) {
      if (value > best_[pos]) return false;
      if (value < best_[pos]) s.cmp = -1;
    }
    return true;
  }

  void scan(State s, unsigned h) {
    const unsigned h_count = static_cast<unsigned>(d_.half_edge_count());
    for (; h < h_count; ++h) {
      if (h >= s.allocated) throw std::logic_error("canonical_form reached an undiscovered component");
      if (s.old_of[h] != kUnset) {
        if (!place(s, h, s.old_of[h])) return;
        continue;
      }
      // h is the next free label of its block: try every unlabeled
      // half-edge of the corresponding old vertex.
      const unsigned w = s.block_of_label[h];
      unsigned old_vertex = kUnset;
      for (unsigned v = 0; v < s.vnew.size(); ++v) {
        if (s.vnew[v] == w) old_vertex = v;
      }
      std::vector<State> options;
      std::vector<unsigned> best_token;
      for (unsigned c : d_.incident(old_vertex)) {
        if (s.new_of[c] != kUnset) continue;
        State trial = s;
        const int saved_cmp = trial.cmp;
        trial.cmp = 1;  // defer pruning until the tokens are compared
        place(trial, h, c);
        trial.cmp = saved_cmp;
        const std::vector<unsigned> token(trial.code.end() - 2, trial.code.end());
        if (options.empty() || token < best_token) {
          options.clear();
          best_token = token;
        }
        if (token == best_token) options.push_back(std::move(trial));
      }
      for (auto& opt : options) {
        // Re-run the prefix comparison on the two freshly pushed values.
        opt.code.resize(opt.code.size() - 2);
        if (!push(opt, best_token[0]) || !push(opt, best_token[1])) return;
      }
      if (options.size() == 1) {
        s = std::move(options.front());
        continue;
      }
      for (auto& opt : options) scan(std::move(opt), h + 1);
      return;
    }
    if (!have_best_ || s.code < best_) {
      best_ = std::move(s.code);
      have_best_ = true;
      ++best_version_;
    }
  }

  const FeynmanDiagram& d_;
  std::vector<unsigned> best_;
  bool have_best_ = false;
  unsigned best_version_ = 0;
};

}  // namespace

std::string canonical_form(const FeynmanDiagram& d) { return Canonicalizer(d).run(); }

}  // namespace hfeyn
