#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hfeyn/bv_complex.hpp"
#include "hfeyn/rational.hpp"
#include "hfeyn/series.hpp"

namespace hfeyn {

enum class VertexKind : std::uint8_t { Marked, Internal, External };

/// Feynman diagram stored as half-edges: a fixed-point-free pairing
/// (the edges) plus the vertex each half-edge hangs off.
///
/// Exactly one vertex is marked; its half-edges are listed, in leg order, by
/// marked_legs(). Internal vertices have valence >= 3, external vertices are
/// univalent, and the whole thing is connected.
class FeynmanDiagram {
 public:
  FeynmanDiagram(std::vector<unsigned> partner, std::vector<unsigned> vertex_of,
                 std::vector<VertexKind> vertex_kinds, std::vector<unsigned> marked_legs);

  /// Builds a diagram from edges given as half-edge pairs.
  static FeynmanDiagram from_edges(std::span<const std::pair<unsigned, unsigned>> edges,
                                   std::vector<unsigned> vertex_of, std::vector<VertexKind> vertex_kinds,
                                   std::vector<unsigned> marked_legs);

  /// The marked vertex alone, no half-edges.
  static FeynmanDiagram empty();

  std::size_t half_edge_count() const noexcept { return partner_.size(); }
  std::size_t vertex_count() const noexcept { return kinds_.size(); }
  std::size_t edge_count() const noexcept { return partner_.size() / 2; }

  unsigned partner(unsigned h) const { return partner_.at(h); }
  unsigned vertex_of(unsigned h) const { return vertex_of_.at(h); }
  VertexKind kind(unsigned v) const { return kinds_.at(v); }
  unsigned marked_vertex() const noexcept { return marked_vertex_; }
  std::span<const unsigned> marked_legs() const noexcept { return marked_legs_; }
  std::span<const unsigned> incident(unsigned v) const { return incident_.at(v); }
  unsigned valence(unsigned v) const { return static_cast<unsigned>(incident_.at(v).size()); }

  std::span<const unsigned> partners() const noexcept { return partner_; }
  std::span<const unsigned> vertex_assignment() const noexcept { return vertex_of_; }
  std::span<const VertexKind> vertex_kinds() const noexcept { return kinds_; }

  /// Edges as (h, partner(h)) with h < partner(h), sorted.
  std::vector<std::pair<unsigned, unsigned>> edges() const;

  std::size_t count_vertices(VertexKind kind) const;

 private:
  std::vector<unsigned> partner_;
  std::vector<unsigned> vertex_of_;
  std::vector<VertexKind> kinds_;
  std::vector<unsigned> marked_legs_;
  std::vector<std::vector<unsigned>> incident_;
  unsigned marked_vertex_ = 0;
};

/// Edges minus unmarked vertices.
int betti(const FeynmanDiagram& d);

inline constexpr std::size_t kMaxBruteForceHalfEdges = 16;

/// Counts half-edge permutations that fix the marked legs, commute with the
/// pairing and map vertices to vertices of the same kind. Exhaustive
/// backtracking search; throws TooLarge above 16 half-edges.
std::uint64_t aut_order_brute_force(const FeynmanDiagram& d);

/// Equal for two diagrams iff they are isomorphic with marked legs pinned.
std::string canonical_form(const FeynmanDiagram& d);

struct EnumeratedDiagram {
  FeynmanDiagram diagram;
  int betti = 0;
  Integer aut_order;  // from the orbit count of labeled matchings
};

using DiagramVisitor = std::function<void(const EnumeratedDiagram&)>;

/// Visits every isomorphism class of connected closed diagrams (no external
/// vertices) with marked valence n, internal valences drawn from `valences`
/// and Betti number <= max_betti. Classes are visited grouped by internal
/// valence multiset, in a deterministic order.
void for_each_closed_diagram(unsigned n, const std::set<unsigned>& valences, unsigned max_betti,
                             const DiagramVisitor& visit);

std::vector<EnumeratedDiagram> enumerate_closed_diagrams(unsigned n, const std::set<unsigned>& valences,
                                                         unsigned max_betti);

/// ev(d): sum over labelings of half-edges by {1..N} of the product of the
/// vertex and edge weights, computed by contracting the tensor network.
/// External vertices leave their labels open as x variables.
GradedElement evaluate(const Model& model, const MarkedTensor& f, const FeynmanDiagram& d);

/// Same quantity as evaluate(), by the literal N^H labeling sum.
GradedElement evaluate_by_labeling(const Model& model, const MarkedTensor& f, const FeynmanDiagram& d);

/// sum over closed diagrams of ev * hbar^beta / |Aut|, mod hbar^(K+1).
HbarSeries diagram_expectation(const Model& model, const MarkedTensor& f, unsigned max_order);

}  // namespace hfeyn
