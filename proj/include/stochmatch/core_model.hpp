#ifndef STOCHMATCH_CORE_MODEL_HPP_
#define STOCHMATCH_CORE_MODEL_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "stochmatch/errors.hpp"
#include "stochmatch/rational.hpp"

namespace stochmatch {

/// Vertex identifiers are small non-negative integers.  Ids are assigned
/// densely (0..n-1) when a model is first built or parsed and stay stable in
/// every derived object (conditioned submodels, vertex removals), so a
/// derived model may have gaps in its id space.
using VertexId = int;

/// An unordered vertex pair, stored with the smaller id first.
using Edge = std::pair<VertexId, VertexId>;

inline Edge make_edge(VertexId u, VertexId v) {
  return u < v ? Edge{u, v} : Edge{v, u};
}

/// Set of alive vertices at some timestep: sorted ascending, no duplicates.
using AliveSet = std::vector<VertexId>;

/// Packs an alive set into a bitmask; requires all ids < 64.
std::uint64_t alive_mask(const AliveSet& s);
AliveSet alive_from_mask(std::uint64_t mask);

/// One vertex of the stochastic model: a known lifetime window
/// [arrival, deadline] plus a death-time distribution over that window.
/// The death time is the last day the vertex exists; it is drawn once per
/// instantiation and revealed only after it takes effect.
struct VertexSpec {
  VertexId id = 0;
  int arrival = 1;
  int deadline = 1;
  /// Probability of dying on day arrival + i, i = 0..deadline-arrival.
  /// Entries may be zero (the support may be a strict subset of the window).
  std::vector<double> death_dist;
  /// Optional exact mirror of death_dist; empty when the distribution was
  /// given only in floating point.  Exact-mode operations require it.
  std::vector<Rational> death_dist_rational;

  int window_length() const { return deadline - arrival + 1; }
  bool has_rational() const { return !death_dist_rational.empty(); }

  /// Pr[d = t]; zero outside [arrival, deadline].
  double mass(int t) const;
  /// Pr[d >= t]; one for t <= arrival, zero for t > deadline.
  double tail(int t) const;

  Rational rational_mass(int t) const;
  Rational rational_tail(int t) const;

  /// Number of days with strictly positive mass.
  int support_size() const;

  bool operator==(const VertexSpec&) const = default;
};

/// A stochastic arrival-departure model: an underlying simple graph whose
/// vertices carry lifetime windows and independent death-time distributions.
/// Immutable after construction; safe to share across threads.
class StochasticModel {
 public:
  StochasticModel() = default;

  /// Sorts vertices by id and normalizes/sorts edges.  Does not validate;
  /// call validate_model to obtain a violation report.  Duplicate edges and
  /// loops are preserved so the validator can name them.
  StochasticModel(std::vector<VertexSpec> vertices, std::vector<Edge> edges);

  const std::vector<VertexSpec>& vertices() const { return vertices_; }
  const std::vector<Edge>& edges() const { return edges_; }

  int vertex_count() const { return static_cast<int>(vertices_.size()); }
  int edge_count() const { return static_cast<int>(edges_.size()); }

  /// T = max deadline; 0 for an empty model.
  int lifetime() const { return lifetime_; }

  bool has_vertex(VertexId id) const;
  const VertexSpec& vertex(VertexId id) const;
  bool has_edge(VertexId u, VertexId v) const;

  /// Largest id present plus one (the size needed for id-indexed arrays).
  int id_bound() const { return id_bound_; }

  /// Ids of vertices arriving exactly at t, ascending.
  AliveSet arrivals_at(int t) const;

  /// True when every vertex carries an exact rational distribution.
  bool has_rational_distributions() const;

  bool operator==(const StochasticModel&) const = default;

 private:
  std::vector<VertexSpec> vertices_;  // sorted by id
  std::vector<Edge> edges_;           // normalized, sorted
  std::vector<int> index_of_;         // id -> index into vertices_, -1 absent
  int lifetime_ = 0;
  int id_bound_ = 0;
};

struct ValidationIssue {
  std::string rule;    // short machine-friendly rule name
  std::string detail;  // names the offending vertex/edge
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool ok() const { return issues.empty(); }
  std::string to_string() const;
};

/// Checks every model invariant: interval sanity, distribution shape and
/// normalization (1e-9 absolute tolerance; exact for rational mirrors),
/// graph simplicity, edge endpoint existence, and lifetime-interval
/// intersection for every edge.  Violations are data, not exceptions.
ValidationReport validate_model(const StochasticModel& m);

/// Probability that edge uv ever materializes: both endpoints must be alive
/// at m* = max(a_u, a_v), so p = Pr[d_u >= m*] * Pr[d_v >= m*] by
/// independence.  Throws ModelError if uv is not an edge of m.
double edge_presence_probability(const StochasticModel& m, Edge e);

/// The model seen from timestep t when the alive set is s: vertices are the
/// future arrivals (a_v >= t) plus s; survivors restart at arrival t with
/// their distribution conditioned on survival to t.  Conditioning on a
/// zero-probability survival event throws ModelError.
StochasticModel conditioned_submodel(const StochasticModel& m,
                                     const AliveSet& s, int t);

/// Drops the given vertices and their incident edges; remaining ids are
/// unchanged.
StochasticModel remove_vertices(const StochasticModel& m,
                                std::span<const VertexId> ids);

/// The 2n-vertex lower-bound family: a clique L = {0..n-1} of day-1 vertices
/// that each survive to day 2 with probability 1/2, plus pendant day-2
/// partners U = {n..2n-1} attached one per clique vertex.
StochasticModel make_sn_family(int n);

/// Six-vertex, three-timestep example family: three day-1 vertices 0,1,2
/// with death distribution (eps, eps, 1-2eps) over days 1..3, three day-3
/// vertices 3,4,5, and edges {1,2}, {0,3}, {1,4}, {2,5}, {3,4}.  The optimal
/// policy on it defers matching until a death is observed, which makes it a
/// useful trace-level regression model.  Requires 0 < eps < 1/2.
StochasticModel make_triad_family(const Rational& epsilon);

}  // namespace stochmatch

#endif  // STOCHMATCH_CORE_MODEL_HPP_
