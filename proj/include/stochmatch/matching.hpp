#ifndef STOCHMATCH_MATCHING_HPP_
#define STOCHMATCH_MATCHING_HPP_

#include <span>
#include <vector>

#include "stochmatch/core_model.hpp"

namespace stochmatch {

/// A plain static graph over integer vertex ids 0..vertex_count-1.  Ids with
/// no incident edges are allowed (they arise from dead or removed model
/// vertices).  Construction rejects loops, duplicate edges, and out-of-range
/// endpoints.
class StaticGraph {
 public:
  StaticGraph() = default;
  StaticGraph(int vertex_count, std::vector<Edge> edges);

  int vertex_count() const { return vertex_count_; }
  const std::vector<Edge>& edges() const { return edges_; }

  bool operator==(const StaticGraph&) const = default;

 private:
  int vertex_count_ = 0;
  std::vector<Edge> edges_;  // normalized, sorted
};

/// A set of pairwise vertex-disjoint edges, normalized and sorted.
using Matching = std::vector<Edge>;

bool is_matching(const StaticGraph& g, const Matching& m);
/// True when m is a matching and no further edge of g can be added.
bool is_maximal_matching(const StaticGraph& g, const Matching& m);

/// Maximum-cardinality matching on general (non-bipartite) graphs via
/// augmenting-path search with blossom contraction.  Deterministic for a
/// given graph: all scans follow ascending vertex/edge order.  Reusable:
/// internal buffers persist across calls, which keeps per-call allocation
/// out of the Monte-Carlo hot loop.
class GeneralMatcher {
 public:
  int max_matching_size(const StaticGraph& g);
  Matching max_matching(const StaticGraph& g);

  /// Matching size for an edge list given directly (hot path; avoids
  /// constructing a StaticGraph).  Edges must be simple and in range.
  int max_matching_size(int vertex_count, std::span<const Edge> edges);

 private:
  void prepare(int vertex_count, std::span<const Edge> edges);
  int find_augmenting_path(int root);
  int lowest_common_base(int a, int b);
  void mark_blossom_path(int v, int base_vertex, int child);
  void run();

  int n_ = 0;
  std::vector<std::vector<int>> adj_;
  std::vector<int> mate_, parent_, base_, queue_;
  std::vector<char> in_queue_, in_blossom_, on_path_;
};

/// One-shot conveniences built on a scratch GeneralMatcher.
int max_matching_size(const StaticGraph& g);
Matching max_matching(const StaticGraph& g);

/// Exact maximum matching size by pruned search over edge subsets; the
/// independent oracle for the blossom implementation.  Throws CapExceeded
/// when the graph has more than max_edges edges.
int brute_force_max_matching(const StaticGraph& g, int max_edges = 30);

/// Takes edges in the given order (default: ascending id pairs) whenever
/// both endpoints are still free.  The result is always maximal.
Matching greedy_maximal_matching(const StaticGraph& g);
Matching greedy_maximal_matching(const StaticGraph& g,
                                 std::span<const Edge> order);

struct WeightedMatchingResult {
  Matching matching;
  double weight = 0.0;
};

/// Exact maximum-weight matching (not necessarily perfect or maximum in
/// cardinality) by branch-and-bound over edge subsets.  Weights must be
/// non-negative and aligned with g.edges().  Intended for the small models
/// this library targets; throws CapExceeded beyond max_edges edges.
WeightedMatchingResult max_weight_matching(const StaticGraph& g,
                                           std::span<const double> weights,
                                           int max_edges = 80);

}  // namespace stochmatch

#endif  // STOCHMATCH_MATCHING_HPP_
