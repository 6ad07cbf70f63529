#include "stochmatch/matching.hpp"

#include <algorithm>
#include <numeric>

namespace stochmatch {

StaticGraph::StaticGraph(int vertex_count, std::vector<Edge> edges)
    : vertex_count_(vertex_count), edges_(std::move(edges)) {
  if (vertex_count < 0) throw ModelError("negative vertex count");
  for (Edge& e : edges_) e = make_edge(e.first, e.second);
  std::sort(edges_.begin(), edges_.end());
  for (size_t i = 0; i < edges_.size(); ++i) {
    Edge e = edges_[i];
    if (e.first == e.second) throw ModelError("self-loop in static graph");
    if (e.first < 0 || e.second >= vertex_count_) {
      throw ModelError("edge endpoint out of range");
    }
    if (i > 0 && edges_[i - 1] == e) throw ModelError("duplicate edge");
  }
}

bool is_matching(const StaticGraph& g, const Matching& m) {
  std::vector<char> used(static_cast<size_t>(g.vertex_count()), 0);
  for (Edge e : m) {
    if (!std::binary_search(g.edges().begin(), g.edges().end(),
                            make_edge(e.first, e.second))) {
      return false;
    }
    if (used[static_cast<size_t>(e.first)] || used[static_cast<size_t>(e.second)]) {
      return false;
    }
    used[static_cast<size_t>(e.first)] = used[static_cast<size_t>(e.second)] = 1;
  }
  return true;
}

bool is_maximal_matching(const StaticGraph& g, const Matching& m) {
  if (!is_matching(g, m)) return false;
  std::vector<char> used(static_cast<size_t>(g.vertex_count()), 0);
  for (Edge e : m) {
    used[static_cast<size_t>(e.first)] = used[static_cast<size_t>(e.second)] = 1;
  }
  for (Edge e : g.edges()) {
    if (!used[static_cast<size_t>(e.first)] && !used[static_cast<size_t>(e.second)]) {
      return false;
    }
  }
  return true;
}

void GeneralMatcher::prepare(int vertex_count, std::span<const Edge> edges) {
  n_ = vertex_count;
  adj_.resize(static_cast<size_t>(n_));
  for (auto& list : adj_) list.clear();
  for (Edge e : edges) {
    adj_[static_cast<size_t>(e.first)].push_back(e.second);
    adj_[static_cast<size_t>(e.second)].push_back(e.first);
  }
  mate_.assign(static_cast<size_t>(n_), -1);
  parent_.assign(static_cast<size_t>(n_), -1);
  base_.assign(static_cast<size_t>(n_), 0);
  in_queue_.assign(static_cast<size_t>(n_), 0);
  in_blossom_.assign(static_cast<size_t>(n_), 0);
  on_path_.assign(static_cast<size_t>(n_), 0);
  queue_.clear();
}

int GeneralMatcher::lowest_common_base(int a, int b) {
  std::fill(on_path_.begin(), on_path_.end(), 0);
  int cur = a;
  while (true) {
    cur = base_[static_cast<size_t>(cur)];
    on_path_[static_cast<size_t>(cur)] = 1;
    if (mate_[static_cast<size_t>(cur)] == -1) break;
    cur = parent_[static_cast<size_t>(mate_[static_cast<size_t>(cur)])];
  }
  cur = b;
  while (!on_path_[static_cast<size_t>(base_[static_cast<size_t>(cur)])]) {
    cur = parent_[static_cast<size_t>(mate_[static_cast<size_t>(cur)])];
  }
  return base_[static_cast<size_t>(cur)];
}

void GeneralMatcher::mark_blossom_path(int v, int base_vertex, int child) {
  while (base_[static_cast<size_t>(v)] != base_vertex) {
    int m = mate_[static_cast<size_t>(v)];
    in_blossom_[static_cast<size_t>(base_[static_cast<size_t>(v)])] = 1;
    in_blossom_[static_cast<size_t>(base_[static_cast<size_t>(m)])] = 1;
    parent_[static_cast<size_t>(v)] = child;
    child = m;
    v = parent_[static_cast<size_t>(m)];
  }
}

int GeneralMatcher::find_augmenting_path(int root) {
  std::fill(in_queue_.begin(), in_queue_.end(), 0);
  std::fill(parent_.begin(), parent_.end(), -1);
  std::iota(base_.begin(), base_.end(), 0);
  queue_.clear();
  queue_.push_back(root);
  in_queue_[static_cast<size_t>(root)] = 1;
  for (size_t head = 0; head < queue_.size(); ++head) {
    int v = queue_[head];
    for (int to : adj_[static_cast<size_t>(v)]) {
      if (base_[static_cast<size_t>(v)] == base_[static_cast<size_t>(to)] ||
          mate_[static_cast<size_t>(v)] == to) {
        continue;
      }
      if (to == root ||
          (mate_[static_cast<size_t>(to)] != -1 &&
           parent_[static_cast<size_t>(mate_[static_cast<size_t>(to)])] != -1)) {
        // Odd cycle: contract the blossom rooted at the common base.
        int blossom_base = lowest_common_base(v, to);
        std::fill(in_blossom_.begin(), in_blossom_.end(), 0);
        mark_blossom_path(v, blossom_base, to);
        mark_blossom_path(to, blossom_base, v);
        for (int i = 0; i < n_; ++i) {
          if (in_blossom_[static_cast<size_t>(base_[static_cast<size_t>(i)])]) {
            base_[static_cast<size_t>(i)] = blossom_base;
            if (!in_queue_[static_cast<size_t>(i)]) {
              in_queue_[static_cast<size_t>(i)] = 1;
              queue_.push_back(i);
            }
          }
        }
      } else if (parent_[static_cast<size_t>(to)] == -1) {
        parent_[static_cast<size_t>(to)] = v;
        if (mate_[static_cast<size_t>(to)] == -1) return to;
        int m = mate_[static_cast<size_t>(to)];
        if (!in_queue_[static_cast<size_t>(m)]) {
          in_queue_[static_cast<size_t>(m)] = 1;
          queue_.push_back(m);
        }
      }
    }
  }
  return -1;
}

void GeneralMatcher::run() {
  // Greedy seed keeps the number of augmenting searches low.
  for (int v = 0; v < n_; ++v) {
    if (mate_[static_cast<size_t>(v)] != -1) continue;
    for (int to : adj_[static_cast<size_t>(v)]) {
      if (mate_[static_cast<size_t>(to)] == -1) {
        mate_[static_cast<size_t>(v)] = to;
        mate_[static_cast<size_t>(to)] = v;
        break;
      }
    }
  }
  for (int v = 0; v < n_; ++v) {
    if (mate_[static_cast<size_t>(v)] != -1) continue;
    int end = find_augmenting_path(v);
    while (end != -1) {
      int prev = parent_[static_cast<size_t>(end)];
      int next = mate_[static_cast<size_t>(prev)];
      mate_[static_cast<size_t>(end)] = prev;
      mate_[static_cast<size_t>(prev)] = end;
      end = next;
    }
  }
}

int GeneralMatcher::max_matching_size(int vertex_count,
                                      std::span<const Edge> edges) {
  prepare(vertex_count, edges);
  run();
  int matched = 0;
  for (int v = 0; v < n_; ++v) {
    if (mate_[static_cast<size_t>(v)] > v) ++matched;
  }
  return matched;
}

int GeneralMatcher::max_matching_size(const StaticGraph& g) {
  return max_matching_size(g.vertex_count(), g.edges());
}

Matching GeneralMatcher::max_matching(const StaticGraph& g) {
  prepare(g.vertex_count(), g.edges());
  run();
  Matching result;
  for (int v = 0; v < n_; ++v) {
    if (mate_[static_cast<size_t>(v)] > v) {
      result.push_back({v, mate_[static_cast<size_t>(v)]});
    }
  }
  return result;
}

int max_matching_size(const StaticGraph& g) {
  GeneralMatcher matcher;
  return matcher.max_matching_size(g);
}

Matching max_matching(const StaticGraph& g) {
  GeneralMatcher matcher;
  return matcher.max_matching(g);
}

namespace {

struct SubsetSearch {
  std::span<const Edge> edges;
  std::span<const double> weights;  // empty => cardinality
  std::vector<char> used;
  int best_count = 0;
  double best_weight = 0.0;
  std::vector<int> chosen, best_chosen;

  int free_vertices() const {
    return static_cast<int>(std::count(used.begin(), used.end(), 0));
  }

  void run_cardinality(size_t from, int count) {
    if (count > best_count) best_count = count;
    // Even taking every remaining edge cannot beat the incumbent.
    if (count + static_cast<int>(edges.size() - from) <= best_count) return;
    if (count + free_vertices() / 2 <= best_count) return;
    for (size_t j = from; j < edges.size(); ++j) {
      auto [u, v] = edges[j];
      if (used[static_cast<size_t>(u)] || used[static_cast<size_t>(v)]) continue;
      used[static_cast<size_t>(u)] = used[static_cast<size_t>(v)] = 1;
      run_cardinality(j + 1, count + 1);
      used[static_cast<size_t>(u)] = used[static_cast<size_t>(v)] = 0;
    }
  }

  // Edges must be pre-sorted by descending weight; suffix_top holds, for
  // every index, the sum of the largest weights usable from there on.
  std::vector<double> suffix_bound;

  void run_weighted(size_t from, double acc) {
    if (acc > best_weight) {
      best_weight = acc;
      best_chosen = chosen;
    }
    if (from >= edges.size()) return;
    if (acc + suffix_bound[from] <= best_weight) return;
    for (size_t j = from; j < edges.size(); ++j) {
      if (acc + suffix_bound[j] <= best_weight) return;
      auto [u, v] = edges[j];
      if (used[static_cast<size_t>(u)] || used[static_cast<size_t>(v)]) continue;
      used[static_cast<size_t>(u)] = used[static_cast<size_t>(v)] = 1;
      chosen.push_back(static_cast<int>(j));
      run_weighted(j + 1, acc + weights[j]);
      chosen.pop_back();
      used[static_cast<size_t>(u)] = used[static_cast<size_t>(v)] = 0;
    }
  }
};

}  // namespace

int brute_force_max_matching(const StaticGraph& g, int max_edges) {
  if (static_cast<int>(g.edges().size()) > max_edges) {
    throw CapExceeded("brute-force matching limited to " +
                      std::to_string(max_edges) + " edges");
  }
  SubsetSearch search;
  search.edges = g.edges();
  search.used.assign(static_cast<size_t>(g.vertex_count()), 0);
  search.run_cardinality(0, 0);
  return search.best_count;
}

Matching greedy_maximal_matching(const StaticGraph& g) {
  return greedy_maximal_matching(g, g.edges());
}

Matching greedy_maximal_matching(const StaticGraph& g,
                                 std::span<const Edge> order) {
  std::vector<char> used(static_cast<size_t>(g.vertex_count()), 0);
  Matching result;
  for (Edge e : order) {
    Edge normalized = make_edge(e.first, e.second);
    if (!std::binary_search(g.edges().begin(), g.edges().end(), normalized)) {
      throw ModelError("greedy order contains a non-edge");
    }
    if (used[static_cast<size_t>(normalized.first)] ||
        used[static_cast<size_t>(normalized.second)]) {
      continue;
    }
    used[static_cast<size_t>(normalized.first)] = 1;
    used[static_cast<size_t>(normalized.second)] = 1;
    result.push_back(normalized);
  }
  std::sort(result.begin(), result.end());
  return result;
}

WeightedMatchingResult max_weight_matching(const StaticGraph& g,
                                           std::span<const double> weights,
                                           int max_edges) {
  if (weights.size() != g.edges().size()) {
    throw ModelError("weight vector does not match edge list");
  }
  if (static_cast<int>(g.edges().size()) > max_edges) {
    throw CapExceeded("max-weight matching limited to " +
                      std::to_string(max_edges) + " edges");
  }
  for (double w : weights) {
    if (!(w >= 0.0)) throw ModelError("negative edge weight");
  }

  // Descending weight order tightens the branch-and-bound quickly; ties fall
  // back to edge order so the chosen matching is deterministic.
  std::vector<int> idx(g.edges().size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    return weights[static_cast<size_t>(a)] > weights[static_cast<size_t>(b)];
  });
  std::vector<Edge> ordered;
  std::vector<double> ordered_weights;
  ordered.reserve(idx.size());
  for (int i : idx) {
    ordered.push_back(g.edges()[static_cast<size_t>(i)]);
    ordered_weights.push_back(weights[static_cast<size_t>(i)]);
  }

  SubsetSearch search;
  search.edges = ordered;
  search.weights = ordered_weights;
  search.used.assign(static_cast<size_t>(g.vertex_count()), 0);
  search.suffix_bound.assign(ordered.size() + 1, 0.0);
  const int pair_cap = g.vertex_count() / 2;
  for (size_t j = ordered.size(); j-- > 0;) {
    // Loose but cheap: at most floor(n/2) edges can ever be added.
    double bound = 0.0;
    int taken = 0;
    for (size_t k = j; k < ordered.size() && taken < pair_cap; ++k, ++taken) {
      bound += ordered_weights[k];
    }
    search.suffix_bound[j] = bound;
  }
  search.run_weighted(0, 0.0);

  WeightedMatchingResult result;
  result.weight = search.best_weight;
  for (int j : search.best_chosen) {
    result.matching.push_back(ordered[static_cast<size_t>(j)]);
  }
  std::sort(result.matching.begin(), result.matching.end());
  return result;
}

}  // namespace stochmatch
