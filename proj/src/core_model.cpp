#include "stochmatch/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace stochmatch {

namespace {
constexpr double kDistTolerance = 1e-9;

std::string edge_name(Edge e) {
  std::ostringstream out;
  out << "(" << e.first << "," << e.second << ")";
  return out.str();
}
}  // namespace

std::uint64_t alive_mask(const AliveSet& s) {
  std::uint64_t mask = 0;
  for (VertexId v : s) {
    if (v < 0 || v >= 64) throw ModelError("alive_mask requires vertex ids < 64");
    mask |= std::uint64_t{1} << v;
  }
  return mask;
}

AliveSet alive_from_mask(std::uint64_t mask) {
  AliveSet s;
  for (int v = 0; v < 64; ++v) {
    if (mask & (std::uint64_t{1} << v)) s.push_back(v);
  }
  return s;
}

double VertexSpec::mass(int t) const {
  if (t < arrival || t > deadline) return 0.0;
  return death_dist[static_cast<size_t>(t - arrival)];
}

double VertexSpec::tail(int t) const {
  if (t <= arrival) return 1.0;
  if (t > deadline) return 0.0;
  double sum = 0.0;
  for (int d = t; d <= deadline; ++d) sum += mass(d);
  return sum;
}

Rational VertexSpec::rational_mass(int t) const {
  if (!has_rational()) {
    throw ModelError("vertex " + std::to_string(id) +
                     " has no exact rational distribution");
  }
  if (t < arrival || t > deadline) return Rational(0);
  return death_dist_rational[static_cast<size_t>(t - arrival)];
}

Rational VertexSpec::rational_tail(int t) const {
  if (t <= arrival) return Rational(1);
  if (t > deadline) return Rational(0);
  Rational sum(0);
  for (int d = t; d <= deadline; ++d) sum += rational_mass(d);
  return sum;
}

int VertexSpec::support_size() const {
  int count = 0;
  for (double p : death_dist) {
    if (p > 0.0) ++count;
  }
  return count;
}

StochasticModel::StochasticModel(std::vector<VertexSpec> vertices,
                                 std::vector<Edge> edges)
    : vertices_(std::move(vertices)), edges_(std::move(edges)) {
  std::sort(vertices_.begin(), vertices_.end(),
            [](const VertexSpec& a, const VertexSpec& b) { return a.id < b.id; });
  for (Edge& e : edges_) e = make_edge(e.first, e.second);
  std::sort(edges_.begin(), edges_.end());

  for (const VertexSpec& v : vertices_) {
    lifetime_ = std::max(lifetime_, v.deadline);
    id_bound_ = std::max(id_bound_, v.id + 1);
  }
  index_of_.assign(static_cast<size_t>(std::max(id_bound_, 0)), -1);
  for (size_t i = 0; i < vertices_.size(); ++i) {
    VertexId id = vertices_[i].id;
    if (id >= 0 && index_of_[static_cast<size_t>(id)] < 0) {
      index_of_[static_cast<size_t>(id)] = static_cast<int>(i);
    }
  }
}

bool StochasticModel::has_vertex(VertexId id) const {
  return id >= 0 && id < id_bound_ && index_of_[static_cast<size_t>(id)] >= 0;
}

const VertexSpec& StochasticModel::vertex(VertexId id) const {
  if (!has_vertex(id)) {
    throw ModelError("unknown vertex id " + std::to_string(id));
  }
  return vertices_[static_cast<size_t>(index_of_[static_cast<size_t>(id)])];
}

bool StochasticModel::has_edge(VertexId u, VertexId v) const {
  return std::binary_search(edges_.begin(), edges_.end(), make_edge(u, v));
}

AliveSet StochasticModel::arrivals_at(int t) const {
  AliveSet out;
  for (const VertexSpec& v : vertices_) {
    if (v.arrival == t) out.push_back(v.id);
  }
  return out;
}

bool StochasticModel::has_rational_distributions() const {
  return std::all_of(vertices_.begin(), vertices_.end(),
                     [](const VertexSpec& v) { return v.has_rational(); });
}

std::string ValidationReport::to_string() const {
  if (ok()) return "ok";
  std::ostringstream out;
  for (const ValidationIssue& issue : issues) {
    out << issue.rule << ": " << issue.detail << "\n";
  }
  return out.str();
}

ValidationReport validate_model(const StochasticModel& m) {
  ValidationReport report;
  auto add = [&](const std::string& rule, const std::string& detail) {
    report.issues.push_back({rule, detail});
  };

  std::vector<char> seen(static_cast<size_t>(std::max(m.id_bound(), 1)), 0);
  for (const VertexSpec& v : m.vertices()) {
    const std::string name = "vertex " + std::to_string(v.id);
    if (v.id < 0) {
      add("negative id", name);
      continue;
    }
    if (seen[static_cast<size_t>(v.id)]) add("duplicate id", name);
    seen[static_cast<size_t>(v.id)] = 1;

    if (v.arrival < 1) add("arrival before time 1", name);
    if (v.arrival > v.deadline) add("arrival after deadline", name);
    if (static_cast<int>(v.death_dist.size()) != v.window_length()) {
      add("distribution length != interval length", name);
      continue;
    }
    double sum = 0.0;
    bool negative = false;
    for (double p : v.death_dist) {
      if (!(p >= 0.0) || !std::isfinite(p)) negative = true;
      sum += p;
    }
    if (negative) add("negative or non-finite probability", name);
    if (std::abs(sum - 1.0) > kDistTolerance) {
      std::ostringstream detail;
      detail << name << ": distribution sums to " << sum;
      add("distribution sums to 1", detail.str());
    }
    if (v.has_rational()) {
      if (v.death_dist_rational.size() != v.death_dist.size()) {
        add("rational distribution length mismatch", name);
      } else {
        Rational rsum(0);
        bool rneg = false;
        for (size_t i = 0; i < v.death_dist_rational.size(); ++i) {
          const Rational& p = v.death_dist_rational[i];
          if (p < 0) rneg = true;
          rsum += p;
          if (std::abs(to_double(p) - v.death_dist[i]) > kDistTolerance) {
            add("rational/double distribution mismatch", name);
            break;
          }
        }
        if (rneg) add("negative rational probability", name);
        if (rsum != 1) add("rational distribution sums to 1", name);
      }
    }
  }

  for (size_t i = 0; i < m.edges().size(); ++i) {
    Edge e = m.edges()[i];
    const std::string name = "edge " + edge_name(e);
    if (e.first == e.second) {
      add("self-loop", name);
      continue;
    }
    if (i + 1 < m.edges().size() && m.edges()[i + 1] == e) {
      add("duplicate edge", name);
    }
    if (!m.has_vertex(e.first) || !m.has_vertex(e.second)) {
      add("edge endpoint not declared", name);
      continue;
    }
    const VertexSpec& u = m.vertex(e.first);
    const VertexSpec& v = m.vertex(e.second);
    if (std::max(u.arrival, v.arrival) > std::min(u.deadline, v.deadline)) {
      add("disjoint life intervals", name);
    }
  }
  return report;
}

double edge_presence_probability(const StochasticModel& m, Edge e) {
  e = make_edge(e.first, e.second);
  if (!m.has_edge(e.first, e.second)) {
    throw ModelError("unknown edge " + edge_name(e));
  }
  const VertexSpec& u = m.vertex(e.first);
  const VertexSpec& v = m.vertex(e.second);
  const int first_shared = std::max(u.arrival, v.arrival);
  return u.tail(first_shared) * v.tail(first_shared);
}

StochasticModel conditioned_submodel(const StochasticModel& m,
                                     const AliveSet& s, int t) {
  std::vector<char> in_s(static_cast<size_t>(m.id_bound()), 0);
  for (VertexId id : s) {
    if (!m.has_vertex(id)) {
      throw ModelError("alive set names unknown vertex " + std::to_string(id));
    }
    const VertexSpec& v = m.vertex(id);
    if (v.arrival > t || v.deadline < t) {
      throw ModelError("vertex " + std::to_string(id) +
                       " cannot be alive at time " + std::to_string(t));
    }
    if (v.tail(t) <= 0.0) {
      throw ModelError("conditioning vertex " + std::to_string(id) +
                       " on a zero-probability survival event");
    }
    in_s[static_cast<size_t>(id)] = 1;
  }

  std::vector<VertexSpec> vertices;
  std::vector<char> kept(static_cast<size_t>(m.id_bound()), 0);
  for (const VertexSpec& v : m.vertices()) {
    const bool survivor = in_s[static_cast<size_t>(v.id)];
    if (!survivor && v.arrival < t) continue;
    VertexSpec out = v;
    if (survivor && v.arrival < t) {
      out.arrival = t;
      out.death_dist.assign(static_cast<size_t>(v.deadline - t + 1), 0.0);
      const double tail = v.tail(t);
      for (int d = t; d <= v.deadline; ++d) {
        out.death_dist[static_cast<size_t>(d - t)] = v.mass(d) / tail;
      }
      if (v.has_rational()) {
        const Rational rtail = v.rational_tail(t);
        out.death_dist_rational.assign(static_cast<size_t>(v.deadline - t + 1),
                                       Rational(0));
        for (int d = t; d <= v.deadline; ++d) {
          out.death_dist_rational[static_cast<size_t>(d - t)] =
              v.rational_mass(d) / rtail;
        }
      }
    }
    vertices.push_back(std::move(out));
    kept[static_cast<size_t>(v.id)] = 1;
  }

  auto spec_of = [&](VertexId id) -> const VertexSpec& {
    auto it = std::lower_bound(
        vertices.begin(), vertices.end(), id,
        [](const VertexSpec& v, VertexId key) { return v.id < key; });
    return *it;
  };
  std::vector<Edge> edges;
  for (Edge e : m.edges()) {
    if (!kept[static_cast<size_t>(e.first)] || !kept[static_cast<size_t>(e.second)]) {
      continue;
    }
    const VertexSpec& u = spec_of(e.first);
    const VertexSpec& v = spec_of(e.second);
    if (std::max(u.arrival, v.arrival) > std::min(u.deadline, v.deadline)) {
      continue;  // interval intersection lost after re-anchoring survivors
    }
    edges.push_back(e);
  }
  return StochasticModel(std::move(vertices), std::move(edges));
}

StochasticModel remove_vertices(const StochasticModel& m,
                                std::span<const VertexId> ids) {
  std::vector<char> drop(static_cast<size_t>(m.id_bound()), 0);
  for (VertexId id : ids) {
    if (!m.has_vertex(id)) {
      throw ModelError("cannot remove unknown vertex " + std::to_string(id));
    }
    drop[static_cast<size_t>(id)] = 1;
  }
  std::vector<VertexSpec> vertices;
  for (const VertexSpec& v : m.vertices()) {
    if (!drop[static_cast<size_t>(v.id)]) vertices.push_back(v);
  }
  std::vector<Edge> edges;
  for (Edge e : m.edges()) {
    if (!drop[static_cast<size_t>(e.first)] && !drop[static_cast<size_t>(e.second)]) {
      edges.push_back(e);
    }
  }
  return StochasticModel(std::move(vertices), std::move(edges));
}

StochasticModel make_sn_family(int n) {
  if (n < 1) throw ModelError("S_n family requires n >= 1");
  std::vector<VertexSpec> vertices;
  vertices.reserve(static_cast<size_t>(2 * n));
  for (int i = 0; i < n; ++i) {
    VertexSpec clique_vertex;
    clique_vertex.id = i;
    clique_vertex.arrival = 1;
    clique_vertex.deadline = 2;
    clique_vertex.death_dist = {0.5, 0.5};
    clique_vertex.death_dist_rational = {Rational(1, 2), Rational(1, 2)};
    vertices.push_back(std::move(clique_vertex));
  }
  for (int i = 0; i < n; ++i) {
    VertexSpec pendant;
    pendant.id = n + i;
    pendant.arrival = 2;
    pendant.deadline = 2;
    pendant.death_dist = {1.0};
    pendant.death_dist_rational = {Rational(1)};
    vertices.push_back(std::move(pendant));
  }
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) edges.push_back({i, j});
    edges.push_back({i, n + i});
  }
  return StochasticModel(std::move(vertices), std::move(edges));
}

StochasticModel make_triad_family(const Rational& epsilon) {
  if (!(epsilon > 0) || !(epsilon < Rational(1, 2))) {
    throw ModelError("triad family requires 0 < eps < 1/2");
  }
  const Rational rest = Rational(1) - 2 * epsilon;
  std::vector<VertexSpec> vertices;
  for (int i = 0; i < 3; ++i) {
    VertexSpec early;
    early.id = i;
    early.arrival = 1;
    early.deadline = 3;
    early.death_dist = {to_double(epsilon), to_double(epsilon), to_double(rest)};
    early.death_dist_rational = {epsilon, epsilon, rest};
    vertices.push_back(std::move(early));
  }
  for (int i = 3; i < 6; ++i) {
    VertexSpec late;
    late.id = i;
    late.arrival = 3;
    late.deadline = 3;
    late.death_dist = {1.0};
    late.death_dist_rational = {Rational(1)};
    vertices.push_back(std::move(late));
  }
  std::vector<Edge> edges = {{1, 2}, {0, 3}, {1, 4}, {2, 5}, {3, 4}};
  return StochasticModel(std::move(vertices), std::move(edges));
}

}  // namespace stochmatch
