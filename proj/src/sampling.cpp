#include "stochmatch/sampling.hpp"

#include <algorithm>

namespace stochmatch {

namespace {

// SplitMix64 step; also used to derive per-sample stream keys.
std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

struct SampleStream {
  std::uint64_t state;

  SampleStream(std::uint64_t seed, std::uint64_t index)
      : state(mix64(mix64(seed) ^ (index + 0x632be59bd9b4e019ull))) {}

  double next_unit() {
    state = state * 6364136223846793005ull + 1442695040888963407ull;
    std::uint64_t bits = mix64(state);
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
  }
};

int draw_death_time(const VertexSpec& v, double u) {
  double cumulative = 0.0;
  int last_positive = -1;
  for (int i = 0; i < v.window_length(); ++i) {
    double p = v.death_dist[static_cast<size_t>(i)];
    if (p <= 0.0) continue;
    cumulative += p;
    last_positive = i;
    if (u < cumulative) return v.arrival + i;
  }
  if (last_positive < 0) {
    throw ModelError("vertex " + std::to_string(v.id) +
                     " has an all-zero death distribution");
  }
  return v.arrival + last_positive;  // float residue past the final mass
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return mix64(seed + 0x9e3779b97f4a7c15ull * (stream + 1));
}

void sample_instantiation_into(const StochasticModel& m, std::uint64_t seed,
                               std::uint64_t index, Instantiation& out) {
  out.death_times.assign(static_cast<size_t>(m.id_bound()), -1);
  SampleStream stream(seed, index);
  for (const VertexSpec& v : m.vertices()) {
    out.death_times[static_cast<size_t>(v.id)] =
        draw_death_time(v, stream.next_unit());
  }
}

Instantiation sample_instantiation(const StochasticModel& m,
                                   std::uint64_t seed, std::uint64_t index) {
  Instantiation inst;
  sample_instantiation_into(m, seed, index, inst);
  return inst;
}

StaticGraph instantiation_graph(const StochasticModel& m,
                                const Instantiation& inst) {
  std::vector<Edge> edges;
  edges.reserve(m.edges().size());
  for (Edge e : m.edges()) {
    const VertexSpec& u = m.vertex(e.first);
    const VertexSpec& v = m.vertex(e.second);
    const int du = inst.death_of(e.first);
    const int dv = inst.death_of(e.second);
    if (std::max(u.arrival, v.arrival) <= std::min(du, dv)) edges.push_back(e);
  }
  return StaticGraph(m.id_bound(), std::move(edges));
}

std::vector<AliveSet> realization_of(const StochasticModel& m,
                                     const Instantiation& inst) {
  std::vector<AliveSet> snapshots(static_cast<size_t>(m.lifetime()));
  for (const VertexSpec& v : m.vertices()) {
    const int d = inst.death_of(v.id);
    for (int t = v.arrival; t <= d; ++t) {
      snapshots[static_cast<size_t>(t - 1)].push_back(v.id);
    }
  }
  for (AliveSet& s : snapshots) std::sort(s.begin(), s.end());
  return snapshots;
}

std::uint64_t instantiation_count(const StochasticModel& m, std::uint64_t cap) {
  std::uint64_t count = 1;
  for (const VertexSpec& v : m.vertices()) {
    const std::uint64_t support = static_cast<std::uint64_t>(v.support_size());
    if (support == 0) {
      throw ModelError("vertex " + std::to_string(v.id) +
                       " has an all-zero death distribution");
    }
    if (count > cap / support) {
      throw CapExceeded(
          "instantiation space exceeds cap of " + std::to_string(cap) +
          "; use Monte-Carlo estimation instead");
    }
    count *= support;
  }
  return count;
}

namespace {

template <typename P, typename MassFn>
void enumerate_impl(const StochasticModel& m, MassFn mass,
                    const std::function<void(const Instantiation&, P)>& visit,
                    std::uint64_t cap) {
  instantiation_count(m, cap);  // cap and zero-support check

  const auto& vertices = m.vertices();
  Instantiation inst;
  inst.death_times.assign(static_cast<size_t>(m.id_bound()), -1);

  // Odometer over positive-mass death times, vertex by vertex.
  struct Level {
    std::vector<int> times;
    std::vector<P> masses;
  };
  std::vector<Level> levels;
  levels.reserve(vertices.size());
  for (const VertexSpec& v : vertices) {
    Level level;
    for (int d = v.arrival; d <= v.deadline; ++d) {
      if (v.mass(d) > 0.0) {
        level.times.push_back(d);
        level.masses.push_back(mass(v, d));
      }
    }
    levels.push_back(std::move(level));
  }

  std::vector<size_t> pick(vertices.size(), 0);
  std::vector<P> prefix(vertices.size() + 1);
  prefix[0] = P(1);
  size_t depth = 0;
  while (true) {
    if (depth == vertices.size()) {
      visit(inst, prefix[depth]);
      if (depth == 0) return;
      --depth;
    } else {
      const Level& level = levels[depth];
      if (pick[depth] < level.times.size()) {
        inst.death_times[static_cast<size_t>(vertices[depth].id)] =
            level.times[pick[depth]];
        prefix[depth + 1] = prefix[depth] * level.masses[pick[depth]];
        ++pick[depth];
        ++depth;
        continue;
      }
      pick[depth] = 0;
      if (depth == 0) return;
      --depth;
    }
  }
}

}  // namespace

void enumerate_instantiations(
    const StochasticModel& m,
    const std::function<void(const Instantiation&, double)>& visit,
    std::uint64_t cap) {
  enumerate_impl<double>(
      m, [](const VertexSpec& v, int d) { return v.mass(d); }, visit, cap);
}

void enumerate_instantiations_rational(
    const StochasticModel& m,
    const std::function<void(const Instantiation&, const Rational&)>& visit,
    std::uint64_t cap) {
  if (!m.has_rational_distributions()) {
    throw ModelError(
        "rational enumeration requires exact distributions on every vertex");
  }
  enumerate_impl<Rational>(
      m, [](const VertexSpec& v, int d) { return v.rational_mass(d); },
      [&](const Instantiation& inst, Rational p) { visit(inst, p); }, cap);
}

}  // namespace stochmatch
