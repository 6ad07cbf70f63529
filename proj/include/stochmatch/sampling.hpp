#ifndef STOCHMATCH_SAMPLING_HPP_
#define STOCHMATCH_SAMPLING_HPP_

#include <cstdint>
#include <functional>

#include "stochmatch/core_model.hpp"
#include "stochmatch/matching.hpp"

namespace stochmatch {

/// One realized death time per vertex, indexed by vertex id (entries for ids
/// absent from the model are -1).  Every stored time lies in the vertex's
/// window and has positive probability.
struct Instantiation {
  std::vector<int> death_times;  // size = model.id_bound()

  int death_of(VertexId id) const {
    return death_times[static_cast<size_t>(id)];
  }
};

/// Splits one master seed into independent, replayable streams; the
/// counter-based backbone of every sampling loop in the library.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Counter-based sampling: the result is a pure function of
/// (model, seed, index), so batches can be drawn concurrently in any order
/// and still reproduce bit-for-bit.
Instantiation sample_instantiation(const StochasticModel& m,
                                   std::uint64_t seed, std::uint64_t index);

/// Allocation-free variant for hot loops; out is resized as needed.
void sample_instantiation_into(const StochasticModel& m, std::uint64_t seed,
                               std::uint64_t index, Instantiation& out);

/// The static graph a hindsight observer sees: every model vertex, and edge
/// uv exactly when the realized lifetimes [a_u,d_u] and [a_v,d_v] intersect.
StaticGraph instantiation_graph(const StochasticModel& m,
                                const Instantiation& inst);

/// Timestep-by-timestep alive sets, index t-1 for t = 1..lifetime.
std::vector<AliveSet> realization_of(const StochasticModel& m,
                                     const Instantiation& inst);

inline constexpr std::uint64_t kDefaultEnumerationCap = 10'000'000;

/// Number of instantiations with positive probability (product of support
/// sizes); throws CapExceeded beyond the cap.
std::uint64_t instantiation_count(const StochasticModel& m,
                                  std::uint64_t cap = kDefaultEnumerationCap);

/// Streams every positive-probability instantiation together with its
/// probability (the product of per-vertex masses).  P is double or Rational;
/// the rational overload requires exact distributions on every vertex.
/// Enumeration order is deterministic: vertices ascending by id, death times
/// ascending.  Throws CapExceeded when the space exceeds the cap.
void enumerate_instantiations(
    const StochasticModel& m,
    const std::function<void(const Instantiation&, double)>& visit,
    std::uint64_t cap = kDefaultEnumerationCap);

void enumerate_instantiations_rational(
    const StochasticModel& m,
    const std::function<void(const Instantiation&, const Rational&)>& visit,
    std::uint64_t cap = kDefaultEnumerationCap);

}  // namespace stochmatch

#endif  // STOCHMATCH_SAMPLING_HPP_
