#ifndef STOCHMATCH_EXACT_DP_HPP_
#define STOCHMATCH_EXACT_DP_HPP_

#include <cstdint>
#include <functional>
#include <unordered_map>
#include <vector>

#include "stochmatch/core_model.hpp"
#include "stochmatch/matching.hpp"
#include "stochmatch/sampling.hpp"

namespace stochmatch {

class Policy;  // policies.hpp; only referenced, never stored here

struct DPCaps {
  std::uint64_t max_states = 1'000'000;
  std::uint64_t max_matchings_per_state = 1'000'000;
  /// Limit on simultaneously at-risk vertices (successor subsets are 2^r).
  int max_risky = 26;
};

/// Value table of the optimal adaptive policy: for every reachable
/// (alive set, timestep) state, the optimal continuation value and the
/// first-in-canonical-order matching achieving it.  Alive sets are bitmasks
/// over vertex ids (ids < 64 enforced).
class DPTable {
 public:
  struct Entry {
    double value = 0.0;
    Matching decision;
  };

  const Entry* find(std::uint64_t mask, int t) const;
  const Entry& at(std::uint64_t mask, int t) const;
  std::size_t state_count() const;
  int max_time() const { return static_cast<int>(by_time_.size()) - 1; }

  /// Deterministic iteration: ascending t, then ascending mask.
  void for_each_sorted(
      const std::function<void(int, std::uint64_t, const Entry&)>& visit) const;

  void insert(int t, std::uint64_t mask, Entry entry);

 private:
  std::vector<std::unordered_map<std::uint64_t, Entry>> by_time_;  // [t]
};

struct ChiStarResult {
  double value = 0.0;
  DPTable table;
};

/// Probability that the alive set s_next shows up at t+1 given alive set s
/// and committed matching M at time t: the product over unmatched alive
/// vertices of their death hazard h_v(t) = P_v(t)/Pr[d_v >= t] when the
/// vertex is absent from s_next and 1 - h_v(t) otherwise, with arrivals of
/// t+1 joining deterministically.  Structurally impossible successors
/// (matched vertices, unknown ids, missing arrivals) raise ModelError.
double transition_probability(const StochasticModel& m, const AliveSet& s,
                              const Matching& decision, int t,
                              const AliveSet& s_next);

/// Optimal adaptive expected matching size by memoized Bellman recursion
/// over (alive mask, timestep), maximizing over every matching of the
/// snapshot.  The returned table defines the deterministic optimal policy.
ChiStarResult chi_star(const StochasticModel& m, const DPCaps& caps = {});

/// Exact-arithmetic value (requires rational distributions on every vertex).
Rational chi_star_rational(const StochasticModel& m, const DPCaps& caps = {});

/// Re-derives every stored state value from the stored child values and
/// compares within tol; exposes the table to independent audit.
bool recheck_bellman(const StochasticModel& m, const ChiStarResult& result,
                     double tol = 1e-9);

/// chi*(m) / opt(m); ModelError when opt(m) = 0.
double stochasticity_ratio(const StochasticModel& m, const DPCaps& caps = {},
                           std::uint64_t enumeration_cap = kDefaultEnumerationCap);
Rational stochasticity_ratio_rational(
    const StochasticModel& m, const DPCaps& caps = {},
    std::uint64_t enumeration_cap = kDefaultEnumerationCap);

/// How instantiations with an empty hindsight optimum contribute to rho.
enum class RhoZeroRule {
  kCountAsOne,  // any algorithm is vacuously optimal there
  kSkip,        // drop them and renormalize over the remaining mass
};

/// Expected per-instantiation competitive ratio E[A(I)/opt(I)] of a
/// deterministic policy.
double rho_metric(const StochasticModel& m, Policy& policy,
                  RhoZeroRule zero_rule = RhoZeroRule::kCountAsOne,
                  std::uint64_t enumeration_cap = kDefaultEnumerationCap);

/// Hindsight optimum of one instantiation graph.
int opt_hindsight(const StaticGraph& instantiation);

}  // namespace stochmatch

#endif  // STOCHMATCH_EXACT_DP_HPP_
