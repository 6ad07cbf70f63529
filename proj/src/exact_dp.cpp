#include "stochmatch/exact_dp.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "stochmatch/estimators.hpp"
#include "stochmatch/policies.hpp"

namespace stochmatch {

const DPTable::Entry* DPTable::find(std::uint64_t mask, int t) const {
  if (t < 0 || t >= static_cast<int>(by_time_.size())) return nullptr;
  const auto& slot = by_time_[static_cast<size_t>(t)];
  auto it = slot.find(mask);
  return it == slot.end() ? nullptr : &it->second;
}

const DPTable::Entry& DPTable::at(std::uint64_t mask, int t) const {
  const Entry* entry = find(mask, t);
  if (entry == nullptr) {
    throw std::logic_error("state (t=" + std::to_string(t) +
                           ") missing from the optimal-policy table");
  }
  return *entry;
}

std::size_t DPTable::state_count() const {
  std::size_t count = 0;
  for (const auto& slot : by_time_) count += slot.size();
  return count;
}

void DPTable::for_each_sorted(
    const std::function<void(int, std::uint64_t, const Entry&)>& visit) const {
  for (size_t t = 0; t < by_time_.size(); ++t) {
    std::vector<std::uint64_t> masks;
    masks.reserve(by_time_[t].size());
    for (const auto& [mask, entry] : by_time_[t]) masks.push_back(mask);
    std::sort(masks.begin(), masks.end());
    for (std::uint64_t mask : masks) {
      visit(static_cast<int>(t), mask, by_time_[t].at(mask));
    }
  }
}

void DPTable::insert(int t, std::uint64_t mask, Entry entry) {
  if (t < 0) throw std::logic_error("negative timestep in table");
  if (t >= static_cast<int>(by_time_.size())) {
    by_time_.resize(static_cast<size_t>(t) + 1);
  }
  by_time_[static_cast<size_t>(t)][mask] = std::move(entry);
}

namespace {

template <typename P>
P hazard_at(const VertexSpec& v, int t);

template <>
double hazard_at<double>(const VertexSpec& v, int t) {
  const double tail = v.tail(t);
  if (tail <= 0.0) {
    throw ModelError("vertex " + std::to_string(v.id) +
                     " cannot be alive at time " + std::to_string(t));
  }
  return v.mass(t) / tail;
}

template <>
Rational hazard_at<Rational>(const VertexSpec& v, int t) {
  const Rational tail = v.rational_tail(t);
  if (tail <= 0) {
    throw ModelError("vertex " + std::to_string(v.id) +
                     " cannot be alive at time " + std::to_string(t));
  }
  return v.rational_mass(t) / tail;
}

template <typename P>
struct StateValue {
  P value{};
  Matching decision;
};

// Death behavior of the unmatched alive set at time t, split into the
// vertices that die for sure, survive for sure, or are genuinely at risk.
template <typename P>
struct DeathProfile {
  std::uint64_t forced_dead = 0;
  std::vector<VertexId> risky;
  std::vector<P> risky_hazard;
};

template <typename P>
DeathProfile<P> death_profile(const StochasticModel& m, std::uint64_t mask,
                              int t, int max_risky) {
  DeathProfile<P> profile;
  for (std::uint64_t bits = mask; bits != 0; bits &= bits - 1) {
    const int id = std::countr_zero(bits);
    const P h = hazard_at<P>(m.vertex(id), t);
    if (h == P(1)) {
      profile.forced_dead |= std::uint64_t{1} << id;
    } else if (h != P(0)) {
      profile.risky.push_back(id);
      profile.risky_hazard.push_back(h);
    }
  }
  if (static_cast<int>(profile.risky.size()) > max_risky) {
    throw CapExceeded("more than " + std::to_string(max_risky) +
                      " vertices at risk in one state");
  }
  return profile;
}

// Value of one state for a fixed child-value functional.  Enumerates every
// matching of the snapshot in canonical order (pre-order over ascending edge
// indices) and keeps the first maximizer.
template <typename P, typename ChildFn>
StateValue<P> evaluate_state(const StochasticModel& m, std::uint64_t mask,
                             int t, std::uint64_t next_arrivals,
                             const DPCaps& caps, ChildFn&& child_value) {
  std::vector<Edge> snapshot;
  for (Edge e : m.edges()) {
    const std::uint64_t ends =
        (std::uint64_t{1} << e.first) | (std::uint64_t{1} << e.second);
    if ((mask & ends) == ends) snapshot.push_back(e);
  }

  StateValue<P> best;
  bool have_best = false;
  std::uint64_t matchings_seen = 0;
  Matching current;

  auto consider = [&](std::uint64_t matched_mask) {
    if (++matchings_seen > caps.max_matchings_per_state) {
      throw CapExceeded("more than " +
                        std::to_string(caps.max_matchings_per_state) +
                        " matchings in one state");
    }
    const std::uint64_t rest = mask & ~matched_mask;
    const DeathProfile<P> profile =
        death_profile<P>(m, rest, t, caps.max_risky);
    const std::uint64_t survivors_base =
        (rest & ~profile.forced_dead) | next_arrivals;

    P expectation(0);
    const size_t r = profile.risky.size();
    for (std::uint64_t subset = 0; subset < (std::uint64_t{1} << r); ++subset) {
      P prob(1);
      std::uint64_t dead_now = 0;
      for (size_t i = 0; i < r; ++i) {
        if (subset & (std::uint64_t{1} << i)) {
          prob *= profile.risky_hazard[i];
          dead_now |= std::uint64_t{1} << profile.risky[i];
        } else {
          prob *= P(1) - profile.risky_hazard[i];
        }
      }
      expectation += prob * child_value(survivors_base & ~dead_now, t + 1);
    }

    const P total = P(static_cast<int>(current.size())) + expectation;
    if (!have_best || total > best.value) {
      best.value = total;
      best.decision = current;
      have_best = true;
    }
  };

  // Recursive include/skip over snapshot edges; visits each matching once.
  auto extend = [&](auto&& self, size_t from, std::uint64_t matched) -> void {
    consider(matched);
    for (size_t j = from; j < snapshot.size(); ++j) {
      const Edge e = snapshot[j];
      const std::uint64_t ends =
          (std::uint64_t{1} << e.first) | (std::uint64_t{1} << e.second);
      if (matched & ends) continue;
      current.push_back(e);
      self(self, j + 1, matched | ends);
      current.pop_back();
    }
  };
  extend(extend, 0, 0);
  return best;
}

template <typename P>
class ChiStarBuilder {
 public:
  ChiStarBuilder(const StochasticModel& m, const DPCaps& caps)
      : m_(m), caps_(caps), horizon_(m.lifetime()) {
    if (m.id_bound() > 64) {
      throw CapExceeded("optimal-policy recursion requires vertex ids < 64");
    }
    arrival_masks_.assign(static_cast<size_t>(horizon_) + 2, 0);
    for (const VertexSpec& v : m.vertices()) {
      arrival_masks_[static_cast<size_t>(v.arrival)] |= std::uint64_t{1}
                                                        << v.id;
    }
    memo_.resize(static_cast<size_t>(horizon_) + 1);
  }

  const StateValue<P>& solve(std::uint64_t mask, int t) {
    auto& slot = memo_[static_cast<size_t>(t)];
    auto it = slot.find(mask);
    if (it != slot.end()) return it->second;
    if (state_count_++ >= caps_.max_states) {
      throw CapExceeded("state cap hit after " +
                        std::to_string(state_count_) + " states");
    }
    StateValue<P> value = evaluate_state<P>(
        m_, mask, t, arrival_masks_[static_cast<size_t>(t + 1)], caps_,
        [this](std::uint64_t child_mask, int child_t) -> P {
          if (child_t > horizon_) return P(0);
          return solve(child_mask, child_t).value;
        });
    return slot.emplace(mask, std::move(value)).first->second;
  }

  const auto& memo() const { return memo_; }
  std::uint64_t state_count() const { return state_count_; }

 private:
  const StochasticModel& m_;
  DPCaps caps_;
  int horizon_;
  std::vector<std::uint64_t> arrival_masks_;  // indexed by t, t <= T+1
  std::vector<std::unordered_map<std::uint64_t, StateValue<P>>> memo_;
  std::uint64_t state_count_ = 0;
};

}  // namespace

double transition_probability(const StochasticModel& m, const AliveSet& s,
                              const Matching& decision, int t,
                              const AliveSet& s_next) {
  const std::uint64_t mask = alive_mask(s);
  std::uint64_t matched = 0;
  for (Edge e : decision) {
    if (!m.has_edge(e.first, e.second)) {
      throw ModelError("decision uses a non-edge");
    }
    const std::uint64_t ends =
        (std::uint64_t{1} << e.first) | (std::uint64_t{1} << e.second);
    if ((mask & ends) != ends) throw ModelError("decision uses a dead vertex");
    if (matched & ends) throw ModelError("decision is not a matching");
    matched |= ends;
  }
  for (VertexId id : s) {
    const VertexSpec& v = m.vertex(id);
    if (v.arrival > t || v.deadline < t) {
      throw ModelError("vertex " + std::to_string(id) +
                       " cannot be alive at time " + std::to_string(t));
    }
  }

  std::uint64_t arrivals = 0;
  for (VertexId id : m.arrivals_at(t + 1)) arrivals |= std::uint64_t{1} << id;
  const std::uint64_t next_mask = alive_mask(s_next);
  if ((next_mask & arrivals) != arrivals) {
    throw ModelError("successor is missing a timestep-" + std::to_string(t + 1) +
                     " arrival");
  }
  const std::uint64_t rest = mask & ~matched;
  if ((next_mask & ~arrivals & ~rest) != 0) {
    throw ModelError("successor contains matched or impossible vertices");
  }

  double probability = 1.0;
  for (std::uint64_t bits = rest; bits != 0; bits &= bits - 1) {
    const int id = std::countr_zero(bits);
    const double h = hazard_at<double>(m.vertex(id), t);
    const bool survives = (next_mask >> id) & 1;
    probability *= survives ? 1.0 - h : h;
  }
  return probability;
}

ChiStarResult chi_star(const StochasticModel& m, const DPCaps& caps) {
  ChiStarBuilder<double> builder(m, caps);
  ChiStarResult result;
  result.value = builder.solve(0, 0).value;
  const auto& memo = builder.memo();
  for (size_t t = 0; t < memo.size(); ++t) {
    for (const auto& [mask, state] : memo[t]) {
      result.table.insert(static_cast<int>(t), mask,
                          {state.value, state.decision});
    }
  }
  return result;
}

Rational chi_star_rational(const StochasticModel& m, const DPCaps& caps) {
  if (!m.has_rational_distributions()) {
    throw ModelError(
        "exact-arithmetic recursion requires rational distributions");
  }
  ChiStarBuilder<Rational> builder(m, caps);
  return builder.solve(0, 0).value;
}

bool recheck_bellman(const StochasticModel& m, const ChiStarResult& result,
                     double tol) {
  if (m.id_bound() > 64) return false;
  std::vector<std::uint64_t> arrival_masks(
      static_cast<size_t>(m.lifetime()) + 2, 0);
  for (const VertexSpec& v : m.vertices()) {
    arrival_masks[static_cast<size_t>(v.arrival)] |= std::uint64_t{1} << v.id;
  }
  DPCaps caps;  // recheck is bounded by what was already built
  bool consistent = true;
  result.table.for_each_sorted([&](int t, std::uint64_t mask,
                                   const DPTable::Entry& entry) {
    const StateValue<double> fresh = evaluate_state<double>(
        m, mask, t, arrival_masks[static_cast<size_t>(t + 1)], caps,
        [&](std::uint64_t child_mask, int child_t) -> double {
          if (child_t > m.lifetime()) return 0.0;
          return result.table.at(child_mask, child_t).value;
        });
    if (std::abs(fresh.value - entry.value) > tol) consistent = false;
  });
  return consistent;
}

double stochasticity_ratio(const StochasticModel& m, const DPCaps& caps,
                           std::uint64_t enumeration_cap) {
  const double opt = exact_opt(m, enumeration_cap);
  if (opt <= 0.0) {
    throw ModelError("stochasticity ratio undefined: expected optimum is 0");
  }
  return chi_star(m, caps).value / opt;
}

Rational stochasticity_ratio_rational(const StochasticModel& m,
                                      const DPCaps& caps,
                                      std::uint64_t enumeration_cap) {
  const Rational opt = exact_opt_rational(m, enumeration_cap);
  if (opt <= 0) {
    throw ModelError("stochasticity ratio undefined: expected optimum is 0");
  }
  return chi_star_rational(m, caps) / opt;
}

double rho_metric(const StochasticModel& m, Policy& policy,
                  RhoZeroRule zero_rule, std::uint64_t enumeration_cap) {
  if (!policy.is_deterministic()) {
    throw ModelError("rho metric requires a deterministic policy");
  }
  GeneralMatcher matcher;
  double total = 0.0;
  double included_mass = 0.0;
  enumerate_instantiations(
      m,
      [&](const Instantiation& inst, double p) {
        const int opt = matcher.max_matching_size(instantiation_graph(m, inst));
        if (opt == 0) {
          if (zero_rule == RhoZeroRule::kCountAsOne) {
            total += p;
            included_mass += p;
          }
          return;
        }
        const PolicyTrace trace = run_adaptive(m, policy, inst);
        total += p * static_cast<double>(trace.final_matching.size()) /
                 static_cast<double>(opt);
        included_mass += p;
      },
      enumeration_cap);
  if (zero_rule == RhoZeroRule::kSkip) {
    if (included_mass <= 0.0) {
      throw ModelError("rho metric undefined: every instantiation is edgeless");
    }
    return total / included_mass;
  }
  return total;
}

int opt_hindsight(const StaticGraph& instantiation) {
  return max_matching_size(instantiation);
}

}  // namespace stochmatch
