#ifndef STOCHMATCH_POLICIES_HPP_
#define STOCHMATCH_POLICIES_HPP_

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "stochmatch/core_model.hpp"
#include "stochmatch/estimators.hpp"
#include "stochmatch/exact_dp.hpp"
#include "stochmatch/matching.hpp"
#include "stochmatch/sampling.hpp"

namespace stochmatch {

/// Everything a policy may look at when deciding: the conditioned submodel
/// (arrivals, deadlines, and survival-conditioned distributions), the
/// current time, the alive set, and the snapshot edges.  Realized death
/// times are never part of the context.
struct PolicyDecisionContext {
  const StochasticModel& submodel;
  int t = 0;
  /// Lifetime T of the model being run (known in advance, like arrivals).
  int horizon = 0;
  const AliveSet& alive;
  const std::vector<Edge>& snapshot_edges;
};

/// A decision procedure plugged into the adaptive matching loop.  Policies
/// must be reusable across runs: the runner clones the policy per run and
/// calls begin_run before the first decision.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::string name() const = 0;
  /// Deterministic policies may be evaluated exactly; randomized ones only
  /// by averaging over run seeds.
  virtual bool is_deterministic() const { return true; }
  virtual std::unique_ptr<Policy> clone() const = 0;
  virtual void begin_run(std::uint64_t /*run_seed*/) {}
  virtual Matching decide(const PolicyDecisionContext& ctx) = 0;
};

struct PolicyTraceStep {
  int t = 0;
  AliveSet arrivals;
  AliveSet alive;  // snapshot the policy saw (after arrivals joined)
  Matching decision;
  AliveSet deaths;  // unmatched vertices whose death time is t
};

struct PolicyTrace {
  std::vector<PolicyTraceStep> steps;
  Matching final_matching;
};

/// Runs the adaptive loop on one realized instantiation: arrivals join, the
/// policy decides on the conditioned submodel, matched vertices leave, then
/// deaths are applied.  Decisions using edges outside the snapshot are a
/// policy bug and raise std::logic_error.
PolicyTrace run_adaptive(const StochasticModel& m, Policy& policy,
                         const Instantiation& inst,
                         std::uint64_t run_seed = 0);

/// Exact expected final matching size over all instantiations; requires a
/// deterministic policy.
double evaluate_policy_exact(const StochasticModel& m, Policy& policy,
                             std::uint64_t cap = kDefaultEnumerationCap);

/// Exact outer expectation averaged over explicit policy run seeds; the
/// escape hatch for randomized policies.
double evaluate_policy_exact_averaged(const StochasticModel& m, Policy& policy,
                                      std::span<const std::uint64_t> run_seeds,
                                      std::uint64_t cap = kDefaultEnumerationCap);

/// Monte-Carlo estimate of the policy value over sampled instantiations.
/// Deterministic given the seed; the OpenMP path and the serial reference
/// agree exactly because the per-run values are integers.
double evaluate_policy_mc(const StochasticModel& m, Policy& policy,
                          std::uint64_t samples, std::uint64_t seed,
                          bool parallel = true);

/// Matches nothing, ever.
std::unique_ptr<Policy> make_empty_policy();

/// Maximum matching of every snapshot as soon as it appears.
std::unique_ptr<Policy> make_greedy_policy();

/// Waits until the final timestep, then takes a maximum matching.
std::unique_ptr<Policy> make_patient_policy();

/// The accumulate-one-edge-at-a-time policy: repeatedly compare the value of
/// committing each snapshot edge now (one plus the residual estimate with
/// the endpoints removed) against the value of waiting (the estimate under
/// the match-nothing-today rule); commit the best edge until waiting wins
/// strictly.  Ties prefer matching, then the smallest edge.
enum class SplitMatchingMode {
  kExactOracle,  // full enumeration on each residual submodel
  kFpras,        // Monte-Carlo estimates with the given config
};
std::unique_ptr<Policy> make_split_matching_policy(
    SplitMatchingMode mode, const EstimatorConfig& cfg = {},
    std::uint64_t enumeration_cap = kDefaultEnumerationCap);

/// Plays the stored optimal decision from a chi-star table.
std::unique_ptr<Policy> make_exact_dp_policy(const StochasticModel& m,
                                             const DPCaps& caps = {});
std::unique_ptr<Policy> make_exact_dp_policy(std::shared_ptr<const DPTable> table);

/// Name-based factory backing the command line: empty, greedy, patient,
/// split-matching-exact, split-matching-fpras, exact-dp.
std::unique_ptr<Policy> make_policy_by_name(const std::string& name,
                                            const StochasticModel& m,
                                            const EstimatorConfig& cfg = {});

/// Names accepted by make_policy_by_name.
std::vector<std::string> policy_names();

}  // namespace stochmatch

#endif  // STOCHMATCH_POLICIES_HPP_
