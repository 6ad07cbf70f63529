#include "stochmatch/policies.hpp"

#include <algorithm>
#include <mutex>
#include <unordered_map>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace stochmatch {

namespace {

// Shifts every timestep so the earliest arrival is 1; conditioned submodels
// restart survivors at the current time, and the estimator contracts speak
// in terms of "timestep 1".
StochasticModel rebase_to_time_one(const StochasticModel& m) {
  if (m.vertex_count() == 0) return m;
  int first = m.vertices().front().arrival;
  for (const VertexSpec& v : m.vertices()) first = std::min(first, v.arrival);
  const int shift = 1 - first;
  if (shift == 0) return m;
  std::vector<VertexSpec> vertices = m.vertices();
  for (VertexSpec& v : vertices) {
    v.arrival += shift;
    v.deadline += shift;
  }
  return StochasticModel(std::move(vertices), std::vector<Edge>(m.edges()));
}

std::vector<Edge> snapshot_edges_of(const StochasticModel& m,
                                    const AliveSet& alive) {
  std::vector<char> in(static_cast<size_t>(m.id_bound()), 0);
  for (VertexId v : alive) in[static_cast<size_t>(v)] = 1;
  std::vector<Edge> edges;
  for (Edge e : m.edges()) {
    if (in[static_cast<size_t>(e.first)] && in[static_cast<size_t>(e.second)]) {
      edges.push_back(e);
    }
  }
  return edges;
}

class EmptyPolicy final : public Policy {
 public:
  std::string name() const override { return "empty"; }
  std::unique_ptr<Policy> clone() const override {
    return std::make_unique<EmptyPolicy>(*this);
  }
  Matching decide(const PolicyDecisionContext&) override { return {}; }
};

class GreedyPolicy final : public Policy {
 public:
  std::string name() const override { return "greedy"; }
  std::unique_ptr<Policy> clone() const override {
    return std::make_unique<GreedyPolicy>(*this);
  }
  Matching decide(const PolicyDecisionContext& ctx) override {
    return matcher_.max_matching(StaticGraph(
        ctx.submodel.id_bound(), std::vector<Edge>(ctx.snapshot_edges)));
  }

 private:
  GeneralMatcher matcher_;
};

class PatientPolicy final : public Policy {
 public:
  std::string name() const override { return "patient"; }
  std::unique_ptr<Policy> clone() const override {
    return std::make_unique<PatientPolicy>(*this);
  }
  Matching decide(const PolicyDecisionContext& ctx) override {
    if (ctx.t < ctx.horizon) return {};
    return matcher_.max_matching(StaticGraph(
        ctx.submodel.id_bound(), std::vector<Edge>(ctx.snapshot_edges)));
  }

 private:
  GeneralMatcher matcher_;
};

class SplitMatchingPolicy final : public Policy {
 public:
  SplitMatchingPolicy(SplitMatchingMode mode, EstimatorConfig cfg,
                      std::uint64_t cap)
      : mode_(mode), cfg_(std::move(cfg)), cap_(cap) {
    if (mode_ == SplitMatchingMode::kExactOracle) {
      memo_ = std::make_shared<DecisionCache>();
    }
  }

  std::string name() const override {
    return mode_ == SplitMatchingMode::kExactOracle ? "split-matching-exact"
                                                    : "split-matching-fpras";
  }
  bool is_deterministic() const override {
    return mode_ == SplitMatchingMode::kExactOracle;
  }
  std::unique_ptr<Policy> clone() const override {
    return std::make_unique<SplitMatchingPolicy>(*this);  // memo is shared
  }
  void begin_run(std::uint64_t run_seed) override {
    run_seed_ = run_seed;
    estimate_counter_ = 0;
  }

  Matching decide(const PolicyDecisionContext& ctx) override {
    if (memo_) {
      const CacheKey key{alive_mask(ctx.alive), ctx.t};
      std::lock_guard<std::mutex> lock(memo_->mutex);
      auto it = memo_->decisions.find(key);
      if (it != memo_->decisions.end()) return it->second;
    }

    StochasticModel residual = rebase_to_time_one(ctx.submodel);
    Matching committed;
    while (true) {
      std::vector<Edge> candidates;
      for (Edge e : residual.edges()) {
        if (residual.vertex(e.first).arrival == 1 &&
            residual.vertex(e.second).arrival == 1) {
          candidates.push_back(e);
        }
      }
      if (candidates.empty()) break;

      const double wait_value = value_of_waiting(residual);
      double best_value = 0.0;
      Edge best_edge{};
      bool have_edge = false;
      for (Edge e : candidates) {
        const double value = value_of_committing(residual, e);
        if (!have_edge || value > best_value) {  // ties keep the smaller edge
          best_value = value;
          best_edge = e;
          have_edge = true;
        }
      }
      if (wait_value > best_value) break;

      committed.push_back(best_edge);
      const VertexId endpoints[] = {best_edge.first, best_edge.second};
      residual = remove_vertices(residual, endpoints);
    }
    std::sort(committed.begin(), committed.end());

    if (memo_) {
      const CacheKey key{alive_mask(ctx.alive), ctx.t};
      std::lock_guard<std::mutex> lock(memo_->mutex);
      memo_->decisions.emplace(key, committed);
    }
    return committed;
  }

 private:
  struct CacheKey {
    std::uint64_t mask;
    int t;
    bool operator==(const CacheKey&) const = default;
  };
  struct CacheKeyHash {
    std::size_t operator()(const CacheKey& k) const {
      return std::hash<std::uint64_t>()(k.mask * 0x9e3779b97f4a7c15ull +
                                        static_cast<std::uint64_t>(k.t));
    }
  };
  struct DecisionCache {
    std::mutex mutex;
    std::unordered_map<CacheKey, Matching, CacheKeyHash> decisions;
  };

  double value_of_waiting(const StochasticModel& residual) {
    if (mode_ == SplitMatchingMode::kExactOracle) {
      return exact_opt_given_empty(residual, cap_);
    }
    return estimate_opt_given_empty(residual, next_config()).value;
  }

  double value_of_committing(const StochasticModel& residual, Edge e) {
    if (mode_ == SplitMatchingMode::kExactOracle) {
      return exact_opt_given_edge(residual, e, cap_);
    }
    return estimate_opt_given_edge(residual, e, next_config()).value;
  }

  EstimatorConfig next_config() {
    EstimatorConfig cfg = cfg_;
    cfg.seed = derive_seed(run_seed_, estimate_counter_++);
    return cfg;
  }

  SplitMatchingMode mode_;
  EstimatorConfig cfg_;
  std::uint64_t cap_;
  std::uint64_t run_seed_ = 0;
  std::uint64_t estimate_counter_ = 0;
  std::shared_ptr<DecisionCache> memo_;  // exact mode only; one model per policy
};

class ExactDPPolicy final : public Policy {
 public:
  explicit ExactDPPolicy(std::shared_ptr<const DPTable> table)
      : table_(std::move(table)) {}

  std::string name() const override { return "exact-dp"; }
  std::unique_ptr<Policy> clone() const override {
    return std::make_unique<ExactDPPolicy>(*this);
  }
  Matching decide(const PolicyDecisionContext& ctx) override {
    return table_->at(alive_mask(ctx.alive), ctx.t).decision;
  }

 private:
  std::shared_ptr<const DPTable> table_;
};

}  // namespace

PolicyTrace run_adaptive(const StochasticModel& m, Policy& policy,
                         const Instantiation& inst, std::uint64_t run_seed) {
  if (static_cast<int>(inst.death_times.size()) < m.id_bound()) {
    throw ModelError("instantiation does not cover the model's vertices");
  }
  const std::unique_ptr<Policy> runner = policy.clone();
  runner->begin_run(run_seed);

  PolicyTrace trace;
  AliveSet alive;
  std::vector<char> matched(static_cast<size_t>(m.id_bound()), 0);
  for (int t = 1; t <= m.lifetime(); ++t) {
    PolicyTraceStep step;
    step.t = t;
    step.arrivals = m.arrivals_at(t);
    alive.insert(alive.end(), step.arrivals.begin(), step.arrivals.end());
    std::sort(alive.begin(), alive.end());
    step.alive = alive;

    const StochasticModel submodel = conditioned_submodel(m, alive, t);
    const std::vector<Edge> snapshot = snapshot_edges_of(m, alive);
    const PolicyDecisionContext ctx{submodel, t, m.lifetime(), alive, snapshot};
    Matching decision = runner->decide(ctx);
    std::sort(decision.begin(), decision.end());

    std::vector<char> used(static_cast<size_t>(m.id_bound()), 0);
    for (Edge e : decision) {
      if (!std::binary_search(snapshot.begin(), snapshot.end(),
                              make_edge(e.first, e.second))) {
        throw std::logic_error("policy " + runner->name() +
                               " matched an edge outside the snapshot");
      }
      if (used[static_cast<size_t>(e.first)] ||
          used[static_cast<size_t>(e.second)]) {
        throw std::logic_error("policy " + runner->name() +
                               " returned overlapping edges");
      }
      used[static_cast<size_t>(e.first)] = 1;
      used[static_cast<size_t>(e.second)] = 1;
    }
    step.decision = decision;
    trace.final_matching.insert(trace.final_matching.end(), decision.begin(),
                                decision.end());
    for (Edge e : decision) {
      matched[static_cast<size_t>(e.first)] = 1;
      matched[static_cast<size_t>(e.second)] = 1;
    }

    AliveSet next_alive;
    for (VertexId v : alive) {
      if (matched[static_cast<size_t>(v)]) continue;
      if (inst.death_of(v) == t) {
        step.deaths.push_back(v);
      } else {
        next_alive.push_back(v);
      }
    }
    alive = std::move(next_alive);
    trace.steps.push_back(std::move(step));
  }
  std::sort(trace.final_matching.begin(), trace.final_matching.end());
  return trace;
}

double evaluate_policy_exact(const StochasticModel& m, Policy& policy,
                             std::uint64_t cap) {
  if (!policy.is_deterministic()) {
    throw ModelError(
        "exact evaluation requires a deterministic policy; use "
        "evaluate_policy_exact_averaged for randomized ones");
  }
  double total = 0.0;
  enumerate_instantiations(
      m,
      [&](const Instantiation& inst, double p) {
        const PolicyTrace trace = run_adaptive(m, policy, inst);
        total += p * static_cast<double>(trace.final_matching.size());
      },
      cap);
  return total;
}

double evaluate_policy_exact_averaged(const StochasticModel& m, Policy& policy,
                                      std::span<const std::uint64_t> run_seeds,
                                      std::uint64_t cap) {
  if (run_seeds.empty()) throw ModelError("at least one run seed is required");
  double total = 0.0;
  for (std::uint64_t seed : run_seeds) {
    double value = 0.0;
    std::uint64_t index = 0;
    enumerate_instantiations(
        m,
        [&](const Instantiation& inst, double p) {
          const PolicyTrace trace =
              run_adaptive(m, policy, inst, derive_seed(seed, index++));
          value += p * static_cast<double>(trace.final_matching.size());
        },
        cap);
    total += value;
  }
  return total / static_cast<double>(run_seeds.size());
}

double evaluate_policy_mc(const StochasticModel& m, Policy& policy,
                          std::uint64_t samples, std::uint64_t seed,
                          bool parallel) {
  if (samples == 0) throw ModelError("sample count must be positive");
  const long long count = static_cast<long long>(samples);
  std::uint64_t sum = 0;
#ifdef _OPENMP
  if (parallel) {
#pragma omp parallel
    {
      Instantiation inst;
#pragma omp for schedule(static) reduction(+ : sum)
      for (long long i = 0; i < count; ++i) {
        sample_instantiation_into(m, seed, static_cast<std::uint64_t>(i), inst);
        const PolicyTrace trace = run_adaptive(
            m, policy, inst,
            derive_seed(~seed, static_cast<std::uint64_t>(i)));
        sum += trace.final_matching.size();
      }
    }
    return static_cast<double>(sum) / static_cast<double>(samples);
  }
#else
  (void)parallel;
#endif
  Instantiation inst;
  for (long long i = 0; i < count; ++i) {
    sample_instantiation_into(m, seed, static_cast<std::uint64_t>(i), inst);
    const PolicyTrace trace = run_adaptive(
        m, policy, inst, derive_seed(~seed, static_cast<std::uint64_t>(i)));
    sum += trace.final_matching.size();
  }
  return static_cast<double>(sum) / static_cast<double>(samples);
}

std::unique_ptr<Policy> make_empty_policy() {
  return std::make_unique<EmptyPolicy>();
}

std::unique_ptr<Policy> make_greedy_policy() {
  return std::make_unique<GreedyPolicy>();
}

std::unique_ptr<Policy> make_patient_policy() {
  return std::make_unique<PatientPolicy>();
}

std::unique_ptr<Policy> make_split_matching_policy(SplitMatchingMode mode,
                                                   const EstimatorConfig& cfg,
                                                   std::uint64_t enumeration_cap) {
  return std::make_unique<SplitMatchingPolicy>(mode, cfg, enumeration_cap);
}

std::unique_ptr<Policy> make_exact_dp_policy(const StochasticModel& m,
                                             const DPCaps& caps) {
  auto table = std::make_shared<DPTable>(chi_star(m, caps).table);
  return std::make_unique<ExactDPPolicy>(std::move(table));
}

std::unique_ptr<Policy> make_exact_dp_policy(
    std::shared_ptr<const DPTable> table) {
  return std::make_unique<ExactDPPolicy>(std::move(table));
}

std::unique_ptr<Policy> make_policy_by_name(const std::string& name,
                                            const StochasticModel& m,
                                            const EstimatorConfig& cfg) {
  if (name == "empty") return make_empty_policy();
  if (name == "greedy") return make_greedy_policy();
  if (name == "patient") return make_patient_policy();
  if (name == "split-matching-exact") {
    return make_split_matching_policy(SplitMatchingMode::kExactOracle, cfg);
  }
  if (name == "split-matching-fpras") {
    return make_split_matching_policy(SplitMatchingMode::kFpras, cfg);
  }
  if (name == "exact-dp") return make_exact_dp_policy(m);
  throw ModelError("unknown policy '" + name + "'");
}

std::vector<std::string> policy_names() {
  return {"empty",
          "greedy",
          "patient",
          "split-matching-exact",
          "split-matching-fpras",
          "exact-dp"};
}

}  // namespace stochmatch
