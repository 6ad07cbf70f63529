#include <doctest.h>

#include <random>

#include "stochmatch/estimators.hpp"
#include "stochmatch/exact_dp.hpp"
#include "stochmatch/policies.hpp"
#include "test_util.hpp"

using namespace stochmatch;

namespace {

VertexSpec vertex(VertexId id, int arrival, int deadline,
                  std::vector<double> dist) {
  VertexSpec v;
  v.id = id;
  v.arrival = arrival;
  v.deadline = deadline;
  v.death_dist = std::move(dist);
  return v;
}

}  // namespace

TEST_CASE("transition probabilities") {
  SUBCASE("forced deaths leave a unique successor") {
    StochasticModel m({vertex(0, 1, 1, {1.0}), vertex(1, 1, 1, {1.0}),
                       vertex(2, 2, 2, {1.0})},
                      {{0, 1}});
    CHECK(transition_probability(m, {0, 1}, {}, 1, {2}) ==
          doctest::Approx(1.0));
    CHECK(transition_probability(m, {0, 1}, {}, 1, {0, 2}) ==
          doctest::Approx(0.0));
  }
  SUBCASE("S_n day-1 survivor subsets are uniform") {
    for (int n = 2; n <= 4; ++n) {
      const StochasticModel m = make_sn_family(n);
      AliveSet everyone;
      for (int i = 0; i < n; ++i) everyone.push_back(i);
      // Any fixed survivor set C, together with the day-2 arrivals, has
      // probability 2^-n.
      AliveSet next;
      for (int i = 0; i < n; i += 2) next.push_back(i);
      for (int i = 0; i < n; ++i) next.push_back(n + i);
      std::sort(next.begin(), next.end());
      CHECK(transition_probability(m, everyone, {}, 1, next) ==
            doctest::Approx(std::pow(0.5, n)));
    }
  }
  SUBCASE("probabilities over all successors sum to one") {
    std::mt19937_64 rng(83);
    for (int trial = 0; trial < 20; ++trial) {
      const StochasticModel m = testutil::random_model(rng);
      const int t = 1;
      AliveSet alive;
      for (const VertexSpec& v : m.vertices()) {
        if (v.arrival == t) alive.push_back(v.id);
      }
      const AliveSet arrivals = m.arrivals_at(t + 1);
      double total = 0.0;
      const size_t k = alive.size();
      for (size_t subset = 0; subset < (size_t{1} << k); ++subset) {
        AliveSet next = arrivals;
        bool feasible = true;
        for (size_t i = 0; i < k; ++i) {
          if (!(subset & (size_t{1} << i))) continue;
          const VertexSpec& v = m.vertex(alive[i]);
          if (v.deadline <= t) feasible = false;
          next.push_back(alive[i]);
        }
        if (!feasible) continue;
        std::sort(next.begin(), next.end());
        total += transition_probability(m, alive, {}, t, next);
      }
      CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
  SUBCASE("malformed successors are rejected") {
    const StochasticModel m = make_sn_family(2);
    // Matched vertices cannot survive.
    CHECK_THROWS_AS(transition_probability(m, {0, 1}, {{0, 1}}, 1, {0, 2, 3}),
                    ModelError);
    // Missing arrivals.
    CHECK_THROWS_AS(transition_probability(m, {0, 1}, {}, 1, {0}), ModelError);
    // Unknown vertex.
    CHECK_THROWS_AS(transition_probability(m, {0, 1}, {}, 1, {2, 3, 9}),
                    ModelError);
  }
}

TEST_CASE("chi_star closed forms on S_n") {
  CHECK(chi_star(make_sn_family(2)).value == doctest::Approx(1.0));
  CHECK(chi_star(make_sn_family(6)).value == doctest::Approx(3.0));
  for (int n = 1; n <= 6; ++n) {
    CHECK(chi_star_rational(make_sn_family(n)) == Rational(n, 2));
  }
}

TEST_CASE("chi_star of a single-timestep model is the matching number") {
  StochasticModel m({vertex(0, 1, 1, {1.0}), vertex(1, 1, 1, {1.0}),
                     vertex(2, 1, 1, {1.0}), vertex(3, 1, 1, {1.0})},
                    {{0, 1}, {1, 2}, {2, 3}});
  CHECK(chi_star(m).value == doctest::Approx(2.0));
}

TEST_CASE("chi_star respects caps") {
  DPCaps caps;
  caps.max_states = 2;
  CHECK_THROWS_AS(chi_star(make_sn_family(4), caps), CapExceeded);
  DPCaps matchings;
  matchings.max_matchings_per_state = 3;
  CHECK_THROWS_AS(chi_star(make_sn_family(4), matchings), CapExceeded);
}

TEST_CASE("bellman recheck passes on random models") {
  std::mt19937_64 rng(89);
  for (int trial = 0; trial < 15; ++trial) {
    const StochasticModel m = testutil::random_model(rng);
    const ChiStarResult result = chi_star(m);
    CHECK(recheck_bellman(m, result));
  }
}

TEST_CASE("chi_star never exceeds the hindsight optimum") {
  std::mt19937_64 rng(97);
  for (int trial = 0; trial < 20; ++trial) {
    const StochasticModel m = testutil::random_model(rng);
    CHECK(chi_star(m).value <= exact_opt(m) + 1e-9);
  }
}

TEST_CASE("the extracted policy achieves its own table value") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 12; ++trial) {
    const StochasticModel m = testutil::random_model(rng);
    const ChiStarResult result = chi_star(m);
    auto table = std::make_shared<DPTable>(result.table);
    auto policy = make_exact_dp_policy(std::move(table));
    CHECK(evaluate_policy_exact(m, *policy) ==
          doctest::Approx(result.value).epsilon(1e-9));
  }
}

TEST_CASE("tables are identical across builds") {
  const StochasticModel m = make_sn_family(4);
  const ChiStarResult a = chi_star(m);
  const ChiStarResult b = chi_star(m);
  CHECK(a.value == b.value);
  CHECK(a.table.state_count() == b.table.state_count());
  std::vector<std::tuple<int, std::uint64_t, double, Matching>> entries_a,
      entries_b;
  a.table.for_each_sorted([&](int t, std::uint64_t mask,
                              const DPTable::Entry& e) {
    entries_a.emplace_back(t, mask, e.value, e.decision);
  });
  b.table.for_each_sorted([&](int t, std::uint64_t mask,
                              const DPTable::Entry& e) {
    entries_b.emplace_back(t, mask, e.value, e.decision);
  });
  CHECK(entries_a == entries_b);
}

TEST_CASE("stochasticity ratio") {
  SUBCASE("deterministic models have ratio 1") {
    StochasticModel m({vertex(0, 1, 1, {1.0}), vertex(1, 1, 1, {1.0})},
                      {{0, 1}});
    CHECK(stochasticity_ratio(m) == doctest::Approx(1.0));
  }
  SUBCASE("S_n closed form") {
    for (int n = 1; n <= 6; ++n) {
      CHECK(stochasticity_ratio_rational(make_sn_family(n)) ==
            Rational(2 * n, 3 * n - 1));
    }
    CHECK(stochasticity_ratio_rational(make_sn_family(4)) == Rational(8, 11));
  }
  SUBCASE("undefined when the expected optimum is zero") {
    StochasticModel m({vertex(0, 1, 1, {1.0})}, {});
    CHECK_THROWS_AS(stochasticity_ratio(m), ModelError);
  }
}

TEST_CASE("rho metric") {
  SUBCASE("the empty policy scores zero when edges always exist") {
    const StochasticModel m = make_sn_family(2);  // clique edge always alive
    auto policy = make_empty_policy();
    CHECK(rho_metric(m, *policy) == doctest::Approx(0.0));
  }
  SUBCASE("the optimal policy on a deterministic model scores one") {
    StochasticModel m({vertex(0, 1, 1, {1.0}), vertex(1, 1, 1, {1.0}),
                       vertex(2, 1, 1, {1.0})},
                      {{0, 1}, {1, 2}});
    auto policy = make_exact_dp_policy(m);
    CHECK(rho_metric(m, *policy) == doctest::Approx(1.0));
  }
  SUBCASE("greedy scores at least one half") {
    std::mt19937_64 rng(103);
    for (int trial = 0; trial < 10; ++trial) {
      const StochasticModel m = testutil::random_model(rng);
      auto greedy = make_greedy_policy();
      CHECK(rho_metric(m, *greedy) >= 0.5 - 1e-9);
    }
  }
  SUBCASE("edgeless instantiations count as vacuously optimal") {
    // The edge exists only when vertex 0 survives to day 2.
    StochasticModel m({vertex(0, 1, 2, {0.5, 0.5}), vertex(1, 2, 2, {1.0})},
                      {{0, 1}});
    auto policy = make_empty_policy();
    CHECK(rho_metric(m, *policy, RhoZeroRule::kCountAsOne) ==
          doctest::Approx(0.5));
    CHECK(rho_metric(m, *policy, RhoZeroRule::kSkip) == doctest::Approx(0.0));
  }
  SUBCASE("randomized policies are rejected") {
    auto policy = make_split_matching_policy(SplitMatchingMode::kFpras);
    CHECK_THROWS_AS(rho_metric(make_sn_family(2), *policy), ModelError);
  }
}

TEST_CASE("opt_hindsight") {
  CHECK(opt_hindsight(StaticGraph(0, {})) == 0);
  // Full-survival S_3: the three pendant edges form the optimum.
  const StochasticModel m = make_sn_family(3);
  Instantiation inst;
  inst.death_times = {2, 2, 2, 2, 2, 2};
  CHECK(opt_hindsight(instantiation_graph(m, inst)) == 3);

  // k survivors give k + floor((n-k)/2).
  for (int n = 2; n <= 5; ++n) {
    const StochasticModel sn = make_sn_family(n);
    for (int k = 0; k <= n; ++k) {
      Instantiation death;
      death.death_times.assign(static_cast<size_t>(2 * n), 2);
      for (int i = k; i < n; ++i) death.death_times[static_cast<size_t>(i)] = 1;
      CHECK(opt_hindsight(instantiation_graph(sn, death)) ==
            k + (n - k) / 2);
    }
  }
}
