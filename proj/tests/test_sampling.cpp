#include <doctest.h>

#include <map>
#include <random>

#include "stochmatch/sampling.hpp"
#include "test_util.hpp"

using namespace stochmatch;

namespace {

VertexSpec vertex(VertexId id, int arrival, int deadline,
                  std::vector<double> dist,
                  std::vector<Rational> rational = {}) {
  VertexSpec v;
  v.id = id;
  v.arrival = arrival;
  v.deadline = deadline;
  v.death_dist = std::move(dist);
  v.death_dist_rational = std::move(rational);
  return v;
}

}  // namespace

TEST_CASE("point distributions sample deterministically") {
  StochasticModel m({vertex(0, 2, 2, {1.0})}, {});
  for (std::uint64_t i = 0; i < 20; ++i) {
    CHECK(sample_instantiation(m, 1, i).death_of(0) == 2);
  }
}

TEST_CASE("zero-mass tails are never drawn") {
  StochasticModel m({vertex(0, 1, 2, {1.0, 0.0})}, {});
  for (std::uint64_t i = 0; i < 200; ++i) {
    CHECK(sample_instantiation(m, 9, i).death_of(0) == 1);
  }
}

TEST_CASE("sampling matches a uniform distribution empirically") {
  StochasticModel m({vertex(0, 1, 3, {1.0 / 3, 1.0 / 3, 1.0 / 3})}, {});
  std::map<int, int> histogram;
  const int samples = 30000;
  for (int i = 0; i < samples; ++i) {
    ++histogram[sample_instantiation(m, 4, static_cast<std::uint64_t>(i))
                    .death_of(0)];
  }
  for (int d = 1; d <= 3; ++d) {
    const double freq = static_cast<double>(histogram[d]) / samples;
    CHECK(freq == doctest::Approx(1.0 / 3).epsilon(0.06));
    CHECK(std::abs(freq - 1.0 / 3) < 0.02);
  }
}

TEST_CASE("samples are pure functions of (model, seed, index)") {
  std::mt19937_64 rng(31);
  const StochasticModel m = testutil::random_model(rng);
  for (std::uint64_t i = 0; i < 50; ++i) {
    CHECK(sample_instantiation(m, 77, i).death_times ==
          sample_instantiation(m, 77, i).death_times);
  }
  // ... and different indices explore different outcomes.
  const StochasticModel varied = make_sn_family(3);
  bool varied_difference = false;
  for (std::uint64_t i = 1; i < 50 && !varied_difference; ++i) {
    varied_difference = sample_instantiation(varied, 77, i).death_times !=
                        sample_instantiation(varied, 77, 0).death_times;
  }
  CHECK(varied_difference);
}

TEST_CASE("instantiation graph follows realized lifetimes") {
  SUBCASE("everyone surviving to the deadline restores the whole graph") {
    std::mt19937_64 rng(13);
    const StochasticModel m = testutil::random_model(rng);
    Instantiation inst;
    inst.death_times.assign(static_cast<size_t>(m.id_bound()), -1);
    for (const VertexSpec& v : m.vertices()) {
      inst.death_times[static_cast<size_t>(v.id)] = v.deadline;
    }
    CHECK(instantiation_graph(m, inst).edges() == m.edges());
  }
  SUBCASE("S_2 with both clique vertices dying on day 1") {
    const StochasticModel m = make_sn_family(2);
    Instantiation inst;
    inst.death_times = {1, 1, 2, 2};
    CHECK(instantiation_graph(m, inst).edges() == std::vector<Edge>{{0, 1}});
  }
  SUBCASE("S_2 with one survivor keeps its pendant edge") {
    const StochasticModel m = make_sn_family(2);
    Instantiation inst;
    inst.death_times = {2, 1, 2, 2};
    CHECK(instantiation_graph(m, inst).edges() ==
          std::vector<Edge>{{0, 1}, {0, 2}});
  }
}

TEST_CASE("delaying one death never removes instantiation edges") {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 30; ++trial) {
    const StochasticModel m = testutil::random_model(rng);
    Instantiation inst = sample_instantiation(m, 5, static_cast<std::uint64_t>(trial));
    const auto before = instantiation_graph(m, inst).edges();
    for (const VertexSpec& v : m.vertices()) {
      if (inst.death_of(v.id) < v.deadline) {
        Instantiation later = inst;
        ++later.death_times[static_cast<size_t>(v.id)];
        const auto after = instantiation_graph(m, later).edges();
        for (Edge e : before) {
          CHECK(std::binary_search(after.begin(), after.end(), e));
        }
      }
    }
  }
}

TEST_CASE("realization unrolls alive sets") {
  SUBCASE("single-timestep model has one full snapshot") {
    StochasticModel m({vertex(0, 1, 1, {1.0}), vertex(1, 1, 1, {1.0})},
                      {{0, 1}});
    const auto snapshots = realization_of(m, sample_instantiation(m, 0, 0));
    REQUIRE(snapshots.size() == 1);
    CHECK(snapshots[0] == AliveSet{0, 1});
  }
  SUBCASE("S_2 with both clique vertices surviving") {
    const StochasticModel m = make_sn_family(2);
    Instantiation inst;
    inst.death_times = {2, 2, 2, 2};
    const auto snapshots = realization_of(m, inst);
    REQUIRE(snapshots.size() == 2);
    CHECK(snapshots[0] == AliveSet{0, 1});
    CHECK(snapshots[1] == AliveSet{0, 1, 2, 3});
  }
  SUBCASE("dead vertices never reappear") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 25; ++trial) {
      const StochasticModel m = testutil::random_model(rng);
      const Instantiation inst =
          sample_instantiation(m, 2, static_cast<std::uint64_t>(trial));
      const auto snapshots = realization_of(m, inst);
      for (const VertexSpec& v : m.vertices()) {
        for (int t = 1; t <= m.lifetime(); ++t) {
          const bool alive = std::binary_search(
              snapshots[static_cast<size_t>(t - 1)].begin(),
              snapshots[static_cast<size_t>(t - 1)].end(), v.id);
          CHECK(alive == (v.arrival <= t && t <= inst.death_of(v.id)));
        }
      }
    }
  }
}

TEST_CASE("enumeration covers the space exactly once") {
  SUBCASE("point distributions have a single instantiation") {
    StochasticModel m({vertex(0, 1, 1, {1.0}), vertex(1, 1, 2, {0.0, 1.0})},
                      {{0, 1}});
    int count = 0;
    enumerate_instantiations(m, [&](const Instantiation& inst, double p) {
      ++count;
      CHECK(p == doctest::Approx(1.0));
      CHECK(inst.death_of(1) == 2);
    });
    CHECK(count == 1);
  }
  SUBCASE("S_2 has four equiprobable instantiations") {
    const StochasticModel m = make_sn_family(2);
    int count = 0;
    double total = 0.0;
    enumerate_instantiations(m, [&](const Instantiation&, double p) {
      ++count;
      CHECK(p == doctest::Approx(0.25));
      total += p;
    });
    CHECK(count == 4);
    CHECK(total == doctest::Approx(1.0));
  }
  SUBCASE("the triad family's classes carry total mass 1") {
    const StochasticModel m = make_triad_family(Rational(1, 10));
    // Group by which day-1 vertices reach day 3 (8 static-graph classes).
    std::map<std::vector<bool>, double> class_mass;
    double total = 0.0;
    enumerate_instantiations(m, [&](const Instantiation& inst, double p) {
      std::vector<bool> key;
      for (VertexId id = 0; id < 3; ++id) {
        key.push_back(inst.death_of(id) == 3);
      }
      class_mass[key] += p;
      total += p;
    });
    CHECK(class_mass.size() == 8);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));

    Rational rational_total(0);
    enumerate_instantiations_rational(
        m, [&](const Instantiation&, const Rational& p) { rational_total += p; });
    CHECK(rational_total == 1);
  }
}

TEST_CASE("enumeration probabilities sum to one on random models") {
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 25; ++trial) {
    const StochasticModel m = testutil::random_model(rng);
    double total = 0.0;
    enumerate_instantiations(m, [&](const Instantiation&, double p) {
      CHECK(p > 0.0);
      total += p;
    });
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));

    Rational rational_total(0);
    enumerate_instantiations_rational(
        m, [&](const Instantiation&, const Rational& p) { rational_total += p; });
    CHECK(rational_total == 1);
  }
}

TEST_CASE("enumeration cap is enforced with advice") {
  const StochasticModel m = make_sn_family(4);  // 16 instantiations
  CHECK(instantiation_count(m) == 16);
  CHECK_THROWS_WITH_AS(
      enumerate_instantiations(m, [](const Instantiation&, double) {}, 8),
      doctest::Contains("Monte-Carlo"), CapExceeded);
}

TEST_CASE("empirical frequencies match enumerated probabilities") {
  // Chi-square-style check at desk scale: every instantiation of S_2 should
  // appear with frequency close to its enumerated probability.
  const StochasticModel m = make_sn_family(2);
  std::map<std::vector<int>, double> expected;
  enumerate_instantiations(m, [&](const Instantiation& inst, double p) {
    expected[inst.death_times] += p;
  });
  std::map<std::vector<int>, int> observed;
  const int samples = 40000;
  for (int i = 0; i < samples; ++i) {
    ++observed[sample_instantiation(m, 123, static_cast<std::uint64_t>(i))
                   .death_times];
  }
  for (const auto& [death_times, probability] : expected) {
    const double freq =
        static_cast<double>(observed[death_times]) / samples;
    CHECK(std::abs(freq - probability) < 0.01);
  }
}
