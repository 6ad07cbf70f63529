#include <doctest.h>

#include <random>

#include "stochmatch/core_model.hpp"
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

TEST_CASE("validate accepts touching intervals") {
  StochasticModel m({vertex(0, 1, 2, {0.5, 0.5}), vertex(1, 2, 3, {0.5, 0.5})},
                    {{0, 1}});
  CHECK(validate_model(m).ok());
}

TEST_CASE("validate rejects disjoint life intervals") {
  StochasticModel m({vertex(0, 1, 1, {1.0}), vertex(1, 2, 2, {1.0})},
                    {{0, 1}});
  const auto report = validate_model(m);
  REQUIRE_FALSE(report.ok());
  CHECK(report.issues[0].rule == "disjoint life intervals");
  CHECK(report.issues[0].detail.find("(0,1)") != std::string::npos);
}

TEST_CASE("validate rejects a distribution summing to 1.1") {
  StochasticModel m({vertex(0, 1, 2, {0.5, 0.6})}, {});
  const auto report = validate_model(m);
  REQUIRE_FALSE(report.ok());
  CHECK(report.issues[0].rule == "distribution sums to 1");
  CHECK(report.issues[0].detail.find("1.1") != std::string::npos);
}

TEST_CASE("validate flags loops, duplicates, and bad endpoints") {
  StochasticModel m({vertex(0, 1, 1, {1.0}), vertex(1, 1, 1, {1.0})},
                    {{0, 0}, {0, 1}, {1, 0}, {0, 7}});
  const auto report = validate_model(m);
  int loops = 0, dups = 0, missing = 0;
  for (const auto& issue : report.issues) {
    if (issue.rule == "self-loop") ++loops;
    if (issue.rule == "duplicate edge") ++dups;
    if (issue.rule == "edge endpoint not declared") ++missing;
  }
  CHECK(loops == 1);
  CHECK(dups == 1);
  CHECK(missing == 1);
}

TEST_CASE("validate flags wrong distribution length and bad arrivals") {
  StochasticModel m({vertex(0, 2, 1, {1.0}), vertex(1, 0, 1, {0.5, 0.5}),
                     vertex(2, 1, 2, {1.0})},
                    {});
  const auto report = validate_model(m);
  REQUIRE_FALSE(report.ok());
  bool saw_order = false, saw_arrival = false, saw_length = false;
  for (const auto& issue : report.issues) {
    if (issue.rule == "arrival after deadline") saw_order = true;
    if (issue.rule == "arrival before time 1") saw_arrival = true;
    if (issue.rule == "distribution length != interval length") saw_length = true;
  }
  CHECK(saw_order);
  CHECK(saw_arrival);
  CHECK(saw_length);
}

TEST_CASE("edge presence probability") {
  SUBCASE("both endpoints point-alive at the same day") {
    StochasticModel m({vertex(0, 3, 3, {1.0}), vertex(1, 3, 3, {1.0})},
                      {{0, 1}});
    CHECK(edge_presence_probability(m, {0, 1}) == doctest::Approx(1.0));
  }
  SUBCASE("point vertex against a uniform one sharing its first day") {
    StochasticModel m({vertex(0, 1, 1, {1.0}),
                       vertex(1, 1, 3, {1.0 / 3, 1.0 / 3, 1.0 / 3})},
                      {{0, 1}});
    CHECK(edge_presence_probability(m, {0, 1}) == doctest::Approx(1.0));
  }
  SUBCASE("uniform endpoint must survive to the partner's arrival") {
    StochasticModel m({vertex(0, 1, 3, {1.0 / 3, 1.0 / 3, 1.0 / 3}),
                       vertex(1, 3, 3, {1.0})},
                      {{0, 1}});
    const double p = edge_presence_probability(m, {0, 1});
    CHECK(p == doctest::Approx(1.0 / 3).epsilon(1e-12));

    // Cross-check against enumeration of all three death times.
    double oracle = 0.0;
    testutil::oracle_enumerate(m, [&](const testutil::DeathMap& death,
                                      double prob) {
      if (!testutil::oracle_instantiation_edges(m, death, false).empty()) {
        oracle += prob;
      }
    });
    CHECK(p == doctest::Approx(oracle).epsilon(1e-12));
  }
  SUBCASE("unknown edge is an error") {
    StochasticModel m({vertex(0, 1, 1, {1.0}), vertex(1, 1, 1, {1.0})}, {});
    CHECK_THROWS_AS(edge_presence_probability(m, {0, 1}), ModelError);
  }
}

TEST_CASE("edge presence probability bounds on random models") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 50; ++i) {
    const StochasticModel m = testutil::random_model(rng);
    for (Edge e : m.edges()) {
      const double p = edge_presence_probability(m, e);
      CHECK(p >= 0.0);
      CHECK(p <= 1.0 + 1e-12);
      const VertexSpec& u = m.vertex(e.first);
      const VertexSpec& v = m.vertex(e.second);
      int first_u = u.deadline, first_v = v.deadline;
      for (int d = u.deadline; d >= u.arrival; --d) {
        if (u.mass(d) > 0) first_u = d;
      }
      for (int d = v.deadline; d >= v.arrival; --d) {
        if (v.mass(d) > 0) first_v = d;
      }
      if (std::max(u.arrival, v.arrival) <= std::min(first_u, first_v)) {
        CHECK(p == doctest::Approx(1.0));
      }
    }
  }
}

TEST_CASE("conditioning on a certain event returns the model unchanged") {
  std::mt19937_64 rng(5);
  const StochasticModel m = testutil::random_model(rng);
  CHECK(conditioned_submodel(m, {}, 0) == m);

  // All day-1 vertices alive at t=1: nothing is conditioned away.
  StochasticModel flat({vertex(0, 1, 2, {0.25, 0.75}), vertex(1, 1, 1, {1.0})},
                       {{0, 1}});
  AliveSet everyone = {0, 1};
  CHECK(conditioned_submodel(flat, everyone, 1) == flat);
}

TEST_CASE("conditioning renormalizes the surviving tail") {
  StochasticModel m({vertex(0, 1, 3, {1.0 / 3, 1.0 / 3, 1.0 / 3})}, {});
  const StochasticModel sub = conditioned_submodel(m, {0}, 2);
  REQUIRE(sub.vertex_count() == 1);
  const VertexSpec& v = sub.vertex(0);
  CHECK(v.arrival == 2);
  CHECK(v.deadline == 3);
  REQUIRE(v.death_dist.size() == 2);
  CHECK(v.death_dist[0] == doctest::Approx(0.5));
  CHECK(v.death_dist[1] == doctest::Approx(0.5));
}

TEST_CASE("conditioned submodel of S_2 keeps only the surviving side") {
  const StochasticModel m = make_sn_family(2);
  const StochasticModel sub = conditioned_submodel(m, {0}, 2);
  REQUIRE(sub.vertex_count() == 3);  // survivor + both pendants
  CHECK(sub.has_vertex(0));
  CHECK(sub.has_vertex(2));
  CHECK(sub.has_vertex(3));
  CHECK_FALSE(sub.has_vertex(1));
  const VertexSpec& survivor = sub.vertex(0);
  CHECK(survivor.arrival == 2);
  CHECK(survivor.death_dist == std::vector<double>{1.0});
  REQUIRE(sub.edge_count() == 1);
  CHECK(sub.edges()[0] == Edge{0, 2});
}

TEST_CASE("conditioning on a zero-probability survival is an error") {
  StochasticModel m({vertex(0, 1, 2, {1.0, 0.0})}, {});
  CHECK_THROWS_AS(conditioned_submodel(m, {0}, 2), ModelError);
}

TEST_CASE("conditioned distributions stay normalized on random models") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 60; ++i) {
    const StochasticModel m = testutil::random_model(rng);
    for (int t = 1; t <= m.lifetime(); ++t) {
      AliveSet alive;
      for (const VertexSpec& v : m.vertices()) {
        if (v.arrival <= t && t <= v.deadline && v.tail(t) > 0.0) {
          alive.push_back(v.id);
        }
      }
      const StochasticModel sub = conditioned_submodel(m, alive, t);
      CHECK(validate_model(sub).ok());
      for (const VertexSpec& v : sub.vertices()) {
        double sum = 0.0;
        for (double p : v.death_dist) sum += p;
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("S_n family shape") {
  SUBCASE("n = 1 is a single pendant edge") {
    const StochasticModel m = make_sn_family(1);
    CHECK(m.vertex_count() == 2);
    CHECK(m.edge_count() == 1);
  }
  SUBCASE("n = 3") {
    const StochasticModel m = make_sn_family(3);
    CHECK(m.vertex_count() == 6);
    CHECK(m.edge_count() == 6);  // C(3,2) + 3
  }
  SUBCASE("n = 4 has 10 edges") {
    CHECK(make_sn_family(4).edge_count() == 10);
  }
  SUBCASE("n = 0 is rejected") {
    CHECK_THROWS_AS(make_sn_family(0), ModelError);
  }
  SUBCASE("counts and lifetime for n = 1..6") {
    for (int n = 1; n <= 6; ++n) {
      const StochasticModel m = make_sn_family(n);
      CHECK(m.edge_count() == n * (n - 1) / 2 + n);
      CHECK(m.lifetime() == 2);
      CHECK(validate_model(m).ok());
      CHECK(m.has_rational_distributions());
    }
  }
}

TEST_CASE("triad family shape") {
  const StochasticModel m = make_triad_family(Rational(1, 10));
  CHECK(m.vertex_count() == 6);
  CHECK(m.edge_count() == 5);
  CHECK(m.lifetime() == 3);
  CHECK(validate_model(m).ok());
  CHECK_THROWS_AS(make_triad_family(Rational(1, 2)), ModelError);
  CHECK_THROWS_AS(make_triad_family(Rational(0)), ModelError);
}

TEST_CASE("remove_vertices keeps ids stable") {
  const StochasticModel m = make_sn_family(3);
  const VertexId drop[] = {0, 4};
  const StochasticModel rest = remove_vertices(m, drop);
  CHECK(rest.vertex_count() == 4);
  CHECK_FALSE(rest.has_vertex(0));
  CHECK(rest.has_vertex(1));
  CHECK(rest.has_vertex(5));
  for (Edge e : rest.edges()) {
    CHECK(e.first != 0);
    CHECK(e.second != 4);
  }
}

TEST_CASE("alive mask round trip") {
  const AliveSet s = {0, 3, 63};
  CHECK(alive_from_mask(alive_mask(s)) == s);
  CHECK_THROWS_AS(alive_mask({64}), ModelError);
}
