#include <doctest.h>

#include <random>

#include "stochmatch/scenario.hpp"
#include "test_util.hpp"

using namespace stochmatch;

TEST_CASE("serialize/parse round trip is structural identity") {
  const StochasticModel m = make_sn_family(2);
  CHECK(parse_scenario(serialize_scenario(m)) == m);

  std::mt19937_64 rng(23);
  for (int i = 0; i < 20; ++i) {
    const StochasticModel r = testutil::random_model(rng);
    CHECK(parse_scenario(serialize_scenario(r)) == r);
  }
}

TEST_CASE("canonical serialization sorts vertices and edges") {
  const std::string shuffled = R"({
    "vertices": [
      {"id": 1, "arrival": 1, "deadline": 1, "death_dist": [1.0]},
      {"id": 0, "arrival": 1, "deadline": 1, "death_dist": [1.0]},
      {"id": 2, "arrival": 1, "deadline": 1, "death_dist": [1.0]}
    ],
    "edges": [[2, 1], [1, 0]]
  })";
  const StochasticModel m = parse_scenario(shuffled);
  CHECK(m.vertices()[0].id == 0);
  CHECK(m.vertices()[2].id == 2);
  CHECK(m.edges() == std::vector<Edge>{{0, 1}, {1, 2}});
  const std::string canonical = serialize_scenario(m);
  CHECK(canonical.find("\"id\": 0") < canonical.find("\"id\": 1"));
}

TEST_CASE("edge to an undeclared vertex names the vertex") {
  const std::string text = R"({
    "vertices": [{"id": 0, "arrival": 1, "deadline": 1, "death_dist": [1.0]}],
    "edges": [[0, 3]]
  })";
  CHECK_THROWS_WITH_AS(parse_scenario(text),
                       doctest::Contains("3"), ModelError);
}

TEST_CASE("wrong distribution length is a semantic error") {
  const std::string text = R"({
    "vertices": [{"id": 0, "arrival": 1, "deadline": 2, "death_dist": [1.0]}],
    "edges": []
  })";
  CHECK_THROWS_WITH_AS(parse_scenario(text),
                       doctest::Contains("distribution length"), ModelError);
}

TEST_CASE("unknown fields are rejected") {
  const std::string top = R"({"vertices": [], "edges": [], "color": 1})";
  CHECK_THROWS_WITH_AS(parse_scenario(top), doctest::Contains("color"),
                       ModelError);
  const std::string nested = R"({
    "vertices": [{"id": 0, "arrival": 1, "deadline": 1,
                  "death_dist": [1.0], "nickname": "x"}],
    "edges": []
  })";
  CHECK_THROWS_WITH_AS(parse_scenario(nested), doctest::Contains("nickname"),
                       ModelError);
}

TEST_CASE("ids must be dense") {
  const std::string text = R"({
    "vertices": [{"id": 1, "arrival": 1, "deadline": 1, "death_dist": [1.0]}],
    "edges": []
  })";
  CHECK_THROWS_WITH_AS(parse_scenario(text), doctest::Contains("dense"),
                       ModelError);
}

TEST_CASE("syntax errors carry line and column") {
  try {
    parse_scenario("{\n  \"vertices\": [,]\n}");
    FAIL("expected a parse error");
  } catch (const ScenarioParseError& err) {
    CHECK(err.line() == 2);
    CHECK(err.column() > 1);
  }
}

TEST_CASE("rational distributions survive the round trip") {
  const StochasticModel m = make_sn_family(3);
  const StochasticModel back = parse_scenario(serialize_scenario(m));
  CHECK(back.has_rational_distributions());
  CHECK(back.vertex(0).death_dist_rational[0] == Rational(1, 2));
}

TEST_CASE("mismatched rational mirror is rejected") {
  const std::string text = R"({
    "vertices": [{"id": 0, "arrival": 1, "deadline": 2,
                  "death_dist": [0.5, 0.5],
                  "death_dist_rational": ["1/3", "2/3"]}],
    "edges": []
  })";
  CHECK_THROWS_WITH_AS(parse_scenario(text), doctest::Contains("mismatch"),
                       ModelError);
}
