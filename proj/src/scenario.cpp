#include "stochmatch/scenario.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace stochmatch {

namespace {

using nlohmann::json;

[[noreturn]] void rethrow_with_position(const std::string& text,
                                        const json::parse_error& err) {
  // nlohmann reports a 1-based byte offset; turn it into line/column.
  int line = 1;
  int column = 1;
  const size_t offset = err.byte > 0 ? static_cast<size_t>(err.byte) - 1 : 0;
  const size_t limit = std::min(text.size(), offset);
  for (size_t i = 0; i < limit; ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  std::ostringstream msg;
  msg << "scenario JSON parse error at line " << line << ", column " << column
      << ": " << err.what();
  throw ScenarioParseError(msg.str(), line, column);
}

void reject_unknown_fields(const json& object,
                           std::initializer_list<const char*> allowed,
                           const std::string& where) {
  for (const auto& [key, value] : object.items()) {
    (void)value;
    bool known = false;
    for (const char* name : allowed) {
      if (key == name) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw ModelError("unknown field '" + key + "' in " + where);
    }
  }
}

}  // namespace

StochasticModel parse_scenario(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& err) {
    rethrow_with_position(text, err);
  }
  if (!doc.is_object()) throw ModelError("scenario root must be an object");
  reject_unknown_fields(doc, {"vertices", "edges"}, "scenario");
  if (!doc.contains("vertices") || !doc["vertices"].is_array()) {
    throw ModelError("scenario needs a 'vertices' array");
  }
  if (!doc.contains("edges") || !doc["edges"].is_array()) {
    throw ModelError("scenario needs an 'edges' array");
  }

  std::vector<VertexSpec> vertices;
  for (const json& jv : doc["vertices"]) {
    if (!jv.is_object()) throw ModelError("vertex entries must be objects");
    reject_unknown_fields(
        jv, {"id", "arrival", "deadline", "death_dist", "death_dist_rational"},
        "vertex");
    for (const char* field : {"id", "arrival", "deadline", "death_dist"}) {
      if (!jv.contains(field)) {
        throw ModelError(std::string("vertex is missing field '") + field + "'");
      }
    }
    VertexSpec v;
    if (!jv["id"].is_number_integer()) throw ModelError("vertex id must be an integer");
    v.id = jv["id"].get<int>();
    v.arrival = jv["arrival"].get<int>();
    v.deadline = jv["deadline"].get<int>();
    if (!jv["death_dist"].is_array()) {
      throw ModelError("vertex " + std::to_string(v.id) +
                       ": death_dist must be an array");
    }
    for (const json& p : jv["death_dist"]) {
      if (!p.is_number()) {
        throw ModelError("vertex " + std::to_string(v.id) +
                         ": death_dist entries must be numbers");
      }
      v.death_dist.push_back(p.get<double>());
    }
    if (static_cast<int>(v.death_dist.size()) != v.window_length()) {
      throw ModelError("vertex " + std::to_string(v.id) +
                       ": distribution length != interval length");
    }
    if (jv.contains("death_dist_rational")) {
      if (!jv["death_dist_rational"].is_array()) {
        throw ModelError("vertex " + std::to_string(v.id) +
                         ": death_dist_rational must be an array of strings");
      }
      for (const json& p : jv["death_dist_rational"]) {
        if (!p.is_string()) {
          throw ModelError("vertex " + std::to_string(v.id) +
                           ": death_dist_rational entries must be strings");
        }
        try {
          v.death_dist_rational.push_back(
              rational_from_text(p.get<std::string>()));
        } catch (const std::invalid_argument& err) {
          throw ModelError("vertex " + std::to_string(v.id) + ": " +
                           err.what());
        }
      }
    }
    vertices.push_back(std::move(v));
  }

  std::vector<Edge> edges;
  for (const json& je : doc["edges"]) {
    if (!je.is_array() || je.size() != 2 || !je[0].is_number_integer() ||
        !je[1].is_number_integer()) {
      throw ModelError("edges must be arrays of two vertex ids");
    }
    edges.push_back({je[0].get<int>(), je[1].get<int>()});
  }

  StochasticModel model(std::move(vertices), std::move(edges));

  // Ids must be dense 0..n-1 in scenario files.
  for (int i = 0; i < model.vertex_count(); ++i) {
    if (model.vertices()[static_cast<size_t>(i)].id != i) {
      throw ModelError("vertex ids must be dense 0..n-1 (missing id " +
                       std::to_string(i) + ")");
    }
  }
  for (Edge e : model.edges()) {
    if (!model.has_vertex(e.first) || !model.has_vertex(e.second)) {
      throw ModelError("edge (" + std::to_string(e.first) + "," +
                       std::to_string(e.second) +
                       ") references an undeclared vertex");
    }
  }
  const ValidationReport report = validate_model(model);
  if (!report.ok()) {
    throw ModelError("scenario fails validation:\n" + report.to_string());
  }
  return model;
}

std::string serialize_scenario(const StochasticModel& m) {
  json doc;
  doc["vertices"] = json::array();
  for (const VertexSpec& v : m.vertices()) {
    json jv;
    jv["id"] = v.id;
    jv["arrival"] = v.arrival;
    jv["deadline"] = v.deadline;
    jv["death_dist"] = v.death_dist;
    if (v.has_rational()) {
      json rats = json::array();
      for (const Rational& r : v.death_dist_rational) {
        rats.push_back(to_string(r));
      }
      jv["death_dist_rational"] = std::move(rats);
    }
    doc["vertices"].push_back(std::move(jv));
  }
  doc["edges"] = json::array();
  for (Edge e : m.edges()) {
    doc["edges"].push_back(json::array({e.first, e.second}));
  }
  return doc.dump(2) + "\n";
}

StochasticModel load_scenario_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelError("cannot open scenario file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str());
}

void save_scenario_file(const StochasticModel& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ModelError("cannot write scenario file: " + path);
  out << serialize_scenario(m);
}

}  // namespace stochmatch
