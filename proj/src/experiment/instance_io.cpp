#include <fstream>
#include <sstream>

#include <json.hpp>

#include "nne/experiment.hpp"

namespace nne::experiment {
namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json matrix(const knapsack::Instance& inst, const std::vector<std::int64_t>& flat) {
  ordered_json rows = ordered_json::array();
  for (std::size_t j = 0; j < inst.players; ++j) {
    ordered_json row = ordered_json::array();
    for (std::size_t l = 0; l < inst.markets; ++l) row.push_back(flat[inst.index(j, l)]);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string location(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t k = 0; k < byte && k < text.size(); ++k) {
    if (text[k] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

const ordered_json& field(const ordered_json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end()) throw ParseError(std::string("instance file: missing field '") + key + "'");
  return *it;
}

std::int64_t integer(const ordered_json& v, const std::string& what) {
  if (!v.is_number_integer()) throw ParseError("instance file: " + what + " must be an integer");
  return v.get<std::int64_t>();
}

std::vector<std::int64_t> vector_field(const ordered_json& doc, const char* key, std::size_t size) {
  const ordered_json& v = field(doc, key);
  if (!v.is_array() || v.size() != size) {
    throw ParseError(std::string("instance file: '") + key + "' must be an array of " + std::to_string(size) + " integers");
  }
  std::vector<std::int64_t> out;
  for (std::size_t k = 0; k < size; ++k) out.push_back(integer(v[k], std::string(key) + "[" + std::to_string(k) + "]"));
  return out;
}

std::vector<std::int64_t> matrix_field(const ordered_json& doc, const char* key, std::size_t rows, std::size_t cols) {
  const ordered_json& v = field(doc, key);
  if (!v.is_array() || v.size() != rows) {
    throw ParseError(std::string("instance file: '") + key + "' must have " + std::to_string(rows) + " rows");
  }
  std::vector<std::int64_t> out;
  for (std::size_t j = 0; j < rows; ++j) {
    if (!v[j].is_array() || v[j].size() != cols) {
      throw ParseError(std::string("instance file: '") + key + "' row " + std::to_string(j) + " must have " +
                       std::to_string(cols) + " entries");
    }
    for (std::size_t l = 0; l < cols; ++l) {
      out.push_back(integer(v[j][l], std::string(key) + "[" + std::to_string(j) + "][" + std::to_string(l) + "]"));
    }
  }
  return out;
}

}  // namespace

std::string instance_to_json(const knapsack::Instance& inst) {
  ordered_json doc;
  doc["players"] = inst.players;
  doc["markets"] = inst.markets;
  doc["alpha"] = inst.alpha;
  doc["beta"] = inst.beta;
  doc["c"] = matrix(inst, inst.c);
  doc["a"] = matrix(inst, inst.a);
  doc["b"] = inst.b;
  doc["d"] = matrix(inst, inst.d);
  doc["e"] = inst.e;
  doc["seed"] = inst.seed;
  doc["gamma"] = inst.gamma;
  return doc.dump(2) + "\n";
}

knapsack::Instance instance_from_json(std::string_view text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("instance file: syntax error at " + location(text, e.byte == 0 ? 0 : e.byte - 1) + ": " + e.what());
  }
  if (!doc.is_object()) throw ParseError("instance file: top level must be an object");

  knapsack::Instance inst;
  const std::int64_t players = integer(field(doc, "players"), "players");
  const std::int64_t markets = integer(field(doc, "markets"), "markets");
  if (players <= 0 || markets <= 0) throw ParseError("instance file: players and markets must be positive");
  inst.players = static_cast<std::size_t>(players);
  inst.markets = static_cast<std::size_t>(markets);
  inst.alpha = vector_field(doc, "alpha", inst.markets);
  inst.beta = vector_field(doc, "beta", inst.markets);
  inst.c = matrix_field(doc, "c", inst.players, inst.markets);
  inst.a = matrix_field(doc, "a", inst.players, inst.markets);
  inst.b = vector_field(doc, "b", inst.players);
  inst.d = matrix_field(doc, "d", inst.players, inst.markets);
  inst.e = vector_field(doc, "e", inst.markets);
  const ordered_json& seed = field(doc, "seed");
  if (!seed.is_number_unsigned() && !seed.is_number_integer()) throw ParseError("instance file: seed must be an integer");
  inst.seed = seed.get<std::uint64_t>();
  inst.gamma = integer(field(doc, "gamma"), "gamma");
  try {
    inst.validate();
  } catch (const UsageError& e) {
    throw ParseError(std::string("instance file: ") + e.what());
  }
  return inst;
}

void write_instance(const std::filesystem::path& path, const knapsack::Instance& inst) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot open " + path.string() + " for writing");
  out << instance_to_json(inst);
  if (!out) throw UsageError("failed writing " + path.string());
}

knapsack::Instance read_instance(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return instance_from_json(buffer.str());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace nne::experiment
