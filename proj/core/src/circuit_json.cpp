#include "qf/circuit_json.hpp"

#include <fstream>
#include <sstream>

namespace qf {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

const json& field(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(where + ": missing field '" + key + "'");
  return *it;
}

int as_int(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw SchemaError(where + ": expected an integer");
  return j.get<int>();
}

}  // namespace

CMatrix matrix_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw SchemaError(where + ": matrix must be a non-empty array");
  const std::size_t rows = j.size();
  std::size_t cols = 0;
  std::vector<Complex> entries;
  for (std::size_t r = 0; r < rows; ++r) {
    const json& row = j[r];
    if (!row.is_array()) throw SchemaError(where + ": matrix row is not an array");
    if (r == 0) cols = row.size();
    if (row.size() != cols) throw SchemaError(where + ": ragged matrix");
    for (const json& e : row) {
      if (e.is_number()) {
        entries.emplace_back(e.get<double>(), 0.0);
      } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
        entries.emplace_back(e[0].get<double>(), e[1].get<double>());
      } else {
        throw SchemaError(where + ": matrix entries must be [re, im] pairs");
      }
    }
  }
  return CMatrix(rows, cols, std::move(entries));
}

ordered_json matrix_to_json(const CMatrix& m) {
  ordered_json rows = ordered_json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    ordered_json row = ordered_json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) {
      row.push_back(ordered_json::array({m(r, c).real(), m(r, c).imag()}));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

Circuit circuit_from_json(const json& doc, const ParseOptions& options) {
  if (!doc.is_object()) throw SchemaError("circuit document must be an object");
  Circuit c;
  c.wires = as_int(field(doc, "wires", "circuit"), "wires");
  const json& inputs = field(doc, "inputs", "circuit");
  if (!inputs.is_array()) throw SchemaError("inputs must be an array");
  for (const json& label : inputs) {
    if (!label.is_string()) throw SchemaError("input labels must be strings");
    c.inputs.push_back(InputLabel::parse(label.get<std::string>()));
  }
  c.output = as_int(field(doc, "output", "circuit"), "output");
  const json& gates = field(doc, "gates", "circuit");
  if (!gates.is_array()) throw SchemaError("gates must be an array");
  for (std::size_t p = 0; p < gates.size(); ++p) {
    const std::string where = "gate " + std::to_string(p);
    const json& g = gates[p];
    if (!g.is_object()) throw SchemaError(where + " must be an object");
    const json& targets_json = field(g, "targets", where);
    if (!targets_json.is_array()) throw SchemaError(where + ": targets must be an array");
    std::vector<int> targets;
    for (const json& t : targets_json) targets.push_back(as_int(t, where + " target"));

    const json null_value;
    const json& name = g.contains("name") ? g["name"] : null_value;
    const json& matrix = g.contains("matrix") ? g["matrix"] : null_value;
    if (name.is_null() == matrix.is_null()) {
      throw SchemaError(where + ": exactly one of name and matrix must be given");
    }
    if (!name.is_null()) {
      if (!name.is_string()) throw SchemaError(where + ": name must be a string");
      const std::string n = name.get<std::string>();
      if (!is_named_gate(n)) throw SchemaError(where + ": unknown gate name '" + n + "'");
      c.gates.push_back(Gate{static_cast<int>(p), std::move(targets), named_unitary(n), n});
    } else {
      c.gates.push_back(
          make_gate(matrix_from_json(matrix, where), std::move(targets), static_cast<int>(p)));
    }
  }
  c.validate(options.max_arity, options.tol);
  return c;
}

Circuit parse_circuit(std::string_view text, const ParseOptions& options) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("invalid JSON: ") + e.what());
  }
  return circuit_from_json(doc, options);
}

Circuit load_circuit(const std::string& path, const ParseOptions& options) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_circuit(buffer.str(), options);
}

ordered_json circuit_to_json(const Circuit& c) {
  ordered_json doc;
  doc["wires"] = c.wires;
  ordered_json inputs = ordered_json::array();
  for (const auto& label : c.inputs) inputs.push_back(label.to_string());
  doc["inputs"] = std::move(inputs);
  doc["output"] = c.output;
  ordered_json gates = ordered_json::array();
  for (const Gate& g : c.gates) {
    ordered_json entry;
    const bool named = is_named_gate(g.name);
    entry["name"] = named ? ordered_json(g.name) : ordered_json(nullptr);
    entry["targets"] = g.targets;
    entry["matrix"] = named ? ordered_json(nullptr) : matrix_to_json(g.unitary);
    gates.push_back(std::move(entry));
  }
  doc["gates"] = std::move(gates);
  return doc;
}

std::string serialize_circuit(const Circuit& c) { return circuit_to_json(c).dump(2) + "\n"; }

ordered_json path_to_json(const WirePath& path) {
  ordered_json j;
  j["input_wire"] = path.input_wire;
  j["gates"] = path.gate_ids;
  j["wires"] = path.wires;
  return j;
}

}  // namespace qf
