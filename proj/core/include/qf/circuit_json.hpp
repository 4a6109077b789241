#pragma once

#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "qf/circuit.hpp"

namespace qf {

struct ParseOptions {
  std::size_t max_arity = kDefaultMaxArity;
  double tol = kTol;
};

Circuit circuit_from_json(const nlohmann::json& doc, const ParseOptions& options = {});
Circuit parse_circuit(std::string_view text, const ParseOptions& options = {});
Circuit load_circuit(const std::string& path, const ParseOptions& options = {});

nlohmann::ordered_json circuit_to_json(const Circuit& c);
// Canonical text: two-space indent, trailing newline.
std::string serialize_circuit(const Circuit& c);

nlohmann::ordered_json matrix_to_json(const CMatrix& m);
CMatrix matrix_from_json(const nlohmann::json& j, const std::string& where);

nlohmann::ordered_json path_to_json(const WirePath& path);

}  // namespace qf
