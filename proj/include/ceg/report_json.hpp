#pragma once

// JSON views of reports. Probabilities are "p/q" strings; undefined values
// are null. Every top-level document carries "schema": 1.

#include "ceg/bn.hpp"
#include "ceg/identification.hpp"
#include "ceg/intervention.hpp"

#include <json.hpp>

namespace ceg {

inline constexpr int json_schema = 1;

nlohmann::json to_json(const Distribution& d);
nlohmann::json to_json(const Check& c);
nlohmann::json to_json(const std::vector<Check>& checks);
nlohmann::json positions_json(const ChainEventGraph& g, const std::vector<VertexIndex>& W);
nlohmann::json to_json(const ActiveBackgroundSplit& s, const ChainEventGraph& g);
nlohmann::json to_json(const AmenabilityReport& r, const ChainEventGraph& g);
nlohmann::json to_json(const IdentificationReport& r, const ChainEventGraph& g);

// {"schema": 1, "command": command} merged with body.
nlohmann::json document(const std::string& command, nlohmann::json body);

}  // namespace ceg
