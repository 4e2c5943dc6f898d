#pragma once

// Scenario serialization: a human-readable JSON form used by the CLI and a
// canonical little-endian binary form used to assert byte-identical
// generation in tests. Both round-trip exactly (doubles preserved bit-for-bit).

#include <string>
#include <vector>

#include "jcaco/scenario.hpp"

namespace jcaco {

std::string encode_scenario_json(const Scenario& s);

// Throws std::invalid_argument naming the offending key on malformed input.
Scenario decode_scenario_json(const std::string& text);

std::vector<std::uint8_t> encode_scenario_binary(const Scenario& s);

Scenario load_scenario_file(const std::string& path);
void save_scenario_file(const Scenario& s, const std::string& path);

}  // namespace jcaco
