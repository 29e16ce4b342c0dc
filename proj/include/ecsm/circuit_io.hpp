#pragma once

#include <string>

#include "ecsm/optics.hpp"

namespace ecsm {

// JSON form of a circuit:
//   {"modes": 4, "label": "...", "elements": [
//     {"type": "phase", "mode": 1, "phi": 0.5},
//     {"type": "beam_splitter", "modes": [0, 1], "transmissivity": 0.5},
//     {"type": "qbs", "modes": [1, 2]},
//     {"type": "loss", "mode": 0, "eta": 0.8}]}
// Unknown element types or keys throw ConfigError.
std::string circuit_to_text(const CircuitSpec& circuit);
CircuitSpec circuit_from_text(const std::string& text);

}  // namespace ecsm
