#include "ecsm/circuit_io.hpp"

#include <json.hpp>

#include <set>

namespace ecsm {

using nlohmann::json;

namespace {

void require_keys(const json& j, const std::set<std::string>& allowed, const std::string& what) {
  if (!j.is_object()) throw ConfigError(what + ": expected an object");
  for (const auto& [k, v] : j.items())
    if (!allowed.contains(k)) throw ConfigError(what + ": unknown key '" + k + "'");
  for (const auto& k : allowed)
    if (!j.contains(k)) throw ConfigError(what + ": missing key '" + k + "'");
}

std::pair<std::size_t, std::size_t> mode_pair(const json& j) {
  if (!j.is_array() || j.size() != 2) throw ConfigError("element: 'modes' must be a pair");
  return {j[0].get<std::size_t>(), j[1].get<std::size_t>()};
}

json element_to_json(const Element& e) {
  return std::visit(
      [](const auto& el) -> json {
        using T = std::decay_t<decltype(el)>;
        if constexpr (std::is_same_v<T, PhaseShift>)
          return {{"type", "phase"}, {"mode", el.mode}, {"phi", el.phi}};
        else if constexpr (std::is_same_v<T, BeamSplitter>)
          return {{"type", "beam_splitter"},
                  {"modes", {el.mode_i, el.mode_j}},
                  {"transmissivity", el.transmissivity}};
        else if constexpr (std::is_same_v<T, QuantumBeamSplitter>)
          return {{"type", "qbs"}, {"modes", {el.mode_i, el.mode_j}}};
        else
          return {{"type", "loss"}, {"mode", el.mode}, {"eta", el.eta}};
      },
      e);
}

Element element_from_json(const json& j) {
  if (!j.is_object() || !j.contains("type")) throw ConfigError("element: missing 'type'");
  const std::string type = j.at("type").get<std::string>();
  if (type == "phase") {
    require_keys(j, {"type", "mode", "phi"}, "phase");
    return PhaseShift{j["mode"].get<std::size_t>(), j["phi"].get<double>()};
  }
  if (type == "beam_splitter") {
    require_keys(j, {"type", "modes", "transmissivity"}, "beam_splitter");
    const auto [a, b] = mode_pair(j["modes"]);
    return BeamSplitter{a, b, j["transmissivity"].get<double>()};
  }
  if (type == "qbs") {
    require_keys(j, {"type", "modes"}, "qbs");
    const auto [a, b] = mode_pair(j["modes"]);
    return QuantumBeamSplitter{a, b};
  }
  if (type == "loss") {
    require_keys(j, {"type", "mode", "eta"}, "loss");
    return Loss{j["mode"].get<std::size_t>(), j["eta"].get<double>()};
  }
  throw ConfigError("element: unknown type '" + type + "'");
}

}  // namespace

std::string circuit_to_text(const CircuitSpec& circuit) {
  json j;
  j["modes"] = circuit.mode_count;
  j["label"] = circuit.label;
  j["elements"] = json::array();
  for (const auto& e : circuit.elements) j["elements"].push_back(element_to_json(e));
  return j.dump(2);
}

CircuitSpec circuit_from_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("circuit: ") + e.what());
  }
  require_keys(j, {"modes", "label", "elements"}, "circuit");
  CircuitSpec c;
  try {
    c.mode_count = j["modes"].get<std::size_t>();
    c.label = j["label"].get<std::string>();
    for (const auto& e : j["elements"]) c.elements.push_back(element_from_json(e));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("circuit: ") + e.what());
  }
  try {
    c.validate();
  } catch (const Error& e) {
    throw ConfigError(std::string("circuit: ") + e.what());
  }
  return c;
}

}  // namespace ecsm
