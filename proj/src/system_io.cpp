#include <fstream>
#include <sstream>

#include "pfocus/errors.hpp"
#include "pfocus/pwflow.hpp"

namespace pfocus {

nlohmann::json to_json(const PiecewiseSystem& s) {
  nlohmann::json j;
  j["upper"] = s.upper.to_json();
  j["lower"] = s.lower.to_json();
  j["orientation"] = s.counterclockwise ? "counterclockwise" : "clockwise";
  j["neighborhood_radius"] = s.radius;
  if (!s.metadata.empty()) j["metadata"] = s.metadata;
  return j;
}

PiecewiseSystem system_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::ParseError, "system spec must be a JSON object");
  for (const char* key : {"upper", "lower"}) {
    if (!j.contains(key)) throw Error(ErrorCode::ParseError, std::string("system spec is missing '") + key + "'");
  }
  PiecewiseSystem s;
  try {
    s.upper = PolyField::from_json(j.at("upper"));
  } catch (const Error& e) {
    throw Error(ErrorCode::ParseError, "upper: " + e.message());
  }
  try {
    s.lower = PolyField::from_json(j.at("lower"));
  } catch (const Error& e) {
    throw Error(ErrorCode::ParseError, "lower: " + e.message());
  }
  const std::string orientation = j.value("orientation", std::string("counterclockwise"));
  if (orientation == "counterclockwise" || orientation == "ccw") {
    s.counterclockwise = true;
  } else if (orientation == "clockwise" || orientation == "cw") {
    s.counterclockwise = false;
  } else {
    throw Error(ErrorCode::ParseError, "orientation must be 'counterclockwise' or 'clockwise', got '" + orientation + "'");
  }
  if (j.contains("neighborhood_radius")) {
    if (!j["neighborhood_radius"].is_number()) throw Error(ErrorCode::ParseError, "neighborhood_radius must be a number");
    s.radius = j["neighborhood_radius"].get<double>();
  }
  if (!(s.radius > 0)) throw Error(ErrorCode::ParseError, "neighborhood_radius must be positive");
  if (j.contains("metadata")) s.metadata = j["metadata"];
  return s;
}

PiecewiseSystem load_system(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidInput, "cannot open " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ParseError, path + ": " + e.what());
  }
  try {
    return system_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, path + ": " + e.what());
  } catch (const Error& e) {
    throw Error(ErrorCode::ParseError, path + ": " + e.message());
  }
}

}  // namespace pfocus
