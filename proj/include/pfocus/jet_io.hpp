#pragma once

#include <optional>
#include <string_view>

#include <json.hpp>

#include "pfocus/jets.hpp"

namespace pfocus {

/// [{"degree": d, "numerator": p, "denominator": q}, ...], degree-sorted with
/// zero coefficients omitted. Integers that do not fit in 64 bits are written
/// as decimal strings.
nlohmann::json jet_to_json(const Jet& f);

/// Inverse of jet_to_json. Without an explicit order the highest listed
/// degree is used.
Jet jet_from_json(const nlohmann::json& records, std::optional<int> order = std::nullopt);

/// Parses expressions such as "-t + t^2", "2*t - 1/3 t^5" or "0.5t".
Jet parse_jet(std::string_view text, std::optional<int> order = std::nullopt);

Rational parse_rational(std::string_view text);

}  // namespace pfocus
