#pragma once

// JSON documents describing metrics, filtrations, symbols and functions g.
// Every parser throws ConfigInvalid with the JSON pointer of the bad field.

#include <functional>
#include <string>

#include <nlohmann/json.hpp>

#include "bergweight/filtrations.hpp"
#include "bergweight/section_ring.hpp"

namespace bergweight {

using Json = nlohmann::json;

/// {"type": "constant"|"moment-linear"|"moment-polynomial"|"radial-samples", "data": ...}
MetricPotential parse_metric(const Json& doc, const std::string& where = "/metric");

/// {"kind": "vanishing-order"|"capped"|"floored"|"generated"|"table"|"scaled"|"zero", ...}
RingFiltration parse_filtration(const Json& doc, const std::string& where = "/filtration");

struct GFunction {
  std::function<double(double)> fn;
  std::string description;
};

/// {"type": "identity"|"min"|"constant"|"power", ...}
GFunction parse_g(const Json& doc, const std::string& where = "/g");

/// Same document types as parse_metric, read as a function on P^1.
Symbol parse_symbol(const Json& doc, const std::string& where = "/symbol");

/// A positive number or the string "inf".
double parse_schatten_p(const Json& doc, const std::string& where);
std::string format_schatten_p(double p);

}  // namespace bergweight
