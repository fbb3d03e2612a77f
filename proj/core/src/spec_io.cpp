#include "bergweight/spec_io.hpp"

#include <cmath>
#include <cstdio>
#include <map>

namespace bergweight {

namespace {

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  fail(ErrorCode::ConfigInvalid, where + ": " + what);
}

const Json& field(const Json& doc, const std::string& key, const std::string& where) {
  if (!doc.is_object()) bad(where, "expected an object");
  auto it = doc.find(key);
  if (it == doc.end()) bad(where, "missing field '" + key + "'");
  return *it;
}

double number(const Json& j, const std::string& where) {
  if (!j.is_number()) bad(where, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) bad(where, "expected a finite number");
  return v;
}

double number_or(const Json& doc, const std::string& key, double fallback, const std::string& where) {
  if (!doc.is_object() || !doc.contains(key)) return fallback;
  return number(doc.at(key), where + "/" + key);
}

int integer(const Json& j, const std::string& where) {
  if (!j.is_number_integer()) bad(where, "expected an integer");
  return j.get<int>();
}

int integer_or(const Json& doc, const std::string& key, int fallback, const std::string& where) {
  if (!doc.is_object() || !doc.contains(key)) return fallback;
  return integer(doc.at(key), where + "/" + key);
}

std::vector<double> numbers(const Json& j, const std::string& where) {
  if (!j.is_array()) bad(where, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], where + "/" + std::to_string(i)));
  return out;
}

std::string text(const Json& j, const std::string& where) {
  if (!j.is_string()) bad(where, "expected a string");
  return j.get<std::string>();
}

// Library argument errors become config errors at the same location.
template <class F>
auto wrap(const std::string& where, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigInvalid) throw;
    bad(where, e.what());
  }
}

}  // namespace

MetricPotential parse_metric(const Json& doc, const std::string& where) {
  const std::string type = text(field(doc, "type", where), where + "/type");
  const std::string dw = where + "/data";
  const Json data = doc.contains("data") ? doc.at("data") : Json::object();
  return wrap(where, [&] {
    if (type == "constant") {
      if (data.is_number()) return MetricPotential::constant(number(data, dw));
      return MetricPotential::constant(number_or(data, "c", 0.0, dw));
    }
    if (type == "moment-linear") {
      if (!data.is_object()) bad(dw, "expected {\"c0\", \"c1\"}");
      return MetricPotential::moment_linear(number_or(data, "c0", 0.0, dw), number_or(data, "c1", 0.0, dw));
    }
    if (type == "moment-polynomial") {
      const Json& c = data.is_array() ? data : field(data, "coefficients", dw);
      std::vector<double> coefficients = numbers(c, dw + "/coefficients");
      if (coefficients.empty()) bad(dw, "coefficients must be nonempty");
      return MetricPotential::moment_polynomial(std::move(coefficients));
    }
    if (type == "radial-samples") {
      std::vector<double> s = numbers(field(data, "s", dw), dw + "/s");
      std::vector<double> u = numbers(field(data, "u", dw), dw + "/u");
      if (s.size() != u.size() || s.size() < 2) bad(dw, "'s' and 'u' need equal length >= 2");
      std::string interp = "linear";
      if (data.contains("interpolation")) interp = text(data.at("interpolation"), dw + "/interpolation");
      if (interp != "linear" && interp != "cubic") bad(dw + "/interpolation", "expected 'linear' or 'cubic'");
      return MetricPotential::radial_samples(std::move(s), std::move(u), interp == "cubic");
    }
    bad(where + "/type", "unknown metric type '" + type + "'");
  });
}

RingFiltration parse_filtration(const Json& doc, const std::string& where) {
  const std::string kind = text(field(doc, "kind", where), where + "/kind");
  const int d = integer_or(doc, "d", 1, where);
  if (d < 1) bad(where + "/d", "line bundle degree must be >= 1");
  return wrap(where, [&]() -> RingFiltration {
    if (kind == "vanishing-order") return vanishing_order_filtration(d, CapMode::None);
    if (kind == "zero") return zero_filtration(d);
    if (kind == "capped") {
      if (doc.contains("base"))
        return cap_filtration(parse_filtration(doc.at("base"), where + "/base"),
                              number(field(doc, "cap", where), where + "/cap"));
      const std::string mode = doc.contains("mode") ? text(doc.at("mode"), where + "/mode") : "hard";
      VanishingParams p;
      p.cap = number_or(doc, "cap", 1.0, where);
      p.scale = number_or(doc, "scale", 1.0, where);
      if (mode == "hard") return vanishing_order_filtration(d, CapMode::HardCap, p);
      if (mode == "scaled") return vanishing_order_filtration(d, CapMode::ScaledCap, p);
      bad(where + "/mode", "expected 'hard' or 'scaled'");
    }
    if (kind == "floored") {
      RingFiltration base = parse_filtration(field(doc, "base", where), where + "/base");
      if (doc.contains("factor")) base = scaled_filtration(base, number(doc.at("factor"), where + "/factor"));
      return floor_filtration(base);
    }
    if (kind == "scaled")
      return scaled_filtration(parse_filtration(field(doc, "base", where), where + "/base"),
                               number(field(doc, "factor", where), where + "/factor"));
    if (kind == "generated") {
      const RingFiltration base = parse_filtration(field(doc, "base", where), where + "/base");
      const int k0 = integer_or(doc, "k0", 1, where);
      const int max_degree = integer_or(doc, "max_degree", 64, where);
      return generated_filtration(base, k0, max_degree);
    }
    if (kind == "table") {
      const Json& w = field(doc, "weights", where);
      if (!w.is_object()) bad(where + "/weights", "expected an object keyed by degree");
      std::map<int, std::vector<double>> table;
      for (auto it = w.begin(); it != w.end(); ++it) {
        const std::string pw = where + "/weights/" + it.key();
        std::size_t used = 0;
        int k = -1;
        try {
          k = std::stoi(it.key(), &used);
        } catch (const std::exception&) {
          used = 0;
        }
        if (used != it.key().size() || k < 0) bad(pw, "degree keys must be nonnegative integers");
        table[k] = numbers(it.value(), pw);
      }
      return table_filtration(d, std::move(table));
    }
    bad(where + "/kind", "unknown filtration kind '" + kind + "'");
  });
}

GFunction parse_g(const Json& doc, const std::string& where) {
  const std::string type = text(field(doc, "type", where), where + "/type");
  if (type == "identity") return {[](double x) { return x; }, "x"};
  if (type == "min") {
    const double c = number(field(doc, "c", where), where + "/c");
    return {[c](double x) { return std::min(x, c); }, "min(x," + Json(c).dump() + ")"};
  }
  if (type == "constant") {
    const double c = number(field(doc, "c", where), where + "/c");
    return {[c](double) { return c; }, Json(c).dump()};
  }
  if (type == "power") {
    const double p = number(field(doc, "p", where), where + "/p");
    if (!(p > 0.0)) bad(where + "/p", "power must be positive");
    return {[p](double x) { return std::pow(std::abs(x), p); }, "|x|^" + Json(p).dump()};
  }
  bad(where + "/type", "unknown g type '" + type + "'");
}

Symbol parse_symbol(const Json& doc, const std::string& where) {
  return Symbol::from_potential(parse_metric(doc, where));
}

double parse_schatten_p(const Json& doc, const std::string& where) {
  if (doc.is_string()) {
    if (doc.get<std::string>() == "inf") return kOperatorNorm;
    bad(where, "expected a number >= 1 or \"inf\"");
  }
  const double p = number(doc, where);
  if (!(p >= 1.0)) bad(where, "Schatten exponent must be >= 1");
  return p;
}

std::string format_schatten_p(double p) {
  if (std::isinf(p)) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", p);
  return buf;
}

}  // namespace bergweight
