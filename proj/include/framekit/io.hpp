#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "framekit/errors.hpp"
#include "framekit/frame.hpp"
#include "framekit/matrix.hpp"
#include "framekit/verifier.hpp"

namespace framekit {

/// Input document:
///
///   {
///     "ambient_dim": n,
///     "vectors": [ [[re, im], ... n entries], ... ],
///     "signal": [[re, im], ... n entries],          (optional)
///     "coefficients": [[re, im], ... m entries]     (optional)
///   }
///
/// Complex entries are always [re, im] pairs, never bare reals.
struct InputDocument {
  std::size_t ambient_dim = 0;
  std::vector<Vector> vectors;
  std::optional<Vector> signal;
  std::optional<Vector> coefficients;

  FrameSequence frame() const { return FrameSequence(ambient_dim, vectors); }
};

/// Malformed document; the message names the offending line or field.
class ParseError : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

using Json = nlohmann::ordered_json;

namespace detail {

inline std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

inline Complex parse_complex(const Json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ParseError(where + ": expected a complex entry [re, im]");
  const double re = j[0].get<double>();
  const double im = j[1].get<double>();
  if (!std::isfinite(re) || !std::isfinite(im)) throw ParseError(where + ": non-finite number");
  return {re, im};
}

inline Vector parse_complex_vector(const Json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError(where + ": expected a list of [re, im] pairs");
  Vector v;
  v.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v.push_back(parse_complex(j[i], where + "[" + std::to_string(i) + "]"));
  return v;
}

inline void write_number(std::string& out, double x) {
  if (!std::isfinite(x)) {
    out += "null";
    return;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  out += buf;
}

inline void write_json(std::string& out, const Json& j, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string inner_pad(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) out += ",\n";
        first = false;
        out += inner_pad + Json(key).dump() + ": ";
        write_json(out, value, indent + 1);
      }
      out += "\n" + pad + "}";
      return;
    }
    case Json::value_t::array: {
      // Arrays of scalars (complex pairs, small vectors) stay on one line.
      const bool flat = std::all_of(j.begin(), j.end(), [](const Json& e) {
        return e.is_primitive() || (e.is_array() && std::all_of(e.begin(), e.end(), [](const Json& x) { return x.is_primitive(); }));
      });
      if (j.empty() || flat) {
        out += "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) out += ", ";
          write_json(out, j[i], indent + 1);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += inner_pad;
        write_json(out, j[i], indent + 1);
      }
      out += "\n" + pad + "]";
      return;
    }
    case Json::value_t::number_float:
      write_number(out, j.get<double>());
      return;
    default:
      out += j.dump();
      return;
  }
}

}  // namespace detail

inline InputDocument parse_document(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    const auto [line, col] = detail::line_column(text, e.byte > 0 ? e.byte - 1 : 0);
    throw ParseError("line " + std::to_string(line) + ", column " + std::to_string(col) + ": malformed document");
  }
  if (!j.is_object()) throw ParseError("document: expected an object");

  InputDocument doc;
  if (!j.contains("ambient_dim")) throw ParseError("ambient_dim: missing field");
  const Json& dim = j["ambient_dim"];
  if (!dim.is_number_unsigned() || dim.get<std::size_t>() == 0)
    throw ParseError("ambient_dim: expected a positive integer");
  doc.ambient_dim = dim.get<std::size_t>();

  if (!j.contains("vectors")) throw ParseError("vectors: missing field");
  const Json& vs = j["vectors"];
  if (!vs.is_array() || vs.empty()) throw ParseError("vectors: expected a non-empty list of vectors");
  for (std::size_t k = 0; k < vs.size(); ++k) {
    const std::string where = "vectors[" + std::to_string(k) + "]";
    Vector v = detail::parse_complex_vector(vs[k], where);
    if (v.size() != doc.ambient_dim)
      throw ParseError(where + ": has " + std::to_string(v.size()) + " entries, ambient_dim is " +
                       std::to_string(doc.ambient_dim));
    doc.vectors.push_back(std::move(v));
  }

  if (j.contains("signal")) {
    Vector v = detail::parse_complex_vector(j["signal"], "signal");
    if (v.size() != doc.ambient_dim)
      throw ParseError("signal: has " + std::to_string(v.size()) + " entries, ambient_dim is " +
                       std::to_string(doc.ambient_dim));
    doc.signal = std::move(v);
  }
  if (j.contains("coefficients")) {
    Vector v = detail::parse_complex_vector(j["coefficients"], "coefficients");
    if (v.size() != doc.vectors.size())
      throw ParseError("coefficients: has " + std::to_string(v.size()) + " entries, expected one per vector (" +
                       std::to_string(doc.vectors.size()) + ")");
    doc.coefficients = std::move(v);
  }
  return doc;
}

inline Json to_json(const Vector& v) {
  Json a = Json::array();
  for (const auto& z : v) a.push_back(Json::array({z.real(), z.imag()}));
  return a;
}

inline Json to_json(const FrameSequence& f) {
  Json j = Json::object();
  j["ambient_dim"] = f.ambient_dim();
  Json vs = Json::array();
  for (const auto& v : f.vectors()) vs.push_back(to_json(v));
  j["vectors"] = std::move(vs);
  return j;
}

inline Json to_json(const CheckRecord& c) {
  Json j = Json::object();
  j["name"] = c.name;
  j["anchor"] = c.anchor;
  j["applicable"] = c.applicable;
  j["passed"] = c.passed;
  j["deviation"] = c.deviation;
  j["threshold"] = c.threshold;
  if (!c.detail.empty()) j["detail"] = c.detail;
  return j;
}

inline Json to_json(const IdentityReport& r) {
  Json j = Json::object();
  j["ambient_dim"] = r.ambient_dim;
  j["count"] = r.count;
  j["span_dim"] = r.span_dim;
  j["passed"] = r.passed();
  j["max_deviation"] = r.max_deviation();
  Json checks = Json::array();
  for (const auto& c : r.checks) checks.push_back(to_json(c));
  j["checks"] = std::move(checks);
  return j;
}

/// Serializes with two-space indentation and every floating-point value
/// printed to 17 significant digits, so output is byte-stable and decimals
/// round-trip exactly.
inline std::string dump_structured(const Json& j) {
  std::string out;
  detail::write_json(out, j, 0);
  out += "\n";
  return out;
}

}  // namespace framekit
