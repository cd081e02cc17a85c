#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "nctorus/lattice_algebra.hpp"

namespace nct {

// Element file format (UTF-8 JSON, entries ordered by (m, n)):
//   { "theta": { "value": v, "rational": [p, q] | null },
//     "entries": [ { "m": int, "n": int, "re": float, "im": float }, ... ] }

inline nlohmann::ordered_json theta_to_json(const ThetaParam& theta) {
  nlohmann::ordered_json j;
  j["value"] = theta.value();
  if (theta.rational()) {
    j["rational"] = {theta.rational()->p, theta.rational()->q};
  } else {
    j["rational"] = nullptr;
  }
  return j;
}

inline nlohmann::ordered_json element_to_json(const TorusElement& a) {
  nlohmann::ordered_json j;
  j["theta"] = theta_to_json(a.theta());
  auto entries = nlohmann::ordered_json::array();
  for (const auto& [idx, c] : a.coeffs()) {  // std::map order is (m, n) lexicographic
    nlohmann::ordered_json e;
    e["m"] = idx.m;
    e["n"] = idx.n;
    e["re"] = c.real();
    e["im"] = c.imag();
    entries.push_back(std::move(e));
  }
  j["entries"] = std::move(entries);
  return j;
}

/// Compact canonical serialization; the digest is taken over this string.
inline std::string store(const TorusElement& a) { return element_to_json(a).dump(); }

namespace detail {

inline double finite_number(const nlohmann::json& j, const char* what) {
  if (!j.is_number()) throw FormatError(std::string("element file: '") + what + "' must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw FormatError(std::string("element file: '") + what + "' is not finite");
  return v;
}

inline std::int64_t integer_field(const nlohmann::json& j, const char* what) {
  if (!j.is_number_integer()) throw FormatError(std::string("element file: '") + what + "' must be an integer");
  return j.get<std::int64_t>();
}

}  // namespace detail

inline ThetaParam theta_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("value")) throw FormatError("element file: theta.value missing");
  const double value = detail::finite_number(j.at("value"), "theta.value");
  std::optional<Rational> rational;
  if (j.contains("rational") && !j.at("rational").is_null()) {
    const auto& r = j.at("rational");
    if (!r.is_array() || r.size() != 2) throw FormatError("element file: theta.rational must be [p, q] or null");
    rational = Rational{detail::integer_field(r[0], "theta.rational[0]"), detail::integer_field(r[1], "theta.rational[1]")};
  }
  try {
    return ThetaParam(value, rational);
  } catch (const PreconditionError& e) {
    throw FormatError(std::string("element file: ") + e.what());
  }
}

inline TorusElement element_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("theta") || !j.contains("entries")) {
    throw FormatError("element file: expected keys 'theta' and 'entries'");
  }
  const ThetaParam theta = theta_from_json(j.at("theta"));
  const auto& entries = j.at("entries");
  if (!entries.is_array()) throw FormatError("element file: 'entries' must be an array");
  TorusElement::Coefficients coeffs;
  for (const auto& e : entries) {
    if (!e.is_object()) throw FormatError("element file: entry must be an object");
    for (const char* key : {"m", "n", "re", "im"}) {
      if (!e.contains(key)) throw FormatError(std::string("element file: entry missing '") + key + "'");
    }
    const LatticeIndex idx{detail::integer_field(e.at("m"), "m"), detail::integer_field(e.at("n"), "n")};
    const Complex c{detail::finite_number(e.at("re"), "re"), detail::finite_number(e.at("im"), "im")};
    if (!coeffs.emplace(idx, c).second) {
      throw FormatError("element file: duplicate entry for (" + std::to_string(idx.m) + ", " + std::to_string(idx.n) +
                        ")");
    }
  }
  return TorusElement(theta, std::move(coeffs));
}

inline TorusElement load(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("element file: ") + e.what());
  }
  return element_from_json(j);
}

inline TorusElement load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open element file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return load(ss.str());
}

inline void store_file(const TorusElement& a, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write element file: " + path);
  out << element_to_json(a).dump(2) << '\n';
}

/// 64-bit FNV-1a of `bytes`, as 16 hex digits.
inline std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

/// Digest of the canonical serialization.
inline std::string digest(const TorusElement& a) { return fnv1a_hex(store(a)); }

}  // namespace nct
