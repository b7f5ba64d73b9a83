#pragma once

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

#include "angulon/errors.hpp"
#include "angulon/multipoly.hpp"

namespace angulon {

using ojson = nlohmann::ordered_json;

/// {"version":1,"vars":[...],"terms":[{"e":[...],"n":"..","d":".."},...]}, graded-lex descending.
inline ojson poly_to_json(const MultiPoly& p) {
  ojson j;
  j["version"] = 1;
  j["vars"] = p.vars();
  ojson terms = ojson::array();
  for (const auto& [e, c] : p.terms()) {
    ojson t;
    t["e"] = std::vector<unsigned>(e.begin(), e.end());
    t["n"] = c.get_num().get_str();
    t["d"] = c.get_den().get_str();
    terms.push_back(std::move(t));
  }
  j["terms"] = std::move(terms);
  return j;
}

inline MultiPoly poly_from_json(const ojson& j) {
  try {
    if (j.at("version").get<int>() != 1) throw CacheParseError("unsupported polynomial format version", 0);
    MultiPoly p(j.at("vars").get<std::vector<std::string>>());
    for (const auto& t : j.at("terms")) {
      const auto ev = t.at("e").get<std::vector<unsigned>>();
      if (ev.size() != p.num_vars()) throw CacheParseError("exponent vector length does not match vars", 0);
      Exponents e(ev.begin(), ev.end());
      const Integer num(t.at("n").get<std::string>(), 10);
      const Integer den(t.at("d").get<std::string>(), 10);
      if (den <= 0) throw CacheParseError("non-positive denominator in polynomial JSON", 0);
      p.add_term(e, rat_normalize(num, den));
    }
    return p;
  } catch (const nlohmann::json::exception& ex) {
    throw CacheParseError(std::string("malformed polynomial JSON: ") + ex.what(), 0);
  } catch (const std::invalid_argument& ex) {
    throw CacheParseError(std::string("malformed number in polynomial JSON: ") + ex.what(), 0);
  }
}

inline std::string poly_to_json_string(const MultiPoly& p) { return poly_to_json(p).dump(); }

inline MultiPoly poly_from_json_string(const std::string& text) {
  ojson j;
  try {
    j = ojson::parse(text);
  } catch (const nlohmann::json::parse_error& ex) {
    throw CacheParseError(std::string("JSON parse error at byte ") + std::to_string(ex.byte) + ": " + ex.what(),
                          ex.byte);
  }
  return poly_from_json(j);
}

}  // namespace angulon
