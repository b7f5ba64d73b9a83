#pragma once

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>

#include <unistd.h>

#include "angulon/errors.hpp"
#include "angulon/polyjson.hpp"
#include "angulon/principal.hpp"

namespace angulon {

namespace fs = std::filesystem;

inline std::string cache_file_name(int beta, int n) {
  return "ihat_b" + std::to_string(beta) + "_n" + std::to_string(n) + ".json";
}

/// ANGULON_CACHE if set, else $XDG_CACHE_HOME/angulon, else ~/.cache/angulon, else ./.angulon-cache.
inline fs::path default_cache_dir() {
  if (const char* env = std::getenv("ANGULON_CACHE"); env && *env) return env;
  if (const char* xdg = std::getenv("XDG_CACHE_HOME"); xdg && *xdg) return fs::path(xdg) / "angulon";
  if (const char* home = std::getenv("HOME"); home && *home) return fs::path(home) / ".cache" / "angulon";
  return ".angulon-cache";
}

inline std::string principal_to_json_string(const PrincipalTerm& p) {
  ojson j;
  j["version"] = 1;
  j["beta"] = p.beta;
  j["n"] = p.n;
  j["poly"] = poly_to_json(p.poly);
  return j.dump();
}

inline PrincipalTerm principal_from_json_string(const std::string& text) {
  ojson j;
  try {
    j = ojson::parse(text);
  } catch (const nlohmann::json::parse_error& ex) {
    throw CacheParseError("cache file is not valid JSON (byte " + std::to_string(ex.byte) + ")", ex.byte);
  }
  try {
    if (j.at("version").get<int>() != 1) throw CacheParseError("unsupported cache version", 0);
    PrincipalTerm p{j.at("beta").get<int>(), j.at("n").get<int>(), poly_from_json(j.at("poly"))};
    if (p.poly.vars() != xy_vars(p.n)) throw CacheParseError("cache file variables do not match n", 0);
    return p;
  } catch (const nlohmann::json::exception& ex) {
    throw CacheParseError(std::string("cache file has the wrong structure: ") + ex.what(), 0);
  }
}

/// Writes dir/ihat_b{beta}_n{n}.json atomically (temporary file, then rename).
inline fs::path cache_store(const PrincipalTerm& p, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create cache directory " + dir.string() + ": " + ec.message());
  static std::atomic<unsigned> counter{0};
  const fs::path target = dir / cache_file_name(p.beta, p.n);
  const fs::path tmp = dir / ("." + cache_file_name(p.beta, p.n) + ".tmp" + std::to_string(::getpid()) + "_" +
                              std::to_string(counter.fetch_add(1)));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write cache file " + tmp.string());
    out << principal_to_json_string(p);
    out.flush();
    if (!out) throw Error("write failed for cache file " + tmp.string());
  }
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error("cannot move cache file into place: " + ec.message());
  }
  return target;
}

inline PrincipalTerm cache_load(int beta, int n, const fs::path& dir) {
  const fs::path file = dir / cache_file_name(beta, n);
  std::ifstream in(file, std::ios::binary);
  if (!in) throw CacheNotFound("no cached principal term at " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  PrincipalTerm p = principal_from_json_string(ss.str());
  if (p.beta != beta || p.n != n) throw CacheParseError("cache file " + file.string() + " holds a different (beta, n)", 0);
  return p;
}

/// Loads from dir when present, otherwise computes and stores.
inline PrincipalTerm principal_cached(int beta, int n, const fs::path& dir, const PrincipalOptions& opt = {}) {
  try {
    PrincipalTerm p = cache_load(beta, n, dir);
    principal_memo_insert(p);
    return p;
  } catch (const CacheNotFound&) {
  }
  PrincipalTerm p = principal_term(beta, n, opt);
  cache_store(p, dir);
  return p;
}

}  // namespace angulon
