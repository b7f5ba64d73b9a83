#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "angulon/cache.hpp"
#include "angulon/errors.hpp"
#include "angulon/haar.hpp"
#include "angulon/polyjson.hpp"
#include "angulon/principal.hpp"
#include "angulon/tau.hpp"
#include "angulon/verify.hpp"

namespace angulon::cli {

enum class OutputFormat { Json, Csv, Text };

inline OutputFormat parse_format(const std::string& s) {
  if (s == "json") return OutputFormat::Json;
  if (s == "csv") return OutputFormat::Csv;
  if (s == "text") return OutputFormat::Text;
  throw UsageError("unknown format '" + s + "' (json, csv, text)");
}

inline std::string format_name(OutputFormat f) {
  switch (f) {
    case OutputFormat::Json: return "json";
    case OutputFormat::Csv: return "csv";
    case OutputFormat::Text: return "text";
  }
  return "?";
}

struct CliConfig {
  std::string command;
  std::optional<std::string> beta;
  std::optional<int> n;
  std::optional<std::string> x, y;
  std::optional<std::uint64_t> samples;
  std::uint64_t seed = 1;
  std::optional<std::string> cache_dir;
  bool no_cache = false;
  OutputFormat format = OutputFormat::Json;
  unsigned jobs = 1;
  std::optional<std::string> suite;
  bool quick = false;
  bool full = false;
  bool all = false;
  bool expand = false;
  std::optional<std::size_t> points;
  double sigma = 3.0;
  double duality_tol = 1e-8;
};

inline constexpr int kSchemaVersion = 1;

/// Comma-separated integers, fractions p/q or decimals, parsed exactly.
inline std::vector<Rational> parse_values(const std::string& text) {
  std::vector<Rational> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = text.find(',', start);
    std::string tok = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    const auto b = tok.find_first_not_of(" \t"), e = tok.find_last_not_of(" \t");
    tok = b == std::string::npos ? std::string() : tok.substr(b, e - b + 1);
    if (tok.empty()) throw UsageError("empty value in list '" + text + "'");
    try {
      out.push_back(parse_rational(tok));
    } catch (const Error&) {
      throw UsageError("malformed value '" + tok + "'");
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

namespace detail {

inline int require_n(const CliConfig& c) {
  if (!c.n) throw UsageError("--n is required for '" + c.command + "'");
  if (*c.n < 1) throw UsageError("--n must be >= 1");
  return *c.n;
}

inline Rational require_beta(const CliConfig& c) {
  if (!c.beta) throw UsageError("--beta is required for '" + c.command + "'");
  try {
    return parse_rational(*c.beta);
  } catch (const Error&) {
    throw UsageError("malformed --beta '" + *c.beta + "'");
  }
}

inline int integer_beta(const CliConfig& c) {
  const Rational b = require_beta(c);
  if (b.get_den() != 1 || b < 1 || b > 64) throw UsageError("--beta must be an integer >= 1 for '" + c.command + "'");
  return static_cast<int>(b.get_num().get_si());
}

inline SpectrumPair require_spectrum(const CliConfig& c, int n) {
  if (!c.x || !c.y) throw UsageError("--x and --y are required for '" + c.command + "'");
  SpectrumPair s{parse_values(*c.x), parse_values(*c.y)};
  if (s.x.size() != static_cast<std::size_t>(n) || s.y.size() != static_cast<std::size_t>(n))
    throw UsageError("--x and --y must each list n = " + std::to_string(n) + " values");
  return s;
}

/// --cache-dir beats ANGULON_CACHE, which beats the platform default.
inline fs::path cache_dir(const CliConfig& c) {
  if (c.cache_dir) return *c.cache_dir;
  return default_cache_dir();
}

inline PrincipalTerm load_principal(const CliConfig& c, int beta, int n) {
  PrincipalOptions opt;
  opt.jobs = c.jobs;
  if (c.no_cache) return principal_term(beta, n, opt);
  return principal_cached(beta, n, cache_dir(c), opt);
}

inline std::vector<std::string> strings(const std::vector<Rational>& v) {
  std::vector<std::string> s;
  for (const auto& r : v) s.push_back(r.get_str());
  return s;
}

inline ojson exp_value_json(const ExpValue& v) {
  ojson terms = ojson::array();
  for (const auto& [q, c] : v.terms()) terms.push_back({{"q", q.get_str()}, {"c", c.get_str()}});
  return terms;
}

inline ojson echo(const CliConfig& c) {
  ojson j;
  j["name"] = c.command;
  if (c.beta) j["beta"] = *c.beta;
  if (c.n) j["n"] = *c.n;
  if (c.x) j["x"] = *c.x;
  if (c.y) j["y"] = *c.y;
  if (c.samples) j["samples"] = *c.samples;
  if (c.suite) j["suite"] = *c.suite;
  if (c.all) j["all"] = true;
  if (c.quick) j["quick"] = true;
  if (c.full) j["full"] = true;
  if (c.points) j["points"] = *c.points;
  j["format"] = format_name(c.format);
  return j;
}

inline void poly_csv(std::ostream& out, const MultiPoly& p) {
  for (const auto& v : p.vars()) out << v << ',';
  out << "num,den\n";
  for (const auto& [e, c] : p.terms()) {
    for (auto k : e) out << k << ',';
    out << c.get_num().get_str() << ',' << c.get_den().get_str() << '\n';
  }
}

struct Outcome {
  ojson result;
  bool pass = true;
  /// Writers for the non-JSON formats.
  std::function<void(std::ostream&)> csv, text;
};

inline Outcome cmd_principal(const CliConfig& c) {
  const int beta = integer_beta(c), n = require_n(c);
  const PrincipalTerm p = load_principal(c, beta, n);
  const TauPoly t = tau_extract(p);
  Outcome o;
  o.result["beta"] = beta;
  o.result["n"] = n;
  o.result["xy_terms"] = p.poly.size();
  o.result["tau"] = poly_to_json(t.poly);
  if (c.expand) o.result["poly"] = poly_to_json(p.poly);
  o.csv = [p, t, expand = c.expand](std::ostream& out) { poly_csv(out, expand ? p.poly : t.poly); };
  o.text = [p, t, expand = c.expand](std::ostream& out) {
    out << "Ihat(beta=" << p.beta << ", n=" << p.n << ") = " << (expand ? p.poly : t.poly).to_string() << '\n';
  };
  return o;
}

inline Outcome cmd_tau(const CliConfig& c) {
  const int beta = integer_beta(c), n = require_n(c);
  const PrincipalTerm p = load_principal(c, beta, n);
  TauExtractOptions opt;
  opt.seed = c.seed;
  const TauExtractReport r = tau_extract_report(p, opt);
  Outcome o;
  o.result["beta"] = beta;
  o.result["n"] = n;
  o.result["unknowns"] = r.unknowns;
  o.result["rank"] = r.rank;
  o.result["solve_points"] = r.solve_points;
  o.result["verify_points"] = r.verify_points;
  o.result["max_degree"] = tau_max_degree(r.tau);
  o.result["bh_degree"] = bh_degree_check(r.tau) ? "pass" : "fail";
  o.result["tau"] = poly_to_json(r.tau.poly);
  o.pass = bh_degree_check(r.tau);
  o.csv = [t = r.tau](std::ostream& out) { poly_csv(out, t.poly); };
  o.text = [r](std::ostream& out) {
    out << "tau form (rank " << r.rank << "/" << r.unknowns << "): " << r.tau.poly.to_string() << '\n';
  };
  return o;
}

inline Outcome cmd_eval(const CliConfig& c) {
  const int n = require_n(c);
  const Rational b = require_beta(c);
  if (b <= 0) throw UsageError("--beta must be positive");
  const SpectrumPair s = require_spectrum(c, n);
  Outcome o;
  o.result["beta"] = b.get_str();
  o.result["n"] = n;
  o.result["x"] = strings(s.x);
  o.result["y"] = strings(s.y);
  double value;
  if (b.get_den() == 1) {
    const PrincipalTerm p = load_principal(c, static_cast<int>(b.get_num().get_si()), n);
    const ExpValue v = eval_I_exact(p, s);
    value = v.to_double();
    o.result["normalization"] = "permutation-sum";
    o.result["value"] = value;
    o.result["exact"] = exp_value_json(v);
  } else {
    if (n != 2) throw UsageError("non-integer beta is evaluated at n = 2 only");
    value = eval_I2_any_beta(b.get_d(), s);
    o.result["normalization"] = "haar";
    o.result["value"] = value;
  }
  o.csv = [value](std::ostream& out) {
    std::ostringstream ss;
    ss.precision(17);
    ss << value;
    out << "value\n" << ss.str() << '\n';
  };
  o.text = [value](std::ostream& out) {
    std::ostringstream ss;
    ss.precision(17);
    ss << value;
    out << "I = " << ss.str() << '\n';
  };
  return o;
}

inline Outcome cmd_mc(const CliConfig& c) {
  const int n = require_n(c);
  const Rational b = require_beta(c);
  GroupKind g;
  try {
    g = group_from_beta(b.get_d());
  } catch (const DomainError&) {
    throw UsageError("--beta must be 1/2, 1 or 2 for 'mc'");
  }
  const SpectrumPair s = require_spectrum(c, n);
  FloatSpectrum f;
  for (const auto& v : s.x) f.x.push_back(v.get_d());
  for (const auto& v : s.y) f.y.push_back(v.get_d());
  const std::uint64_t samples = c.samples.value_or(100000);
  if (samples < 100) throw UsageError("--samples must be at least 100");
  const MCRun run = mc_run(g, n, {f}, MCOptions{samples, c.seed, c.jobs, true});
  Outcome o;
  o.result["group"] = group_name(g);
  o.result["n"] = n;
  o.result["x"] = strings(s.x);
  o.result["y"] = strings(s.y);
  o.result["integral"] = estimate_to_json(run.integral[0]);
  ojson m = ojson::array();
  for (int i = 0; i < n; ++i) {
    ojson row = ojson::array();
    for (int j = 0; j < n; ++j) row.push_back(estimate_to_json(run.moments[0][i * n + j]));
    m.push_back(row);
  }
  o.result["moments"] = m;
  auto rows = [run, n](std::ostream& out, bool csv) {
    std::ostringstream ss;
    ss.precision(17);
    if (csv) ss << "quantity,i,j,mean,stderr,samples,seed\n";
    auto line = [&](const std::string& q, int i, int j, const MCEstimate& e) {
      if (csv)
        ss << q << ',' << i << ',' << j << ',' << e.mean << ',' << e.stderr_ << ',' << e.samples << ',' << e.seed << '\n';
      else
        ss << q << (i ? "[" + std::to_string(i) + "," + std::to_string(j) + "]" : std::string()) << " = " << e.mean
           << " +- " << e.stderr_ << '\n';
    };
    line("I", 0, 0, run.integral[0]);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) line("M", i + 1, j + 1, run.moments[0][i * n + j]);
    out << ss.str();
  };
  o.csv = [rows](std::ostream& out) { rows(out, true); };
  o.text = [rows](std::ostream& out) { rows(out, false); };
  return o;
}

inline Outcome cmd_moments(const CliConfig& c) {
  const int beta = integer_beta(c), n = require_n(c);
  const SpectrumPair s = require_spectrum(c, n);
  const PrincipalTerm p = load_principal(c, beta, n);
  const MomentTable t = moments_at(p, s);
  const ExpValue I = eval_I_exact(p, s);
  Outcome o;
  o.result["beta"] = beta;
  o.result["n"] = n;
  o.result["x"] = strings(s.x);
  o.result["y"] = strings(s.y);
  o.result["integral"] = {{"value", I.to_double()}, {"exact", exp_value_json(I)}};
  ojson m = ojson::array();
  std::vector<double> vals;
  for (int i = 0; i < n; ++i) {
    ojson row = ojson::array();
    for (int j = 0; j < n; ++j) {
      const ExpValue v = t.value(i, j);
      vals.push_back(v.to_double());
      row.push_back({{"value", vals.back()}, {"exact", exp_value_json(v)}});
    }
    m.push_back(row);
  }
  o.result["moments"] = m;
  auto rows = [vals, n](std::ostream& out, bool csv) {
    std::ostringstream ss;
    ss.precision(17);
    if (csv) ss << "i,j,value\n";
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (csv)
          ss << i + 1 << ',' << j + 1 << ',' << vals[i * n + j] << '\n';
        else
          ss << "M[" << i + 1 << "," << j + 1 << "] = " << vals[i * n + j] << '\n';
      }
    out << ss.str();
  };
  o.csv = [rows](std::ostream& out) { rows(out, true); };
  o.text = [rows](std::ostream& out) { rows(out, false); };
  return o;
}

// ---- verify ----

struct VerifyLine {
  std::string check;
  std::string label;
  bool pass;
};

inline std::vector<ExactCheck> exact_checks_for(const std::string& suite) {
  if (suite == "calogero") return {ExactCheck::Calogero};
  if (suite == "dunkl") return {ExactCheck::DunklX, ExactCheck::DunklY};
  if (suite == "kmatrix") return {ExactCheck::KMatrix};
  if (suite == "charpoly") return {ExactCheck::Charpoly};
  if (suite == "sumrules") return {ExactCheck::SumRules, ExactCheck::Chain};
  if (suite == "exact") return all_exact_checks();
  return {};
}

class VerifyRun {
 public:
  explicit VerifyRun(const CliConfig& c) : c_(c) {}

  void exact(int beta, int n, const std::vector<ExactCheck>& checks, std::size_t points) {
    const PrincipalTerm p = load_principal(c_, beta, n);
    ExactSuiteOptions opt;
    opt.points = points;
    opt.seed = c_.seed;
    opt.jobs = c_.jobs;
    for (const auto& r : run_exact_suite(p, checks, opt)) add(report_to_json(r), r.check, r.beta, r.n, r.pass);
  }
  void bh(int beta, int n) {
    const auto r = bh_report(load_principal(c_, beta, n));
    add(report_to_json(r), r.check, beta, n, r.pass);
  }
  void triangle(int n) {
    load_principal(c_, 2, n);
    const auto r = triangle_report(n, triangle_coefficients(n));
    add(report_to_json(r), r.check, 2, n, r.pass);
  }
  void n3(int beta) {
    load_principal(c_, beta, 3);
    const auto r = n3_report(beta);
    add(report_to_json(r), r.check, beta, 3, r.pass);
  }
  void duality(int beta) {
    load_principal(c_, beta, 2);
    const auto d = duality_convergence(beta, duality_reference_spectra());
    const bool pass = d.fine.max_deviation < c_.duality_tol && d.reduction >= 1e4;
    ojson j = report_to_json(d);
    j["status"] = pass ? "pass" : "fail";
    add(j, "duality", beta, 2, pass);
  }
  void mc(GroupKind g, int n, std::uint64_t samples) {
    if (g != GroupKind::O) load_principal(c_, g == GroupKind::U ? 1 : 2, n);
    auto r = mc_compare(g, n, mc_reference_spectra(n), samples, c_.seed, c_.jobs, true);
    const bool pass = r.max_integral_z <= c_.sigma && r.max_moment_z <= c_.sigma;
    ojson j = report_to_json(r);
    j["status"] = pass ? "pass" : "fail";
    j["sigma"] = c_.sigma;
    add(j, "mc-" + group_name(g), 0, n, pass);
  }

  const ojson& reports() const { return reports_; }
  const std::vector<VerifyLine>& lines() const { return lines_; }
  bool pass() const {
    for (const auto& l : lines_)
      if (!l.pass) return false;
    return true;
  }

 private:
  void add(ojson j, const std::string& check, int beta, int n, bool pass) {
    reports_.push_back(std::move(j));
    std::string label = beta ? "beta=" + std::to_string(beta) + " n=" + std::to_string(n) : "n=" + std::to_string(n);
    lines_.push_back({check, label, pass});
  }

  const CliConfig& c_;
  ojson reports_ = ojson::array();
  std::vector<VerifyLine> lines_;
};

inline GroupKind group_arg(const CliConfig& c) {
  try {
    return group_from_beta(require_beta(c).get_d());
  } catch (const DomainError&) {
    throw UsageError("--beta must be 1/2, 1 or 2 for the mc suite");
  }
}

inline Outcome cmd_verify(const CliConfig& c) {
  if (c.quick && c.full) throw UsageError("--quick and --full are exclusive");
  if (!c.all && !c.suite) throw UsageError("verify needs --suite or --all");
  VerifyRun run(c);
  const bool quick = c.quick;
  const std::size_t points = c.points.value_or(quick ? 3 : 10);
  if (c.all) {
    std::vector<std::pair<int, int>> exact_cases =
        quick ? std::vector<std::pair<int, int>>{{1, 2}, {1, 3}, {2, 2}, {2, 3}}
              : std::vector<std::pair<int, int>>{{1, 2}, {1, 3}, {1, 4}, {2, 2}, {2, 3}, {3, 2}, {3, 3}};
    for (auto [b, n] : exact_cases) run.exact(b, n, all_exact_checks(), points);
    for (auto [b, n] : exact_cases) run.bh(b, n);
    if (!quick) run.bh(2, 4);
    run.triangle(3);
    if (!quick) run.triangle(4);
    for (int b = 1; b <= (quick ? 2 : 3); ++b) run.n3(b);
    run.duality(1);
    const std::uint64_t samples = c.samples.value_or(quick ? 100000 : 1000000);
    run.mc(GroupKind::U, 2, samples);
    run.mc(GroupKind::Sp, 2, samples);
    run.mc(GroupKind::O, 2, samples);
    run.mc(GroupKind::U, 3, samples);
    run.mc(GroupKind::Sp, 3, samples);
  } else {
    const std::string& s = *c.suite;
    if (auto checks = exact_checks_for(s); !checks.empty()) {
      run.exact(integer_beta(c), require_n(c), checks, points);
    } else if (s == "bh") {
      run.bh(integer_beta(c), require_n(c));
    } else if (s == "triangle") {
      const int n = require_n(c);
      if (n != 3 && n != 4) throw UsageError("the triangle suite takes --n 3 or 4");
      run.triangle(n);
    } else if (s == "n3") {
      run.n3(integer_beta(c));
    } else if (s == "duality") {
      run.duality(c.beta ? integer_beta(c) : 1);
    } else if (s == "mc") {
      const int n = require_n(c);
      if (n != 2 && n != 3) throw UsageError("the mc suite takes --n 2 or 3");
      const GroupKind g = group_arg(c);
      if (g == GroupKind::O && n != 2) throw UsageError("the orthogonal reference is available at n = 2 only");
      run.mc(g, n, c.samples.value_or(quick ? 100000 : 1000000));
    } else {
      throw UsageError("unknown suite '" + s +
                       "' (calogero, dunkl, kmatrix, charpoly, sumrules, exact, bh, triangle, n3, duality, mc)");
    }
  }
  Outcome o;
  o.pass = run.pass();
  o.result["suite"] = c.all ? std::string(quick ? "all-quick" : "all") : *c.suite;
  o.result["status"] = o.pass ? "pass" : "fail";
  o.result["reports"] = run.reports();
  const auto lines = run.lines();
  o.csv = [lines](std::ostream& out) {
    out << "check,case,status\n";
    for (const auto& l : lines) out << l.check << ',' << l.label << ',' << (l.pass ? "pass" : "fail") << '\n';
  };
  o.text = [lines](std::ostream& out) {
    for (const auto& l : lines) out << (l.pass ? "pass " : "FAIL ") << l.check << ' ' << l.label << '\n';
  };
  return o;
}

}  // namespace detail

/// Runs one command. The record goes to out, diagnostics to err. Returns the
/// exit code: 0 success, 1 failed check or runtime failure, 2 usage error.
inline int run(const CliConfig& c, std::ostream& out, std::ostream& err) {
  const auto t0 = std::chrono::steady_clock::now();
  detail::Outcome o;
  try {
    if (c.jobs < 1) throw UsageError("--jobs must be >= 1");
    if (c.command == "principal")
      o = detail::cmd_principal(c);
    else if (c.command == "tau")
      o = detail::cmd_tau(c);
    else if (c.command == "eval")
      o = detail::cmd_eval(c);
    else if (c.command == "mc")
      o = detail::cmd_mc(c);
    else if (c.command == "moments")
      o = detail::cmd_moments(c);
    else if (c.command == "verify")
      o = detail::cmd_verify(c);
    else
      throw UsageError("unknown command '" + c.command + "' (principal, tau, eval, mc, moments, verify)");
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const PreconditionError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const PoleError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const DomainError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  switch (c.format) {
    case OutputFormat::Json: {
      ojson rec;
      rec["schema_version"] = kSchemaVersion;
      rec["command"] = detail::echo(c);
      rec["result"] = std::move(o.result);
      rec["timing_ms"] = ms;
      rec["seed"] = c.seed;
      out << rec.dump(2) << '\n';
      break;
    }
    case OutputFormat::Csv:
      o.csv(out);
      break;
    case OutputFormat::Text:
      o.text(out);
      break;
  }
  return o.pass ? 0 : 1;
}

}  // namespace angulon::cli
