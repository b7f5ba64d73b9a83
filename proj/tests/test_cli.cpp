#include <gtest/gtest.h>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <sys/wait.h>

#include "angulon/cli.hpp"

using namespace angulon;
using namespace angulon::cli;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out;
};

fs::path scratch(const std::string& tag) {
  const fs::path d = fs::temp_directory_path() / ("angulon_cli_" + tag + "_" + std::to_string(::getpid()));
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

// stdout of the real binary; stderr is dropped unless keep_err
Result run_cli(const std::string& args, const std::string& env = "", bool keep_err = false) {
  static const fs::path cache = scratch("default_cache");
  std::string cmd = "ANGULON_CACHE=" + cache.string() + " " + env + " " + ANGULON_CLI_PATH + " " + args +
                    (keep_err ? " 2>&1" : " 2>/dev/null");
  Result r;
  FILE* p = ::popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf;
  std::size_t k;
  while ((k = std::fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), k);
  const int st = ::pclose(p);
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

nlohmann::json json_of(const Result& r) { return nlohmann::json::parse(r.out); }

std::string without_timing(const std::string& out) {
  auto j = nlohmann::ordered_json::parse(out);
  j.erase("timing_ms");
  return j.dump();
}

int run_in_process(CliConfig c, std::string* out = nullptr, std::string* err = nullptr) {
  std::ostringstream o, e;
  c.no_cache = true;
  const int code = run(c, o, e);
  if (out) *out = o.str();
  if (err) *err = e.str();
  return code;
}

}  // namespace

TEST(ParseValues, Examples) {
  const auto v = parse_values("0,1,3/2");
  ASSERT_EQ(v.size(), 3u);
  EXPECT_EQ(v[0], 0);
  EXPECT_EQ(v[1], 1);
  EXPECT_EQ(v[2], Rational(3, 2));
  EXPECT_EQ(parse_values("0.25"), std::vector<Rational>{Rational(1, 4)});
  EXPECT_EQ(parse_values(" -2 , 4/6"), (std::vector<Rational>{Rational(-2), Rational(2, 3)}));
  EXPECT_THROW(parse_values("1,,2"), UsageError);
  try {
    parse_values("1,x7,2");
    FAIL();
  } catch (const UsageError& e) {
    EXPECT_NE(std::string(e.what()).find("x7"), std::string::npos);
  }
  EXPECT_THROW(parse_values(""), UsageError);
}

TEST(Run, RecordLayoutIsStable) {
  CliConfig c;
  c.command = "eval";
  c.beta = "1";
  c.n = 1;
  c.x = "2";
  c.y = "3";
  std::string out;
  ASSERT_EQ(run_in_process(c, &out), 0);
  const auto j = nlohmann::ordered_json::parse(out);
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  const std::vector<std::string> want = {"schema_version", "command", "result", "timing_ms", "seed"};
  EXPECT_EQ(keys, want);
  EXPECT_EQ(j["schema_version"], kSchemaVersion);
  EXPECT_EQ(j["command"]["name"], "eval");
  EXPECT_NEAR(j["result"]["value"].get<double>(), 403.4287934927351, 1e-9);
}

TEST(Run, UsageErrorsExitTwo) {
  CliConfig c;
  c.command = "principal";
  std::string err;
  EXPECT_EQ(run_in_process(c, nullptr, &err), 2);
  EXPECT_NE(err.find("--beta"), std::string::npos);
  c.command = "frobnicate";
  EXPECT_EQ(run_in_process(c), 2);
  c = CliConfig{};
  c.command = "eval";
  c.beta = "1";
  c.n = 2;
  c.x = "0,1";
  c.y = "1,,2";
  EXPECT_EQ(run_in_process(c), 2);
  c.y = "0,0";
  EXPECT_EQ(run_in_process(c), 2);  // coinciding eigenvalues
  c.y = "0,1,2";
  EXPECT_EQ(run_in_process(c), 2);
  c = CliConfig{};
  c.command = "mc";
  c.beta = "3";
  c.n = 2;
  c.x = "0,1";
  c.y = "0,1";
  EXPECT_EQ(run_in_process(c), 2);
  c = CliConfig{};
  c.command = "verify";
  EXPECT_EQ(run_in_process(c), 2);
  c.suite = "nonsense";
  EXPECT_EQ(run_in_process(c), 2);
}

TEST(Run, FailedCheckExitsOne) {
  CliConfig c;
  c.command = "verify";
  c.suite = "duality";
  c.duality_tol = 1e-300;
  std::string out;
  EXPECT_EQ(run_in_process(c, &out), 1);
  EXPECT_EQ(nlohmann::json::parse(out)["result"]["status"], "fail");
}

TEST(Run, CsvAndTextFormats) {
  CliConfig c;
  c.command = "principal";
  c.beta = "2";
  c.n = 2;
  c.format = OutputFormat::Csv;
  std::string out;
  ASSERT_EQ(run_in_process(c, &out), 0);
  EXPECT_EQ(out, "t12,num,den\n2,4,1\n1,4,1\n");
  c.format = OutputFormat::Text;
  ASSERT_EQ(run_in_process(c, &out), 0);
  EXPECT_EQ(out, "Ihat(beta=2, n=2) = 4*t12^2 + 4*t12\n");
}

TEST(Run, HalfIntegerEvalIsHaarNormalized) {
  CliConfig c;
  c.command = "eval";
  c.beta = "1/2";
  c.n = 2;
  c.x = "0,1";
  c.y = "0,1";
  std::string out;
  ASSERT_EQ(run_in_process(c, &out), 0);
  const auto j = nlohmann::json::parse(out);
  EXPECT_EQ(j["result"]["normalization"], "haar");
  EXPECT_GT(j["result"]["value"].get<double>(), 1.0);
}

TEST(Binary, PrincipalTauForm) {
  const Result r = run_cli("principal --beta 2 --n 3 --format json");
  ASSERT_EQ(r.code, 0);
  const auto j = json_of(r);
  EXPECT_EQ(j["result"]["beta"], 2);
  EXPECT_EQ(j["result"]["n"], 3);
  const MultiPoly tau = poly_from_json(j["result"]["tau"]);
  EXPECT_TRUE(proportionality_constant(tau, closed_form_n3(2).poly).has_value());
}

TEST(Binary, EvalExponential) {
  const Result r = run_cli("eval --beta 1 --n 1 --x 2 --y 3");
  ASSERT_EQ(r.code, 0);
  EXPECT_NEAR(json_of(r)["result"]["value"].get<double>(), 403.4287934927351, 1e-9);
}

TEST(Binary, VerifyCalogero) {
  const Result r = run_cli("verify --suite calogero --beta 1 --n 2 --seed 7");
  ASSERT_EQ(r.code, 0);
  const auto j = json_of(r);
  EXPECT_EQ(j["result"]["status"], "pass");
  EXPECT_EQ(j["seed"], 7);
  const auto& rep = j["result"]["reports"][0];
  EXPECT_EQ(rep["seed"], 7);
  ASSERT_EQ(rep["residuals"].size(), 10u);
  for (const auto& v : rep["residuals"]) EXPECT_EQ(v, "0");
}

TEST(Binary, UsageErrorsExitTwo) {
  Result r = run_cli("eval --beta 1 --n 2 --x 1,,2 --y 0,1", "", true);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("1,,2"), std::string::npos);
  EXPECT_EQ(run_cli("verify --suite exact --quick --full --beta 1 --n 2").code, 2);
  EXPECT_EQ(run_cli("principal --beta 1 --n two").code, 2);
  EXPECT_EQ(run_cli("principal --beta 1 --n 2 --format xml").code, 2);
  EXPECT_EQ(run_cli("").code, 2);
}

TEST(Binary, SameSeedSameRecord) {
  const std::string args = "mc --beta 2 --n 2 --x 0,1 --y 0,1/2 --samples 20000 --seed 9";
  const Result a = run_cli(args + " --jobs 1"), b = run_cli(args + " --jobs 8"), c = run_cli(args + " --jobs 1");
  ASSERT_EQ(a.code, 0);
  ASSERT_EQ(b.code, 0);
  EXPECT_EQ(json_of(a)["result"].dump(), json_of(b)["result"].dump());
  EXPECT_EQ(without_timing(a.out), without_timing(c.out));
  const Result d = run_cli("mc --beta 2 --n 2 --x 0,1 --y 0,1/2 --samples 20000 --seed 10");
  EXPECT_NE(json_of(a)["result"]["integral"]["mean"], json_of(d)["result"]["integral"]["mean"]);
}

TEST(Binary, MomentsTableSumsToIntegral) {
  const Result r = run_cli("moments --beta 1 --n 2 --x 0,1 --y 2,3");
  ASSERT_EQ(r.code, 0);
  const auto j = json_of(r)["result"];
  const double I = j["integral"]["value"].get<double>();
  for (int i = 0; i < 2; ++i) {
    const double row = j["moments"][i][0]["value"].get<double>() + j["moments"][i][1]["value"].get<double>();
    EXPECT_NEAR(row, I, 1e-12 * std::fabs(I));
  }
}

TEST(Binary, CacheDirectoryPrecedence) {
  const fs::path env_dir = scratch("env"), flag_dir = scratch("flag");
  ASSERT_EQ(run_cli("principal --beta 1 --n 3", "ANGULON_CACHE=" + env_dir.string()).code, 0);
  EXPECT_TRUE(fs::exists(env_dir / "ihat_b1_n3.json"));
  ASSERT_EQ(run_cli("principal --beta 2 --n 2 --cache-dir " + flag_dir.string(), "ANGULON_CACHE=" + env_dir.string()).code,
            0);
  EXPECT_TRUE(fs::exists(flag_dir / "ihat_b2_n2.json"));
  EXPECT_FALSE(fs::exists(env_dir / "ihat_b2_n2.json"));
  ASSERT_EQ(run_cli("principal --beta 3 --n 2 --no-cache", "ANGULON_CACHE=" + env_dir.string()).code, 0);
  EXPECT_FALSE(fs::exists(env_dir / "ihat_b3_n2.json"));
  // a corrupt cache file is reported, not silently recomputed
  { std::ofstream(env_dir / "ihat_b1_n2.json") << "{oops"; }
  EXPECT_EQ(run_cli("principal --beta 1 --n 2", "ANGULON_CACHE=" + env_dir.string()).code, 1);
  fs::remove_all(env_dir);
  fs::remove_all(flag_dir);
}

TEST(Binary, QuickPlanFinishesInTime) {
  const auto t0 = std::chrono::steady_clock::now();
  const Result r = run_cli("verify --all --quick --format csv --seed 1");
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_LT(secs, 300.0);
  EXPECT_EQ(r.out.find("fail"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("calogero,beta=2 n=3,pass"), std::string::npos);
}
