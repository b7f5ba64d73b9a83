#include <CLI11.hpp>

#include <iostream>

#include "angulon/cli.hpp"

int main(int argc, char** argv) {
  using namespace angulon::cli;
  CLI::App app{"Angular integrals: principal terms, evaluation, Monte Carlo and identity checks"};
  CliConfig c;
  std::string format = "json";
  std::string beta, x, y, suite, cache;
  int n = 0;
  std::uint64_t samples = 0;
  std::size_t points = 0;

  app.add_option("command", c.command, "principal | tau | eval | mc | moments | verify")->required();
  auto* o_beta = app.add_option("--beta", beta, "beta (integer; 1/2, 1, 2 for mc)");
  auto* o_n = app.add_option("--n", n, "matrix size");
  auto* o_x = app.add_option("--x", x, "comma-separated x spectrum");
  auto* o_y = app.add_option("--y", y, "comma-separated y spectrum");
  auto* o_samples = app.add_option("--samples", samples, "Monte Carlo samples");
  app.add_option("--seed", c.seed, "random seed");
  app.add_option("--format", format, "json | csv | text")->check(CLI::IsMember({"json", "csv", "text"}));
  auto* o_cache = app.add_option("--cache-dir", cache, "principal-term cache directory");
  app.add_flag("--no-cache", c.no_cache, "do not read or write the cache");
  app.add_option("--jobs", c.jobs, "worker threads")->check(CLI::PositiveNumber);
  auto* o_suite = app.add_option("--suite", suite, "verify suite");
  auto* f_quick = app.add_flag("--quick", c.quick, "small verify plan");
  auto* f_full = app.add_flag("--full", c.full, "complete verify plan");
  f_quick->excludes(f_full);
  app.add_flag("--all", c.all, "run every suite");
  app.add_flag("--expand", c.expand, "also print the x,y polynomial");
  auto* o_points = app.add_option("--points", points, "random points per exact check");
  app.add_option("--sigma", c.sigma, "Monte Carlo agreement threshold in standard errors");
  app.add_option("--duality-tol", c.duality_tol, "duality deviation bound");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  if (*o_beta) c.beta = beta;
  if (*o_n) c.n = n;
  if (*o_x) c.x = x;
  if (*o_y) c.y = y;
  if (*o_samples) c.samples = samples;
  if (*o_cache) c.cache_dir = cache;
  if (*o_suite) c.suite = suite;
  if (*o_points) c.points = points;
  c.format = parse_format(format);
  return run(c, std::cout, std::cerr);
}
