// Command-line front end: run, sweep, and verify subcommands over the
// shared-library C interface. Exit codes: 0 success, 1 usage or input
// error, 2 numerical failure (non-convergence or a failed verification).

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "upfair.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumeric = 2;

struct SourceOpts {
  std::string path;
  bool table1 = false;
  bool global_domain = false;
  double rate = 0.0;
  bool rate_set = false;
};

struct EngineOpts {
  double delta = 1e-3;
  double damping = 1.0;
  int max_rounds = 10000;
};

void add_source_flags(CLI::App* cmd, SourceOpts* src) {
  cmd->add_option("scenario", src->path, "scenario file to load");
  cmd->add_flag("--table1", src->table1, "use the built-in three-cell scenario");
  cmd->add_flag("--global-domain", src->global_domain,
                "pool every sector under one coordinator instead of per-cell");
}

void add_engine_flags(CLI::App* cmd, EngineOpts* eng) {
  cmd->add_option("--delta", eng->delta, "convergence threshold on aggregate bids")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--damping", eng->damping, "bid update weight in (0, 1]")
      ->check(CLI::Range(1e-6, 1.0));
  cmd->add_option("--max-rounds", eng->max_rounds, "bidding round limit")
      ->check(CLI::PositiveNumber);
}

upfair_config make_config(const EngineOpts& eng) {
  upfair_config cfg;
  upfair_config_default(&cfg);
  cfg.delta = eng.delta;
  cfg.damping = eng.damping;
  cfg.max_rounds = eng.max_rounds;
  return cfg;
}

int complain(const char* what) {
  std::fprintf(stderr, "error: %s: %s\n", what, upfair_last_error());
  return kExitUsage;
}

// Builds the scenario handle from the flags; returns nullptr after printing
// a diagnostic. Ownership passes to the caller.
upfair_scenario* open_scenario(const SourceOpts& src) {
  if (src.table1 == !src.path.empty()) {
    std::fprintf(stderr,
                 "error: provide exactly one of --table1 or a scenario path\n");
    return nullptr;
  }
  upfair_scenario* s = nullptr;
  upfair_status st = src.table1 ? upfair_scenario_table1(&s)
                                : upfair_scenario_load(src.path.c_str(), &s);
  if (st != UPFAIR_OK) {
    complain("scenario");
    return nullptr;
  }
  if (src.global_domain && upfair_scenario_pool_domains(s) != UPFAIR_OK) {
    complain("pooling");
    upfair_scenario_free(s);
    return nullptr;
  }
  if (src.rate_set && upfair_scenario_set_rate(s, src.rate) != UPFAIR_OK) {
    complain("rate");
    upfair_scenario_free(s);
    return nullptr;
  }
  return s;
}

// Per-domain convergence summary; rows arrive grouped by domain.
void print_summary(const upfair_result* res) {
  const char* last = "";
  size_t n = upfair_result_row_count(res);
  int runs = 0, ok = 0;
  for (size_t i = 0; i < n; ++i) {
    upfair_row row;
    if (upfair_result_row(res, i, &row) != UPFAIR_OK) break;
    if (std::string(last) == row.domain && i > 0) continue;
    last = row.domain;
    ++runs;
    ok += row.converged;
    if (row.converged) {
      std::printf("domain %s (R=%g): converged in %d rounds\n", row.domain,
                  row.total_rate, row.rounds);
    } else {
      std::printf("domain %s (R=%g): no fixed point within %d rounds\n",
                  row.domain, row.total_rate, row.rounds);
    }
  }
  std::printf("%d/%d domain runs converged\n", ok, runs);
}

int write_out(const upfair_result* res, const upfair_scenario* s,
              const std::string& out) {
  if (out.empty()) return kExitOk;
  if (upfair_result_write_csv(res, upfair_scenario_name(s), out.c_str()) !=
      UPFAIR_OK) {
    return complain("output");
  }
  std::printf("wrote %s (%zu rows)\n", out.c_str(), upfair_result_row_count(res));
  return kExitOk;
}

int cmd_run(const SourceOpts& src, const EngineOpts& eng, const std::string& out) {
  upfair_scenario* s = open_scenario(src);
  if (s == nullptr) return kExitUsage;
  upfair_config cfg = make_config(eng);
  upfair_result* res = nullptr;
  if (upfair_run(s, &cfg, &res) != UPFAIR_OK) {
    upfair_scenario_free(s);
    return complain("run");
  }
  print_summary(res);
  int rc = write_out(res, s, out);
  if (rc == kExitOk && upfair_result_converged(res) == 0) rc = kExitNumeric;
  upfair_result_free(res);
  upfair_scenario_free(s);
  return rc;
}

int cmd_sweep(const SourceOpts& src, const EngineOpts& eng, double start,
              double end, double step, const std::string& out) {
  upfair_scenario* s = open_scenario(src);
  if (s == nullptr) return kExitUsage;
  // Unset grid flags inherit the scenario's own sweep when it has one.
  double gs = 0, ge = 0, gp = 0;
  if (upfair_scenario_sweep_grid(s, &gs, &ge, &gp) != UPFAIR_OK) {
    gs = 50.0;
    ge = 1150.0;
    gp = 50.0;
  }
  if (std::isnan(start)) start = gs;
  if (std::isnan(end)) end = ge;
  if (std::isnan(step)) step = gp;

  upfair_config cfg = make_config(eng);
  upfair_result* res = nullptr;
  if (upfair_sweep(s, &cfg, start, end, step, &res) != UPFAIR_OK) {
    upfair_scenario_free(s);
    return complain("sweep");
  }
  std::printf("sweep %g..%g step %g\n", start, end, step);
  print_summary(res);
  int rc = write_out(res, s, out);
  if (rc == kExitOk && upfair_result_converged(res) == 0) rc = kExitNumeric;
  upfair_result_free(res);
  upfair_scenario_free(s);
  return rc;
}

int cmd_verify(const SourceOpts& src, const EngineOpts& eng, int trials,
               double tolerance) {
  upfair_scenario* s = open_scenario(src);
  if (s == nullptr) return kExitUsage;
  if (std::isnan(tolerance)) tolerance = std::fmax(1e-2, 10.0 * eng.delta);
  upfair_config cfg = make_config(eng);
  upfair_verify_result* v = nullptr;
  if (upfair_verify(s, &cfg, trials, tolerance, &v) != UPFAIR_OK) {
    upfair_scenario_free(s);
    return complain("verify");
  }
  double worst = 0.0;
  for (size_t i = 0; i < upfair_verify_row_count(v); ++i) {
    upfair_verify_row row;
    if (upfair_verify_get_row(v, i, &row) != UPFAIR_OK) break;
    if (row.gap > worst) worst = row.gap;
    std::printf("%-6s %-4s distributed %12.6f  centralized %12.6f  gap %.3e\n",
                row.user, row.domain, row.distributed, row.centralized, row.gap);
  }
  std::printf("engine: %s\n",
              upfair_verify_converged(v) ? "converged" : "NOT converged");
  if (trials > 0) {
    std::printf("certify: %s (%d trials)\n",
                upfair_verify_certified(v) ? "pass" : "FAIL", trials);
  } else {
    std::printf("certify: skipped\n");
  }
  int rc = upfair_verify_passed(v) ? kExitOk : kExitNumeric;
  std::printf("verdict: %s (worst gap %.3e, tolerance %.3e)\n",
              rc == kExitOk ? "PASS" : "FAIL", worst, tolerance);
  upfair_verify_free(v);
  upfair_scenario_free(s);
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"utility-proportional-fair rate allocation over bidding rounds"};
  app.require_subcommand(1);

  SourceOpts src;
  EngineOpts eng;
  std::string out;
  double start = NAN, end = NAN, step = NAN;
  int trials = 1000;
  double tolerance = NAN;

  CLI::App* run = app.add_subcommand("run", "single allocation at a fixed rate");
  add_source_flags(run, &src);
  add_engine_flags(run, &eng);
  run->add_option("--rate", src.rate, "total rate per domain")
      ->check(CLI::PositiveNumber);
  run->add_option("--out", out, "results CSV path");

  CLI::App* sweep = app.add_subcommand("sweep", "allocations over a rate grid");
  add_source_flags(sweep, &src);
  add_engine_flags(sweep, &eng);
  sweep->add_option("--start", start, "first rate")->check(CLI::PositiveNumber);
  sweep->add_option("--end", end, "last rate")->check(CLI::PositiveNumber);
  sweep->add_option("--step", step, "rate increment")->check(CLI::PositiveNumber);
  sweep->add_option("--out", out, "results CSV path");

  CLI::App* verify =
      app.add_subcommand("verify", "compare against the centralized reference");
  add_source_flags(verify, &src);
  add_engine_flags(verify, &eng);
  verify->add_option("--rate", src.rate, "total rate per domain")
      ->check(CLI::PositiveNumber);
  verify->add_option("--trials", trials, "perturbation trials (0 skips)")
      ->check(CLI::NonNegativeNumber);
  verify->add_option("--tolerance", tolerance,
                     "per-user allowance vs the reference");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  src.rate_set = run->count("--rate") > 0 || verify->count("--rate") > 0;
  if (run->parsed()) return cmd_run(src, eng, out);
  if (sweep->parsed()) return cmd_sweep(src, eng, start, end, step, out);
  return cmd_verify(src, eng, trials, tolerance);
}
